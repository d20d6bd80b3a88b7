#pragma once

#include "ewcheck/weyl.hpp"

namespace ew {

/// Chart (y, x, t) with formal function symbols R(t), S(t).
struct CaseChart {
    Chart chart;
    Expr R, S;
};
CaseChart make_case_chart();

/// Chart (v, w, z) with a formal function symbol R(v).
struct TodaChart {
    Chart chart;
    Expr R;
};
TodaChart make_toda_chart();

/// h = dy^2 + 2 dx dt, omega = 0.
WeylStructure flat();

/// h1 = dy^2 + 2 dx dt + (x(R - y/2) + y^4/48 + R y^3/12 + S y) dt^2, omega = y dt.
WeylStructure case1();
WeylStructure case1(const Chart& chart, const Expr& R, const Expr& S);

/// h2 = dy^2 + 2 dx dt - (4x/y) dy dt + (x^2/y^2 + x y/2 + y^4/8 + R y^2 + S y) dt^2,
/// omega = y dt. Excluded locus y = 0.
WeylStructure case2();
WeylStructure case2(const Chart& chart, const Expr& R, const Expr& S);

/// h = dy^2 + 2 dx dt + 2 F dy dt + G dt^2, omega = y dt.
WeylStructure general_ansatz(const Chart& chart, const Expr& F, const Expr& G);

/// h = 4 (z+R(v))^2/(1+vw)^2 dv dw + dz^2, omega = 4/(z+R(v)) dz.
WeylStructure toda_structure();
WeylStructure toda_structure(const Chart& chart, const Expr& R);

/// Toda-form structure from a rational kernel N (u = 2 log N by contract):
/// h = N^2 dv dw + dz^2, omega = (4 N_z / N) dz.
WeylStructure toda_structure_from_kernel(const Chart& chart, const Expr& N);

/// Coordinate/conformal gauge change generated by t -> T(t) (with explicitly
/// supplied rational inverse) and x -> x + P(y, t). Implemented as the exact
/// coordinate pullback followed by the conformal change with factor T_t^2, so
/// EW and scalar-flatness verdicts are preserved by construction.
WeylStructure apply_gauge_transform(const WeylStructure& s, const Expr& T, const Expr& Tinv,
                                    const Expr& P);

/// 4 u_vw + (e^u)_zz for u = 2 log N: 4 (2 N_v / N)_w + (N^2)_zz.
Expr toda_residual(const Expr& N);

/// u_zz/2 + u_z^2/4 with u_z = 2 N_z / N.
Expr toda_weyl_scalar(const Expr& N);

/// The covariantly constant weighted vector of a case-1 structure:
/// V = f d/dx with f_t = -R f / 2 adjoined, weight -1/2.
std::pair<Tensor, Rational> dkp_constant_vector(const WeylStructure& s);

}  // namespace ew
