#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ewcheck/weyl.hpp"

namespace ew {

/// A rational evaluation point plus the instantiation of formal function
/// symbols by concrete polynomial expressions. Jets are derived from the base
/// bindings by differentiation, so instantiations are jet-coherent by
/// construction.
struct SamplePoint {
    std::array<Rational, 3> coords;
    std::map<SymbolId, Expr> instantiation;
};

/// Fixed generic instantiation used for cross-checks: R -> t^2 + 1,
/// S -> t - 1, any other function symbol -> (sum of its dependencies)^2 + 1.
std::map<SymbolId, Expr> default_instantiation(const TablePtr& table);

/// Exact substitution of the instantiation and the point, then one final
/// conversion to IEEE double. Throws PoleAtPoint on a vanishing denominator.
double eval(const Expr& e, const SamplePoint& p);

/// The structure with its function symbols instantiated (components become
/// coordinate-only rational functions over the same chart).
WeylStructure instantiate(const WeylStructure& s, const std::map<SymbolId, Expr>& instantiation);

struct NumericCurvature {
    std::array<std::array<std::array<double, 3>, 3>, 3> gamma;  // [k][i][j]
    std::array<std::array<double, 3>, 3> ricci;
    double r = 0;
    std::array<std::array<double, 3>, 3> wricci;
    double w = 0;
    std::array<std::array<double, 3>, 3> chi;
};

/// Curvature by central finite differences (second order): Christoffels from
/// differenced metric values, Ricci from nested differences, Weyl quantities
/// from the same closed formulas as the symbolic path with numeric
/// ingredients. `step` is scaled per coordinate by (1 + |coordinate|).
NumericCurvature fd_curvature(const WeylStructure& s, const SamplePoint& p, double step = 1e-4);

struct CrossCheckRow {
    std::string quantity;
    int point = 0;
    double symbolic = 0;
    double numeric = 0;
    double rel_error = 0;
    bool pass = true;
};

struct CrossCheckReport {
    std::vector<CrossCheckRow> rows;
    double tol = 0;
    double max_rel_error = 0;
    bool pass = true;
};

/// Compare symbolically-evaluated Gamma, R_ij, r, W and chi against the
/// finite-difference oracle at every point. Relative error is
/// |a-b| / (1 + max(|a|,|b|)). All points must share one instantiation.
CrossCheckReport cross_check(const WeylStructure& s, const std::vector<SamplePoint>& points, double tol,
                             double step = 1e-4);

/// Sum of |fd - symbolic| over the Ricci components at one point; used by the
/// convergence-order check (the ratio between steps h and h/2 is ~4).
double ricci_fd_error(const WeylStructure& s, const SamplePoint& p, double step);

/// Seeded sample points avoiding every denominator of the (instantiated)
/// structure and its determinant by at least `margin`.
std::vector<SamplePoint> random_sample_points(const WeylStructure& s, int n, uint64_t seed,
                                              double margin = 0.0625);

}  // namespace ew
