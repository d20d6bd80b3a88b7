#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ewcheck/tensor.hpp"

namespace ew {

enum class CatalogId { Flat, Case1, Case2, GeneralAnsatz, Toda };

enum class Verdict { Flat, Case1, Case2, NotScalarFlat, NotEW };
const char* to_string(Verdict v);

/// A Weyl structure: representative metric h and one-form omega encoding the
/// torsion-free connection D with D_i h_jk = omega_i h_jk.
struct WeylStructure {
    Chart chart;
    Metric h;
    Tensor omega;  // (down), weight 0
    int orientation = 1;
    RefPoint refpoint{1, 1, 1};
    std::optional<CatalogId> origin;

    WeylStructure(Chart c, Metric metric, Tensor om, int orient = 1, RefPoint ref = {1, 1, 1},
                  std::optional<CatalogId> org = std::nullopt)
        : chart(std::move(c)), h(std::move(metric)), omega(std::move(om)), orientation(orient),
          refpoint(std::move(ref)), origin(org) {}
};

/// Gamma^k_ij of the Levi-Civita connection of h.
Tensor christoffel(const Metric& h);

/// Ricci tensor and scalar of the Levi-Civita connection.
std::pair<Tensor, Expr> ricci_lc(const Metric& h);

/// nabla_i v_j for a one-form (gamma = christoffel(h)).
Tensor covariant_derivative_oneform(const Tensor& gamma, const Tensor& v);
/// nabla_i v^j, returned with slots (down, up).
Tensor covariant_derivative_vector(const Tensor& gamma, const Tensor& v);

/// Faraday two-form F_ij = nabla_[i omega_j] = (d omega)_ij / 2.
Tensor faraday(const Tensor& omega);

/// Ricci tensor W_ij of the Weyl connection, from the closed formula in
/// terms of Riemannian data.
Tensor weyl_ricci(const WeylStructure& s);

/// Weyl scalar W = r + 2 nabla^k omega_k - omega^k omega_k / 2; identically
/// equal to h^{ij} W_ij (asserted by the test suite).
Expr weyl_scalar(const WeylStructure& s);

/// Einstein-Weyl residual chi_ij: the trace-free symmetrized Ricci tensor of
/// the Weyl connection, written in Riemannian data. Symmetric and trace-free
/// by construction; identically zero exactly when (h, omega) is EW.
Tensor ew_residual(const WeylStructure& s);

/// D_i V_j for a weighted one-form of weight m.
Tensor weighted_derivative_oneform(const WeylStructure& s, const Tensor& v, const Rational& m);
/// D_i V^j for a weighted vector of weight m, slots (down, up).
Tensor weighted_derivative_vector(const WeylStructure& s, const Tensor& v, const Rational& m);

/// Residual of the contracted Bianchi identity of the Weyl connection,
/// B_j = nabla^i F_ij + omega^i F_ij/2 + (nabla_j W + omega_j W)/3
///       - 2 nabla^i chi_ij + omega^i chi_ij.
/// Identically zero for every Weyl structure; on EW structures the chi terms
/// vanish and this is the F/W form used by the null-Faraday argument. The
/// engine's strongest self-test.
Tensor bianchi_residual(const WeylStructure& s);

/// (F^{ij} F_ij, omega^i omega^j F_ij).
std::pair<Expr, Expr> nullity(const WeylStructure& s);

/// Connection coefficients of D itself:
/// Gamma^D{}^k_ij = Gamma^k_ij - (delta^k_i omega_j + delta^k_j omega_i - h_ij omega^k)/2.
Tensor weyl_connection(const WeylStructure& s);

/// Full curvature tensor R^i_jkl of the Weyl connection D.
Tensor weyl_curvature(const WeylStructure& s);

/// (phi^2 h, omega + 2 dphi/phi). Throws ZeroConformalFactor.
WeylStructure conformal_rescale(const WeylStructure& s, const Expr& phi);
/// Same gauge change parameterized by the square: (Omega h, omega + dOmega/Omega).
WeylStructure conformal_rescale_square(const WeylStructure& s, const Expr& omega_factor);

struct Classification {
    Verdict verdict;
    std::optional<Tensor> alpha;     // Case1: closed one-form with P = alpha (x) *F
    std::optional<Tensor> parallel;  // P_ij = D_i(*F)_j at weight 3/2 (non-flat cases)
};

/// Prop-2 classification of a scalar-flat EW structure.
/// Throws NotScalarFlat / NotEW when the preconditions fail, NotAdapted when
/// *F is not closed in the chart.
Classification classify(const WeylStructure& s);

struct CurvatureReport {
    Tensor christoffel;           // Gamma^k_ij of h
    Tensor ricci;                 // R_ij
    Expr ricci_scalar;            // r
    Tensor wricci;                // W_ij
    Expr wscalar;                 // W
    Tensor chi;                   // chi_ij
    Tensor F;                     // F_ij
    Tensor starF;                 // (*F)_i
    std::pair<Expr, Expr> nullity_pair;
    Tensor bianchi;               // B_j
    Tensor curvature;             // R(D)^i_jkl
    Verdict verdict;
    std::optional<Tensor> alpha;
    std::vector<Expr> excluded_loci;  // squarefree denominator factors
};

/// Assemble the full report; component computations run through the parallel
/// kernel (see parallel.hpp) and are exact either way.
CurvatureReport compute_report(const WeylStructure& s);

/// D_i h_jk - omega_i h_jk with D built from weyl_connection; identically
/// zero by construction (compatibility self-test).
Tensor weyl_compatibility_residual(const WeylStructure& s);

}  // namespace ew
