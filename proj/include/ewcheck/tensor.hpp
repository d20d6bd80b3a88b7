#pragma once

#include <array>
#include <initializer_list>
#include <vector>

#include "ewcheck/expr.hpp"

namespace ew {

/// A chart: three ordered coordinates (owned by the symbol table) plus the
/// declared signature pattern, which is informational only.
struct Chart {
    TablePtr table;
    std::vector<int> signature;  // e.g. {+1, +1, -1}; may be empty

    std::array<SymbolId, 3> coords() const { return table->coords(); }
    SymbolId coord(int i) const { return table->coord(i); }
};

enum class Slot { Up, Down };

/// Dense tensor of rank <= 4 over a chart, with an explicit conformal weight.
/// Weight is bookkeeping only: no operation rescales components implicitly.
class Tensor {
  public:
    Tensor() = default;
    Tensor(Chart chart, std::vector<Slot> valence, Rational weight = 0);

    static Tensor scalar(Chart chart, Expr value, Rational weight = 0);

    const Chart& chart() const { return chart_; }
    const std::vector<Slot>& valence() const { return valence_; }
    int rank() const { return static_cast<int>(valence_.size()); }
    const Rational& weight() const { return weight_; }
    void set_weight(Rational w) { weight_ = std::move(w); }

    const Expr& at(std::initializer_list<int> idx) const { return comps_[flat(idx)]; }
    Expr& at(std::initializer_list<int> idx) { return comps_[flat(idx)]; }
    const Expr& operator()() const { return comps_[0]; }
    const Expr& operator()(int i) const { return comps_[i]; }
    const Expr& operator()(int i, int j) const { return comps_[i * 3 + j]; }
    const Expr& operator()(int i, int j, int k) const { return comps_[(i * 3 + j) * 3 + k]; }
    const Expr& operator()(int i, int j, int k, int l) const { return comps_[((i * 3 + j) * 3 + k) * 3 + l]; }
    Expr& slot(size_t flat_index) { return comps_[flat_index]; }
    const Expr& slot(size_t flat_index) const { return comps_[flat_index]; }
    size_t size() const { return comps_.size(); }

    bool all_zero() const;

    Tensor operator+(const Tensor& rhs) const;
    Tensor operator-(const Tensor& rhs) const;
    Tensor scaled(const Expr& factor) const;

    bool operator==(const Tensor& rhs) const;

  private:
    size_t flat(std::initializer_list<int> idx) const;

    Chart chart_;
    std::vector<Slot> valence_;
    Rational weight_ = 0;
    std::vector<Expr> comps_;
};

/// Symmetric nondegenerate rank-2 metric with cached inverse and determinant.
class Metric {
  public:
    explicit Metric(Tensor g);  // throws SingularMetric / Error on bad input

    const Chart& chart() const { return g_.chart(); }
    const Tensor& tensor() const { return g_; }
    const Tensor& inverse() const { return inv_; }
    const Expr& det() const { return det_; }
    const Expr& operator()(int i, int j) const { return g_(i, j); }
    const Expr& up(int i, int j) const { return inv_(i, j); }

  private:
    Tensor g_;    // (down, down)
    Tensor inv_;  // (up, up)
    Expr det_;
};

using RefPoint = std::array<Rational, 3>;

Tensor inverse_metric(const Metric& h);  // the cached (up,up) inverse

Tensor raise_index(const Tensor& t, int slot, const Metric& h);
Tensor lower_index(const Tensor& t, int slot, const Metric& h);

/// eps_ijk = orientation * sqrt(|det h|) * sign(ijk). The sign of det h is
/// decided by exact evaluation at the reference point (formal function
/// symbols get a fixed generic instantiation for the sign decision only).
/// When |det h| is not a perfect square in the ring, a square-root symbol is
/// adjoined to the chart's table and the density stays exact.
Tensor levi_civita(const Metric& h, int orientation, const RefPoint& refpoint = {1, 1, 1});

/// (*F)_i = eps_i^{jk} F_jk, no 1/2 factor (paper convention).
Tensor hodge_star_two_form(const Tensor& f, const Metric& h, int orientation = 1,
                           const RefPoint& refpoint = {1, 1, 1});
Tensor hodge_star_two_form(const Tensor& f, const Metric& h, const Tensor& eps);

Tensor sym2(const Tensor& t);      // A_(ij) = (A_ij + A_ji)/2
Tensor antisym2(const Tensor& t);  // A_[ij] = (A_ij - A_ji)/2
Tensor tracefree(const Tensor& t, const Metric& h);

/// h^{ij} T_ij for a rank-2 (down,down) tensor.
Expr metric_trace(const Tensor& t, const Metric& h);

/// d on scalars and one-forms; (d alpha)_ij = d_i alpha_j - d_j alpha_i.
Tensor exterior_derivative(const Tensor& t);

/// One-form wedge two-form: the single independent component of the 3-form.
Expr wedge(const Tensor& one_form, const Tensor& two_form);
/// One-form wedge one-form: (a ^ b)_ij = a_i b_j - a_j b_i.
Tensor wedge11(const Tensor& a, const Tensor& b);

}  // namespace ew
