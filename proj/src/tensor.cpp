#include "ewcheck/tensor.hpp"

#include <set>

#include "ewcheck/errors.hpp"

namespace ew {

namespace {

size_t pow3(size_t rank) {
    size_t n = 1;
    for (size_t i = 0; i < rank; ++i) n *= 3;
    return n;
}

}  // namespace

Tensor::Tensor(Chart chart, std::vector<Slot> valence, Rational weight)
    : chart_(std::move(chart)), valence_(std::move(valence)), weight_(std::move(weight)) {
    if (valence_.size() > 4) throw Error("tensor rank > 4 is not supported");
    comps_.assign(pow3(valence_.size()), Expr::constant(Rational(0), chart_.table));
}

Tensor Tensor::scalar(Chart chart, Expr value, Rational weight) {
    Tensor t(std::move(chart), {}, std::move(weight));
    t.comps_[0] = std::move(value);
    return t;
}

size_t Tensor::flat(std::initializer_list<int> idx) const {
    if (idx.size() != valence_.size()) throw Error("tensor index arity mismatch");
    size_t f = 0;
    for (int i : idx) {
        if (i < 0 || i > 2) throw Error("tensor index out of range");
        f = f * 3 + static_cast<size_t>(i);
    }
    return f;
}

bool Tensor::all_zero() const {
    for (const auto& c : comps_)
        if (!c.is_zero()) return false;
    return true;
}

Tensor Tensor::operator+(const Tensor& rhs) const {
    if (valence_ != rhs.valence_ || chart_.table != rhs.chart_.table) throw Error("tensor shape mismatch in +");
    Tensor r = *this;
    for (size_t i = 0; i < comps_.size(); ++i) r.comps_[i] = comps_[i] + rhs.comps_[i];
    return r;
}

Tensor Tensor::operator-(const Tensor& rhs) const {
    if (valence_ != rhs.valence_ || chart_.table != rhs.chart_.table) throw Error("tensor shape mismatch in -");
    Tensor r = *this;
    for (size_t i = 0; i < comps_.size(); ++i) r.comps_[i] = comps_[i] - rhs.comps_[i];
    return r;
}

Tensor Tensor::scaled(const Expr& factor) const {
    Tensor r = *this;
    for (auto& c : r.comps_) c = c * factor;
    return r;
}

bool Tensor::operator==(const Tensor& rhs) const {
    return valence_ == rhs.valence_ && chart_.table == rhs.chart_.table && comps_ == rhs.comps_;
}

// ---------------------------------------------------------------------------
// Metric
// ---------------------------------------------------------------------------

Metric::Metric(Tensor g) : g_(std::move(g)) {
    if (g_.rank() != 2 || g_.valence()[0] != Slot::Down || g_.valence()[1] != Slot::Down)
        throw Error("metric must be a rank-2 (down,down) tensor");
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (!(g_(i, j) == g_(j, i))) throw Error("metric components are not symmetric");

    det_ = g_(0, 0) * (g_(1, 1) * g_(2, 2) - g_(1, 2) * g_(2, 1)) -
           g_(0, 1) * (g_(1, 0) * g_(2, 2) - g_(1, 2) * g_(2, 0)) +
           g_(0, 2) * (g_(1, 0) * g_(2, 1) - g_(1, 1) * g_(2, 0));
    if (det_.is_zero()) throw SingularMetric();

    inv_ = Tensor(g_.chart(), {Slot::Up, Slot::Up});
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            // cofactor expansion; indices of the 2x2 minor complementary to (j,i)
            int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
            int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            Expr cof = g_(r0, c0) * g_(r1, c1) - g_(r0, c1) * g_(r1, c0);
            inv_.at({i, j}) = cof / det_;
        }
    }
}

Tensor inverse_metric(const Metric& h) { return h.inverse(); }

// ---------------------------------------------------------------------------
// Index gymnastics
// ---------------------------------------------------------------------------

namespace {

Tensor contract_with(const Tensor& t, int slot, const Tensor& g2, Slot new_dir) {
    const int r = t.rank();
    if (slot < 0 || slot >= r) throw Error("index slot out of range");
    std::vector<Slot> val = t.valence();
    val[slot] = new_dir;
    Tensor out(t.chart(), val, t.weight());

    std::vector<int> idx(r, 0);
    const size_t n = out.size();
    for (size_t f = 0; f < n; ++f) {
        size_t rem = f;
        for (int p = r - 1; p >= 0; --p) {
            idx[p] = static_cast<int>(rem % 3);
            rem /= 3;
        }
        Expr sum = Expr::constant(Rational(0), t.chart().table);
        std::vector<int> src = idx;
        for (int k = 0; k < 3; ++k) {
            src[slot] = k;
            size_t sf = 0;
            for (int p = 0; p < r; ++p) sf = sf * 3 + static_cast<size_t>(src[p]);
            sum += g2(idx[slot], k) * t.slot(sf);
        }
        out.slot(f) = std::move(sum);
    }
    return out;
}

}  // namespace

Tensor raise_index(const Tensor& t, int slot, const Metric& h) {
    if (t.valence().at(slot) != Slot::Down) throw Error("raise_index: slot is already up");
    return contract_with(t, slot, h.inverse(), Slot::Up);
}

Tensor lower_index(const Tensor& t, int slot, const Metric& h) {
    if (t.valence().at(slot) != Slot::Up) throw Error("lower_index: slot is already down");
    return contract_with(t, slot, h.tensor(), Slot::Down);
}

// ---------------------------------------------------------------------------
// Levi-Civita density
// ---------------------------------------------------------------------------

namespace {

// Exact sign of e at the reference point. Formal function symbols receive a
// fixed generic instantiation (sum of squared dependencies plus one); this is
// only ever used to pick the orientation sign.
int sign_at_refpoint(const Expr& e, const RefPoint& p) {
    const TablePtr& tab = e.table();
    if (!tab) {
        Rational v = e.constant_value();
        return sgn(v);
    }
    std::set<SymbolId> bases;
    for (VarId v : e.num().vars()) {
        SymbolData d = tab->symbol(v);
        if (d.kind == SymbolKind::Function) bases.insert(d.base);
        if (d.kind == SymbolKind::Custom)
            throw IndefiniteDeterminantSign("determinant contains a custom symbol; no reference value available");
    }
    for (VarId v : e.den().vars()) {
        SymbolData d = tab->symbol(v);
        if (d.kind == SymbolKind::Function) bases.insert(d.base);
        if (d.kind == SymbolKind::Custom)
            throw IndefiniteDeterminantSign("determinant contains a custom symbol; no reference value available");
    }
    Expr inst = e;
    if (!bases.empty()) {
        std::map<SymbolId, Expr> bind;
        for (SymbolId b : bases) {
            Expr val = Expr::constant(Rational(1), tab);
            for (SymbolId dep : tab->symbol(b).deps) {
                Expr c = Expr::variable(tab, dep);
                val += c * c;
            }
            bind.emplace(b, val);
        }
        inst = e.substitute(bind);
    }
    auto coords = tab->coords();
    Rational value;
    try {
        value = inst.eval_rational([&](SymbolId s) -> std::optional<Rational> {
            for (int i = 0; i < 3; ++i)
                if (coords[i] == s) return p[i];
            return std::nullopt;
        });
    } catch (const PoleAtPoint&) {
        throw IndefiniteDeterminantSign("determinant has a pole at the reference point");
    } catch (const UnboundSymbol&) {
        throw IndefiniteDeterminantSign("determinant sign is not decidable at the reference point");
    }
    if (value == 0) throw IndefiniteDeterminantSign("determinant vanishes at the reference point");
    return sgn(value);
}

// sqrt(|det|) as an exact expression, adjoining the square-root symbol when
// |det| is not a perfect square in the ring.
Expr sqrt_abs(const Expr& absdet, const TablePtr& tab, const RefPoint& refpoint) {
    Polynomial prod = absdet.num() * absdet.den();
    if (auto root = sqrt_exact(prod)) {
        Expr r = Expr::fraction(tab, *root, absdet.den());
        if (sign_at_refpoint(r, refpoint) < 0) r = -r;
        return r;
    }
    bool fresh = !tab->sigma().has_value();
    SymbolId s = tab->adjoin_sigma("sqrtdet", prod);
    if (fresh) {
        Expr sig = Expr::variable(tab, s);
        Expr p = Expr::from_poly(tab, prod);
        for (SymbolId c : tab->coords()) {
            Expr dp = p.diff(c);
            if (!dp.is_zero()) tab->set_custom_rule(s, c, dp * sig / (2 * p));
        }
    }
    // sigma evaluates to +sqrt(prod); fix the branch so sigma/den > 0 at the
    // reference point.
    Expr den = Expr::from_poly(tab, absdet.den());
    int branch = sign_at_refpoint(den, refpoint);
    Expr r = Expr::variable(tab, s) / den;
    return branch < 0 ? -r : r;
}

int perm_sign(int i, int j, int k) {
    if (i == j || j == k || i == k) return 0;
    return ((j - i) * (k - i) * (k - j) > 0) ? 1 : -1;
}

}  // namespace

Tensor levi_civita(const Metric& h, int orientation, const RefPoint& refpoint) {
    if (orientation != 1 && orientation != -1) throw Error("orientation must be +1 or -1");
    const Expr& det = h.det();
    int s = sign_at_refpoint(det, refpoint);
    Expr absdet = s < 0 ? -det : det;
    Expr density = sqrt_abs(absdet, h.chart().table, refpoint);
    if (orientation < 0) density = -density;

    Tensor eps(h.chart(), {Slot::Down, Slot::Down, Slot::Down});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                int sg = perm_sign(i, j, k);
                if (sg == 1)
                    eps.at({i, j, k}) = density;
                else if (sg == -1)
                    eps.at({i, j, k}) = -density;
            }
    return eps;
}

// ---------------------------------------------------------------------------
// Hodge star, symmetrizers, exterior calculus
// ---------------------------------------------------------------------------

Tensor hodge_star_two_form(const Tensor& f, const Metric& h, const Tensor& eps) {
    if (f.rank() != 2) throw Error("hodge_star_two_form expects a rank-2 tensor");
    // F^{jk} = h^{jl} h^{km} F_lm
    Tensor fup = raise_index(raise_index(f, 0, h), 1, h);
    Tensor star(f.chart(), {Slot::Down});
    for (int i = 0; i < 3; ++i) {
        Expr sum = Expr::constant(Rational(0), f.chart().table);
        for (int l = 0; l < 3; ++l)
            for (int m = 0; m < 3; ++m)
                if (!eps(i, l, m).is_zero()) sum += eps(i, l, m) * fup(l, m);
        star.at({i}) = std::move(sum);
    }
    return star;
}

Tensor hodge_star_two_form(const Tensor& f, const Metric& h, int orientation, const RefPoint& refpoint) {
    return hodge_star_two_form(f, h, levi_civita(h, orientation, refpoint));
}

Tensor sym2(const Tensor& t) {
    if (t.rank() != 2) throw Error("sym2 expects a rank-2 tensor");
    Tensor r = t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.at({i, j}) = (t(i, j) + t(j, i)) / 2;
    return r;
}

Tensor antisym2(const Tensor& t) {
    if (t.rank() != 2) throw Error("antisym2 expects a rank-2 tensor");
    Tensor r = t;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.at({i, j}) = (t(i, j) - t(j, i)) / 2;
    return r;
}

Expr metric_trace(const Tensor& t, const Metric& h) {
    if (t.rank() != 2) throw Error("metric_trace expects a rank-2 tensor");
    Expr tr = Expr::constant(Rational(0), t.chart().table);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) tr += h.up(i, j) * t(i, j);
    return tr;
}

Tensor tracefree(const Tensor& t, const Metric& h) {
    Expr tr = metric_trace(t, h) / 3;
    return t - h.tensor().scaled(tr);
}

Tensor exterior_derivative(const Tensor& t) {
    const auto& tab = t.chart().table;
    auto coords = tab->coords();
    if (t.rank() == 0) {
        Tensor d(t.chart(), {Slot::Down});
        for (int i = 0; i < 3; ++i) d.at({i}) = t().diff(coords[i]);
        return d;
    }
    if (t.rank() == 1) {
        if (t.valence()[0] != Slot::Down) throw Error("exterior_derivative expects a one-form");
        Tensor d(t.chart(), {Slot::Down, Slot::Down});
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i < j) {
                    Expr v = t(j).diff(coords[i]) - t(i).diff(coords[j]);
                    d.at({i, j}) = v;
                    d.at({j, i}) = -v;
                } else if (i == j) {
                    d.at({i, j}) = Expr::constant(Rational(0), tab);
                }
        return d;
    }
    throw Error("exterior_derivative supports scalars and one-forms only");
}

Expr wedge(const Tensor& one_form, const Tensor& two_form) {
    if (one_form.rank() != 1 || two_form.rank() != 2) throw Error("wedge expects a one-form and a two-form");
    const Tensor b = antisym2(two_form);
    return one_form(0) * b(1, 2) + one_form(1) * b(2, 0) + one_form(2) * b(0, 1);
}

Tensor wedge11(const Tensor& a, const Tensor& b) {
    if (a.rank() != 1 || b.rank() != 1) throw Error("wedge11 expects two one-forms");
    Tensor r(a.chart(), {Slot::Down, Slot::Down});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.at({i, j}) = a(i) * b(j) - a(j) * b(i);
    return r;
}

}  // namespace ew
