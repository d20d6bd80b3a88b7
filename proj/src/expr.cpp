#include "ewcheck/expr.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "ewcheck/errors.hpp"

namespace ew {

namespace {

// sigma^k -> sigma_square^(k/2) * sigma^(k%2)
Polynomial reduce_sigma(const Polynomial& p, SymbolId s, const Polynomial& square) {
    if (p.degree_in(s) < 2) return p;
    auto cs = p.coeffs_in(s);
    Polynomial out;
    for (size_t k = 0; k < cs.size(); ++k) {
        if (cs[k].is_zero()) continue;
        Polynomial piece = cs[k] * square.pow(static_cast<uint32_t>(k / 2));
        if (k % 2) piece = piece * Polynomial::variable(s);
        out += piece;
    }
    return out;
}

std::pair<Polynomial, Polynomial> split_sigma(const Polynomial& p, SymbolId s) {
    auto cs = p.coeffs_in(s);
    Polynomial even = cs.size() > 0 ? cs[0] : Polynomial();
    Polynomial odd = cs.size() > 1 ? cs[1] : Polynomial();
    return {even, odd};
}

}  // namespace

TablePtr merge_tables(const TablePtr& a, const TablePtr& b) {
    if (!a) return b;
    if (!b || a == b) return a;
    throw TableMismatch("cannot combine expressions from different charts");
}

Expr::Expr(TablePtr tab, Polynomial num, Polynomial den, bool assume_reduced)
    : tab_(std::move(tab)), num_(std::move(num)), den_(std::move(den)) {
    normalize(assume_reduced);
}

void Expr::normalize(bool assume_reduced) {
    if (tab_) {
        if (auto s = tab_->sigma()) {
            const Polynomial& sq = tab_->sigma_square();
            num_ = reduce_sigma(num_, *s, sq);
            den_ = reduce_sigma(den_, *s, sq);
            if (den_.uses_var(*s)) {
                auto [a, b] = split_sigma(den_, *s);
                Polynomial conj = a - b * Polynomial::variable(*s);
                num_ = reduce_sigma(num_ * conj, *s, sq);
                den_ = a * a - sq * b * b;
                assume_reduced = false;
            }
        }
    }
    if (den_.is_zero()) throw DivisionByZeroExpr();
    if (num_.is_zero()) {
        den_ = Polynomial(Rational(1));
        return;
    }
    if (!assume_reduced && !den_.is_one()) {
        Polynomial g = poly_gcd(num_, den_);
        if (!g.is_one()) {
            num_ = *divide_exact(num_, g);
            den_ = *divide_exact(den_, g);
        }
    }
    Rational lc = tab_ ? den_.leading_coef_ordered(*tab_->ids_by_name()) : den_.leading_term().coef;
    if (lc != 1) {
        num_ = num_.div_scalar(lc);
        den_ = den_.div_scalar(lc);
    }
}

Expr Expr::constant(const Rational& value, TablePtr table) {
    return Expr(std::move(table), Polynomial(value), Polynomial(Rational(1)), true);
}

Expr Expr::variable(const TablePtr& table, SymbolId symbol) {
    if (!table || symbol < 0 || symbol >= table->num_symbols())
        throw UnknownSymbol("variable id is not part of the chart's symbol table");
    return Expr(table, Polynomial::variable(symbol), Polynomial(Rational(1)), true);
}

Expr Expr::from_poly(const TablePtr& table, Polynomial p) {
    return Expr(table, std::move(p), Polynomial(Rational(1)), true);
}

Expr Expr::fraction(const TablePtr& table, Polynomial num, Polynomial den) {
    return Expr(table, std::move(num), std::move(den), false);
}

bool Expr::is_integer_constant() const {
    return is_constant() && constant_value().get_den() == 1;
}

Expr operator+(const Expr& a, const Expr& b) {
    TablePtr t = merge_tables(a.tab_, b.tab_);
    if (a.den_ == b.den_) return Expr(t, a.num_ + b.num_, a.den_, false);
    Polynomial g = poly_gcd(a.den_, b.den_);
    if (g.is_one()) return Expr(t, a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_, false);
    Polynomial bd = *divide_exact(b.den_, g);
    Polynomial ad = *divide_exact(a.den_, g);
    return Expr(t, a.num_ * bd + b.num_ * ad, ad * b.den_, false);
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr Expr::operator-() const {
    Expr r = *this;
    r.num_ = -r.num_;
    return r;
}

Expr operator*(const Expr& a, const Expr& b) {
    TablePtr t = merge_tables(a.tab_, b.tab_);
    if (a.is_zero() || b.is_zero()) return Expr::constant(Rational(0), t);
    // Cross-reduce so the final gcd is trivial.
    Polynomial g1 = poly_gcd(a.num_, b.den_);
    Polynomial g2 = poly_gcd(b.num_, a.den_);
    Polynomial n1 = g1.is_one() ? a.num_ : *divide_exact(a.num_, g1);
    Polynomial d2 = g1.is_one() ? b.den_ : *divide_exact(b.den_, g1);
    Polynomial n2 = g2.is_one() ? b.num_ : *divide_exact(b.num_, g2);
    Polynomial d1 = g2.is_one() ? a.den_ : *divide_exact(a.den_, g2);
    bool sigma_free = !t || !t->sigma() || (!n1.uses_var(*t->sigma()) && !n2.uses_var(*t->sigma()));
    return Expr(t, n1 * n2, d1 * d2, sigma_free);
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero()) throw DivisionByZeroExpr();
    TablePtr t = merge_tables(a.tab_, b.tab_);
    Expr inv(t, b.den_, b.num_, true);
    return a * inv;
}

Expr Expr::pow(long n) const {
    if (n == 0) return Expr::constant(Rational(1), tab_);
    if (n < 0) {
        if (is_zero()) throw DivisionByZeroExpr("zero raised to a negative power");
        return Expr(tab_, den_, num_, true).pow(-n);
    }
    bool sigma_free = !tab_ || !tab_->sigma() || !num_.uses_var(*tab_->sigma());
    return Expr(tab_, num_.pow(static_cast<uint32_t>(n)), den_.pow(static_cast<uint32_t>(n)), sigma_free);
}

bool Expr::operator==(const Expr& rhs) const {
    if (tab_ && rhs.tab_ && tab_ != rhs.tab_) return false;
    return num_ == rhs.num_ && den_ == rhs.den_;
}

// ---------------------------------------------------------------------------
// Differentiation
// ---------------------------------------------------------------------------

namespace {

// d(p)/d(coord) where variables may be jets or carry closed rules.
Expr poly_diff(const TablePtr& tab, const Polynomial& p, SymbolId coord) {
    Expr acc = Expr::constant(Rational(0), tab);
    for (VarId v : p.vars()) {
        auto rule = tab->derivative_rule(v, coord);
        if (rule.kind == SymbolTable::Rule::Zero) continue;
        Polynomial dp = p.derivative(v);
        if (dp.is_zero()) continue;
        switch (rule.kind) {
            case SymbolTable::Rule::One:
                acc += Expr::from_poly(tab, dp);
                break;
            case SymbolTable::Rule::Var:
                acc += Expr::from_poly(tab, dp * Polynomial::variable(rule.var));
                break;
            case SymbolTable::Rule::Closed:
                acc += Expr::from_poly(tab, dp) * (*rule.closed);
                break;
            default:
                break;
        }
    }
    return acc;
}

}  // namespace

Expr Expr::diff(SymbolId coord) const {
    if (!tab_) return Expr();
    if (tab_->coord_index(coord) < 0)
        throw UnknownSymbol("diff target is not a coordinate of this chart");
    Expr dn = poly_diff(tab_, num_, coord);
    if (den_.is_one()) return dn;
    Expr dd = poly_diff(tab_, den_, coord);
    Expr den = from_poly(tab_, den_);
    return (dn * den - from_poly(tab_, num_) * dd) / (den * den);
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

namespace {

std::set<VarId> vars_of(const Polynomial& a, const Polynomial& b) {
    std::set<VarId> vs;
    for (VarId v : a.vars()) vs.insert(v);
    for (VarId v : b.vars()) vs.insert(v);
    return vs;
}

Expr eval_poly_at(const Polynomial& p, const std::map<SymbolId, Expr>& values, const TablePtr& target) {
    Expr acc = Expr::constant(Rational(0), target);
    std::map<SymbolId, std::vector<Expr>> powers;
    auto power = [&](SymbolId v, uint32_t k) -> const Expr& {
        auto& tower = powers[v];
        if (tower.empty()) tower = {Expr::constant(Rational(1), target), values.at(v)};
        while (tower.size() <= k) tower.push_back(tower.back() * tower[1]);
        return tower[k];
    };
    for (const auto& t : p.terms()) {
        Expr m = Expr::constant(t.coef, target);
        for (size_t i = 0; i < t.exps.size(); ++i)
            if (t.exps[i] > 0) m *= power(static_cast<SymbolId>(i), t.exps[i]);
        acc += m;
    }
    return acc;
}

}  // namespace

Expr Expr::substitute(const std::map<SymbolId, Expr>& bindings) const {
    return substitute_impl(bindings, true);
}

Expr Expr::substitute_impl(const std::map<SymbolId, Expr>& bindings, bool check_guards) const {
    if (!tab_ || bindings.empty()) return *this;

    TablePtr target;
    for (const auto& [sym, value] : bindings) {
        (void)sym;
        if (value.table()) target = merge_tables(target, value.table());
    }
    const bool cross = target && target != tab_;
    if (!target) target = tab_;

    const std::set<VarId> vars = vars_of(num_, den_);

    if (auto s = tab_->sigma(); s && vars.count(*s))
        throw TableMismatch("cannot substitute into an expression containing the adjoined square root");

    // Derive the jet binding of a function jet from its base binding.
    auto derive_jet = [&](const SymbolData& d) -> Expr {
        Expr val = bindings.at(d.base);
        for (size_t i = 0; i < d.deps.size(); ++i)
            for (int k = 0; k < d.order[i]; ++k) val = val.diff(d.deps[i]);
        return val;
    };
    auto derivable = [&](const SymbolData& d) {
        if (cross || !bindings.count(d.base)) return false;
        for (SymbolId dep : d.deps)
            if (bindings.count(dep)) return false;  // dependency coordinate rebound
        return true;
    };

    std::map<SymbolId, Expr> full;
    for (VarId v : vars) {
        if (auto it = bindings.find(v); it != bindings.end()) {
            full.emplace(v, it->second);
            continue;
        }
        SymbolData d = tab_->symbol(v);
        if (d.kind == SymbolKind::Function && d.base != v && derivable(d)) {
            full.emplace(v, derive_jet(d));
            continue;
        }
        if (cross)
            throw TableMismatch("symbol '" + d.name + "' is unbound under a table-changing substitution");
        full.emplace(v, Expr::variable(tab_, v));
    }

    if (check_guards && !cross) {
        for (const auto& [sym, value] : bindings) {
            if (!vars.count(sym)) continue;
            SymbolData d = tab_->symbol(sym);
            if (d.kind == SymbolKind::Function) {
                if (d.base == sym) {
                    // Acyclicity: the binding of a base must not mention the
                    // base's own higher jets, or jet derivation diverges.
                    if (value.table() == tab_) {
                        for (VarId w : vars_of(value.num(), value.den())) {
                            SymbolData wd = tab_->symbol(w);
                            if (wd.kind == SymbolKind::Function && wd.base == sym && w != sym)
                                throw InconsistentJetBinding("binding of '" + d.name +
                                                             "' mentions its own jet '" + wd.name + "'");
                        }
                    }
                } else if (derivable(d)) {
                    if (!(derive_jet(d) == value))
                        throw InconsistentJetBinding("explicit binding of '" + d.name +
                                                     "' disagrees with the derivative of its base binding");
                }
            } else if (d.kind == SymbolKind::Custom) {
                for (int ci = 0; ci < 3; ++ci) {
                    SymbolId c = tab_->coord(ci);
                    auto rule = tab_->custom_rule(sym, c);
                    Expr lhs = value.table() ? value.diff(c) : Expr();
                    Expr rhs = rule ? rule->substitute_impl(bindings, false) : Expr();
                    if (!(lhs == rhs))
                        throw InconsistentJetBinding("binding of '" + d.name +
                                                     "' violates its derivative rule along " +
                                                     tab_->coord_name(ci));
                }
            }
        }
    }

    Expr n = eval_poly_at(num_, full, target);
    Expr d = eval_poly_at(den_, full, target);
    return n / d;  // DivisionByZeroExpr when the denominator collapses
}

// ---------------------------------------------------------------------------
// Evaluation and rendering
// ---------------------------------------------------------------------------

Rational Expr::eval_rational(const std::function<std::optional<Rational>(SymbolId)>& value_of) const {
    auto value = [&](VarId v) -> Rational {
        auto r = value_of(v);
        if (!r) throw UnboundSymbol("no value for symbol '" + (tab_ ? tab_->name(v) : std::string("?")) + "'");
        return *r;
    };
    Rational d = den_.eval(value);
    if (d == 0) throw PoleAtPoint("denominator vanishes at the requested point");
    return num_.eval(value) / d;
}

namespace {

std::string symbol_display(const SymbolTable& tab, SymbolId v) {
    SymbolData d = tab.symbol(v);
    if (d.deps.empty()) return d.name;
    std::string s = d.name + "(";
    for (size_t i = 0; i < d.deps.size(); ++i) {
        if (i) s += ",";
        s += tab.symbol(d.deps[i]).name;
    }
    return s + ")";
}

std::string poly_to_string(const Polynomial& p, const TablePtr& tab) {
    if (p.is_zero()) return "0";
    std::vector<const Term*> terms;
    terms.reserve(p.size());
    for (const auto& t : p.terms()) terms.push_back(&t);
    std::vector<SymbolId> order;
    if (tab) order = *tab->ids_by_name();
    std::sort(terms.begin(), terms.end(), [&](const Term* a, const Term* b) {
        return compare_graded_order(a->exps, b->exps, order) > 0;
    });

    std::ostringstream out;
    bool first = true;
    for (const Term* t : terms) {
        Rational c = t->coef;
        if (first) {
            if (c < 0) {
                out << "-";
                c = -c;
            }
        } else {
            out << (c < 0 ? " - " : " + ");
            if (c < 0) c = -c;
        }
        first = false;

        std::vector<std::pair<SymbolId, uint32_t>> factors;
        if (!order.empty()) {
            for (SymbolId v : order)
                if (static_cast<size_t>(v) < t->exps.size() && t->exps[v] > 0) factors.push_back({v, t->exps[v]});
        }
        if (factors.empty()) {
            out << c.get_str();
            continue;
        }
        bool coef_one = c == 1;
        if (!coef_one) out << c.get_str();
        for (size_t i = 0; i < factors.size(); ++i) {
            if (!coef_one || i > 0) out << "*";
            out << symbol_display(*tab, factors[i].first);
            if (factors[i].second > 1) out << "^" << factors[i].second;
        }
    }
    return out.str();
}

}  // namespace

std::string Expr::to_string() const {
    std::string n = poly_to_string(num_, tab_);
    if (den_.is_one()) return n;
    return "(" + n + ")/(" + poly_to_string(den_, tab_) + ")";
}

}  // namespace ew
