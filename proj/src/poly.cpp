#include "ewcheck/poly.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "ewcheck/errors.hpp"

namespace ew {

namespace {

void trim(Exponents& e) {
    while (!e.empty() && e.back() == 0) e.pop_back();
}

int total_deg(const Exponents& e) {
    long d = 0;
    for (uint32_t x : e) d += x;
    return static_cast<int>(d);
}

Exponents mul_exps(const Exponents& a, const Exponents& b) {
    Exponents r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    return r;  // no trailing zeros: both inputs are trimmed and entries add
}

}  // namespace

int compare_graded_lex(const Exponents& a, const Exponents& b) {
    int da = total_deg(a), db = total_deg(b);
    if (da != db) return da < db ? -1 : 1;
    size_t n = std::max(a.size(), b.size());
    for (size_t i = 0; i < n; ++i) {
        uint32_t xa = i < a.size() ? a[i] : 0;
        uint32_t xb = i < b.size() ? b[i] : 0;
        if (xa != xb) return xa < xb ? -1 : 1;
    }
    return 0;
}

int compare_graded_order(const Exponents& a, const Exponents& b, const std::vector<VarId>& order) {
    int da = total_deg(a), db = total_deg(b);
    if (da != db) return da < db ? -1 : 1;
    for (VarId v : order) {
        uint32_t xa = static_cast<size_t>(v) < a.size() ? a[v] : 0;
        uint32_t xb = static_cast<size_t>(v) < b.size() ? b[v] : 0;
        if (xa != xb) return xa < xb ? -1 : 1;
    }
    return 0;
}

Polynomial::Polynomial(const Rational& c) {
    if (c != 0) terms_.push_back(Term{c, {}});
}

Polynomial Polynomial::variable(VarId v, uint32_t exp) {
    if (exp == 0) return Polynomial(Rational(1));
    Polynomial p;
    Exponents e(static_cast<size_t>(v) + 1, 0);
    e[v] = exp;
    p.terms_.push_back(Term{Rational(1), std::move(e)});
    return p;
}

Polynomial Polynomial::from_terms(std::vector<Term> terms) {
    for (auto& t : terms) trim(t.exps);
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return compare_graded_lex(a.exps, b.exps) > 0; });
    Polynomial p;
    for (auto& t : terms) {
        if (t.coef == 0) continue;
        if (!p.terms_.empty() && p.terms_.back().exps == t.exps) {
            p.terms_.back().coef += t.coef;
            if (p.terms_.back().coef == 0) p.terms_.pop_back();
        } else {
            p.terms_.push_back(std::move(t));
        }
    }
    return p;
}

bool Polynomial::is_one() const {
    return terms_.size() == 1 && terms_[0].exps.empty() && terms_[0].coef == 1;
}

Rational Polynomial::constant_value() const { return terms_.empty() ? Rational(0) : terms_[0].coef; }

int Polynomial::total_degree() const {
    if (terms_.empty()) return -1;
    return total_deg(terms_.front().exps);  // graded order: first term has max degree
}

uint32_t Polynomial::degree_in(VarId v) const {
    uint32_t d = 0;
    for (const auto& t : terms_)
        if (static_cast<size_t>(v) < t.exps.size()) d = std::max(d, t.exps[v]);
    return d;
}

std::vector<VarId> Polynomial::vars() const {
    std::vector<char> seen;
    for (const auto& t : terms_) {
        if (t.exps.size() > seen.size()) seen.resize(t.exps.size(), 0);
        for (size_t i = 0; i < t.exps.size(); ++i)
            if (t.exps[i] > 0) seen[i] = 1;
    }
    std::vector<VarId> out;
    for (size_t i = 0; i < seen.size(); ++i)
        if (seen[i]) out.push_back(static_cast<VarId>(i));
    return out;
}

bool Polynomial::uses_var(VarId v) const {
    for (const auto& t : terms_)
        if (static_cast<size_t>(v) < t.exps.size() && t.exps[v] > 0) return true;
    return false;
}

Polynomial Polynomial::operator-() const {
    Polynomial r = *this;
    for (auto& t : r.terms_) t.coef = -t.coef;
    return r;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    r.terms_.reserve(a.terms_.size() + b.terms_.size());
    size_t i = 0, j = 0;
    while (i < a.terms_.size() && j < b.terms_.size()) {
        int c = compare_graded_lex(a.terms_[i].exps, b.terms_[j].exps);
        if (c > 0) {
            r.terms_.push_back(a.terms_[i++]);
        } else if (c < 0) {
            r.terms_.push_back(b.terms_[j++]);
        } else {
            Rational s = a.terms_[i].coef + b.terms_[j].coef;
            if (s != 0) r.terms_.push_back(Term{std::move(s), a.terms_[i].exps});
            ++i, ++j;
        }
    }
    for (; i < a.terms_.size(); ++i) r.terms_.push_back(a.terms_[i]);
    for (; j < b.terms_.size(); ++j) r.terms_.push_back(b.terms_[j]);
    return r;
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
    *this = *this + rhs;
    return *this;
}
Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
    *this = *this - rhs;
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial();
    if (a.is_constant()) return b.mul_scalar(a.constant_value());
    if (b.is_constant()) return a.mul_scalar(b.constant_value());
    struct Desc {
        bool operator()(const Exponents& x, const Exponents& y) const { return compare_graded_lex(x, y) > 0; }
    };
    std::map<Exponents, Rational, Desc> acc;
    for (const auto& ta : a.terms_) {
        for (const auto& tb : b.terms_) {
            Exponents e = mul_exps(ta.exps, tb.exps);
            auto [it, fresh] = acc.try_emplace(std::move(e), ta.coef * tb.coef);
            if (!fresh) it->second += ta.coef * tb.coef;
        }
    }
    Polynomial r;
    r.terms_.reserve(acc.size());
    for (auto& [e, c] : acc)
        if (c != 0) r.terms_.push_back(Term{std::move(c), e});
    return r;
}

Polynomial Polynomial::pow(uint32_t n) const {
    Polynomial result(Rational(1));
    Polynomial base = *this;
    while (n > 0) {
        if (n & 1u) result = result * base;
        n >>= 1u;
        if (n > 0) base = base * base;
    }
    return result;
}

Polynomial Polynomial::mul_scalar(const Rational& c) const {
    if (c == 0) return Polynomial();
    Polynomial r = *this;
    for (auto& t : r.terms_) t.coef *= c;
    return r;
}

Polynomial Polynomial::div_scalar(const Rational& c) const {
    Polynomial r = *this;
    for (auto& t : r.terms_) t.coef /= c;
    return r;
}

Polynomial Polynomial::derivative(VarId v) const {
    std::vector<Term> out;
    for (const auto& t : terms_) {
        if (static_cast<size_t>(v) >= t.exps.size() || t.exps[v] == 0) continue;
        Term d;
        d.coef = t.coef * t.exps[v];
        d.exps = t.exps;
        d.exps[v] -= 1;
        trim(d.exps);
        out.push_back(std::move(d));
    }
    return from_terms(std::move(out));
}

std::vector<Polynomial> Polynomial::coeffs_in(VarId v) const {
    std::vector<Polynomial> cs(degree_in(v) + 1);
    for (const auto& t : terms_) {
        uint32_t k = static_cast<size_t>(v) < t.exps.size() ? t.exps[v] : 0;
        Term stripped = t;
        if (k > 0) {
            stripped.exps[v] = 0;
            trim(stripped.exps);
        }
        cs[k] += from_terms({std::move(stripped)});
    }
    return cs;
}

Polynomial Polynomial::from_coeffs_in(VarId v, const std::vector<Polynomial>& cs) {
    Polynomial r;
    for (size_t k = 0; k < cs.size(); ++k) {
        if (cs[k].is_zero()) continue;
        r += cs[k] * Polynomial::variable(v, static_cast<uint32_t>(k));
    }
    return r;
}

Rational Polynomial::leading_coef_ordered(const std::vector<VarId>& order) const {
    const Term* best = nullptr;
    for (const auto& t : terms_)
        if (!best || compare_graded_order(t.exps, best->exps, order) > 0) best = &t;
    return best ? best->coef : Rational(0);
}

Rational Polynomial::rational_content() const {
    if (terms_.empty()) return Rational(0);
    Rational g(0);
    for (const auto& t : terms_) g = rational_gcd(g, t.coef);
    if (terms_.front().coef < 0) g = -g;
    return g;
}

Polynomial Polynomial::primitive_part() const {
    if (terms_.empty()) return *this;
    return div_scalar(rational_content());
}

Rational Polynomial::eval(const std::function<Rational(VarId)>& value_of) const {
    // Memoized powers per variable keep repeated exponents cheap.
    std::unordered_map<VarId, std::vector<Rational>> powers;
    auto power = [&](VarId v, uint32_t k) -> const Rational& {
        auto& tower = powers[v];
        if (tower.empty()) tower = {Rational(1), value_of(v)};
        while (tower.size() <= k) tower.push_back(tower.back() * tower[1]);
        return tower[k];
    };
    Rational acc(0);
    for (const auto& t : terms_) {
        Rational m = t.coef;
        for (size_t i = 0; i < t.exps.size(); ++i)
            if (t.exps[i] > 0) m *= power(static_cast<VarId>(i), t.exps[i]);
        acc += m;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Exact division and square root
// ---------------------------------------------------------------------------

std::optional<Polynomial> divide_exact(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) return std::nullopt;
    if (a.is_zero()) return Polynomial();
    if (b.is_constant()) return a.div_scalar(b.constant_value());

    // Long division by leading terms (graded-lex). When b | a this terminates
    // with zero remainder; a failed leading-term division proves b does not
    // divide a.
    Polynomial rem = a;
    std::vector<Term> quo;
    const Term& lb = b.leading_term();
    while (!rem.is_zero()) {
        const Term& lr = rem.leading_term();
        Exponents q(std::max(lr.exps.size(), lb.exps.size()), 0);
        for (size_t i = 0; i < q.size(); ++i) {
            uint32_t xr = i < lr.exps.size() ? lr.exps[i] : 0;
            uint32_t xb = i < lb.exps.size() ? lb.exps[i] : 0;
            if (xr < xb) return std::nullopt;
            q[i] = xr - xb;
        }
        trim(q);
        Term qt{lr.coef / lb.coef, std::move(q)};
        rem -= b * Polynomial::from_terms({qt});
        quo.push_back(std::move(qt));
    }
    return Polynomial::from_terms(std::move(quo));
}

std::optional<Polynomial> sqrt_exact(const Polynomial& p) {
    if (p.is_zero()) return Polynomial();
    if (p.is_constant()) {
        auto r = rational_sqrt(p.constant_value());
        if (!r) return std::nullopt;
        return Polynomial(*r);
    }
    auto vs = p.vars();
    VarId v = vs.back();
    auto cs = p.coeffs_in(v);
    uint32_t d = static_cast<uint32_t>(cs.size()) - 1;
    if (d % 2 != 0) return std::nullopt;
    auto lead = sqrt_exact(cs[d]);
    if (!lead) return std::nullopt;

    // Solve q^2 = p coefficient-by-coefficient in descending powers of v.
    uint32_t half = d / 2;
    std::vector<Polynomial> q(half + 1);
    q[half] = *lead;
    Polynomial two_lead = lead->mul_scalar(Rational(2));
    for (int k = static_cast<int>(half) - 1; k >= 0; --k) {
        Polynomial rhs = cs[k + half];
        for (uint32_t i = k + 1; i < half; ++i) rhs -= q[i] * q[static_cast<uint32_t>(k) + half - i];
        auto bk = divide_exact(rhs, two_lead);
        if (!bk) return std::nullopt;
        q[k] = std::move(*bk);
    }
    Polynomial root = Polynomial::from_coeffs_in(v, q);
    if (root * root == p) return root;
    return std::nullopt;
}

}  // namespace ew
