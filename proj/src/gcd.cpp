#include <algorithm>
#include <cstdlib>

#include "ewcheck/errors.hpp"
#include "ewcheck/poly.hpp"

// Multivariate GCD over Q[vars] by recursion on one variable at a time:
// content/primitive-part splitting plus a subresultant polynomial remainder
// sequence (Brown's algorithm) for the primitive parts. Coefficient growth
// stays controlled by the subresultant divisions, which are exact by
// construction. Perfectly adequate for the low-degree rational functions this
// engine manipulates; no modular or sparse-interpolation machinery.

namespace ew {

namespace {

Polynomial normalize_unit(const Polynomial& p) {
    if (p.is_zero()) return p;
    return p.primitive_part();
}

// Common monomial factor of all terms of p.
Exponents monomial_content(const Polynomial& p) {
    Exponents m = p.terms().front().exps;
    for (const auto& t : p.terms()) {
        size_t n = std::min(m.size(), t.exps.size());
        m.resize(n);
        for (size_t i = 0; i < n; ++i) m[i] = std::min(m[i], t.exps[i]);
        while (!m.empty() && m.back() == 0) m.pop_back();
        if (m.empty()) break;
    }
    return m;
}

Polynomial shift_down(const Polynomial& p, const Exponents& m) {
    if (m.empty()) return p;
    std::vector<Term> out;
    out.reserve(p.size());
    for (const auto& t : p.terms()) {
        Term s = t;
        for (size_t i = 0; i < m.size(); ++i) s.exps[i] -= m[i];
        while (!s.exps.empty() && s.exps.back() == 0) s.exps.pop_back();
        out.push_back(std::move(s));
    }
    return Polynomial::from_terms(std::move(out));
}

Polynomial monomial_poly(const Exponents& m) {
    if (m.empty()) return Polynomial(Rational(1));
    return Polynomial::from_terms({Term{Rational(1), m}});
}

// Dense recursive view in the main variable.
struct RecPoly {
    std::vector<Polynomial> c;  // c[k] is the coefficient of v^k

    int deg() const { return static_cast<int>(c.size()) - 1; }
    const Polynomial& lc() const { return c.back(); }
    bool is_zero() const { return c.empty(); }
    void normalize() {
        while (!c.empty() && c.back().is_zero()) c.pop_back();
    }
};

RecPoly to_rec(const Polynomial& p, VarId v) {
    RecPoly r;
    r.c = p.coeffs_in(v);
    r.normalize();
    return r;
}

Polynomial from_rec(const RecPoly& r, VarId v) { return Polynomial::from_coeffs_in(v, r.c); }

RecPoly rec_mul_coef(const RecPoly& a, const Polynomial& m) {
    RecPoly r;
    r.c.reserve(a.c.size());
    for (const auto& k : a.c) r.c.push_back(k * m);
    r.normalize();
    return r;
}

RecPoly rec_sub(const RecPoly& a, const RecPoly& b) {
    RecPoly r;
    r.c.resize(std::max(a.c.size(), b.c.size()));
    for (size_t i = 0; i < r.c.size(); ++i) {
        if (i < a.c.size()) r.c[i] += a.c[i];
        if (i < b.c.size()) r.c[i] -= b.c[i];
    }
    r.normalize();
    return r;
}

// prem(a, b) = lc(b)^(deg a - deg b + 1) * a  mod  b, computed iteratively.
RecPoly pseudo_rem(RecPoly a, const RecPoly& b) {
    int d = a.deg() - b.deg();
    int steps = 0;
    while (!a.is_zero() && a.deg() >= b.deg()) {
        int shift = a.deg() - b.deg();
        const Polynomial lead = a.lc();
        a = rec_mul_coef(a, b.lc());
        RecPoly sub;
        sub.c.assign(shift, Polynomial());
        for (const auto& k : b.c) sub.c.push_back(k * lead);
        sub.normalize();
        a = rec_sub(a, sub);
        ++steps;
    }
    // Match the exact prem normalization lc(b)^(d+1).
    for (; steps < d + 1; ++steps) a = rec_mul_coef(a, b.lc());
    return a;
}

Polynomial rec_content(const RecPoly& p) {
    Polynomial g;
    for (const auto& k : p.c) g = poly_gcd(g, k);
    return g;
}

RecPoly rec_div_coef_exact(const RecPoly& a, const Polynomial& d) {
    RecPoly r;
    r.c.reserve(a.c.size());
    for (const auto& k : a.c) {
        auto q = divide_exact(k, d);
        if (!q) throw Error("internal: inexact division in subresultant PRS");
        r.c.push_back(std::move(*q));
    }
    return r;
}

// GCD of the primitive parts with respect to v via the subresultant PRS.
Polynomial prs_gcd(RecPoly a, RecPoly b, VarId v) {
    if (a.deg() < b.deg()) std::swap(a, b);
    Polynomial g(Rational(1)), h(Rational(1));
    for (;;) {
        int d = a.deg() - b.deg();
        RecPoly r = pseudo_rem(a, b);
        if (r.is_zero()) {
            Polynomial out = from_rec(b, v);
            auto cont = rec_content(b);
            auto q = divide_exact(out, cont);
            return normalize_unit(*q);
        }
        if (r.deg() == 0) return Polynomial(Rational(1));  // coprime over the coefficient ring
        a = std::move(b);
        Polynomial divisor = g * h.pow(static_cast<uint32_t>(d));
        b = rec_div_coef_exact(r, divisor);
        g = a.lc();
        if (d == 0) {
            // h unchanged
        } else if (d == 1) {
            h = g;
        } else {
            auto q = divide_exact(g.pow(static_cast<uint32_t>(d)), h.pow(static_cast<uint32_t>(d - 1)));
            if (!q) throw Error("internal: inexact h update in subresultant PRS");
            h = std::move(*q);
        }
    }
}

}  // namespace

Polynomial poly_gcd(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero()) return normalize_unit(b);
    if (b.is_zero()) return normalize_unit(a);
    if (a.is_constant() || b.is_constant()) return Polynomial(Rational(1));

    // Split off the common monomial factor first; it is both cheap and the
    // dominant case for the denominators this engine produces.
    Exponents ma = monomial_content(a), mb = monomial_content(b);
    Exponents mc(std::min(ma.size(), mb.size()), 0);
    for (size_t i = 0; i < mc.size(); ++i) mc[i] = std::min(ma[i], mb[i]);
    while (!mc.empty() && mc.back() == 0) mc.pop_back();
    Polynomial pa = shift_down(a, ma), pb = shift_down(b, mb);

    Polynomial core;
    if (pa.is_constant() || pb.is_constant()) {
        core = Polynomial(Rational(1));
    } else if (pa == pb) {
        core = normalize_unit(pa);
    } else {
        auto va = pa.vars(), vb = pb.vars();
        std::vector<VarId> common;
        std::set_intersection(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(common));
        if (common.empty()) {
            core = Polynomial(Rational(1));
        } else {
            // Main variable: smallest worst-case degree keeps the PRS short.
            VarId v = common[0];
            uint32_t best = std::min(pa.degree_in(v), pb.degree_in(v));
            for (VarId w : common) {
                uint32_t m = std::min(pa.degree_in(w), pb.degree_in(w));
                if (m < best) best = m, v = w;
            }
            RecPoly ra = to_rec(pa, v), rb = to_rec(pb, v);
            Polynomial ca = rec_content(ra), cb = rec_content(rb);
            Polynomial cc = poly_gcd(ca, cb);
            RecPoly ppa = rec_div_coef_exact(ra, ca), ppb = rec_div_coef_exact(rb, cb);
            core = cc * prs_gcd(std::move(ppa), std::move(ppb), v);
        }
    }
    return normalize_unit(monomial_poly(mc) * core);
}

}  // namespace ew
