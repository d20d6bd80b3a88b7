#include "ewcheck/weyl.hpp"

#include <set>

#include "ewcheck/errors.hpp"
#include "ewcheck/parallel.hpp"

namespace ew {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Flat: return "Flat";
        case Verdict::Case1: return "Case1";
        case Verdict::Case2: return "Case2";
        case Verdict::NotScalarFlat: return "NotScalarFlat";
        case Verdict::NotEW: return "NotEW";
    }
    return "?";
}

namespace {

Expr zero_of(const Chart& c) { return Expr::constant(Rational(0), c.table); }

// Shared Levi-Civita data so the report pipeline computes Gamma and Ricci
// once. Public operations build it on demand.
struct LCData {
    Tensor gamma;      // Gamma^k_ij
    Tensor ricci;      // R_ij
    Expr r;            // h^{ij} R_ij
    Tensor nabla_om;   // nabla_i omega_j
    Tensor omega_up;   // omega^i
    Expr div_omega;    // nabla^k omega_k
    Expr omega_sq;     // omega^k omega_k
};

Tensor christoffel_impl(const Metric& h) {
    const Chart& chart = h.chart();
    auto coords = chart.table->coords();

    // dh[k][i][j] = d_k h_ij
    std::vector<Expr> dh(27, zero_of(chart));
    par::for_index(27, [&](size_t f) {
        int k = static_cast<int>(f / 9), i = static_cast<int>((f / 3) % 3), j = static_cast<int>(f % 3);
        dh[f] = h(i, j).diff(coords[k]);
    });
    auto d = [&](int k, int i, int j) -> const Expr& { return dh[(k * 3 + i) * 3 + j]; };

    Tensor gamma(chart, {Slot::Up, Slot::Down, Slot::Down});
    par::for_index(27, [&](size_t f) {
        int k = static_cast<int>(f / 9), i = static_cast<int>((f / 3) % 3), j = static_cast<int>(f % 3);
        if (i > j) return;  // symmetric in (i, j); mirrored below
        Expr sum = zero_of(chart);
        for (int l = 0; l < 3; ++l) {
            if (h.up(k, l).is_zero()) continue;
            sum += h.up(k, l) * (d(i, j, l) + d(j, i, l) - d(l, i, j));
        }
        gamma.at({k, i, j}) = sum / 2;
    });
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < i; ++j) gamma.at({k, i, j}) = gamma(k, j, i);
    return gamma;
}

std::pair<Tensor, Expr> ricci_impl(const Metric& h, const Tensor& gamma) {
    const Chart& chart = h.chart();
    auto coords = chart.table->coords();

    // dg[d][k][i][j] = d_d Gamma^k_ij
    std::vector<Expr> dg(81, zero_of(chart));
    par::for_index(81, [&](size_t f) {
        int d = static_cast<int>(f / 27), k = static_cast<int>((f / 9) % 3);
        int i = static_cast<int>((f / 3) % 3), j = static_cast<int>(f % 3);
        if (i > j) return;
        dg[f] = gamma(k, i, j).diff(coords[d]);
    });
    auto dgam = [&](int d, int k, int i, int j) -> const Expr& {
        return i <= j ? dg[((d * 3 + k) * 3 + i) * 3 + j] : dg[((d * 3 + k) * 3 + j) * 3 + i];
    };

    Tensor ric(chart, {Slot::Down, Slot::Down});
    par::for_index(9, [&](size_t f) {
        int i = static_cast<int>(f / 3), j = static_cast<int>(f % 3);
        Expr sum = zero_of(chart);
        for (int k = 0; k < 3; ++k) sum += dgam(k, k, i, j) - dgam(i, k, k, j);
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
                if (!gamma(k, k, l).is_zero() && !gamma(l, i, j).is_zero())
                    sum += gamma(k, k, l) * gamma(l, i, j);
                if (!gamma(k, i, l).is_zero() && !gamma(l, k, j).is_zero())
                    sum -= gamma(k, i, l) * gamma(l, k, j);
            }
        ric.at({i, j}) = std::move(sum);
    });
    return {ric, metric_trace(ric, h)};
}

LCData lc_data(const WeylStructure& s) {
    LCData d{christoffel_impl(s.h), Tensor(), Expr(), Tensor(), Tensor(), Expr(), Expr()};
    auto [ric, r] = ricci_impl(s.h, d.gamma);
    d.ricci = std::move(ric);
    d.r = std::move(r);
    d.nabla_om = covariant_derivative_oneform(d.gamma, s.omega);
    d.omega_up = raise_index(s.omega, 0, s.h);
    d.div_omega = metric_trace(d.nabla_om, s.h);
    Expr osq = zero_of(s.chart);
    for (int i = 0; i < 3; ++i) osq += d.omega_up(i) * s.omega(i);
    d.omega_sq = std::move(osq);
    return d;
}

Tensor weyl_ricci_impl(const WeylStructure& s, const LCData& d) {
    const Chart& chart = s.chart;
    Expr trace_part = d.div_omega / 2 - d.omega_sq / 4;
    Tensor w(chart, {Slot::Down, Slot::Down});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            w.at({i, j}) = d.ricci(i, j) + d.nabla_om(i, j) - d.nabla_om(j, i) / 2 +
                           s.omega(i) * s.omega(j) / 4 + s.h(i, j) * trace_part;
    return w;
}

Expr weyl_scalar_impl(const WeylStructure&, const LCData& d) {
    return d.r + 2 * d.div_omega - d.omega_sq / 2;
}

Tensor ew_residual_impl(const WeylStructure& s, const LCData& d) {
    const Chart& chart = s.chart;
    Expr trace_part = (d.r + d.div_omega / 2 + d.omega_sq / 4) / 3;
    Tensor chi(chart, {Slot::Down, Slot::Down});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            chi.at({i, j}) = d.ricci(i, j) + (d.nabla_om(i, j) + d.nabla_om(j, i)) / 4 +
                             s.omega(i) * s.omega(j) / 4 - s.h(i, j) * trace_part;
    return chi;
}

// Residual of the contracted second Bianchi identity of the Weyl connection
// in Riemannian data:
//
//   nabla^i F_ij + omega^i F_ij / 2 + (nabla_j W + omega_j W)/3
//     = 2 nabla^i chi_ij - omega^i chi_ij
//
// identically, for every (h, omega). On Einstein-Weyl structures chi == 0 and
// the left-hand side alone vanishes, which is the form quoted for the
// null-Faraday argument.
Tensor bianchi_impl(const WeylStructure& s, const LCData& d) {
    const Chart& chart = s.chart;
    auto coords = chart.table->coords();
    Tensor f = faraday(s.omega);
    Expr w = weyl_scalar_impl(s, d);
    Tensor chi = ew_residual_impl(s, d);

    // nabla_k F_ij and nabla_k chi_ij
    std::vector<Expr> nf(27, zero_of(chart)), nchi(27, zero_of(chart));
    par::for_index(54, [&](size_t fl) {
        const Tensor& src = fl < 27 ? f : chi;
        std::vector<Expr>& dst = fl < 27 ? nf : nchi;
        size_t at = fl % 27;
        int k = static_cast<int>(at / 9), i = static_cast<int>((at / 3) % 3), j = static_cast<int>(at % 3);
        Expr v = src(i, j).diff(coords[k]);
        for (int l = 0; l < 3; ++l) {
            if (!d.gamma(l, k, i).is_zero()) v -= d.gamma(l, k, i) * src(l, j);
            if (!d.gamma(l, k, j).is_zero()) v -= d.gamma(l, k, j) * src(i, l);
        }
        dst[at] = std::move(v);
    });

    Tensor b(chart, {Slot::Down});
    par::for_index(3, [&](size_t jf) {
        int j = static_cast<int>(jf);
        Expr v = zero_of(chart);
        for (int i = 0; i < 3; ++i) {
            for (int k = 0; k < 3; ++k)
                if (!s.h.up(i, k).is_zero())
                    v += s.h.up(i, k) * (nf[(k * 3 + i) * 3 + j] - 2 * nchi[(k * 3 + i) * 3 + j]);
            if (!d.omega_up(i).is_zero()) v += d.omega_up(i) * (f(i, j) / 2 + chi(i, j));
        }
        v += (w.diff(coords[j]) + s.omega(j) * w) / 3;
        b.at({j}) = std::move(v);
    });
    return b;
}

Tensor weyl_connection_impl(const WeylStructure& s, const LCData& d) {
    Tensor gd = d.gamma;
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Expr corr = s.h(i, j) * d.omega_up(k);
                if (k == i) corr -= s.omega(j);
                if (k == j) corr -= s.omega(i);
                gd.at({k, i, j}) = gd(k, i, j) + corr / 2;
            }
    return gd;
}

Tensor curvature_of_connection(const Chart& chart, const Tensor& g) {
    auto coords = chart.table->coords();
    // dgd[d][i][j][k] = d_d G^i_jk
    std::vector<Expr> dg(81, zero_of(chart));
    par::for_index(81, [&](size_t f) {
        int d = static_cast<int>(f / 27), i = static_cast<int>((f / 9) % 3);
        int j = static_cast<int>((f / 3) % 3), k = static_cast<int>(f % 3);
        if (j > k) return;  // torsion-free
        dg[f] = g(i, j, k).diff(coords[d]);
    });
    auto dgam = [&](int d, int i, int j, int k) -> const Expr& {
        return j <= k ? dg[((d * 3 + i) * 3 + j) * 3 + k] : dg[((d * 3 + i) * 3 + k) * 3 + j];
    };

    // R^i_jkl = d_k G^i_lj - d_l G^i_kj + G^i_km G^m_lj - G^i_lm G^m_kj
    Tensor curv(chart, {Slot::Up, Slot::Down, Slot::Down, Slot::Down});
    par::for_index(81, [&](size_t f) {
        int i = static_cast<int>(f / 27), j = static_cast<int>((f / 9) % 3);
        int k = static_cast<int>((f / 3) % 3), l = static_cast<int>(f % 3);
        if (k >= l) return;  // antisymmetric in (k, l); diagonal stays zero
        Expr v = dgam(k, i, l, j) - dgam(l, i, k, j);
        for (int m = 0; m < 3; ++m) {
            if (!g(i, k, m).is_zero() && !g(m, l, j).is_zero()) v += g(i, k, m) * g(m, l, j);
            if (!g(i, l, m).is_zero() && !g(m, k, j).is_zero()) v -= g(i, l, m) * g(m, k, j);
        }
        curv.at({i, j, k, l}) = std::move(v);
    });
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < k; ++l) curv.at({i, j, k, l}) = -curv(i, j, l, k);
    return curv;
}

}  // namespace

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

Tensor christoffel(const Metric& h) { return christoffel_impl(h); }

std::pair<Tensor, Expr> ricci_lc(const Metric& h) { return ricci_impl(h, christoffel_impl(h)); }

Tensor covariant_derivative_oneform(const Tensor& gamma, const Tensor& v) {
    const Chart& chart = v.chart();
    auto coords = chart.table->coords();
    Tensor out(chart, {Slot::Down, Slot::Down});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Expr e = v(j).diff(coords[i]);
            for (int k = 0; k < 3; ++k)
                if (!gamma(k, i, j).is_zero()) e -= gamma(k, i, j) * v(k);
            out.at({i, j}) = std::move(e);
        }
    return out;
}

Tensor covariant_derivative_vector(const Tensor& gamma, const Tensor& v) {
    const Chart& chart = v.chart();
    auto coords = chart.table->coords();
    Tensor out(chart, {Slot::Down, Slot::Up});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Expr e = v(j).diff(coords[i]);
            for (int k = 0; k < 3; ++k)
                if (!gamma(j, i, k).is_zero()) e += gamma(j, i, k) * v(k);
            out.at({i, j}) = std::move(e);
        }
    return out;
}

Tensor faraday(const Tensor& omega) {
    if (omega.rank() != 1) throw Error("faraday expects a one-form");
    Tensor f = exterior_derivative(omega);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) f.at({i, j}) = f(i, j) / 2;
    return f;
}

Tensor weyl_ricci(const WeylStructure& s) { return weyl_ricci_impl(s, lc_data(s)); }

Expr weyl_scalar(const WeylStructure& s) { return weyl_scalar_impl(s, lc_data(s)); }

Tensor ew_residual(const WeylStructure& s) { return ew_residual_impl(s, lc_data(s)); }

Tensor weighted_derivative_oneform(const WeylStructure& s, const Tensor& v, const Rational& m) {
    if (v.rank() != 1 || v.valence()[0] != Slot::Down) throw Error("weighted derivative expects a one-form");
    Tensor gamma = christoffel_impl(s.h);
    Tensor nabla = covariant_derivative_oneform(gamma, v);
    Tensor vup = raise_index(v, 0, s.h);
    Expr ov = zero_of(s.chart);
    for (int k = 0; k < 3; ++k) ov += s.omega(k) * vup(k);
    Expr one_minus_m = Expr::constant(Rational(1) - m, s.chart.table);

    Tensor out(s.chart, {Slot::Down, Slot::Down});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out.at({i, j}) = nabla(i, j) +
                             (one_minus_m * s.omega(i) * v(j) + s.omega(j) * v(i) - s.h(i, j) * ov) / 2;
    return out;
}

Tensor weighted_derivative_vector(const WeylStructure& s, const Tensor& v, const Rational& m) {
    if (v.rank() != 1 || v.valence()[0] != Slot::Up) throw Error("weighted derivative expects a vector");
    Tensor gamma = christoffel_impl(s.h);
    Tensor nabla = covariant_derivative_vector(gamma, v);
    Tensor vdown = lower_index(v, 0, s.h);
    Tensor omega_up = raise_index(s.omega, 0, s.h);
    Expr ov = zero_of(s.chart);
    for (int k = 0; k < 3; ++k) ov += s.omega(k) * v(k);
    Expr mp1_half = Expr::constant((m + 1) / 2, s.chart.table);

    Tensor out(s.chart, {Slot::Down, Slot::Up});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Expr e = nabla(i, j) - mp1_half * s.omega(i) * v(j) + omega_up(j) * vdown(i) / 2;
            if (i == j) e -= ov / 2;
            out.at({i, j}) = std::move(e);
        }
    return out;
}

Tensor bianchi_residual(const WeylStructure& s) { return bianchi_impl(s, lc_data(s)); }

std::pair<Expr, Expr> nullity(const WeylStructure& s) {
    Tensor f = faraday(s.omega);
    Tensor fup = raise_index(raise_index(f, 0, s.h), 1, s.h);
    Tensor omega_up = raise_index(s.omega, 0, s.h);
    Expr ff = zero_of(s.chart), oof = zero_of(s.chart);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (!fup(i, j).is_zero()) ff += fup(i, j) * f(i, j);
            if (!f(i, j).is_zero()) oof += omega_up(i) * omega_up(j) * f(i, j);
        }
    return {ff, oof};
}

Tensor weyl_connection(const WeylStructure& s) { return weyl_connection_impl(s, lc_data(s)); }

Tensor weyl_curvature(const WeylStructure& s) {
    return curvature_of_connection(s.chart, weyl_connection_impl(s, lc_data(s)));
}

WeylStructure conformal_rescale(const WeylStructure& s, const Expr& phi) {
    if (phi.is_zero()) throw ZeroConformalFactor();
    auto coords = s.chart.table->coords();
    Tensor g = s.h.tensor().scaled(phi * phi);
    Tensor om = s.omega;
    for (int i = 0; i < 3; ++i) om.at({i}) = s.omega(i) + 2 * phi.diff(coords[i]) / phi;
    return WeylStructure(s.chart, Metric(std::move(g)), std::move(om), s.orientation, s.refpoint);
}

WeylStructure conformal_rescale_square(const WeylStructure& s, const Expr& omega_factor) {
    if (omega_factor.is_zero()) throw ZeroConformalFactor();
    auto coords = s.chart.table->coords();
    Tensor g = s.h.tensor().scaled(omega_factor);
    Tensor om = s.omega;
    for (int i = 0; i < 3; ++i) om.at({i}) = s.omega(i) + omega_factor.diff(coords[i]) / omega_factor;
    return WeylStructure(s.chart, Metric(std::move(g)), std::move(om), s.orientation, s.refpoint);
}

Classification classify(const WeylStructure& s) {
    LCData d = lc_data(s);
    if (!weyl_scalar_impl(s, d).is_zero()) throw NotScalarFlat();
    if (!ew_residual_impl(s, d).all_zero()) throw NotEW();
    if (curvature_of_connection(s.chart, weyl_connection_impl(s, d)).all_zero())
        return Classification{Verdict::Flat, std::nullopt, std::nullopt};

    Tensor f = faraday(s.omega);
    Tensor beta = hodge_star_two_form(f, s.h, s.orientation, s.refpoint);
    if (!exterior_derivative(beta).all_zero())
        throw NotAdapted("*F is not closed in this chart; the parallelism test requires the adapted form");
    if (beta.all_zero())
        throw NotAdapted("*F vanishes identically on a non-flat structure");

    Tensor p = weighted_derivative_oneform(s, beta, Rational(3, 2));

    // Rank-1 factorization P_ij = alpha_i beta_j, exact over the fraction
    // field: recover alpha by division at a nonzero beta component, then
    // verify every entry.
    int pivot = -1;
    for (int j = 0; j < 3; ++j)
        if (!beta(j).is_zero()) {
            pivot = j;
            break;
        }
    Tensor alpha(s.chart, {Slot::Down});
    for (int i = 0; i < 3; ++i) alpha.at({i}) = p(i, pivot) / beta(pivot);
    bool rank1 = true;
    for (int i = 0; i < 3 && rank1; ++i)
        for (int j = 0; j < 3 && rank1; ++j)
            if (!(p(i, j) == alpha(i) * beta(j))) rank1 = false;

    if (rank1 && exterior_derivative(alpha).all_zero())
        return Classification{Verdict::Case1, alpha, p};
    return Classification{Verdict::Case2, std::nullopt, p};
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

namespace {

Polynomial squarefree_part(const Polynomial& p) {
    Polynomial g = p;
    for (VarId v : p.vars()) g = poly_gcd(g, p.derivative(v));
    if (g.is_one()) return p.primitive_part();
    return divide_exact(p, g)->primitive_part();
}

void collect_locus(std::vector<Expr>& out, std::set<std::string>& seen, const TablePtr& tab, const Expr& e) {
    if (e.den().is_constant()) return;
    Expr sf = Expr::from_poly(tab, squarefree_part(e.den()));
    if (seen.insert(sf.to_string()).second) out.push_back(sf);
}

}  // namespace

Tensor weyl_compatibility_residual(const WeylStructure& s) {
    Tensor gd = weyl_connection(s);
    auto coords = s.chart.table->coords();
    Tensor out(s.chart, {Slot::Down, Slot::Down, Slot::Down});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                Expr v = s.h(j, k).diff(coords[i]) - s.omega(i) * s.h(j, k);
                for (int l = 0; l < 3; ++l) v -= gd(l, i, j) * s.h(l, k) + gd(l, i, k) * s.h(j, l);
                out.at({i, j, k}) = std::move(v);
            }
    return out;
}

CurvatureReport compute_report(const WeylStructure& s) {
    LCData d = lc_data(s);
    CurvatureReport rep{
        d.gamma,
        d.ricci,
        d.r,
        weyl_ricci_impl(s, d),
        weyl_scalar_impl(s, d),
        ew_residual_impl(s, d),
        faraday(s.omega),
        Tensor(),
        {},
        bianchi_impl(s, d),
        curvature_of_connection(s.chart, weyl_connection_impl(s, d)),
        Verdict::Flat,
        std::nullopt,
        {},
    };
    rep.starF = hodge_star_two_form(rep.F, s.h, s.orientation, s.refpoint);
    rep.nullity_pair = nullity(s);

    if (!rep.wscalar.is_zero()) {
        rep.verdict = Verdict::NotScalarFlat;
    } else if (!rep.chi.all_zero()) {
        rep.verdict = Verdict::NotEW;
    } else if (rep.curvature.all_zero()) {
        rep.verdict = Verdict::Flat;
    } else {
        Classification c = classify(s);
        rep.verdict = c.verdict;
        rep.alpha = c.alpha;
    }

    std::set<std::string> seen;
    const TablePtr& tab = s.chart.table;
    auto scan = [&](const Tensor& t) {
        for (size_t i = 0; i < t.size(); ++i) collect_locus(rep.excluded_loci, seen, tab, t.slot(i));
    };
    scan(s.h.tensor());
    scan(s.omega);
    collect_locus(rep.excluded_loci, seen, tab, s.h.det());
    scan(s.h.inverse());
    scan(rep.ricci);
    collect_locus(rep.excluded_loci, seen, tab, rep.ricci_scalar);
    scan(rep.wricci);
    collect_locus(rep.excluded_loci, seen, tab, rep.wscalar);
    scan(rep.chi);
    scan(rep.F);
    scan(rep.starF);
    scan(rep.curvature);
    return rep;
}

}  // namespace ew
