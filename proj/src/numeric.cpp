#include "ewcheck/numeric.hpp"

#include <cmath>
#include <random>
#include <set>

#include "ewcheck/errors.hpp"
#include "ewcheck/parallel.hpp"

namespace ew {

namespace {

Rational eval_exact(const Expr& e, const SamplePoint& p) {
    Expr inst = e.substitute(p.instantiation);
    const TablePtr& tab = inst.table();
    if (!tab) return inst.constant_value();
    auto coords = tab->coords();
    return inst.eval_rational([&](SymbolId s) -> std::optional<Rational> {
        for (int i = 0; i < 3; ++i)
            if (coords[i] == s) return p.coords[i];
        return std::nullopt;
    });
}

}  // namespace

std::map<SymbolId, Expr> default_instantiation(const TablePtr& table) {
    std::map<SymbolId, Expr> inst;
    int n = table->num_symbols();
    for (SymbolId s = 0; s < n; ++s) {
        SymbolData d = table->symbol(s);
        if (d.kind != SymbolKind::Function || d.base != s) continue;
        Expr dep_sum = Expr::constant(Rational(0), table);
        for (SymbolId c : d.deps) dep_sum += Expr::variable(table, c);
        if (d.name == "R")
            inst.emplace(s, dep_sum * dep_sum + 1);
        else if (d.name == "S")
            inst.emplace(s, dep_sum - 1);
        else
            inst.emplace(s, dep_sum * dep_sum + 1);
    }
    return inst;
}

double eval(const Expr& e, const SamplePoint& p) { return to_double(eval_exact(e, p)); }

WeylStructure instantiate(const WeylStructure& s, const std::map<SymbolId, Expr>& instantiation) {
    Tensor g = s.h.tensor();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g.at({i, j}) = s.h(i, j).substitute(instantiation);
    Tensor om = s.omega;
    for (int i = 0; i < 3; ++i) om.at({i}) = s.omega(i).substitute(instantiation);
    return WeylStructure(s.chart, Metric(std::move(g)), std::move(om), s.orientation, s.refpoint);
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Gamma3 = std::array<std::array<std::array<double, 3>, 3>, 3>;

struct FdContext {
    std::array<Expr, 9> h;
    std::array<Expr, 3> om;
    std::array<Rational, 3> steps;   // exact step per coordinate
    std::array<double, 3> steps_d;   // the same as doubles
    std::array<SymbolId, 3> coords;
};

Rational rational_of_double(double x) {
    Rational r;
    mpq_set_d(r.get_mpq_t(), x);
    return r;
}

double eval_at(const FdContext& ctx, const Expr& e, const std::array<Rational, 3>& q) {
    Rational den = e.den().eval([&](VarId v) -> Rational {
        for (int i = 0; i < 3; ++i)
            if (ctx.coords[i] == v) return q[i];
        throw UnboundSymbol("unexpected symbol in instantiated component");
    });
    if (den == 0) throw PoleAtPoint("denominator vanishes in the finite-difference stencil");
    Rational num = e.num().eval([&](VarId v) -> Rational {
        for (int i = 0; i < 3; ++i)
            if (ctx.coords[i] == v) return q[i];
        throw UnboundSymbol("unexpected symbol in instantiated component");
    });
    return to_double(num / den);
}

Mat3 metric_at(const FdContext& ctx, const std::array<Rational, 3>& q) {
    Mat3 m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = eval_at(ctx, ctx.h[i * 3 + j], q);
    return m;
}

Mat3 invert3(const Mat3& m) {
    double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                 m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                 m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (det == 0) throw PoleAtPoint("metric is numerically singular at the requested point");
    Mat3 inv{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    return inv;
}

std::array<Rational, 3> shifted(const std::array<Rational, 3>& q, int axis, const Rational& delta) {
    auto out = q;
    out[axis] += delta;
    return out;
}

// Christoffels at q from centrally differenced metric derivatives.
Gamma3 gamma_at(const FdContext& ctx, const std::array<Rational, 3>& q) {
    Mat3 hinv = invert3(metric_at(ctx, q));
    double dh[3][3][3];  // [k][i][j] = d_k h_ij
    for (int k = 0; k < 3; ++k) {
        Mat3 hp = metric_at(ctx, shifted(q, k, ctx.steps[k]));
        Mat3 hm = metric_at(ctx, shifted(q, k, -ctx.steps[k]));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) dh[k][i][j] = (hp[i][j] - hm[i][j]) / (2 * ctx.steps_d[k]);
    }
    Gamma3 g{};
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double sum = 0;
                for (int l = 0; l < 3; ++l) sum += hinv[k][l] * (dh[i][j][l] + dh[j][i][l] - dh[l][i][j]);
                g[k][i][j] = sum / 2;
            }
    return g;
}

}  // namespace

NumericCurvature fd_curvature(const WeylStructure& s, const SamplePoint& p, double step) {
    WeylStructure inst = p.instantiation.empty() ? s : instantiate(s, p.instantiation);
    FdContext ctx;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ctx.h[i * 3 + j] = inst.h(i, j);
    for (int i = 0; i < 3; ++i) ctx.om[i] = inst.omega(i);
    ctx.coords = s.chart.table->coords();
    for (int i = 0; i < 3; ++i) {
        double scaled = step * (1.0 + std::abs(to_double(p.coords[i])));
        ctx.steps[i] = rational_of_double(scaled);
        ctx.steps_d[i] = scaled;
    }
    const auto& q = p.coords;

    NumericCurvature out{};
    out.gamma = gamma_at(ctx, q);

    // d_d Gamma^k_ij by nested central differences.
    double dgam[3][3][3][3];
    for (int d = 0; d < 3; ++d) {
        Gamma3 gp = gamma_at(ctx, shifted(q, d, ctx.steps[d]));
        Gamma3 gm = gamma_at(ctx, shifted(q, d, -ctx.steps[d]));
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    dgam[d][k][i][j] = (gp[k][i][j] - gm[k][i][j]) / (2 * ctx.steps_d[d]);
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double sum = 0;
            for (int k = 0; k < 3; ++k) sum += dgam[k][k][i][j] - dgam[i][k][k][j];
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    sum += out.gamma[k][k][l] * out.gamma[l][i][j] - out.gamma[k][i][l] * out.gamma[l][k][j];
            out.ricci[i][j] = sum;
        }

    Mat3 hinv = invert3(metric_at(ctx, q));
    Mat3 hval = metric_at(ctx, q);
    out.r = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out.r += hinv[i][j] * out.ricci[i][j];

    // omega and nabla omega.
    std::array<double, 3> omv{};
    for (int i = 0; i < 3; ++i) omv[i] = eval_at(ctx, ctx.om[i], q);
    double dom[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double vp = eval_at(ctx, ctx.om[j], shifted(q, i, ctx.steps[i]));
            double vm = eval_at(ctx, ctx.om[j], shifted(q, i, -ctx.steps[i]));
            dom[i][j] = (vp - vm) / (2 * ctx.steps_d[i]);
        }
    double nom[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double v = dom[i][j];
            for (int k = 0; k < 3; ++k) v -= out.gamma[k][i][j] * omv[k];
            nom[i][j] = v;
        }
    std::array<double, 3> omup{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) omup[i] += hinv[i][j] * omv[j];
    double div = 0, osq = 0;
    for (int i = 0; i < 3; ++i) {
        osq += omup[i] * omv[i];
        for (int j = 0; j < 3; ++j) div += hinv[i][j] * nom[i][j];
    }

    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            out.wricci[i][j] = out.ricci[i][j] + nom[i][j] - nom[j][i] / 2 + omv[i] * omv[j] / 4 +
                               hval[i][j] * (-osq / 4 + div / 2);
            out.chi[i][j] = out.ricci[i][j] + (nom[i][j] + nom[j][i]) / 4 + omv[i] * omv[j] / 4 -
                            hval[i][j] * (out.r + div / 2 + osq / 4) / 3;
        }
    out.w = out.r + 2 * div - osq / 2;
    return out;
}

// ---------------------------------------------------------------------------
// Cross-check
// ---------------------------------------------------------------------------

namespace {

double rel_error(double a, double b) { return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b))); }

}  // namespace

CrossCheckReport cross_check(const WeylStructure& s, const std::vector<SamplePoint>& points, double tol,
                             double step) {
    if (points.empty()) throw Error("cross_check needs at least one sample point");
    for (const auto& p : points)
        if (!(p.instantiation == points.front().instantiation))
            throw Error("cross_check points must share one instantiation");

    WeylStructure inst = points.front().instantiation.empty()
                             ? s
                             : instantiate(s, points.front().instantiation);
    Tensor gamma = christoffel(inst.h);
    auto [ricci, r] = ricci_lc(inst.h);
    Expr wsc = weyl_scalar(inst);
    Tensor chi = ew_residual(inst);

    CrossCheckReport rep;
    rep.tol = tol;

    std::vector<std::vector<CrossCheckRow>> rows_per_point(points.size());
    par::for_index(points.size(), [&](size_t pi) {
        SamplePoint p{points[pi].coords, {}};
        NumericCurvature fd = fd_curvature(inst, p, step);
        std::vector<CrossCheckRow>& rows = rows_per_point[pi];
        auto push = [&](const std::string& name, double sym, double num) {
            CrossCheckRow row{name, static_cast<int>(pi), sym, num, rel_error(sym, num), true};
            row.pass = row.rel_error <= tol;
            rows.push_back(row);
        };
        for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j)
                    push("Gamma^" + std::to_string(k + 1) + "_" + std::to_string(i + 1) + std::to_string(j + 1),
                         eval(gamma(k, i, j), p), fd.gamma[k][i][j]);
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j)
                push("R_" + std::to_string(i + 1) + std::to_string(j + 1), eval(ricci(i, j), p),
                     fd.ricci[i][j]);
        push("r", eval(r, p), fd.r);
        push("W", eval(wsc, p), fd.w);
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j)
                push("chi_" + std::to_string(i + 1) + std::to_string(j + 1), eval(chi(i, j), p),
                     fd.chi[i][j]);
    });

    for (auto& rows : rows_per_point)
        for (auto& row : rows) {
            rep.max_rel_error = std::max(rep.max_rel_error, row.rel_error);
            if (!row.pass) rep.pass = false;
            rep.rows.push_back(std::move(row));
        }
    return rep;
}

double ricci_fd_error(const WeylStructure& s, const SamplePoint& p, double step) {
    WeylStructure inst = p.instantiation.empty() ? s : instantiate(s, p.instantiation);
    auto [ricci, r] = ricci_lc(inst.h);
    SamplePoint bare{p.coords, {}};
    NumericCurvature fd = fd_curvature(inst, bare, step);
    double err = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) err += std::abs(eval(ricci(i, j), bare) - fd.ricci[i][j]);
    err += std::abs(eval(r, bare) - fd.r);
    return err;
}

std::vector<SamplePoint> random_sample_points(const WeylStructure& s, int n, uint64_t seed, double margin) {
    std::map<SymbolId, Expr> inst_map = default_instantiation(s.chart.table);
    WeylStructure inst = inst_map.empty() ? s : instantiate(s, inst_map);

    // Denominators that must stay away from zero, plus the determinant.
    std::vector<Expr> guards;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (!inst.h(i, j).den().is_constant())
                guards.push_back(Expr::from_poly(s.chart.table, inst.h(i, j).den()));
    for (int i = 0; i < 3; ++i)
        if (!inst.omega(i).den().is_constant())
            guards.push_back(Expr::from_poly(s.chart.table, inst.omega(i).den()));
    guards.push_back(inst.h.det());

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> numer(-24, 24);
    std::vector<SamplePoint> points;
    while (static_cast<int>(points.size()) < n) {
        SamplePoint p;
        p.instantiation = inst_map;
        for (int i = 0; i < 3; ++i) p.coords[i] = Rational(numer(rng), 8);
        bool ok = true;
        for (const auto& g : guards) {
            try {
                SamplePoint bare{p.coords, {}};
                if (std::abs(eval(g, bare)) < margin) {
                    ok = false;
                    break;
                }
            } catch (const PoleAtPoint&) {
                ok = false;
                break;
            }
        }
        if (ok) points.push_back(std::move(p));
    }
    return points;
}

}  // namespace ew
