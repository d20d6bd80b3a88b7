#include "ewcheck/catalog.hpp"

#include <set>

#include "ewcheck/errors.hpp"

namespace ew {

namespace {

// The supplied expression may only involve the given coordinate and function
// symbols depending on it.
void require_depends_only_on(const Expr& e, const Chart& chart, int coord_index, const char* what) {
    if (!e.table()) return;
    if (e.table() != chart.table) throw TableMismatch("expression belongs to a different chart");
    SymbolId c = chart.coord(coord_index);
    std::set<VarId> vs;
    for (VarId v : e.num().vars()) vs.insert(v);
    for (VarId v : e.den().vars()) vs.insert(v);
    for (VarId v : vs) {
        if (v == c) continue;
        SymbolData d = chart.table->symbol(v);
        if (d.kind == SymbolKind::Function && d.deps.size() == 1 && d.deps[0] == c) continue;
        throw Error(std::string(what) + " may depend only on coordinate '" +
                    chart.table->name(c) + "'");
    }
}

Metric metric_from_components(const Chart& chart, const std::vector<std::tuple<int, int, Expr>>& comps) {
    Tensor g(chart, {Slot::Down, Slot::Down});
    for (const auto& [i, j, e] : comps) {
        g.at({i, j}) = e;
        if (i != j) g.at({j, i}) = e;
    }
    return Metric(std::move(g));
}

Tensor oneform(const Chart& chart, int index, const Expr& value) {
    Tensor w(chart, {Slot::Down});
    w.at({index}) = value;
    return w;
}

}  // namespace

CaseChart make_case_chart() {
    auto tab = SymbolTable::create({"y", "x", "t"});
    SymbolId t = tab->coord(2);
    SymbolId r = tab->add_function("R", {t});
    SymbolId s = tab->add_function("S", {t});
    Chart chart{tab, {1, 1, -1}};
    return CaseChart{chart, Expr::variable(tab, r), Expr::variable(tab, s)};
}

TodaChart make_toda_chart() {
    auto tab = SymbolTable::create({"v", "w", "z"});
    SymbolId r = tab->add_function("R", {tab->coord(0)});
    Chart chart{tab, {1, 1, -1}};
    return TodaChart{chart, Expr::variable(tab, r)};
}

WeylStructure flat() {
    auto tab = SymbolTable::create({"y", "x", "t"});
    Chart chart{tab, {1, 1, -1}};
    Expr one = Expr::constant(Rational(1), tab);
    Metric h = metric_from_components(chart, {{0, 0, one}, {1, 2, one}});
    Tensor w(chart, {Slot::Down});
    return WeylStructure(chart, std::move(h), std::move(w), 1, {1, 1, 1}, CatalogId::Flat);
}

WeylStructure case1(const Chart& chart, const Expr& R, const Expr& S) {
    require_depends_only_on(R, chart, 2, "R");
    require_depends_only_on(S, chart, 2, "S");
    const TablePtr& tab = chart.table;
    Expr y = Expr::variable(tab, chart.coord(0));
    Expr x = Expr::variable(tab, chart.coord(1));
    Expr one = Expr::constant(Rational(1), tab);
    Expr g33 = x * (R - y / 2) + y.pow(4) / 48 + R * y.pow(3) / 12 + S * y;
    Metric h = metric_from_components(chart, {{0, 0, one}, {1, 2, one}, {2, 2, g33}});
    return WeylStructure(chart, std::move(h), oneform(chart, 2, y), 1, {1, 1, 1}, CatalogId::Case1);
}

WeylStructure case1() {
    CaseChart c = make_case_chart();
    return case1(c.chart, c.R, c.S);
}

WeylStructure case2(const Chart& chart, const Expr& R, const Expr& S) {
    require_depends_only_on(R, chart, 2, "R");
    require_depends_only_on(S, chart, 2, "S");
    const TablePtr& tab = chart.table;
    Expr y = Expr::variable(tab, chart.coord(0));
    Expr x = Expr::variable(tab, chart.coord(1));
    Expr one = Expr::constant(Rational(1), tab);
    Expr g13 = -2 * x / y;
    Expr g33 = x * x / (y * y) + x * y / 2 + y.pow(4) / 8 + R * y * y + S * y;
    Metric h = metric_from_components(chart, {{0, 0, one}, {1, 2, one}, {0, 2, g13}, {2, 2, g33}});
    return WeylStructure(chart, std::move(h), oneform(chart, 2, y), 1, {1, 1, 1}, CatalogId::Case2);
}

WeylStructure case2() {
    CaseChart c = make_case_chart();
    return case2(c.chart, c.R, c.S);
}

WeylStructure general_ansatz(const Chart& chart, const Expr& F, const Expr& G) {
    const TablePtr& tab = chart.table;
    Expr y = Expr::variable(tab, chart.coord(0));
    Expr one = Expr::constant(Rational(1), tab);
    Metric h = metric_from_components(chart, {{0, 0, one}, {1, 2, one}, {0, 2, F}, {2, 2, G}});
    return WeylStructure(chart, std::move(h), oneform(chart, 2, y), 1, {1, 1, 1}, CatalogId::GeneralAnsatz);
}

WeylStructure toda_structure_from_kernel(const Chart& chart, const Expr& N) {
    if (N.is_zero()) throw ZeroKernel();
    const TablePtr& tab = chart.table;
    Expr g12 = N * N / 2;
    Expr one = Expr::constant(Rational(1), tab);
    Metric h = metric_from_components(chart, {{0, 1, g12}, {2, 2, one}});
    Expr om = 4 * N.diff(chart.coord(2)) / N;
    return WeylStructure(chart, std::move(h), oneform(chart, 2, om), 1, {1, 1, 1}, std::nullopt);
}

WeylStructure toda_structure(const Chart& chart, const Expr& R) {
    require_depends_only_on(R, chart, 0, "R");
    const TablePtr& tab = chart.table;
    Expr v = Expr::variable(tab, chart.coord(0));
    Expr w = Expr::variable(tab, chart.coord(1));
    Expr z = Expr::variable(tab, chart.coord(2));
    Expr n = 2 * (z + R) / (1 + v * w);
    WeylStructure s = toda_structure_from_kernel(chart, n);
    s.origin = CatalogId::Toda;
    return s;
}

WeylStructure toda_structure() {
    TodaChart c = make_toda_chart();
    return toda_structure(c.chart, c.R);
}

// ---------------------------------------------------------------------------
// Gauge/coordinate transformation
// ---------------------------------------------------------------------------

WeylStructure apply_gauge_transform(const WeylStructure& s, const Expr& T, const Expr& Tinv, const Expr& P) {
    const TablePtr& tab = s.chart.table;
    SymbolId y_old = s.chart.coord(0), x_old = s.chart.coord(1), t_old = s.chart.coord(2);

    auto vars_in = [](const Expr& e) {
        std::set<VarId> vs;
        for (VarId v : e.num().vars()) vs.insert(v);
        for (VarId v : e.den().vars()) vs.insert(v);
        return vs;
    };
    for (VarId v : vars_in(T))
        if (v != t_old) throw NonInvertibleT("T must be an expression in t only");
    for (VarId v : vars_in(Tinv))
        if (v != t_old) throw NonInvertibleT("the inverse of T must be an expression in t only");
    for (VarId v : vars_in(P))
        if (v != y_old && v != t_old) throw NonInvertibleT("P must be an expression in (y, t)");

    Expr t_var = Expr::variable(tab, t_old);
    Expr tt = T.diff(t_old);
    if (tt.is_zero()) throw ZeroJacobian();
    if (!(T.substitute({{t_old, Tinv}}) == t_var))
        throw NonInvertibleT("T(Tinv(t)) does not normalize to t");

    // Fresh table with the same coordinate and function-symbol names.
    std::array<std::string, 3> names{tab->name(y_old), tab->name(x_old), tab->name(t_old)};
    auto ntab = SymbolTable::create(names, tab->max_jet());
    Chart nchart{ntab, s.chart.signature};
    SymbolId t_new = ntab->coord(2);

    // Collect the function bases used by the structure; they must be
    // univariate in t for the composition R~ = R o Tinv to stay formal.
    std::set<VarId> used;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (VarId v : vars_in(s.h(i, j))) used.insert(v);
    for (int i = 0; i < 3; ++i)
        for (VarId v : vars_in(s.omega(i))) used.insert(v);

    std::map<SymbolId, SymbolId> base_map;  // old base -> new base
    int max_order = 0;
    for (VarId v : used) {
        SymbolData d = tab->symbol(v);
        if (d.kind == SymbolKind::Coordinate) continue;
        if (d.kind != SymbolKind::Function)
            throw NonInvertibleT("structures with custom symbols cannot be gauge-transformed");
        if (d.deps != std::vector<SymbolId>{t_old})
            throw NonInvertibleT("function symbol '" + d.name + "' must depend on t only");
        if (!base_map.count(d.base)) {
            SymbolData bd = tab->symbol(d.base);
            base_map[d.base] = ntab->add_function(bd.name, {t_new});
        }
        max_order = std::max(max_order, d.order.empty() ? 0 : d.order[0]);
    }

    // Coordinate maps (old coordinates as expressions on the new chart).
    std::map<SymbolId, Expr> tinv_bind{{t_old, Expr::variable(ntab, t_new)}};
    Expr tiv = Tinv.substitute(tinv_bind);  // Tinv re-expressed on the new table
    auto compose = [&](const Expr& e) { return e.substitute({{t_old, tiv}}); };

    Expr tt_n = compose(tt);
    Expr ttt_n = compose(tt.diff(t_old));
    Expr y_new = Expr::variable(ntab, ntab->coord(0));
    Expr x_new = Expr::variable(ntab, ntab->coord(1));

    std::map<SymbolId, Expr> bind;
    bind[t_old] = tiv;
    bind[y_old] = tt_n * y_new + 2 * ttt_n;
    Expr p_new = P.substitute({{y_old, bind[y_old]}, {t_old, tiv}});
    bind[x_old] = tt_n.pow(3) * (x_new - p_new);

    // Jet chain: map(J_{k+1}) = d/dt~ map(J_k) / d/dt~ Tinv.
    Expr tiv_prime = tiv.diff(t_new);
    if (tiv_prime.is_zero()) throw ZeroJacobian();
    for (const auto& [ob, nb] : base_map) {
        Expr cur = Expr::variable(ntab, nb);
        bind[ob] = cur;
        SymbolId oj = ob;
        for (int k = 1; k <= max_order; ++k) {
            oj = tab->jet(oj, 0);
            cur = cur.diff(t_new) / tiv_prime;
            bind[oj] = cur;
        }
    }

    // Jacobian d(old coord)/d(new coord).
    std::array<std::array<Expr, 3>, 3> jac;
    std::array<SymbolId, 3> old_coords{y_old, x_old, t_old};
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a) jac[i][a] = bind[old_coords[i]].diff(ntab->coord(a));

    // Pull back h and omega, then apply the conformal factor T_t^2 as an
    // exact gauge change; this preserves the EW and scalar-flat verdicts.
    Tensor g(nchart, {Slot::Down, Slot::Down});
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            Expr sum = Expr::constant(Rational(0), ntab);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    if (s.h(i, j).is_zero()) continue;
                    sum += s.h(i, j).substitute(bind) * jac[i][a] * jac[j][b];
                }
            g.at({a, b}) = sum;
            if (a != b) g.at({b, a}) = std::move(sum);
        }
    Tensor om(nchart, {Slot::Down});
    for (int a = 0; a < 3; ++a) {
        Expr sum = Expr::constant(Rational(0), ntab);
        for (int i = 0; i < 3; ++i) {
            if (s.omega(i).is_zero()) continue;
            sum += s.omega(i).substitute(bind) * jac[i][a];
        }
        om.at({a}) = std::move(sum);
    }

    // Transformed reference point.
    RefPoint ref = s.refpoint;
    auto eval_at_ref = [&](const Expr& e) {
        auto coords = tab->coords();
        return e.eval_rational([&](SymbolId sym) -> std::optional<Rational> {
            for (int i = 0; i < 3; ++i)
                if (coords[i] == sym) return s.refpoint[i];
            return std::nullopt;
        });
    };
    try {
        Rational tt_ref = eval_at_ref(tt);
        Rational ttt_ref = eval_at_ref(tt.diff(t_old));
        if (tt_ref == 0) throw ZeroJacobian();
        RefPoint nref;
        nref[2] = eval_at_ref(T);
        nref[0] = s.refpoint[0] / tt_ref - 2 * ttt_ref / tt_ref;
        nref[1] = s.refpoint[1] / (tt_ref * tt_ref * tt_ref) + eval_at_ref(P);
        ref = nref;
    } catch (const PoleAtPoint&) {
        throw ZeroJacobian();
    }

    WeylStructure pulled(nchart, Metric(std::move(g)), std::move(om), s.orientation, ref);
    return conformal_rescale_square(pulled, tt_n * tt_n);
}

// ---------------------------------------------------------------------------
// Toda operations
// ---------------------------------------------------------------------------

Expr toda_residual(const Expr& N) {
    if (N.is_zero()) throw ZeroKernel();
    const TablePtr& tab = N.table();
    if (!tab) return Expr();  // constant kernel: u is constant, residual 0
    SymbolId v = tab->coord(0), w = tab->coord(1), z = tab->coord(2);
    Expr u_v = 2 * N.diff(v) / N;
    return 4 * u_v.diff(w) + (N * N).diff(z).diff(z);
}

Expr toda_weyl_scalar(const Expr& N) {
    if (N.is_zero()) throw ZeroKernel();
    const TablePtr& tab = N.table();
    if (!tab) return Expr();
    SymbolId z = tab->coord(2);
    Expr u_z = 2 * N.diff(z) / N;
    return u_z.diff(z) / 2 + u_z * u_z / 4;
}

// ---------------------------------------------------------------------------
// dKP constant vector
// ---------------------------------------------------------------------------

std::pair<Tensor, Rational> dkp_constant_vector(const WeylStructure& s) {
    if (s.origin != CatalogId::Case1) throw NotCase1();
    const TablePtr& tab = s.chart.table;
    SymbolId x = s.chart.coord(1), t = s.chart.coord(2);

    // Recover R from the metric: d(h_33)/dx = R - y/2.
    Expr r = s.h(2, 2).diff(x) + Expr::variable(tab, s.chart.coord(0)) / 2;

    SymbolId f;
    if (auto existing = tab->find("f")) {
        f = *existing;
        SymbolData d = tab->symbol(f);
        auto rule = tab->custom_rule(f, t);
        Expr expected = -r * Expr::variable(tab, f) / 2;
        if (d.kind != SymbolKind::Custom || !rule || !(*rule == expected))
            throw DuplicateSymbol("symbol 'f' exists with a different derivative rule");
    } else {
        f = tab->add_custom("f", {t});
        tab->set_custom_rule(f, t, -r * Expr::variable(tab, f) / 2);
    }

    Tensor vec(s.chart, {Slot::Up}, Rational(-1, 2));
    vec.at({1}) = Expr::variable(tab, f);
    return {vec, Rational(-1, 2)};
}

}  // namespace ew
