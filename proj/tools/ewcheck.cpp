#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ewcheck/catalog.hpp"
#include "ewcheck/errors.hpp"
#include "ewcheck/numeric.hpp"
#include "ewcheck/parse.hpp"
#include "ewcheck/report.hpp"
#include "ewcheck/version.hpp"

namespace {

using namespace ew;

// exit codes: 0 all checks pass, 1 a mathematical check failed,
// 2 usage/parse error, 3 pole or degeneracy.
constexpr int kOk = 0, kMathFail = 1, kUsage = 2, kDegenerate = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SyntaxError(0, 0, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Loaded {
    WeylStructure s;
    TablePtr table;
};

Loaded load_structure(const std::string& file, const std::string& builtin, const std::string& r_text,
                      const std::string& s_text) {
    if (!file.empty()) {
        StructureFile sf = parse_structure(read_file(file));
        return {sf.build(), sf.chart.table};
    }
    if (builtin == "flat") {
        WeylStructure s = flat();
        return {s, s.chart.table};
    }
    if (builtin == "case1" || builtin == "case2") {
        CaseChart c = make_case_chart();
        Expr r = r_text.empty() ? c.R : parse_expr(r_text, c.chart.table);
        Expr s = s_text.empty() ? c.S : parse_expr(s_text, c.chart.table);
        WeylStructure w = builtin == "case1" ? case1(c.chart, r, s) : case2(c.chart, r, s);
        return {w, c.chart.table};
    }
    if (builtin == "toda") {
        TodaChart c = make_toda_chart();
        Expr r = r_text.empty() ? c.R : parse_expr(r_text, c.chart.table);
        WeylStructure w = toda_structure(c.chart, r);
        return {w, c.chart.table};
    }
    throw SyntaxError(0, 0, "give a structure file or --builtin {flat|case1|case2|toda}");
}

uint64_t effective_seed(uint64_t cli_seed) {
    if (const char* env = std::getenv("EWCHECK_SEED")) return std::strtoull(env, nullptr, 10);
    return cli_seed;
}

int report_exit(const Report& r) {
    bool ok = r.chi_zero && r.bianchi_zero;
    if (r.crosscheck_pass && !*r.crosscheck_pass) ok = false;
    return ok ? kOk : kMathFail;
}

void print_report(const Report& r, bool json) {
    if (json)
        std::cout << to_json(r).dump(2) << "\n";
    else
        std::cout << render_text(r);
}

int cmd_check(const std::string& file, const std::string& builtin, const std::string& rt,
              const std::string& st, bool json, int crosscheck_points, double tol, uint64_t seed) {
    Loaded l = load_structure(file, builtin, rt, st);
    CurvatureReport c = compute_report(l.s);
    Report rep = build_report(l.s, c);
    if (crosscheck_points > 0) {
        auto points = random_sample_points(l.s, crosscheck_points, effective_seed(seed));
        CrossCheckReport cc = cross_check(l.s, points, tol);
        attach_crosscheck(rep, cc, crosscheck_points);
    }
    print_report(rep, json);
    return report_exit(rep);
}

int cmd_classify(const std::string& file, const std::string& builtin, const std::string& rt,
                 const std::string& st) {
    Loaded l = load_structure(file, builtin, rt, st);
    try {
        Classification c = classify(l.s);
        std::cout << "verdict: " << to_string(c.verdict) << "\n";
        if (c.alpha) {
            for (int i = 0; i < 3; ++i)
                if (!(*c.alpha)(i).is_zero())
                    std::cout << "alpha[" << i + 1 << "] = " << (*c.alpha)(i).to_string() << "\n";
            if (c.alpha->all_zero()) std::cout << "alpha = 0\n";
        }
        if (c.verdict == Verdict::Case2 && c.parallel) {
            std::cout << "parallelism obstruction: (D(*F))[1,3] = " << (*c.parallel)(0, 2).to_string()
                      << "\n";
        }
        return kOk;
    } catch (const NotScalarFlat&) {
        std::cout << "verdict: NotScalarFlat\n";
        return kMathFail;
    } catch (const NotEW&) {
        std::cout << "verdict: NotEW\n";
        return kMathFail;
    }
}

int cmd_rescale(const std::string& file, const std::string& phi_text, bool json) {
    StructureFile sf = parse_structure(read_file(file));
    WeylStructure s = sf.build();
    Expr phi = parse_expr(phi_text, sf.chart.table);
    WeylStructure rescaled = conformal_rescale(s, phi);
    CurvatureReport c = compute_report(rescaled);
    Report rep = build_report(rescaled, c);
    print_report(rep, json);
    return report_exit(rep);
}

int cmd_transform(const std::string& file, const std::string& t_text, const std::string& tinv_text,
                  const std::string& p_text) {
    StructureFile sf = parse_structure(read_file(file));
    WeylStructure s = sf.build();
    Expr t = parse_expr(t_text, sf.chart.table);
    Expr tinv = parse_expr(tinv_text, sf.chart.table);
    Expr p = parse_expr(p_text, sf.chart.table);
    WeylStructure out = apply_gauge_transform(s, t, tinv, p);

    CurvatureReport cin = compute_report(s);
    CurvatureReport cout_ = compute_report(out);
    Report rin = build_report(s, cin), rout = build_report(out, cout_);
    std::cout << "--- input ---\n" << render_text(rin);
    std::cout << "--- transformed ---\n" << render_text(rout);
    bool preserved = rin.chi_zero == rout.chi_zero && rin.w_zero == rout.w_zero;
    std::cout << "verdicts preserved: " << (preserved ? "yes" : "NO") << "\n";
    return preserved ? kOk : kMathFail;
}

int cmd_toda(const std::string& kernel) {
    TodaChart c = make_toda_chart();
    Expr n = parse_expr(kernel, c.chart.table);
    Expr residual = toda_residual(n);
    Expr tws = toda_weyl_scalar(n);
    WeylStructure s = toda_structure_from_kernel(c.chart, n);
    Expr ws = weyl_scalar(s);

    std::cout << "kernel N = " << n.to_string() << "\n";
    std::cout << "toda residual 4 u_vw + (e^u)_zz: "
              << (residual.is_zero() ? "0" : residual.to_string()) << "\n";
    std::cout << "weyl scalar (u_zz/2 + u_z^2/4):  " << (tws.is_zero() ? "0" : tws.to_string()) << "\n";
    std::cout << "weyl scalar (curvature path):    " << (ws.is_zero() ? "0" : ws.to_string()) << "\n";
    std::cout << "path agreement: " << (tws == ws ? "yes" : "NO") << "\n";
    return residual.is_zero() && tws == ws ? kOk : kMathFail;
}

int cmd_eval(const std::string& file, const std::string& point_text, const std::string& quantity) {
    StructureFile sf = parse_structure(read_file(file));
    WeylStructure s = sf.build();
    const TablePtr& tab = sf.chart.table;

    SamplePoint p;
    p.instantiation = default_instantiation(tab);
    std::array<bool, 3> seen{false, false, false};
    std::istringstream ss(point_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw SyntaxError(0, 0, "--point expects name=value pairs");
        std::string name = item.substr(0, eq);
        auto val = parse_rational(item.substr(eq + 1));
        if (!val) throw SyntaxError(0, 0, "invalid coordinate value '" + item.substr(eq + 1) + "'");
        auto sym = tab->find(name);
        int ci = sym ? tab->coord_index(*sym) : -1;
        if (ci < 0) throw UnknownSymbol("'" + name + "' is not a coordinate of this structure");
        p.coords[ci] = *val;
        seen[ci] = true;
    }
    for (int i = 0; i < 3; ++i)
        if (!seen[i]) throw SyntaxError(0, 0, "--point must set all three coordinates");

    auto show = [&](const std::string& name, const Expr& e) {
        double v = eval(e, p);
        std::cout << name << " = " << v << "\n";
    };
    if (quantity == "W") {
        show("W", weyl_scalar(s));
    } else if (quantity == "chi") {
        Tensor chi = ew_residual(s);
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j)
                show("chi[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]", chi(i, j));
    } else if (quantity == "F") {
        Tensor f = faraday(s.omega);
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                show("F[" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]", f(i, j));
    } else if (quantity == "starF") {
        Tensor sf2 = hodge_star_two_form(faraday(s.omega), s.h, s.orientation, s.refpoint);
        for (int i = 0; i < 3; ++i) show("(*F)[" + std::to_string(i + 1) + "]", sf2(i));
    } else {
        throw SyntaxError(0, 0, "--quantity must be one of W|chi|F|starF");
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact verification engine for three-dimensional Lorentzian Weyl geometry"};
    app.set_version_flag("--version", ew::kEngineVersion);
    app.require_subcommand(1);

    std::string file, builtin, r_text, s_text, phi_text, t_text, tinv_text, p_text = "0", kernel,
                                                                             point_text, quantity = "W";
    bool json = false;
    int crosscheck_points = 0;
    double tol = 1e-5;
    uint64_t seed = 1;

    auto add_structure_opts = [&](CLI::App* cmd, bool with_rs) {
        cmd->add_option("file", file, "structure file (.ew)");
        cmd->add_option("--builtin", builtin, "flat|case1|case2|toda")
            ->check(CLI::IsMember({"flat", "case1", "case2", "toda"}));
        if (with_rs) {
            cmd->add_option("--R", r_text, "override R (expression in the last coordinate)");
            cmd->add_option("--S", s_text, "override S");
        }
    };

    CLI::App* check = app.add_subcommand("check", "compute the curvature report and verify the EW identities");
    add_structure_opts(check, true);
    check->add_flag("--json", json, "emit the machine-readable report");
    check->add_option("--crosscheck", crosscheck_points, "compare against the finite-difference oracle at N points");
    check->add_option("--tol", tol, "crosscheck relative tolerance (default 1e-5)");
    check->add_option("--seed", seed, "crosscheck RNG seed (EWCHECK_SEED overrides)");

    CLI::App* classify_cmd = app.add_subcommand("classify", "Flat / Case1 / Case2 classification");
    add_structure_opts(classify_cmd, true);

    CLI::App* rescale = app.add_subcommand("rescale", "apply a conformal gauge change and re-check");
    rescale->add_option("file", file, "structure file (.ew)")->required();
    rescale->add_option("--phi", phi_text, "conformal factor")->required();
    rescale->add_flag("--json", json, "emit the machine-readable report");

    CLI::App* transform = app.add_subcommand("transform", "apply the t -> T(t), x -> x + P(y,t) gauge change");
    transform->add_option("file", file, "structure file (.ew)")->required();
    transform->add_option("--T", t_text, "new time coordinate T(t)")->required();
    transform->add_option("--Tinv", tinv_text, "explicit rational inverse of T")->required();
    transform->add_option("--P", p_text, "shift of x by P(y,t) (default 0)");

    CLI::App* toda = app.add_subcommand("toda", "verify a Toda kernel N (u = 2 log N)");
    toda->add_option("--kernel", kernel, "rational kernel N(v,w,z)")->required();

    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a quantity at a point");
    eval_cmd->add_option("file", file, "structure file (.ew)")->required();
    eval_cmd->add_option("--point", point_text, "coordinates, e.g. y=1,x=2,t=1/2")->required();
    eval_cmd->add_option("--quantity", quantity, "W|chi|F|starF (default W)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (check->parsed()) return cmd_check(file, builtin, r_text, s_text, json, crosscheck_points, tol, seed);
        if (classify_cmd->parsed()) return cmd_classify(file, builtin, r_text, s_text);
        if (rescale->parsed()) return cmd_rescale(file, phi_text, json);
        if (transform->parsed()) return cmd_transform(file, t_text, tinv_text, p_text);
        if (toda->parsed()) return cmd_toda(kernel);
        if (eval_cmd->parsed()) return cmd_eval(file, point_text, quantity);
    } catch (const SyntaxError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const UnknownSymbol& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DuplicateAssignment& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DuplicateSymbol& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const NonInvertibleT& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ZeroJacobian& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InconsistentJetBinding& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const TableMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DivisionByZeroExpr& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ZeroConformalFactor& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const PoleAtPoint& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDegenerate;
    } catch (const SingularMetric& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDegenerate;
    } catch (const IndefiniteDeterminantSign& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDegenerate;
    } catch (const ZeroKernel& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDegenerate;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kMathFail;
    }
    return kUsage;
}
