#include "ewcheck/report.hpp"

#include <sstream>

#include "ewcheck/version.hpp"

namespace ew {

namespace {

std::string key2(int i, int j) { return std::to_string(i + 1) + "," + std::to_string(j + 1); }

std::map<std::string, std::string> fixed_conventions() {
    return {
        {"faraday", "F_ij = nabla_[i omega_j] = (d omega)_ij / 2"},
        {"hodge", "(*F)_i = eps_i^{jk} F_jk, no 1/2 factor"},
        {"levi_civita", "eps_{ijk} = orientation * sqrt(|det h|) * sign(ijk); det sign fixed at the reference point"},
        {"symmetrization", "A_(ij) = (A_ij + A_ji)/2, A_[ij] = (A_ij - A_ji)/2"},
        {"ew_residual",
         "chi_ij = R_ij + (nabla_i omega_j + nabla_j omega_i)/4 + omega_i omega_j/4 - (r + nabla^k omega_k/2 + "
         "omega^k omega_k/4) h_ij/3"},
        {"weyl_scalar", "W = r + 2 nabla^k omega_k - omega^k omega_k/2"},
        {"weights", "conformal weights are explicit metadata; only conformal_rescale applies phi^m"},
    };
}

}  // namespace

Report build_report(const WeylStructure& s, const CurvatureReport& c) {
    Report r;
    r.engine_name = kEngineName;
    r.engine_version = kEngineVersion;
    const TablePtr& tab = s.chart.table;
    for (int i = 0; i < 3; ++i) r.chart[i] = tab->coord_name(i);
    int n = tab->num_symbols();
    for (SymbolId sym = 0; sym < n; ++sym) {
        SymbolData d = tab->symbol(sym);
        if (d.kind == SymbolKind::Function && d.base == sym) {
            std::vector<std::string> deps;
            for (SymbolId dep : d.deps) deps.push_back(tab->name(dep));
            r.functions.push_back({d.name, deps});
        }
    }
    r.signature = s.chart.signature;
    r.orientation = s.orientation;
    for (int i = 0; i < 3; ++i) r.refpoint[i] = to_string(s.refpoint[i]);
    r.conventions = fixed_conventions();

    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            if (!s.h(i, j).is_zero()) r.metric["g[" + key2(i, j) + "]"] = s.h(i, j).to_string();
    for (int i = 0; i < 3; ++i)
        if (!s.omega(i).is_zero()) r.omega["w[" + std::to_string(i + 1) + "]"] = s.omega(i).to_string();

    r.verdict = to_string(c.verdict);
    r.w_zero = c.wscalar.is_zero();
    if (!r.w_zero) r.w_value = c.wscalar.to_string();
    r.chi_zero = c.chi.all_zero();
    for (int i = 0; i < 3 && !r.chi_zero; ++i)
        for (int j = 0; j < 3; ++j)
            if (!c.chi(i, j).is_zero()) r.chi_components[key2(i, j)] = c.chi(i, j).to_string();
    r.f_zero = c.F.all_zero();
    for (int i = 0; i < 3 && !r.f_zero; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (!c.F(i, j).is_zero()) r.f_components[key2(i, j)] = c.F(i, j).to_string();
    r.starf_zero = c.starF.all_zero();
    for (int i = 0; i < 3 && !r.starf_zero; ++i)
        if (!c.starF(i).is_zero()) r.starf_components[std::to_string(i + 1)] = c.starF(i).to_string();
    r.nullity = {c.nullity_pair.first.to_string(), c.nullity_pair.second.to_string()};
    r.bianchi_zero = c.bianchi.all_zero();
    for (int i = 0; i < 3 && !r.bianchi_zero; ++i)
        if (!c.bianchi(i).is_zero()) r.bianchi_components[std::to_string(i + 1)] = c.bianchi(i).to_string();
    r.curvature_zero = c.curvature.all_zero();
    for (size_t i = 0; i < c.curvature.size(); ++i)
        if (!c.curvature.slot(i).is_zero()) ++r.curvature_nonzero_count;
    r.ricci_scalar = c.ricci_scalar.to_string();
    if (c.alpha)
        for (int i = 0; i < 3; ++i)
            if (!(*c.alpha)(i).is_zero()) r.alpha_components[std::to_string(i + 1)] = (*c.alpha)(i).to_string();
    for (const auto& e : c.excluded_loci) r.excluded_loci.push_back(e.to_string());
    return r;
}

void attach_crosscheck(Report& r, const CrossCheckReport& cc, int points) {
    r.crosscheck_tol = cc.tol;
    r.crosscheck_points = points;
    r.crosscheck_max_rel_error = cc.max_rel_error;
    r.crosscheck_pass = cc.pass;
}

nlohmann::json to_json(const Report& r) {
    nlohmann::json j;
    j["engine"] = {{"name", r.engine_name}, {"version", r.engine_version}};
    j["chart"] = r.chart;
    nlohmann::json fns = nlohmann::json::array();
    for (const auto& [name, deps] : r.functions) fns.push_back({{"name", name}, {"deps", deps}});
    j["functions"] = fns;
    if (!r.signature.empty()) j["signature"] = r.signature;
    j["orientation"] = r.orientation;
    j["refpoint"] = r.refpoint;
    j["conventions"] = r.conventions;
    j["metric"] = r.metric;
    j["omega"] = r.omega;
    j["verdict"] = r.verdict;

    nlohmann::json w;
    w["zero"] = r.w_zero;
    if (r.w_value) w["value"] = *r.w_value;
    j["weyl_scalar"] = w;

    auto block = [](bool zero, const std::map<std::string, std::string>& comps) {
        nlohmann::json b;
        b["zero"] = zero;
        if (!zero) b["components"] = comps;
        return b;
    };
    j["chi"] = block(r.chi_zero, r.chi_components);
    j["faraday"] = block(r.f_zero, r.f_components);
    j["star_faraday"] = block(r.starf_zero, r.starf_components);
    j["nullity"] = r.nullity;
    j["bianchi"] = block(r.bianchi_zero, r.bianchi_components);
    j["weyl_curvature"] = {{"zero", r.curvature_zero}, {"nonzero_count", r.curvature_nonzero_count}};
    j["ricci_scalar"] = r.ricci_scalar;
    if (!r.alpha_components.empty()) j["alpha"] = r.alpha_components;
    j["excluded_loci"] = r.excluded_loci;

    if (r.crosscheck_tol) {
        j["crosscheck"] = {{"tol", *r.crosscheck_tol},
                           {"points", *r.crosscheck_points},
                           {"max_rel_error", *r.crosscheck_max_rel_error},
                           {"pass", *r.crosscheck_pass}};
    }
    return j;
}

Report report_from_json(const nlohmann::json& j) {
    Report r;
    r.engine_name = j.at("engine").at("name").get<std::string>();
    r.engine_version = j.at("engine").at("version").get<std::string>();
    r.chart = j.at("chart").get<std::array<std::string, 3>>();
    for (const auto& f : j.at("functions"))
        r.functions.push_back({f.at("name").get<std::string>(), f.at("deps").get<std::vector<std::string>>()});
    if (j.contains("signature")) r.signature = j.at("signature").get<std::vector<int>>();
    r.orientation = j.at("orientation").get<int>();
    r.refpoint = j.at("refpoint").get<std::array<std::string, 3>>();
    r.conventions = j.at("conventions").get<std::map<std::string, std::string>>();
    r.metric = j.at("metric").get<std::map<std::string, std::string>>();
    r.omega = j.at("omega").get<std::map<std::string, std::string>>();
    r.verdict = j.at("verdict").get<std::string>();
    r.w_zero = j.at("weyl_scalar").at("zero").get<bool>();
    if (j.at("weyl_scalar").contains("value")) r.w_value = j.at("weyl_scalar").at("value").get<std::string>();
    auto read_block = [&](const char* key, bool& zero, std::map<std::string, std::string>& comps) {
        zero = j.at(key).at("zero").get<bool>();
        if (j.at(key).contains("components"))
            comps = j.at(key).at("components").get<std::map<std::string, std::string>>();
    };
    read_block("chi", r.chi_zero, r.chi_components);
    read_block("faraday", r.f_zero, r.f_components);
    read_block("star_faraday", r.starf_zero, r.starf_components);
    r.nullity = j.at("nullity").get<std::array<std::string, 2>>();
    read_block("bianchi", r.bianchi_zero, r.bianchi_components);
    r.curvature_zero = j.at("weyl_curvature").at("zero").get<bool>();
    r.curvature_nonzero_count = j.at("weyl_curvature").at("nonzero_count").get<int>();
    r.ricci_scalar = j.at("ricci_scalar").get<std::string>();
    if (j.contains("alpha")) r.alpha_components = j.at("alpha").get<std::map<std::string, std::string>>();
    r.excluded_loci = j.at("excluded_loci").get<std::vector<std::string>>();
    if (j.contains("crosscheck")) {
        r.crosscheck_tol = j.at("crosscheck").at("tol").get<double>();
        r.crosscheck_points = j.at("crosscheck").at("points").get<int>();
        r.crosscheck_max_rel_error = j.at("crosscheck").at("max_rel_error").get<double>();
        r.crosscheck_pass = j.at("crosscheck").at("pass").get<bool>();
    }
    return r;
}

std::string render_text(const Report& r) {
    std::ostringstream out;
    out << r.engine_name << " " << r.engine_version << "\n";
    out << "chart: (" << r.chart[0] << ", " << r.chart[1] << ", " << r.chart[2] << ")";
    if (!r.functions.empty()) {
        out << "  functions:";
        for (const auto& [name, deps] : r.functions) {
            out << " " << name << "(";
            for (size_t i = 0; i < deps.size(); ++i) out << (i ? "," : "") << deps[i];
            out << ")";
        }
    }
    out << "\n";
    for (const auto& [k, v] : r.metric) out << "  " << k << " = " << v << "\n";
    for (const auto& [k, v] : r.omega) out << "  " << k << " = " << v << "\n";

    out << "W == 0:        " << (r.w_zero ? "yes" : "NO") << (r.w_value ? "   W = " + *r.w_value : "") << "\n";
    out << "chi == 0:      " << (r.chi_zero ? "yes (Einstein-Weyl)" : "NO") << "\n";
    if (!r.chi_zero)
        for (const auto& [k, v] : r.chi_components) out << "    chi[" << k << "] = " << v << "\n";
    out << "Bianchi == 0:  " << (r.bianchi_zero ? "yes" : "NO (engine invariant violated)") << "\n";
    if (!r.f_zero) {
        out << "F:";
        for (const auto& [k, v] : r.f_components) out << "  F[" << k << "] = " << v;
        out << "\n";
    }
    if (!r.starf_zero) {
        out << "*F:";
        for (const auto& [k, v] : r.starf_components) out << "  (*F)[" << k << "] = " << v;
        out << "\n";
    }
    out << "nullity:       (" << r.nullity[0] << ", " << r.nullity[1] << ")\n";
    out << "curvature R(D):" << (r.curvature_zero ? " 0" : " nonzero (" + std::to_string(r.curvature_nonzero_count) + " components)") << "\n";
    out << "verdict:       " << r.verdict << "\n";
    if (!r.alpha_components.empty()) {
        out << "alpha:";
        for (const auto& [k, v] : r.alpha_components) out << "  alpha[" << k << "] = " << v;
        out << "\n";
    }
    if (!r.excluded_loci.empty()) {
        out << "excluded loci:";
        for (const auto& e : r.excluded_loci) out << "  {" << e << " = 0}";
        out << "\n";
    }
    if (r.crosscheck_pass) {
        out << "crosscheck:    " << (*r.crosscheck_pass ? "pass" : "FAIL") << " (" << *r.crosscheck_points
            << " points, tol " << *r.crosscheck_tol << ", max rel err " << *r.crosscheck_max_rel_error << ")\n";
    }
    return out.str();
}

}  // namespace ew
