#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ewcheck/numeric.hpp"
#include "ewcheck/weyl.hpp"

namespace ew {

/// Machine-readable rendering of a CurvatureReport. All exact values are
/// canonical expression strings; zero components are omitted. The conventions
/// block makes downstream comparisons self-describing.
struct Report {
    std::string engine_name;
    std::string engine_version;
    std::array<std::string, 3> chart;
    std::vector<std::pair<std::string, std::vector<std::string>>> functions;
    std::vector<int> signature;  // may be empty
    int orientation = 1;
    std::array<std::string, 3> refpoint;
    std::map<std::string, std::string> conventions;
    std::map<std::string, std::string> metric;  // nonzero g[i,j], i <= j
    std::map<std::string, std::string> omega;   // nonzero w[i]

    std::string verdict;
    bool w_zero = true;
    std::optional<std::string> w_value;
    bool chi_zero = true;
    std::map<std::string, std::string> chi_components;
    bool f_zero = true;
    std::map<std::string, std::string> f_components;  // i < j
    bool starf_zero = true;
    std::map<std::string, std::string> starf_components;
    std::array<std::string, 2> nullity;
    bool bianchi_zero = true;
    std::map<std::string, std::string> bianchi_components;
    bool curvature_zero = true;
    int curvature_nonzero_count = 0;
    std::string ricci_scalar;
    std::map<std::string, std::string> alpha_components;  // Case1 only
    std::vector<std::string> excluded_loci;

    std::optional<double> crosscheck_tol;
    std::optional<int> crosscheck_points;
    std::optional<double> crosscheck_max_rel_error;
    std::optional<bool> crosscheck_pass;
};

Report build_report(const WeylStructure& s, const CurvatureReport& c);
void attach_crosscheck(Report& r, const CrossCheckReport& cc, int points);

nlohmann::json to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

/// Human-readable summary for the terminal.
std::string render_text(const Report& r);

}  // namespace ew
