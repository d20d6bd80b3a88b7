#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ewcheck/weyl.hpp"

namespace ew {

/// Parsed `.ew` structure file: chart, declarations and normalized component
/// expressions. Metric assignments are stored for i <= j only (symmetry is
/// implied); unassigned components default to zero.
struct StructureFile {
    Chart chart;
    std::vector<std::pair<std::string, std::vector<std::string>>> functions;
    std::array<std::array<std::optional<Expr>, 3>, 3> metric;
    std::array<std::optional<Expr>, 3> omega;
    int orientation = 1;
    RefPoint refpoint{1, 1, 1};

    WeylStructure build() const;
};

/// Parse expression text over an existing chart table. Grammar: infix
/// + - * / ^ with standard precedence, parentheses, integer literals,
/// function application R(t), derivative ticks R'(t). Exponents must be
/// integer constants (negative allowed); ^ binds tighter than unary minus.
Expr parse_expr(const std::string& text, const TablePtr& table);

/// Parse a structure file (see the README for the format).
StructureFile parse_structure(const std::string& text);

}  // namespace ew
