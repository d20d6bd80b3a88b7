#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "ewcheck/poly.hpp"

namespace ew {

class Expr;

using SymbolId = VarId;

enum class SymbolKind {
    Coordinate,  // chart coordinate
    Function,    // formal function symbol or one of its jets
    Custom,      // symbol with closed-form derivative rules (f, adjoined sqrt, ...)
};

struct SymbolData {
    std::string name;
    SymbolKind kind = SymbolKind::Coordinate;
    SymbolId base = -1;          // Function: id of the order-0 symbol (self for order 0)
    std::vector<int> order;      // Function: jet multi-order aligned with deps of base
    std::vector<SymbolId> deps;  // Function/Custom: dependency coordinates, in chart order
};

/// Symbol table for one chart: exactly three ordered coordinates, plus
/// function symbols whose jets are created on demand, plus custom symbols
/// whose partial derivatives are stored as closed expressions.
///
/// Jet creation mutates the table, so all access is guarded; values built on
/// top (Expr, Tensor) stay immutable and safe to share across threads.
class SymbolTable : public std::enable_shared_from_this<SymbolTable> {
  public:
    static std::shared_ptr<SymbolTable> create(const std::array<std::string, 3>& coords,
                                               int max_jet = jet_cap_from_env());

    std::array<SymbolId, 3> coords() const { return coords_; }
    SymbolId coord(int i) const { return coords_[i]; }
    /// -1 when the symbol is not a coordinate.
    int coord_index(SymbolId s) const;
    std::string coord_name(int i) const;

    int num_symbols() const;
    SymbolData symbol(SymbolId s) const;
    std::string name(SymbolId s) const;
    std::optional<SymbolId> find(const std::string& name) const;

    SymbolId add_function(const std::string& name, const std::vector<SymbolId>& deps);
    SymbolId add_custom(const std::string& name, const std::vector<SymbolId>& deps);
    void set_custom_rule(SymbolId sym, SymbolId coord, const Expr& rule);
    std::shared_ptr<const Expr> custom_rule(SymbolId sym, SymbolId coord) const;

    /// Jet of a function symbol one step along deps[dep_index]; created on
    /// demand, capped at max_jet() total order.
    SymbolId jet(SymbolId fn, int dep_index);
    /// Jet of base with the given multi-order (aligned with base's deps).
    SymbolId jet_at(SymbolId base, const std::vector<int>& order);

    struct Rule {
        enum Kind { Zero, One, Var, Closed } kind = Zero;
        SymbolId var = -1;
        std::shared_ptr<const Expr> closed;
    };
    /// d(symbol)/d(coordinate); may create the next jet.
    Rule derivative_rule(SymbolId v, SymbolId coord);

    /// Adjoin the single square-root symbol sigma with sigma^2 = square (a
    /// polynomial over this table). Its derivative rules are installed by the
    /// caller. At most one per table.
    SymbolId adjoin_sigma(const std::string& name, const Polynomial& square);
    std::optional<SymbolId> sigma() const;
    const Polynomial& sigma_square() const;

    /// Variable significance ranking by symbol name (rank[id] = position),
    /// used for canonical scaling and rendering so that results do not depend
    /// on symbol creation order. Cached; rebuilt when symbols are added.
    std::shared_ptr<const std::vector<int>> name_ranks() const;
    /// Ids sorted by name, most significant first (same order as name_ranks).
    std::shared_ptr<const std::vector<SymbolId>> ids_by_name() const;

    int max_jet() const { return max_jet_; }

    static int jet_cap_from_env();

  private:
    SymbolTable() = default;
    SymbolId add_locked(SymbolData data);
    SymbolId jet_locked(SymbolId base, const std::vector<int>& order);
    std::string jet_name_locked(SymbolId base, const std::vector<int>& order) const;

    mutable std::shared_mutex mu_;
    std::vector<SymbolData> syms_;
    std::map<std::string, SymbolId> by_name_;
    std::array<SymbolId, 3> coords_{-1, -1, -1};
    std::vector<std::array<std::shared_ptr<const Expr>, 3>> rules_;  // custom rules per coord index
    std::optional<SymbolId> sigma_;
    Polynomial sigma_square_;
    int max_jet_ = 6;
    mutable std::shared_ptr<const std::vector<int>> ranks_;  // invalidated on add
    mutable std::shared_ptr<const std::vector<SymbolId>> sorted_;
};

using TablePtr = std::shared_ptr<SymbolTable>;

}  // namespace ew
