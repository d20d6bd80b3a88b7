#include "ewcheck/symbols.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <mutex>
#include <numeric>

#include "ewcheck/errors.hpp"
#include "ewcheck/expr.hpp"

namespace ew {

namespace {

bool valid_identifier(const std::string& s) {
    if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

}  // namespace

int SymbolTable::jet_cap_from_env() {
    if (const char* env = std::getenv("EWCHECK_MAX_JET")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 6;
}

std::shared_ptr<SymbolTable> SymbolTable::create(const std::array<std::string, 3>& coords, int max_jet) {
    auto tab = std::shared_ptr<SymbolTable>(new SymbolTable);
    tab->max_jet_ = max_jet;
    for (int i = 0; i < 3; ++i) {
        if (!valid_identifier(coords[i])) throw Error("invalid coordinate name '" + coords[i] + "'");
        SymbolData d;
        d.name = coords[i];
        d.kind = SymbolKind::Coordinate;
        tab->coords_[i] = tab->add_locked(std::move(d));
    }
    return tab;
}

SymbolId SymbolTable::add_locked(SymbolData data) {
    if (by_name_.count(data.name)) throw DuplicateSymbol("symbol '" + data.name + "' is already declared");
    SymbolId id = static_cast<SymbolId>(syms_.size());
    by_name_[data.name] = id;
    syms_.push_back(std::move(data));
    rules_.push_back({});
    ranks_.reset();
    sorted_.reset();
    return id;
}

int SymbolTable::coord_index(SymbolId s) const {
    for (int i = 0; i < 3; ++i)
        if (coords_[i] == s) return i;
    return -1;
}

std::string SymbolTable::coord_name(int i) const { return name(coords_[i]); }

int SymbolTable::num_symbols() const {
    std::shared_lock lk(mu_);
    return static_cast<int>(syms_.size());
}

SymbolData SymbolTable::symbol(SymbolId s) const {
    std::shared_lock lk(mu_);
    return syms_.at(s);
}

std::string SymbolTable::name(SymbolId s) const {
    std::shared_lock lk(mu_);
    return syms_.at(s).name;
}

std::optional<SymbolId> SymbolTable::find(const std::string& name) const {
    std::shared_lock lk(mu_);
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

SymbolId SymbolTable::add_function(const std::string& name, const std::vector<SymbolId>& deps) {
    if (!valid_identifier(name)) throw Error("invalid function name '" + name + "'");
    if (deps.empty()) throw Error("function symbol '" + name + "' needs at least one dependency coordinate");
    for (SymbolId c : deps)
        if (coord_index(c) < 0) throw UnknownSymbol("dependency of '" + name + "' is not a chart coordinate");
    std::unique_lock lk(mu_);
    SymbolData d;
    d.name = name;
    d.kind = SymbolKind::Function;
    d.deps = deps;
    d.order.assign(deps.size(), 0);
    SymbolId id = add_locked(std::move(d));
    syms_[id].base = id;
    return id;
}

SymbolId SymbolTable::add_custom(const std::string& name, const std::vector<SymbolId>& deps) {
    if (!valid_identifier(name)) throw Error("invalid symbol name '" + name + "'");
    for (SymbolId c : deps)
        if (coord_index(c) < 0) throw UnknownSymbol("dependency of '" + name + "' is not a chart coordinate");
    std::unique_lock lk(mu_);
    SymbolData d;
    d.name = name;
    d.kind = SymbolKind::Custom;
    d.deps = deps;
    return add_locked(std::move(d));
}

void SymbolTable::set_custom_rule(SymbolId sym, SymbolId coord, const Expr& rule) {
    int ci = coord_index(coord);
    if (ci < 0) throw UnknownSymbol("custom rule target is not a chart coordinate");
    std::unique_lock lk(mu_);
    if (syms_.at(sym).kind != SymbolKind::Custom) throw Error("derivative rules can only be set on custom symbols");
    rules_[sym][ci] = std::make_shared<const Expr>(rule);
}

std::shared_ptr<const Expr> SymbolTable::custom_rule(SymbolId sym, SymbolId coord) const {
    int ci = coord_index(coord);
    std::shared_lock lk(mu_);
    return ci < 0 ? nullptr : rules_.at(sym)[ci];
}

std::string SymbolTable::jet_name_locked(SymbolId base, const std::vector<int>& order) const {
    const SymbolData& b = syms_.at(base);
    std::string n = b.name;
    if (b.deps.size() == 1) {
        n.append(static_cast<size_t>(order[0]), '\'');
    } else {
        n += "_";
        for (size_t i = 0; i < order.size(); ++i) {
            const std::string& cn = syms_.at(b.deps[i]).name;
            for (int k = 0; k < order[i]; ++k) n += cn;
        }
    }
    return n;
}

SymbolId SymbolTable::jet_locked(SymbolId base, const std::vector<int>& order) {
    int total = std::accumulate(order.begin(), order.end(), 0);
    if (total == 0) return base;
    if (total > max_jet_)
        throw JetDepthExceeded("jet tower for '" + syms_.at(base).name + "' exceeds cap " +
                               std::to_string(max_jet_) + " (EWCHECK_MAX_JET)");
    std::string n = jet_name_locked(base, order);
    auto it = by_name_.find(n);
    if (it != by_name_.end()) {
        const SymbolData& s = syms_[it->second];
        if (s.kind != SymbolKind::Function || s.base != base || s.order != order)
            throw DuplicateSymbol("jet name '" + n + "' collides with an existing symbol");
        return it->second;
    }
    SymbolData d;
    d.name = n;
    d.kind = SymbolKind::Function;
    d.base = base;
    d.order = order;
    d.deps = syms_.at(base).deps;
    return add_locked(std::move(d));
}

SymbolId SymbolTable::jet(SymbolId fn, int dep_index) {
    std::unique_lock lk(mu_);
    const SymbolData& s = syms_.at(fn);
    if (s.kind != SymbolKind::Function) throw Error("jet() requires a function symbol");
    std::vector<int> order = s.order;
    order.at(dep_index) += 1;
    return jet_locked(s.base, order);
}

SymbolId SymbolTable::jet_at(SymbolId base, const std::vector<int>& order) {
    std::unique_lock lk(mu_);
    const SymbolData& s = syms_.at(base);
    if (s.kind != SymbolKind::Function || s.base != base) throw Error("jet_at() requires a base function symbol");
    if (order.size() != s.deps.size()) throw Error("jet order length does not match dependencies");
    return jet_locked(base, order);
}

SymbolTable::Rule SymbolTable::derivative_rule(SymbolId v, SymbolId coord) {
    {
        std::shared_lock lk(mu_);
        const SymbolData& s = syms_.at(v);
        switch (s.kind) {
            case SymbolKind::Coordinate:
                return Rule{v == coord ? Rule::One : Rule::Zero, -1, nullptr};
            case SymbolKind::Custom: {
                int ci = coord_index(coord);
                auto r = ci < 0 ? nullptr : rules_.at(v)[ci];
                if (!r) return Rule{Rule::Zero, -1, nullptr};
                return Rule{Rule::Closed, -1, r};
            }
            case SymbolKind::Function: {
                auto dep = std::find(s.deps.begin(), s.deps.end(), coord);
                if (dep == s.deps.end()) return Rule{Rule::Zero, -1, nullptr};
                break;  // need the write path below
            }
        }
    }
    std::unique_lock lk(mu_);
    const SymbolData s = syms_.at(v);
    auto dep = std::find(s.deps.begin(), s.deps.end(), coord);
    std::vector<int> order = s.order;
    order[dep - s.deps.begin()] += 1;
    return Rule{Rule::Var, jet_locked(s.base, order), nullptr};
}

SymbolId SymbolTable::adjoin_sigma(const std::string& name, const Polynomial& square) {
    std::unique_lock lk(mu_);
    if (sigma_) {
        if (sigma_square_ == square) return *sigma_;
        throw Error("a square-root symbol with a different square is already adjoined to this chart");
    }
    SymbolData d;
    d.name = name;
    d.kind = SymbolKind::Custom;
    d.deps = {coords_[0], coords_[1], coords_[2]};
    SymbolId id = add_locked(std::move(d));
    sigma_ = id;
    sigma_square_ = square;
    return id;
}

std::optional<SymbolId> SymbolTable::sigma() const {
    std::shared_lock lk(mu_);
    return sigma_;
}

const Polynomial& SymbolTable::sigma_square() const {
    std::shared_lock lk(mu_);
    return sigma_square_;
}

std::shared_ptr<const std::vector<SymbolId>> SymbolTable::ids_by_name() const {
    {
        std::shared_lock lk(mu_);
        if (sorted_) return sorted_;
    }
    std::unique_lock lk(mu_);
    if (!sorted_) {
        auto ids = std::make_shared<std::vector<SymbolId>>(syms_.size());
        std::iota(ids->begin(), ids->end(), 0);
        std::sort(ids->begin(), ids->end(),
                  [&](SymbolId a, SymbolId b) { return syms_[a].name < syms_[b].name; });
        sorted_ = std::move(ids);
    }
    return sorted_;
}

std::shared_ptr<const std::vector<int>> SymbolTable::name_ranks() const {
    {
        std::shared_lock lk(mu_);
        if (ranks_) return ranks_;
    }
    std::unique_lock lk(mu_);
    if (!ranks_) {
        if (!sorted_ || sorted_->size() != syms_.size()) {
            auto ids = std::make_shared<std::vector<SymbolId>>(syms_.size());
            std::iota(ids->begin(), ids->end(), 0);
            std::sort(ids->begin(), ids->end(),
                      [&](SymbolId a, SymbolId b) { return syms_[a].name < syms_[b].name; });
            sorted_ = std::move(ids);
        }
        auto ranks = std::make_shared<std::vector<int>>(syms_.size());
        for (size_t r = 0; r < sorted_->size(); ++r) (*ranks)[(*sorted_)[r]] = static_cast<int>(r);
        ranks_ = std::move(ranks);
    }
    return ranks_;
}

}  // namespace ew
