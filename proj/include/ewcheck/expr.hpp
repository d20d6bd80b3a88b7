#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "ewcheck/poly.hpp"
#include "ewcheck/symbols.hpp"

namespace ew {

/// Element of the differential ring: a rational function over exact
/// rationals in the chart coordinates and function-symbol jets, kept in
/// canonical form at all times:
///
///   - numerator and denominator are coprime;
///   - the denominator's leading coefficient (graded order, variables ranked
///     by symbol name, so the form is independent of creation order) is 1;
///   - zero is 0/1;
///   - value equality is componentwise structural equality.
///
/// When the table carries an adjoined square-root symbol s with s^2 = P,
/// canonical form additionally has s-degree <= 1 and an s-free denominator.
///
/// Values are immutable after construction and safe to share across threads.
class Expr {
  public:
    Expr() : num_(), den_(Rational(1)) {}  // zero, no table
    Expr(long value) : num_(Rational(value)), den_(Rational(1)) {}
    Expr(const Rational& value) : num_(value), den_(Rational(1)) {}

    static Expr constant(const Rational& value, TablePtr table = nullptr);
    static Expr variable(const TablePtr& table, SymbolId symbol);
    static Expr from_poly(const TablePtr& table, Polynomial p);
    static Expr fraction(const TablePtr& table, Polynomial num, Polynomial den);

    const TablePtr& table() const { return tab_; }
    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return num_.is_one() && den_.is_one(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    Rational constant_value() const { return num_.constant_value() / den_.constant_value(); }
    bool is_integer_constant() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);  // throws DivisionByZeroExpr
    Expr operator-() const;
    Expr& operator+=(const Expr& rhs) { return *this = *this + rhs; }
    Expr& operator-=(const Expr& rhs) { return *this = *this - rhs; }
    Expr& operator*=(const Expr& rhs) { return *this = *this * rhs; }
    Expr& operator/=(const Expr& rhs) { return *this = *this / rhs; }

    Expr pow(long n) const;

    /// Formal partial derivative along a chart coordinate. Function-symbol
    /// jets are created or consumed according to their rules.
    Expr diff(SymbolId coord) const;

    /// Simultaneous substitution followed by normalization. Binding a
    /// function symbol derives bindings for its jets by differentiation;
    /// explicit jet bindings must agree with the derived ones. Binding a
    /// custom symbol is rejected unless the binding satisfies the symbol's
    /// derivative rules. When bindings target a different table, every
    /// symbol occurring in the expression must be bound explicitly.
    Expr substitute(const std::map<SymbolId, Expr>& bindings) const;

    /// Exact evaluation; every variable that occurs must receive a value.
    Rational eval_rational(const std::function<std::optional<Rational>(SymbolId)>& value_of) const;

    /// Canonical rendering; the frontend parser maps it back to this value.
    std::string to_string() const;

    bool operator==(const Expr& rhs) const;
    bool operator!=(const Expr& rhs) const { return !(*this == rhs); }

  private:
    Expr(TablePtr tab, Polynomial num, Polynomial den, bool assume_reduced);
    void normalize(bool assume_reduced);
    Expr substitute_impl(const std::map<SymbolId, Expr>& bindings, bool check_guards) const;

    TablePtr tab_;  // null for detached constants
    Polynomial num_;
    Polynomial den_;
};

/// Merge the tables of two operands (either may be detached).
TablePtr merge_tables(const TablePtr& a, const TablePtr& b);

}  // namespace ew
