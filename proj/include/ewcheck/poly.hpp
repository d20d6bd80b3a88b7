#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ewcheck/rational.hpp"

namespace ew {

/// Variable identifier. Ids index into a SymbolTable, but the polynomial
/// layer itself knows nothing about symbols: it is plain sparse arithmetic
/// over Q[x_0, x_1, ...].
using VarId = int32_t;

/// Exponent vector indexed by VarId. Trailing zeros are trimmed, so vectors
/// of different lengths compare with implicit zero padding.
using Exponents = std::vector<uint32_t>;

/// Graded-lexicographic comparison: total degree first, then lexicographic
/// with the smallest VarId most significant. Returns <0, 0, >0.
int compare_graded_lex(const Exponents& a, const Exponents& b);

/// Same grading, but the lexicographic tie-break walks variables in a
/// caller-supplied significance order (used for rendering and for the
/// table-independent canonical scaling of fractions).
int compare_graded_order(const Exponents& a, const Exponents& b, const std::vector<VarId>& order);

struct Term {
    Rational coef;
    Exponents exps;

    bool operator==(const Term&) const = default;
};

/// Sparse multivariate polynomial with exact rational coefficients. Terms are
/// kept sorted in descending graded-lex order with no zero coefficients and
/// no trailing-zero exponents, so structural equality is value equality.
class Polynomial {
  public:
    Polynomial() = default;  // zero
    explicit Polynomial(const Rational& c);
    explicit Polynomial(long c) : Polynomial(Rational(c)) {}

    static Polynomial variable(VarId v, uint32_t exp = 1);
    static Polynomial from_terms(std::vector<Term> terms);

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].exps.empty()); }
    bool is_one() const;
    Rational constant_value() const;  // pre: is_constant()

    /// -1 for the zero polynomial.
    int total_degree() const;
    uint32_t degree_in(VarId v) const;
    std::vector<VarId> vars() const;
    bool uses_var(VarId v) const;

    const std::vector<Term>& terms() const { return terms_; }
    size_t size() const { return terms_.size(); }

    Polynomial operator-() const;
    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);
    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    Polynomial pow(uint32_t n) const;

    Polynomial mul_scalar(const Rational& c) const;
    Polynomial div_scalar(const Rational& c) const;  // pre: c != 0

    /// Plain power-rule derivative with respect to one variable (the chain
    /// rule for dependent symbols lives at the Expr level).
    Polynomial derivative(VarId v) const;

    /// Dense coefficient list in v: result[k] is the coefficient of v^k,
    /// a polynomial in the remaining variables.
    std::vector<Polynomial> coeffs_in(VarId v) const;
    static Polynomial from_coeffs_in(VarId v, const std::vector<Polynomial>& cs);

    const Term& leading_term() const { return terms_.front(); }  // pre: !is_zero()
    /// Leading coefficient under compare_graded_order with the given ranking.
    Rational leading_coef_ordered(const std::vector<VarId>& order) const;

    /// content/primitive decomposition over Q: content is the rational c
    /// such that p/c has coprime integer coefficients and a positive leading
    /// (graded-lex) coefficient; the sign of p goes into c.
    Rational rational_content() const;  // 0 for zero polynomial
    Polynomial primitive_part() const;

    /// Evaluate with exact rational values for every variable used.
    Rational eval(const std::function<Rational(VarId)>& value_of) const;

    bool operator==(const Polynomial&) const = default;

  private:
    std::vector<Term> terms_;
};

/// GCD over the field Q[vars]: returns a primitive polynomial with positive
/// leading coefficient (1 when the inputs are coprime or either is a nonzero
/// constant; 0 only when both are zero).
Polynomial poly_gcd(const Polynomial& a, const Polynomial& b);

/// Exact division: a / b when b divides a, nullopt otherwise.
std::optional<Polynomial> divide_exact(const Polynomial& a, const Polynomial& b);

/// Exact polynomial square root, if p is a perfect square in Q[vars].
std::optional<Polynomial> sqrt_exact(const Polynomial& p);

}  // namespace ew
