#include "ewcheck/generators.hpp"

#include <random>

namespace ew {

namespace {

Expr linear_poly(const TablePtr& tab, std::mt19937_64& rng, int max_abs) {
    std::uniform_int_distribution<int> coef(-max_abs, max_abs);
    auto coords = tab->coords();
    Expr e = Expr::constant(Rational(coef(rng)), tab);
    for (SymbolId c : coords) e += Rational(coef(rng)) * Expr::variable(tab, c);
    return e;
}

}  // namespace

WeylStructure random_weyl_structure(uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto tab = SymbolTable::create({"y", "x", "t"});
    Chart chart{tab, {1, 1, -1}};
    auto coords = tab->coords();
    Expr one = Expr::constant(Rational(1), tab);

    // Unit upper-triangular L keeps det h = -d0 d1 d2 free of the random
    // entries, so nondegeneracy is structural rather than checked. Mostly
    // constant diagonals keep the inverse metric polynomial and the identity
    // checks cheap; every fourth structure gets one everywhere-positive
    // nonconstant factor to exercise the rational path.
    Expr l01 = linear_poly(tab, rng, 1);
    Expr l02 = linear_poly(tab, rng, 1);
    Expr l12 = linear_poly(tab, rng, 1);

    std::uniform_int_distribution<int> pick(0, 3);
    auto const_factor = [&]() -> Expr {
        switch (pick(rng)) {
            case 0: return one;
            case 1: return Expr::constant(Rational(2), tab);
            case 2: return Expr::constant(Rational(1, 2), tab);
            default: return Expr::constant(Rational(3), tab);
        }
    };
    Expr d0 = const_factor(), d1 = const_factor(), d2 = const_factor();
    if (seed % 4 == 0) {
        Expr c = Expr::variable(tab, coords[pick(rng) % 3]);
        d0 = one + c * c;  // positive everywhere
        l02 = Expr::constant(Rational(0), tab);
        l01 = Expr::constant(Rational(pick(rng) - 1), tab);
    }

    // rows of L
    const Expr zero = Expr::constant(Rational(0), tab);
    Expr L[3][3] = {{one, l01, l02}, {zero, one, l12}, {zero, zero, one}};
    Expr D[3] = {d0, d1, -d2};

    Tensor g(chart, {Slot::Down, Slot::Down});
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            Expr sum = zero;
            for (int k = 0; k < 3; ++k) sum += L[k][i] * D[k] * L[k][j];
            g.at({i, j}) = sum;
            if (i != j) g.at({j, i}) = std::move(sum);
        }

    Tensor om(chart, {Slot::Down});
    for (int i = 0; i < 3; ++i) om.at({i}) = linear_poly(tab, rng, 2) / 2;

    return WeylStructure(chart, Metric(std::move(g)), std::move(om), 1, {1, 1, 1});
}

Expr random_conformal_factor(const TablePtr& table, uint64_t seed, const RefPoint& refpoint) {
    std::mt19937_64 rng(seed);
    auto coords = table->coords();
    for (;;) {
        Expr phi = Expr::constant(Rational(1), table) + linear_poly(table, rng, 1) / 3;
        if (phi.is_constant() && phi.constant_value() == 0) continue;
        Rational at_ref = phi.eval_rational([&](SymbolId s) -> std::optional<Rational> {
            for (int i = 0; i < 3; ++i)
                if (coords[i] == s) return refpoint[i];
            return std::nullopt;
        });
        if (at_ref != 0) return phi;
    }
}

Expr random_toda_kernel(const TablePtr& table, uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (;;) {
        Expr n = Expr::constant(Rational(1), table) + linear_poly(table, rng, 2) / 2;
        std::uniform_int_distribution<int> denom_too(0, 1);
        if (denom_too(rng)) {
            Expr d = Expr::constant(Rational(2), table) + linear_poly(table, rng, 1);
            if (!d.is_zero()) n = n / d;
        }
        if (!n.is_zero()) return n;
    }
}

}  // namespace ew
