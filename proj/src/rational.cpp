#include "ewcheck/rational.hpp"

#include <cctype>

namespace ew {

Rational rational_gcd(const Rational& a, const Rational& b) {
    if (a == 0) return abs(b);
    if (b == 0) return abs(a);
    mpz_class num, den;
    mpz_gcd(num.get_mpz_t(), a.get_num().get_mpz_t(), b.get_num().get_mpz_t());
    mpz_lcm(den.get_mpz_t(), a.get_den().get_mpz_t(), b.get_den().get_mpz_t());
    Rational g(num, den);
    g.canonicalize();
    return g;
}

std::optional<Rational> rational_sqrt(const Rational& q) {
    if (sgn(q) < 0) return std::nullopt;
    if (q == 0) return Rational(0);
    const mpz_class& num = q.get_num();
    const mpz_class& den = q.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) return std::nullopt;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    Rational r(rn, rd);
    r.canonicalize();
    return r;
}

std::optional<Rational> parse_rational(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::string s = text;
    bool neg = false;
    size_t pos = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        pos = 1;
    }
    if (pos >= s.size()) return std::nullopt;

    auto all_digits = [](const std::string& t) {
        if (t.empty()) return false;
        for (char c : t)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    };

    std::string body = s.substr(pos);
    auto slash = body.find('/');
    auto dot = body.find('.');
    Rational r;
    if (slash != std::string::npos) {
        std::string num = body.substr(0, slash), den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den) || den == "0") return std::nullopt;
        r = Rational(mpz_class(num), mpz_class(den));
    } else if (dot != std::string::npos) {
        std::string ip = body.substr(0, dot), fp = body.substr(dot + 1);
        if (ip.empty()) ip = "0";
        if (!all_digits(ip) || (!fp.empty() && !all_digits(fp))) return std::nullopt;
        mpz_class scale = 1;
        for (size_t i = 0; i < fp.size(); ++i) scale *= 10;
        r = Rational(mpz_class(ip) * scale + (fp.empty() ? mpz_class(0) : mpz_class(fp)), scale);
    } else {
        if (!all_digits(body)) return std::nullopt;
        r = Rational(mpz_class(body));
    }
    r.canonicalize();
    return neg ? Rational(-r) : r;
}

std::string to_string(const Rational& q) { return q.get_str(); }

}  // namespace ew
