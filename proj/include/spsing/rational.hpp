#pragma once

// Exact arithmetic vocabulary: GMP integers and rationals.

#include <gmpxx.h>

#include <cctype>
#include <cstring>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spsing/errors.hpp"

namespace spsing {

using Integer = mpz_class;
using Rational = mpq_class;

/// Exact rational vector; entries are kept in lowest terms with positive
/// denominators (mpq_class canonical form).
using RationalVector = std::vector<Rational>;
using IntegerVector = std::vector<Integer>;

inline Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) {
        throw Error(ErrorKind::InvalidArgument, "zero denominator");
    }
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// Parses "a/b", "a", or a plain decimal such as "0.25" or "-1.5" exactly.
inline Rational parse_rational(std::string_view text) {
    auto fail = [&] { return Error(ErrorKind::ParseError, "not a rational: '" + std::string(text) + "'"); };
    if (text.empty()) {
        throw fail();
    }
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Integer num, den;
        if (num.set_str(std::string(text.substr(0, slash)), 10) != 0 ||
            den.set_str(std::string(text.substr(slash + 1)), 10) != 0 || den == 0) {
            throw fail();
        }
        return make_rational(num, den);
    }
    std::string digits;
    std::size_t frac_digits = 0;
    bool seen_point = false;
    bool seen_digit = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if ((ch == '-' || ch == '+') && i == 0) {
            if (ch == '-') digits.push_back('-');
        } else if (ch == '.' && !seen_point) {
            seen_point = true;
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            digits.push_back(ch);
            seen_digit = true;
            if (seen_point) ++frac_digits;
        } else {
            throw fail();
        }
    }
    if (!seen_digit) {
        throw fail();
    }
    Integer num(digits, 10);
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_digits);
    return make_rational(num, den);
}

/// Always "num/den", including integers ("1/1").
inline std::string to_fraction_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline Rational pow(const Rational& base, unsigned long exponent) {
    Rational out;
    mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
    mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
    out.canonicalize();
    return out;
}

inline Integer binomial(unsigned long n, unsigned long k) {
    Integer out;
    mpz_bin_uiui(out.get_mpz_t(), n, k);
    return out;
}

inline bool is_integer(const Rational& r) { return r.get_den() == 1; }

inline RationalVector to_rational(const IntegerVector& v) {
    RationalVector out;
    out.reserve(v.size());
    for (const auto& x : v) out.emplace_back(x);
    return out;
}

/// Decimal rendering with a fixed number of significant digits (round to nearest).
inline std::string to_decimal_string(const Rational& r, int digits = 12) {
    mpf_class f(r, 512);
    mp_exp_t exp = 0;
    char* raw = mpf_get_str(nullptr, &exp, 10, static_cast<std::size_t>(digits), f.get_mpf_t());
    std::string mant(raw);
    void (*freefunc)(void*, std::size_t);
    mp_get_memory_functions(nullptr, nullptr, &freefunc);
    freefunc(raw, std::strlen(raw) + 1);
    if (mant.empty()) return "0";
    bool neg = mant.front() == '-';
    if (neg) mant.erase(0, 1);
    std::string out;
    if (exp <= 0) {
        out = "0." + std::string(static_cast<std::size_t>(-exp), '0') + mant;
    } else if (static_cast<std::size_t>(exp) >= mant.size()) {
        out = mant + std::string(static_cast<std::size_t>(exp) - mant.size(), '0');
    } else {
        out = mant.substr(0, static_cast<std::size_t>(exp)) + "." + mant.substr(static_cast<std::size_t>(exp));
    }
    return neg ? "-" + out : out;
}

}  // namespace spsing
