#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "freelip/errors.hpp"

namespace freelip {

// et_off keeps plain value semantics so the alias composes with templates.
using Rational =
    boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                  boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::mpz_int;

// Two scalar modes share one code path: T = double (tolerance-based) and
// T = Rational (exact; every tolerance collapses to equality with zero).
template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static double abs(double x) { return std::fabs(x); }
    static double to_double(double x) { return x; }
    static bool is_zero(double x, double tol) { return std::fabs(x) <= tol; }
};

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
    static double to_double(const Rational& x) { return x.convert_to<double>(); }
    static bool is_zero(const Rational& x, double) { return x == 0; }
};

template <class T>
T abs_val(const T& x) {
    return scalar_traits<T>::abs(x);
}

template <class T>
double to_double(const T& x) {
    return scalar_traits<T>::to_double(x);
}

// Accepts "p/q", integers, and plain decimals ("0.25", "-3.5e-2").
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) fail(Errc::BadInput, "empty number literal");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        try {
            BigInt num(text.substr(0, slash));
            BigInt den(text.substr(slash + 1));
            if (den == 0) fail(Errc::BadInput, "zero denominator in '" + text + "'");
            return Rational(num, den);
        } catch (const std::exception&) {
            fail(Errc::BadInput, "bad rational literal '" + text + "'");
        }
    }
    std::string digits;
    digits.reserve(text.size());
    long frac_digits = 0;
    long exponent = 0;
    bool seen_point = false;
    std::size_t i = 0;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        if (text[i] == '-') digits.push_back('-');
        ++i;
    }
    bool any_digit = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c >= '0' && c <= '9') {
            digits.push_back(c);
            any_digit = true;
            if (seen_point) ++frac_digits;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (c == 'e' || c == 'E') {
            ++i;
            if (i >= text.size()) fail(Errc::BadInput, "bad number literal '" + text + "'");
            char* end = nullptr;
            exponent = std::strtol(text.c_str() + i, &end, 10);
            if (end != text.c_str() + text.size())
                fail(Errc::BadInput, "bad number literal '" + text + "'");
            break;
        } else {
            fail(Errc::BadInput, "bad number literal '" + text + "'");
        }
    }
    if (!any_digit) fail(Errc::BadInput, "bad number literal '" + text + "'");
    // GMP auto-detects octal on a leading zero; strip them.
    bool neg = !digits.empty() && digits[0] == '-';
    std::string mag = digits.substr(neg ? 1 : 0);
    std::size_t first = mag.find_first_not_of('0');
    mag = first == std::string::npos ? "0" : mag.substr(first);
    Rational value{BigInt((neg ? "-" : "") + mag)};
    long shift = exponent - frac_digits;
    BigInt pow10 = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::labs(shift)));
    if (shift >= 0)
        value *= Rational(pow10);
    else
        value /= Rational(pow10);
    return value;
}

inline Rational dyadic(long long num, unsigned exp2) {
    return Rational(BigInt(num), boost::multiprecision::pow(BigInt(2), exp2));
}

inline std::string rational_string(const Rational& x) { return x.str(); }

} // namespace freelip
