#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

#include "covertime/errors.hpp"

namespace covertime {

using Integer = boost::multiprecision::cpp_int;

// Exact fraction of arbitrary-precision integers. boost keeps values
// normalized: positive denominator, gcd(|num|, den) == 1, zero as 0/1.
// All arithmetic is exact; nothing in the library ever rounds.
using Rational = boost::multiprecision::cpp_rational;

// Canonical form: "p/q" with q > 0, or plain "n" when q == 1.
// numerator/denominator come from boost via ADL.
inline std::string render_rational(const Rational& value) {
    if (denominator(value) == 1) return numerator(value).str();
    return numerator(value).str() + "/" + denominator(value).str();
}

// Parses "p/q" or an integer, the only accepted forms. Decimal or
// scientific literals raise FloatLiteralRejected instead of converting.
inline Rational parse_rational(std::string_view text) {
    const std::string original(text);
    if (text.find_first_of(".eE,") != std::string_view::npos)
        throw FloatLiteralRejected(original);

    auto parse_int = [&](std::string_view part, bool sign_allowed) {
        bool negative = false;
        if (!part.empty() && (part.front() == '-' || part.front() == '+')) {
            if (!sign_allowed) throw NegativeOrZeroDenominator(original);
            negative = part.front() == '-';
            part.remove_prefix(1);
        }
        if (part.empty()) throw MalformedRational(original);
        Integer magnitude = 0;
        for (char c : part) {
            if (c < '0' || c > '9') throw MalformedRational(original);
            magnitude = magnitude * 10 + (c - '0');
        }
        return negative ? Integer(-magnitude) : magnitude;
    };

    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text, true));
    if (text.find('/', slash + 1) != std::string_view::npos)
        throw MalformedRational(original);

    const Integer num = parse_int(text.substr(0, slash), true);
    const Integer den = parse_int(text.substr(slash + 1), false);
    if (den == 0) throw NegativeOrZeroDenominator(original);
    return Rational(num, den);
}

// Fixed-point decimal rendering with round-half-even at the last digit.
// Display-only: callers always keep the exact value next to it.
inline std::string decimal_string(const Rational& value, unsigned digits = 12) {
    Integer num = numerator(value);
    const Integer den = denominator(value);
    const bool negative = num < 0;
    if (negative) num = -num;

    Integer scale = 1;
    for (unsigned i = 0; i < digits; ++i) scale *= 10;

    Integer scaled = num * scale;
    Integer quot = scaled / den;
    const Integer rem = scaled % den;
    const Integer twice = rem * 2;
    if (twice > den || (twice == den && (quot % 2) != 0)) ++quot;

    std::string body = quot.str();
    if (body.size() <= digits) body.insert(0, digits + 1 - body.size(), '0');
    body.insert(body.size() - digits, ".");
    return negative && quot != 0 ? "-" + body : body;
}

}  // namespace covertime
