#pragma once

// Exact rational scalars backed by GMP.

#include <gmpxx.h>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mdissim {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p/q", an integer, or a terminating decimal such as "-0.125".
inline Rational parse_rational(std::string_view text) {
    auto fail = [&](const char* why) {
        throw std::invalid_argument("invalid rational '" + std::string(text) + "': " + why);
    };
    if (text.empty()) fail("empty");

    std::size_t pos = 0;
    bool negative = false;
    if (text[0] == '+' || text[0] == '-') {
        negative = text[0] == '-';
        pos = 1;
    }
    std::string_view body = text.substr(pos);
    if (body.empty()) fail("missing digits");

    auto all_digits = [](std::string_view s) {
        if (s.empty()) return false;
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    };

    Rational value;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        std::string_view num = body.substr(0, slash);
        std::string_view den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) fail("expected p/q");
        Integer d(std::string(den), 10);
        if (d == 0) fail("zero denominator");
        value = Rational(Integer(std::string(num), 10), d);
        value.canonicalize();
    } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
        std::string_view whole = body.substr(0, dot);
        std::string_view frac = body.substr(dot + 1);
        if (whole.empty() && frac.empty()) fail("expected digits around '.'");
        if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)))
            fail("malformed decimal");
        std::string digits = std::string(whole) + std::string(frac);
        Integer den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        value = Rational(Integer(digits.empty() ? "0" : digits, 10), den);
        value.canonicalize();
    } else {
        if (!all_digits(body)) fail("expected an integer");
        value = Rational(Integer(std::string(body), 10));
    }
    return negative ? Rational(-value) : value;
}

/// Canonical "p/q" form; integers are written without a denominator.
inline std::string to_string(const Rational& value) { return value.get_str(10); }

inline Rational half(const Rational& value) { return Rational(value / 2); }

}  // namespace mdissim
