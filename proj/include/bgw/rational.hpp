#pragma once

#include <gmpxx.h>

#include <string>

#include "bgw/errors.hpp"

namespace bgw {

// Exact arithmetic scalar used by the rational mode of the library.
using Rat = mpq_class;
using Int = mpz_class;

// Parses "num/den" or a plain integer; also accepts decimal literals such
// as "0.25" (converted exactly, 0.25 -> 1/4).
inline Rat parse_rat(const std::string& s) {
    if (s.empty()) throw ConfigError("empty rational literal");
    const auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            Rat r(s);
            if (r.get_den() == 0) throw ConfigError("zero denominator in '" + s + "'");
            r.canonicalize();
            return r;
        }
        const auto dot = s.find('.');
        if (dot == std::string::npos) {
            Rat r(s);
            r.canonicalize();
            return r;
        }
        // decimal literal: digits '.' digits
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        bool neg = false;
        if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
            neg = digits[0] == '-';
            digits.erase(digits.begin());
        }
        if (digits.empty()) throw ConfigError("bad rational literal '" + s + "'");
        Int num(digits, 10);
        Int den(1);
        for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
        Rat r(num, den);
        r.canonicalize();
        return neg ? Rat(-r) : r;
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad rational literal '" + s + "'");
    }
}

inline std::string rat_to_string(const Rat& r) {
    return r.get_str();
}

inline double rat_to_double(const Rat& r) {
    return r.get_d();
}

// Integer power with exact result; e >= 0.
inline Rat rat_pow(const Rat& base, unsigned long e) {
    Int num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), e);
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// gmpxx lacks a long long constructor; on this ABI long carries the value.
inline Int int_of(long long v) {
    return Int(static_cast<long>(v));
}

inline Int binomial(unsigned long n, unsigned long k) {
    Int out;
    mpz_bin_uiui(out.get_mpz_t(), n, k);
    return out;
}

}  // namespace bgw
