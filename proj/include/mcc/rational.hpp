#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcc {

// Exact arithmetic throughout: arbitrary-precision integers and rationals.
// mpq_rational keeps values canonical (reduced, positive denominator).
using Int = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

struct ParseError : std::runtime_error {
    std::size_t position;
    ParseError(const std::string& what, std::size_t pos = 0)
        : std::runtime_error(what), position(pos) {}
};

inline Int num(const Rational& q) { return numerator(q); }
inline Int den(const Rational& q) { return denominator(q); }

inline bool is_integer(const Rational& q) { return den(q) == 1; }

// Serialized form is "p" or "p/q"; never a float.
inline std::string to_string(const Rational& q) {
    if (is_integer(q)) return num(q).str();
    return num(q).str() + "/" + den(q).str();
}

inline Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(Int(s));
        Int p(s.substr(0, slash));
        Int q(s.substr(slash + 1));
        if (q == 0) throw ParseError("zero denominator in '" + s + "'");
        return Rational(p, q);
    } catch (const std::exception&) {
        throw ParseError("malformed rational '" + s + "'");
    }
}

inline Int lcm_int(const Int& a, const Int& b) {
    if (a == 0 || b == 0) return 0;
    return abs(a * b) / gcd(a, b);
}

// Least common multiple of the denominators; 1 for an empty range.
template <typename Iter>
Int denominator_lcm(Iter first, Iter last) {
    Int l = 1;
    for (; first != last; ++first) l = lcm_int(l, den(*first));
    return l;
}

} // namespace mcc
