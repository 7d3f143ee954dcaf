// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace acg {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class Rel { Geq, Gt, Eq };

/// A linear constraint  sum(k_v * v) rel bound  over named variables.
/// Canonical form has integer coefficients with gcd 1.
struct LinCons {
    std::map<std::string, Rational> terms; // nonzero coefficients only
    Rational bound = 0;
    Rel rel = Rel::Geq;

    LinCons() = default;
    LinCons(std::map<std::string, Rational> t, Rational b, Rel r);

    Rational coeff(const std::string& v) const;
    bool mentions(const std::string& v) const;
    bool mentions_any(const std::set<std::string>& vs) const;

    /// Scale to integer coefficients and divide by their gcd.
    void canonicalize();

    /// Over the integers, rewrite Gt as Geq with the bound rounded up.
    LinCons integer_tightened() const;

    std::string render() const;

    bool operator==(const LinCons& other) const;
    bool operator<(const LinCons& other) const;
};

/// Convenience builders.
LinCons make_diff_leq(const std::string& x, const std::string& y, long long k); // x - y <= k
LinCons make_upper(const std::string& x, long long k);                          // x <= k
LinCons make_lower(const std::string& x, long long k);                          // x >= k

/// Resolution step of the constraint-level transitive closure: eliminate v
/// from c1, c2 given opposite-sign coefficients of v.  Result is canonical.
std::optional<LinCons> resolve(const LinCons& c1, const LinCons& c2, const std::string& v);

/// Saturate the set of interesting constraints with everything reachable by
/// resolution, tracking resolved (sign, variable) directions.
std::vector<LinCons> trans_star(const std::vector<LinCons>& interesting,
                                const std::vector<LinCons>& other);

/// Parse a constraint like "x + 2y - z >= 3" or "a = b" (also <=, <, >).
/// Throws std::runtime_error on malformed input.
LinCons parse_lincons(const std::string& text);

} // namespace acg
