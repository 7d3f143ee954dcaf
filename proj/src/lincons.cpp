// SPDX-License-Identifier: Apache-2.0
#include "acg/lincons.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace acg {

LinCons::LinCons(std::map<std::string, Rational> t, Rational b, Rel r)
    : terms(std::move(t)), bound(std::move(b)), rel(r) {
    for (auto it = terms.begin(); it != terms.end();) {
        if (it->second == 0) {
            it = terms.erase(it);
        } else {
            ++it;
        }
    }
    canonicalize();
}

Rational LinCons::coeff(const std::string& v) const {
    auto it = terms.find(v);
    return it == terms.end() ? Rational(0) : it->second;
}

bool LinCons::mentions(const std::string& v) const { return terms.count(v) != 0; }

bool LinCons::mentions_any(const std::set<std::string>& vs) const {
    for (const auto& [v, k] : terms) {
        (void)k;
        if (vs.count(v)) {
            return true;
        }
    }
    return false;
}

void LinCons::canonicalize() {
    if (terms.empty()) {
        return;
    }
    // Unit-coefficient constraints with an integer bound are already
    // canonical; this covers difference constraints, the hot case.
    bool unit = denominator(bound) == 1;
    for (auto it = terms.begin(); unit && it != terms.end(); ++it) {
        unit = it->second == 1 || it->second == -1;
    }
    if (unit) {
        return;
    }
    BigInt denom_lcm = 1;
    for (const auto& [v, k] : terms) {
        (void)v;
        denom_lcm = lcm(denom_lcm, denominator(k));
    }
    denom_lcm = lcm(denom_lcm, denominator(bound));
    BigInt g = 0;
    for (const auto& [v, k] : terms) {
        (void)v;
        g = gcd(g, abs(numerator(k) * (denom_lcm / denominator(k))));
    }
    Rational scale = Rational(denom_lcm) / Rational(g);
    for (auto& [v, k] : terms) {
        (void)v;
        k *= scale;
    }
    bound *= scale;
}

LinCons LinCons::integer_tightened() const {
    if (rel != Rel::Gt) {
        // An equality with a fractional bound has no integer solution; the
        // caller detects that via the bound's denominator.
        return *this;
    }
    LinCons out = *this;
    out.rel = Rel::Geq;
    // k^T x > m  over Z with integer coefficients means k^T x >= floor(m)+1.
    BigInt num = numerator(out.bound);
    BigInt den = denominator(out.bound);
    BigInt fl = num / den;
    if (num < 0 && num % den != 0) {
        fl -= 1;
    }
    out.bound = Rational(fl + 1);
    return out;
}

static std::string render_rational(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

std::string LinCons::render() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [v, k] : terms) {
        if (k < 0) {
            os << (first ? "-" : " - ");
        } else if (!first) {
            os << " + ";
        }
        Rational a = abs(k);
        if (a != 1) {
            os << render_rational(a) << "*";
        }
        os << v;
        first = false;
    }
    switch (rel) {
    case Rel::Geq: os << " >= "; break;
    case Rel::Gt: os << " > "; break;
    case Rel::Eq: os << " = "; break;
    }
    os << render_rational(bound);
    return os.str();
}

bool LinCons::operator==(const LinCons& other) const {
    return rel == other.rel && bound == other.bound && terms == other.terms;
}

bool LinCons::operator<(const LinCons& other) const {
    if (rel != other.rel) {
        return rel < other.rel;
    }
    if (terms != other.terms) {
        return terms < other.terms;
    }
    return bound < other.bound;
}

LinCons make_diff_leq(const std::string& x, const std::string& y, long long k) {
    // x - y <= k  ==  y - x >= -k
    return LinCons({{y, 1}, {x, -1}}, Rational(-k), Rel::Geq);
}

LinCons make_upper(const std::string& x, long long k) {
    return LinCons({{x, -1}}, Rational(-k), Rel::Geq);
}

LinCons make_lower(const std::string& x, long long k) {
    return LinCons({{x, 1}}, Rational(k), Rel::Geq);
}

std::optional<LinCons> resolve(const LinCons& c1, const LinCons& c2, const std::string& v) {
    if (c1.rel == Rel::Eq || c2.rel == Rel::Eq) {
        return std::nullopt;
    }
    Rational k1 = c1.coeff(v);
    Rational k2 = c2.coeff(v);
    if (k1 == 0 || k2 == 0 || (k1 > 0) == (k2 > 0)) {
        return std::nullopt;
    }
    Rational f = k1 / k2; // negative
    std::map<std::string, Rational> terms = c1.terms;
    for (const auto& [w, k] : c2.terms) {
        terms[w] -= f * k;
    }
    Rational bound = c1.bound - f * c2.bound;
    Rel rel = (c1.rel == Rel::Gt || c2.rel == Rel::Gt) ? Rel::Gt : Rel::Geq;
    terms.erase(v);
    if (terms.empty()) {
        return std::nullopt;
    }
    return LinCons(std::move(terms), std::move(bound), rel);
}

std::vector<LinCons> trans_star(const std::vector<LinCons>& interesting,
                                const std::vector<LinCons>& other) {
    std::set<std::pair<int, std::string>> resolved; // (sign, variable)
    std::vector<LinCons> kept = interesting;
    for (const auto& c : kept) {
        for (const auto& [v, k] : c.terms) {
            resolved.insert({k > 0 ? +1 : -1, v});
        }
    }
    std::vector<LinCons> pending = other;
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = pending.begin(); it != pending.end();) {
            // c is resolvable through v when some prior constraint used v with
            // the opposite sign; the other variables of c then become resolved
            // in the direction they occur.
            std::optional<std::string> via;
            for (const auto& [v, k] : it->terms) {
                if (resolved.count({k > 0 ? -1 : +1, v})) {
                    via = v;
                    break;
                }
            }
            if (via) {
                for (const auto& [v, k] : it->terms) {
                    if (v != *via) {
                        resolved.insert({k > 0 ? +1 : -1, v});
                    }
                }
                kept.push_back(*it);
                it = pending.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }
    return kept;
}

namespace {

struct ConsLexer {
    const std::string& s;
    size_t p = 0;
    explicit ConsLexer(const std::string& text) : s(text) {}
    void skip_ws() {
        while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p]))) {
            ++p;
        }
    }
    bool eof() {
        skip_ws();
        return p >= s.size();
    }
    char peek() {
        skip_ws();
        return p < s.size() ? s[p] : '\0';
    }
};

bool parse_side(ConsLexer& lx, std::map<std::string, Rational>& terms, Rational& constant) {
    // side := [+-]? term ([+-] term)*
    // term := int ('*'? var)? | var
    bool first = true;
    while (true) {
        lx.skip_ws();
        int sign = 1;
        char c = lx.peek();
        if (c == '+' || c == '-') {
            sign = (c == '-') ? -1 : 1;
            ++lx.p;
        } else if (!first) {
            return true;
        }
        lx.skip_ws();
        c = lx.peek();
        Rational k = sign;
        bool saw_num = false;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            BigInt n = 0;
            while (lx.p < lx.s.size() && std::isdigit(static_cast<unsigned char>(lx.s[lx.p]))) {
                n = n * 10 + (lx.s[lx.p] - '0');
                ++lx.p;
            }
            k *= Rational(n);
            saw_num = true;
            lx.skip_ws();
            if (lx.peek() == '*') {
                ++lx.p;
                lx.skip_ws();
            }
        }
        c = lx.peek();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
            std::string name;
            while (lx.p < lx.s.size() &&
                   (std::isalnum(static_cast<unsigned char>(lx.s[lx.p])) || lx.s[lx.p] == '_' ||
                    lx.s[lx.p] == '$')) {
                name += lx.s[lx.p];
                ++lx.p;
            }
            terms[name] += k;
        } else if (saw_num) {
            constant += k;
        } else {
            return false;
        }
        first = false;
    }
}

} // namespace

LinCons parse_lincons(const std::string& text) {
    ConsLexer lx(text);
    std::map<std::string, Rational> lhs;
    Rational lconst = 0;
    if (!parse_side(lx, lhs, lconst)) {
        throw std::runtime_error("malformed constraint: " + text);
    }
    lx.skip_ws();
    std::string op;
    while (lx.p < lx.s.size() && (lx.s[lx.p] == '<' || lx.s[lx.p] == '>' || lx.s[lx.p] == '=' ||
                                  lx.s[lx.p] == '!')) {
        op += lx.s[lx.p];
        ++lx.p;
    }
    std::map<std::string, Rational> rhs;
    Rational rconst = 0;
    if (!parse_side(lx, rhs, rconst) || !lx.eof()) {
        throw std::runtime_error("malformed constraint: " + text);
    }
    // Move everything to the left: lhs - rhs REL rconst - lconst.
    for (const auto& [v, k] : rhs) {
        lhs[v] -= k;
    }
    Rational bound = rconst - lconst;
    Rel rel;
    bool flip = false;
    if (op == ">=") {
        rel = Rel::Geq;
    } else if (op == ">") {
        rel = Rel::Gt;
    } else if (op == "<=") {
        rel = Rel::Geq;
        flip = true;
    } else if (op == "<") {
        rel = Rel::Gt;
        flip = true;
    } else if (op == "=" || op == "==") {
        rel = Rel::Eq;
    } else {
        throw std::runtime_error("unknown relation '" + op + "' in: " + text);
    }
    if (flip) {
        for (auto& [v, k] : lhs) {
            (void)v;
            k = -k;
        }
        bound = -bound;
    }
    LinCons out(std::move(lhs), std::move(bound), rel);
    if (out.terms.empty()) {
        throw std::runtime_error("constraint has no variables: " + text);
    }
    return out;
}

} // namespace acg
