// SPDX-License-Identifier: Apache-2.0
//
// Randomized lattice/soundness properties for the scalar domains, checked
// against brute-force enumeration of small concrete stores.  Shared between
// the unit tests and the acceptance runner.
#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "acg/scalar_value.hpp"

namespace acg::props {

inline constexpr int kLo = -3;
inline constexpr int kHi = 3;

using Store = std::vector<int64_t>; // indexed by universe position

struct CompiledCons {
    std::vector<std::pair<size_t, int64_t>> terms;
    int64_t num = 0; // bound numerator
    int64_t den = 1; // bound denominator (> 0)
    Rel rel = Rel::Geq;
};

inline CompiledCons compile_cons(const Universe& u, const LinCons& c) {
    CompiledCons out;
    for (const auto& [v, k] : c.terms) {
        out.terms.emplace_back(u.index_of(v), static_cast<int64_t>(numerator(k)));
    }
    out.num = static_cast<int64_t>(numerator(c.bound));
    out.den = static_cast<int64_t>(denominator(c.bound));
    out.rel = c.rel;
    return out;
}

inline bool satisfies(const Store& s, const CompiledCons& c) {
    int64_t sum = 0;
    for (const auto& [i, k] : c.terms) {
        sum += k * s[i];
    }
    int64_t lhs = sum * c.den;
    switch (c.rel) {
    case Rel::Geq:
        return lhs >= c.num;
    case Rel::Gt:
        return lhs > c.num;
    case Rel::Eq:
        return lhs == c.num;
    }
    return false;
}

inline std::vector<Store> all_stores(size_t nvars) {
    std::vector<Store> out;
    Store cur(nvars, kLo);
    while (true) {
        out.push_back(cur);
        size_t i = 0;
        while (i < nvars && cur[i] == kHi) {
            cur[i] = kLo;
            ++i;
        }
        if (i == nvars) {
            break;
        }
        ++cur[i];
    }
    if (nvars == 0) {
        out.assign(1, Store{});
    }
    return out;
}

/// Bit-set of grid stores satisfying every constraint of x.
inline std::vector<bool> gamma(const ScalarValue& x, const std::vector<Store>& stores) {
    std::vector<CompiledCons> cs;
    for (const auto& c : x.constraints()) {
        cs.push_back(compile_cons(*x.universe(), c));
    }
    std::vector<bool> out(stores.size(), true);
    for (size_t i = 0; i < stores.size(); ++i) {
        for (const auto& c : cs) {
            if (!satisfies(stores[i], c)) {
                out[i] = false;
                break;
            }
        }
    }
    return out;
}

struct PropReport {
    int cases = 0;
    int failures = 0;
    std::string first_failure;

    void fail(const std::string& what) {
        ++failures;
        if (first_failure.empty()) {
            first_failure = what;
        }
    }
};

inline LinCons random_cons(std::mt19937_64& rng, const Universe& u) {
    std::uniform_int_distribution<int> var(0, static_cast<int>(u.size()) - 1);
    std::uniform_int_distribution<int> bound(kLo - 1, kHi + 1);
    std::uniform_int_distribution<int> pick(0, 5);
    std::map<std::string, Rational> terms;
    int shape = pick(rng);
    int v = var(rng);
    if (shape <= 1) { // single variable, either sign
        terms[u.name(v)] = (shape == 0) ? 1 : -1;
    } else { // difference
        int w = var(rng);
        if (w == v) {
            w = (v + 1) % static_cast<int>(u.size());
        }
        terms[u.name(v)] = 1;
        terms[u.name(w)] = -1;
    }
    Rel rel = Rel::Geq;
    int r = pick(rng);
    if (r == 0) {
        rel = Rel::Gt;
    } else if (r == 1) {
        rel = Rel::Eq;
    }
    return LinCons(std::move(terms), Rational(bound(rng)), rel);
}

inline ScalarValue random_value(std::mt19937_64& rng, DomainKind k, const UniversePtr& u) {
    std::uniform_int_distribution<int> n(0, 4);
    std::uniform_int_distribution<int> special(0, 19);
    int s = special(rng);
    if (s == 0) {
        return ScalarValue::bottom(k, u);
    }
    ScalarValue v = ScalarValue::top(k, u);
    int count = n(rng);
    for (int i = 0; i < count; ++i) {
        v = v.assume(random_cons(rng, *u));
    }
    return v;
}

inline bool subset(const std::vector<bool>& a, const std::vector<bool>& b) {
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] && !b[i]) {
            return false;
        }
    }
    return true;
}

/// Runs `cases` random property checks; each case exercises the lattice laws,
/// gamma-soundness of join/meet/widen/leq/implies/project/assign, and
/// exactness of meet.
inline PropReport run_scalar_props(DomainKind kind, int cases, uint64_t seed) {
    PropReport rep;
    auto univ = make_universe({"x", "y", "z"});
    auto stores = all_stores(univ->size());
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> var(0, 2);
    std::uniform_int_distribution<int> smallk(-2, 2);

    for (int it = 0; it < cases; ++it) {
        ++rep.cases;
        ScalarValue x = random_value(rng, kind, univ);
        ScalarValue y = random_value(rng, kind, univ);
        auto gx = gamma(x, stores);
        auto gy = gamma(y, stores);

        auto describe = [&](const char* what) {
            std::ostringstream os;
            os << what << "  x = " << x.render() << "  y = " << y.render();
            return os.str();
        };

        ScalarValue j = x.join(y);
        auto gj = gamma(j, stores);
        if (!subset(gx, gj) || !subset(gy, gj)) {
            rep.fail(describe("join not an upper bound"));
        }
        if (!x.leq(j) || !y.leq(j)) {
            rep.fail(describe("leq(arg, join) failed"));
        }

        ScalarValue m = x.meet(y);
        auto gm = gamma(m, stores);
        for (size_t i = 0; i < stores.size(); ++i) {
            if (gm[i] != (gx[i] && gy[i])) {
                rep.fail(describe("meet not exact on grid"));
                break;
            }
        }
        if (!m.leq(x) || !m.leq(y)) {
            rep.fail(describe("leq(meet, arg) failed"));
        }

        if (!x.join(x).equal(x) || !x.meet(x).equal(x)) {
            rep.fail(describe("idempotence failed"));
        }
        if (!x.join(y).equal(y.join(x)) || !x.meet(y).equal(y.meet(x))) {
            rep.fail(describe("commutativity failed"));
        }
        if (!x.join(x.meet(y)).equal(x) || !x.meet(x.join(y)).equal(x)) {
            rep.fail(describe("absorption failed"));
        }

        if (x.leq(y) && !subset(gx, gy)) {
            rep.fail(describe("leq unsound"));
        }

        ScalarValue w = x.widen(y);
        auto gw = gamma(w, stores);
        if (!subset(gx, gw) || !subset(gy, gw)) {
            rep.fail(describe("widen not an upper bound"));
        }

        LinCons c = random_cons(rng, *univ);
        auto cc = compile_cons(*univ, c);
        ScalarValue xa = x.assume(c);
        auto gxa = gamma(xa, stores);
        for (size_t i = 0; i < stores.size(); ++i) {
            if (gx[i] && satisfies(stores[i], cc) && !gxa[i]) {
                rep.fail(describe("assume dropped a model"));
                break;
            }
        }
        if (x.implies(c)) {
            for (size_t i = 0; i < stores.size(); ++i) {
                if (gx[i] && !satisfies(stores[i], cc)) {
                    rep.fail(describe("implies unsound"));
                    break;
                }
            }
        }

        int pv = var(rng);
        ScalarValue xp = x.project(univ->name(pv));
        auto gxp = gamma(xp, stores);
        for (size_t i = 0; i < stores.size() && rep.failures == 0; ++i) {
            if (!gx[i]) {
                continue;
            }
            for (int d = kLo; d <= kHi; ++d) {
                Store s = stores[i];
                s[pv] = d;
                size_t pos = 0;
                for (size_t q = s.size(); q-- > 0;) {
                    pos = pos * (kHi - kLo + 1) + static_cast<size_t>(s[q] - kLo);
                }
                if (!gxp[pos]) {
                    rep.fail(describe("project dropped a model"));
                    break;
                }
            }
        }

        // v := w + k soundness.
        int av = var(rng), aw = var(rng);
        int64_t k = smallk(rng);
        ScalarValue xs = x.assign(univ->name(av), LinExpr::of_offset(univ->name(aw), k));
        auto gxs = gamma(xs, stores);
        for (size_t i = 0; i < stores.size(); ++i) {
            if (!gx[i]) {
                continue;
            }
            Store s = stores[i];
            s[av] = s[aw] + k;
            if (s[av] < kLo || s[av] > kHi) {
                continue; // off-grid successor, not observable here
            }
            size_t pos = 0;
            for (size_t q = s.size(); q-- > 0;) {
                pos = pos * (kHi - kLo + 1) + static_cast<size_t>(s[q] - kLo);
            }
            if (!gxs[pos]) {
                rep.fail(describe("assign dropped a model"));
                break;
            }
        }
    }
    return rep;
}

/// Widening chains must stabilize: along x_{n+1} = x_n nabla (x_n join y_n)
/// with arbitrary y_n, only finitely many steps may change the value.  Each
/// step keeps a subset of the previous bounds, so strict changes are bounded
/// by 2 * #variables^2.
inline bool widening_chains_stabilize(DomainKind kind, int chains, uint64_t seed) {
    auto univ = make_universe({"x", "y", "z"});
    std::mt19937_64 rng(seed);
    int limit = 2 * static_cast<int>(univ->size() * univ->size());
    for (int it = 0; it < chains; ++it) {
        ScalarValue acc = random_value(rng, kind, univ);
        int strict = 0;
        for (int step = 0; step < 3 * limit; ++step) {
            ScalarValue next = acc.widen(acc.join(random_value(rng, kind, univ)));
            if (!next.equal(acc)) {
                ++strict;
            }
            acc = next;
        }
        if (strict > limit) {
            return false;
        }
    }
    return true;
}

} // namespace acg::props
