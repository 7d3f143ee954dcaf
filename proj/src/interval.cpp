// SPDX-License-Identifier: Apache-2.0
#include "acg/interval.hpp"

#include <algorithm>
#include <sstream>

namespace acg {

namespace {

std::optional<int64_t> opt_min(std::optional<int64_t> a, std::optional<int64_t> b) {
    if (!a || !b) {
        return a ? a : b;
    }
    return std::min(*a, *b);
}

std::optional<int64_t> opt_max(std::optional<int64_t> a, std::optional<int64_t> b) {
    if (!a || !b) {
        return a ? a : b;
    }
    return std::max(*a, *b);
}

std::optional<int64_t> opt_add(std::optional<int64_t> a, std::optional<int64_t> b) {
    if (!a || !b) {
        return std::nullopt;
    }
    return *a + *b;
}

} // namespace

Box Box::top(UniversePtr u) { return Box(std::move(u), false); }
Box Box::bottom(UniversePtr u) { return Box(std::move(u), true); }

Itv Box::range(const std::string& v) const {
    univ_->index_of(v); // membership check
    auto it = ranges_.find(v);
    return it == ranges_.end() ? Itv{} : it->second;
}

void Box::set_range(const std::string& v, Itv r) {
    if (r.is_empty()) {
        bottom_ = true;
        ranges_.clear();
        return;
    }
    if (r.is_top()) {
        ranges_.erase(v);
    } else {
        ranges_[v] = r;
    }
}

Box Box::with_range(const std::string& v, Itv r) const {
    Box out = *this;
    if (!out.bottom_) {
        out.set_range(v, r);
    }
    return out;
}

Box Box::join(const Box& o) const {
    check_same_universe(univ_, o.univ_);
    if (bottom_) {
        return o;
    }
    if (o.bottom_) {
        return *this;
    }
    Box out = Box::top(univ_);
    // Hull per variable; a missing (infinite) bound on either side wins.
    auto hull_lo = [](std::optional<int64_t> a, std::optional<int64_t> b) {
        return (a && b) ? std::optional<int64_t>(std::min(*a, *b)) : std::nullopt;
    };
    auto hull_hi = [](std::optional<int64_t> a, std::optional<int64_t> b) {
        return (a && b) ? std::optional<int64_t>(std::max(*a, *b)) : std::nullopt;
    };
    for (const auto& [v, r] : ranges_) {
        auto it = o.ranges_.find(v);
        if (it == o.ranges_.end()) {
            continue; // other side is top for v
        }
        out.set_range(v, Itv{hull_lo(r.lo, it->second.lo), hull_hi(r.hi, it->second.hi)});
    }
    return out;
}

Box Box::meet(const Box& o) const {
    check_same_universe(univ_, o.univ_);
    if (bottom_ || o.bottom_) {
        return Box::bottom(univ_);
    }
    Box out = *this;
    for (const auto& [v, r] : o.ranges_) {
        Itv mine = out.range(v);
        out.set_range(v, Itv{opt_max(mine.lo, r.lo), opt_min(mine.hi, r.hi)});
        if (out.bottom_) {
            return out;
        }
    }
    return out;
}

bool Box::leq(const Box& o) const {
    check_same_universe(univ_, o.univ_);
    if (bottom_) {
        return true;
    }
    if (o.bottom_) {
        return false;
    }
    for (const auto& [v, r] : o.ranges_) {
        Itv mine = range(v);
        if (r.lo && (!mine.lo || *mine.lo < *r.lo)) {
            return false;
        }
        if (r.hi && (!mine.hi || *mine.hi > *r.hi)) {
            return false;
        }
    }
    return true;
}

Box Box::widen(const Box& o) const {
    check_same_universe(univ_, o.univ_);
    if (bottom_) {
        return o;
    }
    if (o.bottom_) {
        return *this;
    }
    Box out = Box::top(univ_);
    for (const auto& [v, r] : ranges_) {
        Itv other = o.range(v);
        Itv w;
        if (r.lo && other.lo && *other.lo >= *r.lo) {
            w.lo = r.lo;
        }
        if (r.hi && other.hi && *other.hi <= *r.hi) {
            w.hi = r.hi;
        }
        out.set_range(v, w);
    }
    return out;
}

bool Box::equal(const Box& o) const {
    if (bottom_ || o.bottom_) {
        return bottom_ == o.bottom_;
    }
    return ranges_ == o.ranges_;
}

Box Box::project(const std::string& v) const {
    Box out = *this;
    if (!out.bottom_) {
        out.ranges_.erase(v);
    }
    return out;
}

Box Box::assign_const(const std::string& v, int64_t k) const {
    if (bottom_) {
        return *this;
    }
    return project(v).with_range(v, Itv{k, k});
}

Box Box::assign_copy(const std::string& v, const std::string& w) const {
    if (bottom_) {
        return *this;
    }
    Itv r = range(w);
    return project(v).with_range(v, r);
}

Box Box::assign_neg(const std::string& v, const Itv& w) const {
    if (bottom_) {
        return *this;
    }
    Itv r;
    if (w.hi) {
        r.lo = -*w.hi;
    }
    if (w.lo) {
        r.hi = -*w.lo;
    }
    return project(v).with_range(v, r);
}

Box Box::assign_add(const std::string& v, const Itv& w1, const Itv& w2) const {
    if (bottom_) {
        return *this;
    }
    return project(v).with_range(v, Itv{opt_add(w1.lo, w2.lo), opt_add(w1.hi, w2.hi)});
}

Box Box::assign_sub(const std::string& v, const Itv& w1, const Itv& w2) const {
    if (bottom_) {
        return *this;
    }
    Itv neg;
    if (w2.hi) {
        neg.lo = -*w2.hi;
    }
    if (w2.lo) {
        neg.hi = -*w2.lo;
    }
    return assign_add(v, w1, neg);
}

Box Box::assign_mul(const std::string& v, const Itv& w1, const Itv& w2) const {
    if (bottom_) {
        return *this;
    }
    if (!w1.lo || !w1.hi || !w2.lo || !w2.hi) {
        return project(v);
    }
    int64_t cands[4] = {*w1.lo * *w2.lo, *w1.lo * *w2.hi, *w1.hi * *w2.lo, *w1.hi * *w2.hi};
    return project(v).with_range(
        v, Itv{*std::min_element(cands, cands + 4), *std::max_element(cands, cands + 4)});
}

Box Box::assume(const LinCons& c) const {
    if (bottom_) {
        return *this;
    }
    LinCons t = c.integer_tightened();
    Box out = *this;
    // One round of bound propagation per variable:
    //   k_v * v >= bound - sum_{w != v} k_w * w  (maximize the rhs's negation).
    auto refine = [&](const std::map<std::string, Rational>& terms, const Rational& bound) {
        for (const auto& [v, kv] : terms) {
            Rational rest_max_valid = 0; // max over box of sum_{w != v} k_w * w
            bool unbounded = false;
            for (const auto& [w, kw] : terms) {
                if (w == v) {
                    continue;
                }
                Itv r = out.range(w);
                if (kw > 0) {
                    if (!r.hi) {
                        unbounded = true;
                        break;
                    }
                    rest_max_valid += kw * Rational(*r.hi);
                } else {
                    if (!r.lo) {
                        unbounded = true;
                        break;
                    }
                    rest_max_valid += kw * Rational(*r.lo);
                }
            }
            if (unbounded) {
                continue;
            }
            Rational limit = (bound - rest_max_valid) / kv;
            Itv r = out.range(v);
            if (kv > 0) { // v >= limit
                BigInt num = numerator(limit), den = denominator(limit);
                BigInt q = num / den;
                if (num > 0 && num % den != 0) {
                    q += 1;
                }
                int64_t lo = static_cast<int64_t>(q);
                r.lo = r.lo ? std::max(*r.lo, lo) : lo;
            } else { // v <= limit
                BigInt num = numerator(limit), den = denominator(limit);
                BigInt q = num / den;
                if (num < 0 && num % den != 0) {
                    q -= 1;
                }
                int64_t hi = static_cast<int64_t>(q);
                r.hi = r.hi ? std::min(*r.hi, hi) : hi;
            }
            out.set_range(v, r);
            if (out.bottom_) {
                return;
            }
        }
    };
    refine(t.terms, t.bound);
    if (!out.bottom_ && t.rel == Rel::Eq) {
        std::map<std::string, Rational> negated;
        for (const auto& [v, k] : t.terms) {
            negated[v] = -k;
        }
        refine(negated, -t.bound);
    }
    return out;
}

Box Box::assume_noteq(const Itv& x, const std::string* xvar, const Itv& y,
                      const std::string* yvar) const {
    if (bottom_) {
        return *this;
    }
    Box out = *this;
    auto trim = [&](const std::string* var, Itv r, const Itv& point) {
        if (!var || !point.lo || !point.hi || *point.lo != *point.hi) {
            return;
        }
        int64_t k = *point.lo;
        if (r.lo && *r.lo == k) {
            r.lo = k + 1;
        }
        if (r.hi && *r.hi == k) {
            r.hi = k - 1;
        }
        out.set_range(*var, r);
    };
    trim(xvar, x, y);
    if (!out.bottom_) {
        trim(yvar, y, x);
    }
    return out;
}

bool Box::implies(const LinCons& c) const {
    if (bottom_) {
        return true;
    }
    LinCons t = c.integer_tightened();
    auto min_of = [&](const std::map<std::string, Rational>& terms) -> std::optional<Rational> {
        Rational m = 0;
        for (const auto& [v, k] : terms) {
            Itv r = range(v);
            if (k > 0) {
                if (!r.lo) {
                    return std::nullopt;
                }
                m += k * Rational(*r.lo);
            } else {
                if (!r.hi) {
                    return std::nullopt;
                }
                m += k * Rational(*r.hi);
            }
        }
        return m;
    };
    auto lo = min_of(t.terms);
    if (!lo || *lo < t.bound) {
        return false;
    }
    if (t.rel == Rel::Eq) {
        std::map<std::string, Rational> negated;
        for (const auto& [v, k] : t.terms) {
            negated[v] = -k;
        }
        auto nlo = min_of(negated);
        return nlo && *nlo >= -t.bound;
    }
    return true;
}

std::vector<LinCons> Box::constraints() const {
    if (bottom_) {
        LinCons marker;
        marker.bound = 1;
        return {marker};
    }
    std::vector<LinCons> out;
    for (const auto& [v, r] : ranges_) {
        if (r.lo) {
            out.push_back(LinCons({{v, 1}}, Rational(*r.lo), Rel::Geq));
        }
        if (r.hi) {
            out.push_back(LinCons({{v, -1}}, Rational(-*r.hi), Rel::Geq));
        }
    }
    return out;
}

Box Box::keep_mentioning(const std::set<std::string>& keep) const {
    if (bottom_) {
        return *this;
    }
    Box out = *this;
    std::erase_if(out.ranges_, [&](const auto& kv) { return keep.count(kv.first) == 0; });
    return out;
}

std::string Box::render() const {
    if (bottom_) {
        return "_|_";
    }
    if (ranges_.empty()) {
        return "true";
    }
    std::vector<std::string> parts;
    for (const auto& [v, r] : ranges_) {
        std::ostringstream os;
        if (r.lo && r.hi && *r.lo == *r.hi) {
            os << v << " = " << *r.lo;
        } else if (r.lo && r.hi) {
            os << *r.lo << " <= " << v << " <= " << *r.hi;
        } else if (r.lo) {
            os << v << " >= " << *r.lo;
        } else {
            os << v << " <= " << *r.hi;
        }
        parts.push_back(os.str());
    }
    std::sort(parts.begin(), parts.end());
    std::ostringstream os;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) {
            os << " /\\ ";
        }
        os << parts[i];
    }
    return os.str();
}

} // namespace acg
