// SPDX-License-Identifier: Apache-2.0
#include "acg/dbm.hpp"

#include <algorithm>
#include <sstream>

namespace acg {

namespace {

inline int64_t sat_add(int64_t a, int64_t b) {
    if (a == Dbm::kInf || b == Dbm::kInf) {
        return Dbm::kInf;
    }
    return a + b;
}

// Ceiling/floor of a rational as int64.
int64_t ceil_of(const Rational& r) {
    if (denominator(r) == 1) {
        return static_cast<int64_t>(numerator(r));
    }
    BigInt num = numerator(r), den = denominator(r);
    BigInt q = num / den;
    if (num > 0 && num % den != 0) {
        q += 1;
    }
    return static_cast<int64_t>(q);
}

int64_t floor_of(const Rational& r) {
    if (denominator(r) == 1) {
        return static_cast<int64_t>(numerator(r));
    }
    BigInt num = numerator(r), den = denominator(r);
    BigInt q = num / den;
    if (num < 0 && num % den != 0) {
        q -= 1;
    }
    return static_cast<int64_t>(q);
}

} // namespace

Dbm::Dbm(UniversePtr u, bool bottom)
    : univ_(std::move(u)), n_(univ_->size() + 1), bottom_(bottom), closed_(true),
      mat_(n_ * n_, kInf) {
    for (size_t i = 0; i < n_; ++i) {
        cell(i, i) = 0;
    }
}

Dbm Dbm::top(UniversePtr u) { return Dbm(std::move(u), false); }
Dbm Dbm::bottom(UniversePtr u) { return Dbm(std::move(u), true); }

bool Dbm::is_top() const {
    if (bottom_) {
        return false;
    }
    for (size_t i = 0; i < n_; ++i) {
        for (size_t j = 0; j < n_; ++j) {
            if (i != j && at(i, j) != kInf) {
                return false;
            }
        }
    }
    return true;
}

void Dbm::set_bottom() {
    bottom_ = true;
    closed_ = true;
    std::fill(mat_.begin(), mat_.end(), kInf);
    for (size_t i = 0; i < n_; ++i) {
        cell(i, i) = 0;
    }
}

void Dbm::close() {
    if (bottom_) {
        return;
    }
    for (size_t k = 0; k < n_; ++k) {
        for (size_t i = 0; i < n_; ++i) {
            int64_t dik = at(i, k);
            if (dik == kInf) {
                continue;
            }
            for (size_t j = 0; j < n_; ++j) {
                int64_t w = sat_add(dik, at(k, j));
                if (w < at(i, j)) {
                    cell(i, j) = w;
                }
            }
        }
    }
    for (size_t i = 0; i < n_; ++i) {
        if (at(i, i) < 0) {
            set_bottom();
            return;
        }
    }
    closed_ = true;
}

void Dbm::close_incremental(size_t u, size_t v, int64_t w) {
    // Assumes the matrix was closed before edge (u,v,w) was tightened.
    if (bottom_) {
        return;
    }
    if (sat_add(at(v, u), w) < 0) {
        set_bottom();
        return;
    }
    if (w >= at(u, v)) {
        return;
    }
    cell(u, v) = w;
    for (size_t i = 0; i < n_; ++i) {
        int64_t diu = sat_add(at(i, u), w);
        if (diu == kInf) {
            continue;
        }
        for (size_t j = 0; j < n_; ++j) {
            int64_t cand = sat_add(diu, at(v, j));
            if (cand < at(i, j)) {
                cell(i, j) = cand;
            }
        }
    }
    closed_ = true;
}

Dbm Dbm::closed_form() const {
    if (is_closed()) {
        return *this;
    }
    Dbm c = *this;
    c.close();
    return c;
}

Dbm Dbm::join(const Dbm& o) const {
    check_same_universe(univ_, o.univ_);
    if (bottom_) {
        return o;
    }
    if (o.bottom_) {
        return *this;
    }
    std::optional<Dbm> ca, cb;
    const Dbm* pa = this;
    if (!is_closed()) {
        ca.emplace(closed_form());
        pa = &*ca;
    }
    const Dbm* pb = &o;
    if (!o.is_closed()) {
        cb.emplace(o.closed_form());
        pb = &*cb;
    }
    const Dbm& a = *pa;
    const Dbm& b = *pb;
    if (a.bottom_) {
        return b;
    }
    if (b.bottom_) {
        return a;
    }
    if (a.mat_ == b.mat_) {
        return a;
    }
    Dbm out = Dbm::top(univ_);
    for (size_t i = 0; i < n_ * n_; ++i) {
        out.mat_[i] = std::max(a.mat_[i], b.mat_[i]);
    }
    // Pointwise max of closed matrices is closed.
    out.closed_ = true;
    return out;
}

Dbm Dbm::meet(const Dbm& o) const {
    check_same_universe(univ_, o.univ_);
    if (bottom_ || o.is_bottom()) {
        return Dbm::bottom(univ_);
    }
    std::optional<Dbm> ca, cb;
    const Dbm* pa = this;
    if (!is_closed()) {
        ca.emplace(closed_form());
        pa = &*ca;
    }
    const Dbm* pb = &o;
    if (!o.is_closed()) {
        cb.emplace(o.closed_form());
        pb = &*cb;
    }
    const Dbm& a = *pa;
    const Dbm& b = *pb;
    if (a.bottom_ || b.bottom_) {
        return Dbm::bottom(univ_);
    }
    if (a.mat_ == b.mat_) {
        return a;
    }
    // Tighten the denser matrix with the other side's finite entries; one
    // operand is typically a thin relaxed value, so incremental closure over
    // its few edges beats a full Floyd-Warshall re-run.
    size_t b_tighter = 0, a_tighter = 0;
    for (size_t i = 0; i < n_ * n_; ++i) {
        if (b.mat_[i] < a.mat_[i]) {
            ++b_tighter;
        } else if (a.mat_[i] < b.mat_[i]) {
            ++a_tighter;
        }
    }
    Dbm base = (b_tighter <= a_tighter) ? a : b;
    const Dbm& delta = (b_tighter <= a_tighter) ? b : a;
    size_t diffs = std::min(a_tighter, b_tighter);
    if (diffs > n_) {
        for (size_t i = 0; i < n_ * n_; ++i) {
            base.mat_[i] = std::min(base.mat_[i], delta.mat_[i]);
        }
        base.closed_ = false;
        base.close();
        return base;
    }
    for (size_t i = 0; i < n_ && !base.bottom_; ++i) {
        for (size_t j = 0; j < n_; ++j) {
            if (delta.at(i, j) < base.at(i, j)) {
                base.close_incremental(i, j, delta.at(i, j));
                if (base.bottom_) {
                    break;
                }
            }
        }
    }
    return base;
}

bool Dbm::leq(const Dbm& o) const {
    check_same_universe(univ_, o.univ_);
    std::optional<Dbm> ca;
    const Dbm* pa = this;
    if (!is_closed()) {
        ca.emplace(closed_form());
        pa = &*ca;
    }
    const Dbm& a = *pa;
    if (a.bottom_) {
        return true;
    }
    if (o.is_bottom()) {
        return false;
    }
    // Every stored constraint of o must be implied by closed a; o's stored
    // entries determine its concretization whether or not o is closed.
    for (size_t i = 0; i < n_ * n_; ++i) {
        if (a.mat_[i] > o.mat_[i]) {
            return false;
        }
    }
    return true;
}

Dbm Dbm::widen(const Dbm& o) const {
    check_same_universe(univ_, o.univ_);
    if (bottom_) {
        return o;
    }
    if (o.is_bottom()) {
        return *this;
    }
    const Dbm b = o.closed_form();
    if (b.bottom_) {
        return *this;
    }
    Dbm out = *this; // keep stored (possibly unclosed) form of the left arg
    bool dropped = false;
    for (size_t i = 0; i < n_ * n_; ++i) {
        if (b.mat_[i] > out.mat_[i]) {
            out.mat_[i] = kInf;
            dropped = true;
        }
    }
    for (size_t i = 0; i < n_; ++i) {
        out.cell(i, i) = 0;
    }
    if (dropped) {
        out.closed_ = false; // must not re-close, or the widening is undone
    }
    return out;
}

bool Dbm::equal(const Dbm& o) const {
    Dbm a = closed_form();
    Dbm b = o.closed_form();
    if (a.bottom_ || b.bottom_) {
        return a.bottom_ == b.bottom_;
    }
    return a.mat_ == b.mat_;
}

Dbm Dbm::project(const std::string& v) const {
    if (bottom_) {
        return *this;
    }
    Dbm out = closed_form();
    if (out.bottom_) {
        return out;
    }
    size_t x = node_of(v);
    for (size_t i = 0; i < n_; ++i) {
        if (i != x) {
            out.cell(x, i) = kInf;
            out.cell(i, x) = kInf;
        }
    }
    return out; // dropping a row/column of a closed matrix keeps it closed
}

bool Dbm::constrains(const std::string& v) const {
    if (bottom_) {
        return false;
    }
    size_t x = node_of(v);
    for (size_t i = 0; i < n_; ++i) {
        if (i != x && (at(x, i) != kInf || at(i, x) != kInf)) {
            return true;
        }
    }
    return false;
}

Dbm Dbm::assign_const(const std::string& v, int64_t k) const {
    Dbm out = project(v);
    if (out.bottom_) {
        return out;
    }
    size_t x = node_of(v);
    out.close_incremental(x, 0, k);
    out.close_incremental(0, x, -k);
    return out;
}

Dbm Dbm::assign_copy(const std::string& v, const std::string& w) const {
    return assign_offset(v, w, 0);
}

Dbm Dbm::assign_offset(const std::string& v, const std::string& w, int64_t k) const {
    size_t x = node_of(v);
    size_t y = node_of(w);
    if (x == y) {
        // v := v + k shifts every bound on v; closure is preserved.
        if (bottom_) {
            return *this;
        }
        Dbm out = closed_form();
        if (out.bottom_) {
            return out;
        }
        for (size_t i = 0; i < n_; ++i) {
            if (i == x) {
                continue;
            }
            if (out.at(x, i) != kInf) {
                out.cell(x, i) = sat_add(out.at(x, i), k);
            }
            if (out.at(i, x) != kInf) {
                out.cell(i, x) = sat_add(out.at(i, x), -k);
            }
        }
        return out;
    }
    Dbm out = project(v);
    if (out.bottom_) {
        return out;
    }
    out.close_incremental(x, y, k);
    out.close_incremental(y, x, -k);
    return out;
}

bool Dbm::meet_lincons(const LinCons& c) {
    LinCons tightened; // only materialized for strict constraints
    if (c.rel == Rel::Gt) {
        tightened = c.integer_tightened();
    }
    const LinCons& t = c.rel == Rel::Gt ? tightened : c;
    if (t.terms.size() == 1) {
        const auto& [v, k] = *t.terms.begin();
        size_t x = node_of(v);
        // k*v >= m  ->  v >= m/k (k>0) or v <= m/k (k<0)
        if ((k == 1 || k == -1) && denominator(t.bound) == 1) {
            int64_t m = static_cast<int64_t>(numerator(t.bound));
            int64_t val = k == 1 ? m : -m;
            if (t.rel == Rel::Eq) {
                close_incremental(x, 0, val);
                if (!bottom_) {
                    close_incremental(0, x, -val);
                }
            } else if (k == 1) {
                close_incremental(0, x, -m);
            } else {
                close_incremental(x, 0, -m);
            }
            return true;
        }
        if (t.rel == Rel::Eq) {
            Rational q = t.bound / k;
            if (denominator(q) != 1) {
                set_bottom();
                return true;
            }
            int64_t val = static_cast<int64_t>(numerator(q));
            close_incremental(x, 0, val);
            if (!bottom_) {
                close_incremental(0, x, -val);
            }
            return true;
        }
        Rational q = t.bound / k;
        if (k > 0) {
            close_incremental(0, x, -ceil_of(q));
        } else {
            close_incremental(x, 0, floor_of(q));
        }
        return true;
    }
    if (t.terms.size() == 2) {
        auto it = t.terms.begin();
        const auto& [v1, k1] = *it;
        const auto& [v2, k2] = *std::next(it);
        if (!((k1 == 1 && k2 == -1) || (k1 == -1 && k2 == 1))) {
            return false;
        }
        const std::string& pos = (k1 == 1) ? v1 : v2;
        const std::string& neg = (k1 == 1) ? v2 : v1;
        if (t.rel == Rel::Eq && denominator(t.bound) != 1) {
            set_bottom(); // no integer solution
            return true;
        }
        int64_t m = ceil_of(t.bound);
        size_t p = node_of(pos);
        size_t q = node_of(neg);
        // pos - neg >= m  ->  neg - pos <= -m
        close_incremental(q, p, -m);
        if (t.rel == Rel::Eq && !bottom_) {
            close_incremental(p, q, m);
        }
        return true;
    }
    return false;
}

Dbm Dbm::assume(const LinCons& c) const {
    if (bottom_) {
        return *this;
    }
    Dbm out = closed_form();
    if (out.bottom_) {
        return out;
    }
    out.meet_lincons(c); // inexpressible -> sound no-op
    return out;
}

std::optional<int64_t> Dbm::implied_bound(size_t i, size_t j) const {
    int64_t w = at(i, j);
    return w == kInf ? std::nullopt : std::optional<int64_t>(w);
}

bool Dbm::implies(const LinCons& c) const {
    if (bottom_) {
        return true;
    }
    if (!closed_) {
        return closed_form().implies(c);
    }
    const Dbm& a = *this;
    LinCons tightened;
    if (c.rel == Rel::Gt) {
        tightened = c.integer_tightened();
    }
    const LinCons& t = c.rel == Rel::Gt ? tightened : c;
    auto check_geq = [&](const std::map<std::string, Rational>& terms,
                         const Rational& bound) -> bool {
        // Only unit difference / single-variable forms are decided.
        bool int_bound = denominator(bound) == 1;
        int64_t b = int_bound ? static_cast<int64_t>(numerator(bound)) : 0;
        if (terms.size() == 1) {
            const auto& [v, k] = *terms.begin();
            size_t x = a.node_of(v);
            if (int_bound && k == 1) { // v >= b
                return a.at(0, x) != kInf && a.at(0, x) <= -b;
            }
            if (int_bound && k == -1) { // v <= -b
                return a.at(x, 0) != kInf && a.at(x, 0) <= -b;
            }
            Rational q = bound / k;
            if (k > 0) { // v >= q
                auto ub = a.implied_bound(0, x);
                return ub && Rational(-*ub) >= q;
            }
            auto ub = a.implied_bound(x, 0); // v <= q
            return ub && Rational(*ub) <= q;
        }
        if (terms.size() == 2) {
            auto it = terms.begin();
            const auto& [v1, k1] = *it;
            const auto& [v2, k2] = *std::next(it);
            if (!((k1 == 1 && k2 == -1) || (k1 == -1 && k2 == 1))) {
                return false;
            }
            const std::string& pos = (k1 == 1) ? v1 : v2;
            const std::string& neg = (k1 == 1) ? v2 : v1;
            // pos - neg >= m  <=>  neg - pos <= -m
            int64_t w = a.at(a.node_of(neg), a.node_of(pos));
            if (w == kInf) {
                return false;
            }
            return int_bound ? w <= -b : Rational(w) <= -bound;
        }
        return false;
    };
    if (t.rel == Rel::Eq) {
        std::map<std::string, Rational> negated;
        for (const auto& [v, k] : t.terms) {
            negated[v] = -k;
        }
        return check_geq(t.terms, t.bound) && check_geq(negated, -t.bound);
    }
    return check_geq(t.terms, t.bound);
}

std::vector<LinCons> Dbm::constraints() const {
    Dbm a = closed_form();
    if (a.bottom_) {
        LinCons marker;
        marker.bound = 1;
        marker.rel = Rel::Geq;
        return {marker}; // 0 >= 1
    }
    std::vector<LinCons> out;
    for (size_t i = 0; i < n_; ++i) {
        for (size_t j = 0; j < n_; ++j) {
            if (i == j || a.at(i, j) == kInf) {
                continue;
            }
            int64_t k = a.at(i, j);
            if (i == 0) { // -x_j <= k
                out.push_back(LinCons({{univ_->name(j - 1), 1}}, Rational(-k), Rel::Geq));
            } else if (j == 0) { // x_i <= k
                out.push_back(LinCons({{univ_->name(i - 1), -1}}, Rational(-k), Rel::Geq));
            } else { // x_i - x_j <= k
                out.push_back(LinCons({{univ_->name(i - 1), -1}, {univ_->name(j - 1), 1}},
                                      Rational(-k), Rel::Geq));
            }
        }
    }
    return out;
}

Dbm Dbm::keep_mentioning(const std::set<std::string>& keep) const {
    if (bottom_) {
        return *this;
    }
    Dbm src = closed_form();
    if (src.bottom_) {
        return src;
    }
    std::vector<char> kept(n_, 0);
    for (const auto& v : keep) {
        if (univ_->contains(v)) {
            kept[node_of(v)] = 1;
        }
    }
    Dbm out = top(univ_);
    size_t edges = 0;
    for (size_t i = 0; i < n_; ++i) {
        for (size_t j = 0; j < n_; ++j) {
            if (i != j && (kept[i] || kept[j]) && src.at(i, j) != kInf) {
                out.cell(i, j) = src.at(i, j);
                ++edges;
            }
        }
    }
    if (edges == 0) {
        return out;
    }
    out.closed_ = false;
    out.close();
    return out;
}

void Dbm::add_edge_raw(size_t i, size_t j, int64_t w) {
    if (bottom_) {
        return;
    }
    if (w < at(i, j)) {
        cell(i, j) = w;
        closed_ = false;
    }
}

std::string Dbm::render() const {
    Dbm a = closed_form();
    if (a.bottom_) {
        return "_|_";
    }
    std::vector<std::string> parts;
    auto var = [&](size_t i) { return univ_->name(i - 1); };
    for (size_t i = 0; i < n_; ++i) {
        for (size_t j = 0; j < n_; ++j) {
            if (i == j || a.at(i, j) == kInf) {
                continue;
            }
            int64_t k = a.at(i, j);
            int64_t rev = (a.at(j, i) == kInf) ? kInf : a.at(j, i);
            std::ostringstream os;
            bool is_eq = rev != kInf && rev == -k;
            if (is_eq && j > i) {
                continue; // rendered once from the (min,max) side
            }
            if (i == 0) {
                if (is_eq) {
                    os << var(j) << " = " << -k;
                } else {
                    os << var(j) << " >= " << -k;
                }
            } else if (j == 0) {
                if (is_eq) {
                    os << var(i) << " = " << k;
                } else {
                    os << var(i) << " <= " << k;
                }
            } else {
                if (is_eq) {
                    os << var(i) << " - " << var(j) << " = " << k;
                } else {
                    os << var(i) << " - " << var(j) << " <= " << k;
                }
            }
            parts.push_back(os.str());
        }
    }
    if (parts.empty()) {
        return "true";
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
