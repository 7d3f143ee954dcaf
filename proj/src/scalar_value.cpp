// SPDX-License-Identifier: Apache-2.0
#include "acg/scalar_value.hpp"

#include <sstream>
#include <stdexcept>

namespace acg {

namespace {

int64_t as_int(const Rational& r) {
    if (denominator(r) != 1) {
        throw std::invalid_argument("expected integer constant");
    }
    return static_cast<int64_t>(numerator(r));
}

// v = e  as the constraint  v - e = 0.
LinCons eq_cons(const std::string& v, const LinExpr& e) {
    std::map<std::string, Rational> terms;
    terms[v] = 1;
    for (const auto& [w, k] : e.terms) {
        terms[w] -= k;
    }
    return LinCons(std::move(terms), e.constant, Rel::Eq);
}

// Fold variables the DBM pins to a single value into the constant; many
// otherwise inexpressible right-hand sides become offsets or constants.
LinExpr fold_points(const Dbm& d, LinExpr e) {
    if (d.is_bottom() || e.terms.empty()) {
        return e;
    }
    Dbm cd = d.closed_form();
    for (auto it = e.terms.begin(); it != e.terms.end();) {
        size_t node = cd.node_of(it->first);
        int64_t up = cd.at(node, 0);
        int64_t lo = cd.at(0, node);
        if (up != Dbm::kInf && lo != Dbm::kInf && up == -lo) {
            e.constant += it->second * Rational(up);
            it = e.terms.erase(it);
        } else {
            ++it;
        }
    }
    return e;
}

Itv eval_expr(const Box& b, const LinExpr& e) {
    Itv acc{as_int(e.constant), as_int(e.constant)};
    for (const auto& [v, k] : e.terms) {
        Itv r = b.range(v);
        int64_t kk = as_int(k);
        Itv scaled;
        if (kk >= 0) {
            if (r.lo) {
                scaled.lo = kk * *r.lo;
            }
            if (r.hi) {
                scaled.hi = kk * *r.hi;
            }
        } else {
            if (r.hi) {
                scaled.lo = kk * *r.hi;
            }
            if (r.lo) {
                scaled.hi = kk * *r.lo;
            }
        }
        Itv next;
        if (acc.lo && scaled.lo) {
            next.lo = *acc.lo + *scaled.lo;
        }
        if (acc.hi && scaled.hi) {
            next.hi = *acc.hi + *scaled.hi;
        }
        acc = next;
    }
    return acc;
}

} // namespace

LinExpr LinExpr::of_const(Rational k) {
    LinExpr e;
    e.constant = std::move(k);
    return e;
}

LinExpr LinExpr::of_var(const std::string& v) { return of_offset(v, 0); }

LinExpr LinExpr::of_offset(const std::string& v, Rational k) {
    LinExpr e;
    e.terms[v] = 1;
    e.constant = std::move(k);
    return e;
}

std::string LinExpr::render() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [v, k] : terms) {
        if (k == 0) {
            continue;
        }
        if (first) {
            if (k == -1) {
                os << "-";
            } else if (k != 1) {
                os << k << "*";
            }
        } else {
            os << (k > 0 ? " + " : " - ");
            Rational a = abs(k);
            if (a != 1) {
                os << a << "*";
            }
        }
        os << v;
        first = false;
    }
    if (first) {
        os << constant;
    } else if (constant > 0) {
        os << " + " << constant;
    } else if (constant < 0) {
        os << " - " << -constant;
    }
    return os.str();
}

ScalarValue ScalarValue::top(DomainKind k, UniversePtr u) {
    if (k == DomainKind::Dbm) {
        return ScalarValue(Dbm::top(std::move(u)));
    }
    return ScalarValue(Box::top(std::move(u)));
}

ScalarValue ScalarValue::bottom(DomainKind k, UniversePtr u) {
    if (k == DomainKind::Dbm) {
        return ScalarValue(Dbm::bottom(std::move(u)));
    }
    return ScalarValue(Box::bottom(std::move(u)));
}

DomainKind ScalarValue::kind() const {
    return std::holds_alternative<Dbm>(v_) ? DomainKind::Dbm : DomainKind::Interval;
}

const UniversePtr& ScalarValue::universe() const {
    return std::visit([](const auto& d) -> const UniversePtr& { return d.universe(); }, v_);
}

bool ScalarValue::is_bottom() const {
    return std::visit([](const auto& d) { return d.is_bottom(); }, v_);
}

bool ScalarValue::is_top() const {
    if (top_memo_ < 0) {
        top_memo_ = std::visit([](const auto& d) { return d.is_top(); }, v_) ? 1 : 0;
    }
    return top_memo_ != 0;
}

ScalarValue ScalarValue::join(const ScalarValue& o) const {
    if (auto* d = as_dbm()) {
        return ScalarValue(d->join(*o.as_dbm()));
    }
    return ScalarValue(as_box()->join(*o.as_box()));
}

ScalarValue ScalarValue::meet(const ScalarValue& o) const {
    if (auto* d = as_dbm()) {
        return ScalarValue(d->meet(*o.as_dbm()));
    }
    return ScalarValue(as_box()->meet(*o.as_box()));
}

bool ScalarValue::leq(const ScalarValue& o) const {
    if (auto* d = as_dbm()) {
        return d->leq(*o.as_dbm());
    }
    return as_box()->leq(*o.as_box());
}

ScalarValue ScalarValue::widen(const ScalarValue& o) const {
    if (auto* d = as_dbm()) {
        return ScalarValue(d->widen(*o.as_dbm()));
    }
    return ScalarValue(as_box()->widen(*o.as_box()));
}

bool ScalarValue::equal(const ScalarValue& o) const {
    if (auto* d = as_dbm()) {
        return d->equal(*o.as_dbm());
    }
    return as_box()->equal(*o.as_box());
}

ScalarValue ScalarValue::project(const std::string& v) const {
    return std::visit([&](const auto& d) { return ScalarValue(d.project(v)); }, v_);
}

ScalarValue ScalarValue::assign(const std::string& v, const LinExpr& e) const {
    if (is_bottom()) {
        return *this;
    }
    if (auto* b = as_box()) {
        Itv r = eval_expr(*b, e);
        return ScalarValue(b->project(v).with_range(v, r));
    }
    const Dbm& d = *as_dbm();
    LinExpr f = fold_points(d, e);
    if (f.terms.empty()) {
        return ScalarValue(d.assign_const(v, as_int(f.constant)));
    }
    if (f.terms.size() == 1 && f.terms.begin()->second == 1) {
        return ScalarValue(d.assign_offset(v, f.terms.begin()->first, as_int(f.constant)));
    }
    if (!f.mentions(v)) {
        // Havoc then constrain; inexpressible shapes degrade soundly.
        return ScalarValue(d.havoc(v).assume(eq_cons(v, f)));
    }
    // Self-referential general form: route through the reserved temporary.
    if (v == "$t" || !universe()->contains("$t")) {
        return ScalarValue(d.havoc(v));
    }
    return assign("$t", f).assign(v, LinExpr::of_var("$t")).project("$t");
}

ScalarValue ScalarValue::assign_mul(const std::string& v, const LinExpr& e1,
                                    const LinExpr& e2) const {
    if (is_bottom()) {
        return *this;
    }
    if (e1.terms.empty() && e2.terms.empty()) {
        return assign(v, LinExpr::of_const(e1.constant * e2.constant));
    }
    if (e1.terms.empty()) {
        return assign_mul(v, e2, e1);
    }
    if (e2.terms.empty()) {
        LinExpr scaled;
        for (const auto& [w, k] : e1.terms) {
            scaled.terms[w] = k * e2.constant;
        }
        scaled.constant = e1.constant * e2.constant;
        return assign(v, scaled);
    }
    if (auto* b = as_box()) {
        Itv r1 = eval_expr(*b, e1);
        Itv r2 = eval_expr(*b, e2);
        return ScalarValue(b->project(v).assign_mul(v, r1, r2));
    }
    const Dbm& d = *as_dbm();
    LinExpr f1 = fold_points(d, e1);
    LinExpr f2 = fold_points(d, e2);
    if (f1.terms.empty() || f2.terms.empty()) {
        return assign_mul(v, f1, f2);
    }
    return ScalarValue(d.havoc(v));
}

ScalarValue ScalarValue::assume(const LinCons& c) const {
    return std::visit([&](const auto& d) { return ScalarValue(d.assume(c)); }, v_);
}

ScalarValue ScalarValue::assume_raw(const LinCons& c) const {
    if (auto* b = as_box()) {
        return ScalarValue(b->assume(c)); // boxes are closure-free
    }
    const Dbm& d = *as_dbm();
    if (d.is_bottom()) {
        return *this;
    }
    Dbm out = d;
    LinCons t = c.integer_tightened();
    auto add_geq = [&](const std::map<std::string, Rational>& terms, const Rational& bound) {
        if (denominator(bound) != 1) {
            return; // sound no-op; raw edges are only used for exact bounds
        }
        int64_t m = static_cast<int64_t>(numerator(bound));
        if (terms.size() == 1) {
            const auto& [v, k] = *terms.begin();
            if (k == 1) { // v >= m
                out.add_edge_raw(0, out.node_of(v), -m);
            } else if (k == -1) { // v <= -m
                out.add_edge_raw(out.node_of(v), 0, -m);
            }
            return;
        }
        if (terms.size() == 2) {
            auto it = terms.begin();
            auto [v1, k1] = *it++;
            auto [v2, k2] = *it;
            if (k1 == 1 && k2 == -1) {
                out.add_edge_raw(out.node_of(v2), out.node_of(v1), -m);
            } else if (k1 == -1 && k2 == 1) {
                out.add_edge_raw(out.node_of(v1), out.node_of(v2), -m);
            }
        }
    };
    add_geq(t.terms, t.bound);
    if (t.rel == Rel::Eq) {
        std::map<std::string, Rational> negated;
        for (const auto& [v, k] : t.terms) {
            negated[v] = -k;
        }
        add_geq(negated, -t.bound);
    }
    return ScalarValue(std::move(out));
}

ScalarValue ScalarValue::assume_noteq(const LinExpr& lhs, const LinExpr& rhs) const {
    if (auto* b = as_box()) {
        Itv x = eval_expr(*b, lhs);
        Itv y = eval_expr(*b, rhs);
        const std::string* xv =
            (lhs.terms.size() == 1 && lhs.terms.begin()->second == 1 && lhs.constant == 0)
                ? &lhs.terms.begin()->first
                : nullptr;
        const std::string* yv =
            (rhs.terms.size() == 1 && rhs.terms.begin()->second == 1 && rhs.constant == 0)
                ? &rhs.terms.begin()->first
                : nullptr;
        return ScalarValue(b->assume_noteq(x, xv, y, yv));
    }
    return *this; // disequalities are not DBM-expressible
}

bool ScalarValue::implies(const LinCons& c) const {
    return std::visit([&](const auto& d) { return d.implies(c); }, v_);
}

std::vector<LinCons> ScalarValue::constraints() const {
    return std::visit([](const auto& d) { return d.constraints(); }, v_);
}

ScalarValue ScalarValue::keep_mentioning(const std::set<std::string>& keep) const {
    return std::visit([&](const auto& d) { return ScalarValue(d.keep_mentioning(keep)); }, v_);
}

std::string ScalarValue::render() const {
    return std::visit([](const auto& d) { return d.render(); }, v_);
}

} // namespace acg
