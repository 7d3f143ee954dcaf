// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "acg/scalar_value.hpp"
#include "scalar_props.hpp"

using namespace acg;

namespace {

ScalarValue from_cons(DomainKind k, const UniversePtr& u,
                      const std::vector<std::string>& texts) {
    ScalarValue v = ScalarValue::top(k, u);
    for (const auto& t : texts) {
        v = v.assume(parse_lincons(t));
    }
    return v;
}

} // namespace

TEST_CASE("dbm join forgets facts not shared by both sides") {
    auto u = make_universe({"i", "j", "k", "x", "y", "a"});
    auto lhs = from_cons(DomainKind::Dbm, u, {"i < j", "i < k", "x < a"});
    auto rhs = from_cons(DomainKind::Dbm, u, {"i < j", "k < j", "y = a"});
    auto j = lhs.join(rhs);
    CHECK(j.implies(parse_lincons("i < j")));
    CHECK(!j.implies(parse_lincons("i < k")));
    CHECK(!j.implies(parse_lincons("k < j")));
    CHECK(!j.implies(parse_lincons("x < a")));
    CHECK(!j.implies(parse_lincons("y = a")));
    CHECK(j.render() == "i - j <= -1");
}

TEST_CASE("dbm join of two constants is the connecting range") {
    auto u = make_universe({"a"});
    auto j = from_cons(DomainKind::Dbm, u, {"a = 0"}).join(from_cons(DomainKind::Dbm, u, {"a = 1"}));
    CHECK(j.render() == "a <= 1 /\\ a >= 0");
    auto bot = ScalarValue::bottom(DomainKind::Dbm, u);
    CHECK(j.join(bot).equal(j));
    CHECK(bot.join(j).equal(j));
}

TEST_CASE("dbm meet closes over transitive consequences") {
    auto u = make_universe({"x", "y", "a"});
    auto m = from_cons(DomainKind::Dbm, u, {"x < y"}).meet(from_cons(DomainKind::Dbm, u, {"y = a"}));
    CHECK(m.implies(parse_lincons("x < a")));
    auto contra = from_cons(DomainKind::Dbm, u, {"x < y"}).meet(from_cons(DomainKind::Dbm, u, {"y < x"}));
    CHECK(contra.is_bottom());
    auto top = ScalarValue::top(DomainKind::Dbm, u);
    CHECK(m.meet(top).equal(m));
}

TEST_CASE("integer strictness: strict bounds shift by one") {
    auto u = make_universe({"x", "y"});
    auto strict = from_cons(DomainKind::Dbm, u, {"x < y"});
    auto shifted = from_cons(DomainKind::Dbm, u, {"x <= y - 1"});
    CHECK(strict.equal(shifted));
    auto istrict = from_cons(DomainKind::Interval, u, {"x < 3"});
    auto ishifted = from_cons(DomainKind::Interval, u, {"x <= 2"});
    CHECK(istrict.equal(ishifted));
}

TEST_CASE("ordering examples") {
    auto u = make_universe({"a"});
    for (auto k : {DomainKind::Dbm, DomainKind::Interval}) {
        auto bot = ScalarValue::bottom(k, u);
        auto range = from_cons(k, u, {"a >= 0", "a <= 1"});
        auto lower = from_cons(k, u, {"a >= 0"});
        auto point = from_cons(k, u, {"a = 0"});
        CHECK(bot.leq(range));
        CHECK(range.leq(lower));
        CHECK(!lower.leq(point));
        CHECK(!lower.leq(range));
    }
}

TEST_CASE("projection drops one variable but keeps its consequences") {
    auto u = make_universe({"a", "v", "x", "y"});
    for (auto k : {DomainKind::Dbm, DomainKind::Interval}) {
        auto s = from_cons(k, u, {"a = v", "v = x"});
        auto p = s.project("v");
        if (k == DomainKind::Dbm) {
            CHECK(p.implies(parse_lincons("a = x")));
        }
        CHECK(!p.implies(parse_lincons("a = v")));
        CHECK(ScalarValue::bottom(k, u).project("v").is_bottom());
        auto q = from_cons(k, u, {"x >= 4"}).project("v");
        CHECK(q.implies(parse_lincons("x >= 4")));
    }
    auto rel = from_cons(DomainKind::Dbm, u, {"x < y"}).project("v");
    CHECK(rel.implies(parse_lincons("x < y")));
}

TEST_CASE("assume examples") {
    auto u = make_universe({"x", "y", "z"});
    auto g = ScalarValue::top(DomainKind::Dbm, u).assume(parse_lincons("x < y"));
    CHECK(g.implies(parse_lincons("x < y")));
    CHECK(from_cons(DomainKind::Dbm, u, {"x >= 3", "x < 3"}).is_bottom());
    auto noop = from_cons(DomainKind::Dbm, u, {"x + y + z >= 0"});
    CHECK(noop.is_top()); // inexpressible in a DBM, soundly ignored
    auto itv = from_cons(DomainKind::Interval, u, {"y <= 2", "z <= 2", "x + y + z >= 7"});
    CHECK(itv.implies(parse_lincons("x >= 3"))); // intervals do propagate bounds
}

TEST_CASE("assignment examples") {
    auto u = make_universe({"i", "it", "x", "$t"});
    auto s0 = ScalarValue::top(DomainKind::Dbm, u).assign("i", LinExpr::of_const(0));
    CHECK(s0.implies(parse_lincons("i = 0")));

    auto s1 = from_cons(DomainKind::Dbm, u, {"it = 2"}).assign("i", LinExpr::of_offset("it", 1));
    CHECK(s1.implies(parse_lincons("it = 2")));
    CHECK(s1.implies(parse_lincons("i = 3")));
    CHECK(s1.implies(parse_lincons("i - it = 1")));

    auto s2 = from_cons(DomainKind::Dbm, u, {"x = 5"}).havoc("x");
    CHECK(s2.is_top());

    // Self-referential increment keeps relations to other variables.
    auto s3 = from_cons(DomainKind::Dbm, u, {"i = it", "i <= 7"}).assign("i", LinExpr::of_offset("i", 1));
    CHECK(s3.implies(parse_lincons("i - it = 1")));
    CHECK(s3.implies(parse_lincons("i <= 8")));
}

TEST_CASE("widening examples") {
    auto u = make_universe({"i"});
    auto a = from_cons(DomainKind::Interval, u, {"i >= 0", "i <= 1"});
    auto b = from_cons(DomainKind::Interval, u, {"i >= 0", "i <= 2"});
    auto w = a.widen(b);
    CHECK(w.implies(parse_lincons("i >= 0")));
    CHECK(!w.implies(parse_lincons("i <= 100")));
    CHECK(a.widen(a).equal(a));

    auto da = from_cons(DomainKind::Dbm, u, {"i >= 0", "i <= 1"});
    auto db = from_cons(DomainKind::Dbm, u, {"i >= 0", "i <= 2"});
    auto dw = da.widen(db);
    CHECK(dw.render() == "i >= 0");
}

TEST_CASE("implication examples") {
    auto u = make_universe({"i", "j", "x"});
    auto eq = from_cons(DomainKind::Dbm, u, {"i = j"});
    CHECK(eq.implies(parse_lincons("j < i + 1")));
    auto pt = from_cons(DomainKind::Interval, u, {"i = 2", "j = 2"});
    CHECK(pt.implies(parse_lincons("j < i + 1")));
    for (auto k : {DomainKind::Dbm, DomainKind::Interval}) {
        CHECK(!ScalarValue::top(k, u).implies(parse_lincons("x >= 0")));
        CHECK(ScalarValue::bottom(k, u).implies(parse_lincons("x >= 0")));
    }
}

TEST_CASE("constraint extraction") {
    auto u = make_universe({"a", "v", "x", "y"});
    auto eq = from_cons(DomainKind::Dbm, u, {"a = v"});
    auto cs = eq.constraints();
    bool fwd = false, bwd = false;
    for (const auto& c : cs) {
        if (c == parse_lincons("a - v >= 0")) {
            fwd = true;
        }
        if (c == parse_lincons("v - a >= 0")) {
            bwd = true;
        }
    }
    CHECK(fwd);
    CHECK(bwd);
    CHECK(ScalarValue::top(DomainKind::Dbm, u).constraints().empty());
    auto closed = from_cons(DomainKind::Dbm, u, {"x < y", "y = a"});
    bool strict = false;
    for (const auto& c : closed.constraints()) {
        if (c == parse_lincons("a - x >= 1")) {
            strict = true;
        }
    }
    CHECK(strict);
}

TEST_CASE("disequality trimming on intervals") {
    auto u = make_universe({"x", "y"});
    auto s = from_cons(DomainKind::Interval, u, {"x >= 0", "x <= 3"});
    auto t = s.assume_noteq(LinExpr::of_var("x"), LinExpr::of_const(0));
    CHECK(t.implies(parse_lincons("x >= 1")));
    auto mid = s.assume_noteq(LinExpr::of_var("x"), LinExpr::of_const(2));
    CHECK(mid.equal(s)); // interior point, nothing to trim
    auto d = from_cons(DomainKind::Dbm, u, {"x >= 0"});
    CHECK(d.assume_noteq(LinExpr::of_var("x"), LinExpr::of_const(0)).equal(d));
}

TEST_CASE("randomized lattice and soundness properties vs store enumeration") {
    for (auto k : {DomainKind::Dbm, DomainKind::Interval}) {
        auto rep = props::run_scalar_props(k, 1500, 0xac61u + static_cast<unsigned>(k));
        INFO(rep.first_failure);
        CHECK(rep.failures == 0);
        CHECK(rep.cases == 1500);
    }
}

TEST_CASE("widening chains stabilize") {
    CHECK(props::widening_chains_stabilize(DomainKind::Dbm, 50, 11));
    CHECK(props::widening_chains_stabilize(DomainKind::Interval, 50, 12));
}
