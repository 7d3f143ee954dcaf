// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "acg/content_state.hpp"
#include "acg/relax.hpp"
#include "scalar_props.hpp"

using namespace acg;

namespace {

LinCons cons(const std::string& text) { return parse_lincons(text); }

ScalarValue val(const UniversePtr& u, std::initializer_list<const char*> cs) {
    ScalarValue v = ScalarValue::top(DomainKind::Dbm, u);
    for (const char* c : cs) {
        v = v.assume(cons(c));
    }
    return v;
}

} // namespace

TEST_CASE("cheap thinning keeps closure-derived cell facts") {
    auto u = make_universe({"i", "k", "j", "x", "y", "$t", "a", "idx"});
    // y = a closes with x < y to the cell fact x < a.
    ScalarValue full = val(u, {"y - x >= 1", "j - k >= 1", "a - y = 0"});
    ScalarValue relaxed = relax_entry(full, {"a", "idx"}, RelaxMode::Cheap, nullptr);
    CHECK(relaxed.implies(cons("a - y = 0")));
    CHECK(relaxed.implies(cons("a - x >= 1")));
    // Pure scalar facts are dropped unless the kept cell facts re-derive
    // them: x < y comes back through y = a, but the boundary does not.
    CHECK(relaxed.implies(cons("y - x >= 1")));
    CHECK(!relaxed.implies(cons("j - k >= 1")));
    CHECK(full.implies(cons("j - k >= 1")));
}

TEST_CASE("implication thinning without closure loses derived facts") {
    auto u = make_universe({"i", "k", "j", "x", "y", "$t", "a", "idx"});
    ScalarValue context = val(u, {"y - x >= 1", "j - k >= 1"});
    std::vector<LinCons> listed = {cons("j - k >= 1"), cons("y - x >= 1"), cons("a - y = 0")};
    std::vector<LinCons> kept = drop_implied(listed, context);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0] == cons("a - y = 0"));
}

TEST_CASE("propagation through a middle vertex keeps the cell bound under cheap thinning") {
    // phi = x < y; [i,k) satisfies x < a directly, [k,j) satisfies y = a and
    // hence x < a through closure.  The long edge [i,j) must keep x < a.
    auto u = make_universe({"i", "k", "j", "x", "y", "$t", "a", "idx"});
    auto ctx = make_ctx({Vertex::of_var("i"), Vertex::of_var("k"), Vertex::of_var("j")}, u, {"a"},
                        DomainKind::Dbm, true);
    ContentState s = ContentState::top(ctx);
    s.set_phi(val(u, {"y - x >= 1"}));
    ScalarValue full_ik = val(u, {"y - x >= 1", "k - i >= 1", "a - x >= 1"});
    ScalarValue full_kj = val(u, {"y - x >= 1", "j - k >= 1", "a - y = 0"});
    s.set_entry(0, 1, relax_entry(full_ik, ctx->ui, RelaxMode::Cheap, nullptr));
    s.set_entry(1, 2, relax_entry(full_kj, ctx->ui, RelaxMode::Cheap, nullptr));
    ContentState n = s.normalize();
    CHECK(n.entry(0, 2).implies(cons("a - x >= 1")));
    CHECK(n.read_entry(0, 2).implies(cons("a - x >= 1")));
}

TEST_CASE("the same propagation without closure loses the cell bound") {
    auto u = make_universe({"i", "k", "j", "x", "y", "$t", "a", "idx"});
    ScalarValue phi = val(u, {"y - x >= 1"});
    ScalarValue ctx_ik = phi.assume(cons("k - i >= 1"));
    ScalarValue ctx_kj = phi.assume(cons("j - k >= 1"));
    auto meet_all = [&](const std::vector<LinCons>& cs) {
        ScalarValue v = ScalarValue::top(DomainKind::Dbm, u);
        for (const auto& c : cs) {
            v = v.assume(c);
        }
        return v;
    };
    ScalarValue thin_ik = meet_all(drop_implied(
        {cons("k - i >= 1"), cons("y - x >= 1"), cons("a - x >= 1")}, ctx_ik));
    ScalarValue thin_kj = meet_all(drop_implied(
        {cons("j - k >= 1"), cons("y - x >= 1"), cons("a - y = 0")}, ctx_kj));
    CHECK(thin_ik.implies(cons("a - x >= 1")));
    // The syntactic list for [k,j) never mentions x < a, so the join of the
    // two thinned edges cannot recover it.
    CHECK(!thin_kj.implies(cons("a - x >= 1")));
    ScalarValue joined = thin_ik.join(thin_kj);
    CHECK(!joined.implies(cons("a - x >= 1")));
}

TEST_CASE("bottom and top pass through thinning unchanged") {
    auto u = make_universe({"x", "a", "idx"});
    ScalarValue bot = ScalarValue::bottom(DomainKind::Dbm, u);
    ScalarValue top = ScalarValue::top(DomainKind::Dbm, u);
    CHECK(relax_entry(bot, {"a"}, RelaxMode::Cheap, nullptr).is_bottom());
    CHECK(relax_entry(top, {"a"}, RelaxMode::Cheap, nullptr).is_top());
    CHECK(relax_entry(bot, {"a"}, RelaxMode::Exact, &top).is_bottom());
}

TEST_CASE("thinning is an upper bound given the original context") {
    // Contract: psi is below context meet thinned(psi) whenever psi is below
    // the context to begin with.
    std::mt19937_64 rng(318);
    auto u = make_universe({"x", "y", "a", "idx"});
    for (int it = 0; it < 500; ++it) {
        ScalarValue context = props::random_value(rng, DomainKind::Dbm, u);
        ScalarValue psi = context;
        for (int extra = 0; extra < 2; ++extra) {
            psi = psi.assume(props::random_cons(rng, *u));
        }
        ScalarValue cheap = relax_entry(psi, {"a", "idx"}, RelaxMode::Cheap, nullptr);
        CHECK(psi.leq(context.meet(cheap)));
        ScalarValue exact = relax_entry(psi, {"a", "idx"}, RelaxMode::Exact, &context);
        CHECK(psi.leq(context.meet(exact)));
    }
}
