// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "acg/content_state.hpp"
#include "content_props.hpp"

using namespace acg;

namespace {

// Vertex layout used throughout: 0, 0+, i, i+, n, n+ (optionally $t, $t+).
CtxPtr loop_ctx(DomainKind kind, bool sparse, bool with_temp_verts = false) {
    std::vector<Vertex> verts = {
        Vertex::of_const(0),   Vertex::of_const(0, true), Vertex::of_var("i"),
        Vertex::of_var("i", true), Vertex::of_var("n"),   Vertex::of_var("n", true),
    };
    if (with_temp_verts) {
        verts.push_back(Vertex::of_var("$t"));
        verts.push_back(Vertex::of_var("$t", true));
    }
    auto univ = make_universe({"i", "n", "v", "x", "$t", "a", "b", "idx"});
    return make_ctx(std::move(verts), univ, {"a", "b"}, kind, sparse);
}

size_t at(const CtxPtr& ctx, const Vertex& v) { return ctx->index_of(v); }

LinCons cons(const std::string& text) { return parse_lincons(text); }

} // namespace

TEST_CASE("normalizing the unconstrained state only adds edge boundaries") {
    for (bool sparse : {false, true}) {
        CAPTURE(sparse);
        auto ctx = loop_ctx(DomainKind::Dbm, sparse);
        ContentState s = ContentState::top(ctx).normalize();
        REQUIRE(!s.is_bottom());
        size_t z = at(ctx, Vertex::of_const(0));
        size_t i = at(ctx, Vertex::of_var("i"));
        // [0, i) nonempty forces i >= 1 inside the edge.
        CHECK(s.read_entry(z, i).implies(cons("i >= 1")));
        if (sparse) {
            // Relaxed storage keeps only cell facts; the boundary is implicit.
            CHECK(s.entry(z, i).is_top());
        } else {
            CHECK(s.entry(z, i).implies(cons("i >= 1")));
        }
        CHECK(s.phi().is_top());
        // Same-base successor edges carry no boundary: [v, v+1) is nonempty
        // for every value of v.
        CHECK(s.entry(i, at(ctx, Vertex::of_var("i", true))).is_top());
        CHECK(s.entry(i, i).is_bottom());
    }
}

TEST_CASE("an empty middle segment forwards properties across it") {
    // phi knows i = $t+1, so [$t+, i) is empty and [0, i) inherits everything
    // known about [0, $t+).
    for (bool sparse : {false, true}) {
        CAPTURE(sparse);
        auto ctx = loop_ctx(DomainKind::Dbm, sparse, true);
        ContentState s = ContentState::top(ctx);
        s.set_phi(s.phi().assume(cons("i - $t = 1")));
        size_t z = at(ctx, Vertex::of_const(0));
        size_t tp = at(ctx, Vertex::of_var("$t", true));
        size_t i = at(ctx, Vertex::of_var("i"));
        s.set_entry(z, tp, ScalarValue::top(ctx->domain, ctx->universe).assume(cons("a - b = 0")));
        ContentState n = s.normalize();
        CHECK(n.read_entry(z, i).implies(cons("a - b = 0")));
        CHECK(n.read_entry(z, i).implies(cons("b - a = 0")));
    }
}

TEST_CASE("interval edges forward across empty middles too") {
    // Boxes cannot express i = $t+1 relationally; fixed points do the job.
    auto ctx = loop_ctx(DomainKind::Interval, false, true);
    ContentState s = ContentState::top(ctx);
    s.set_phi(s.phi().assume(cons("$t = 2")).assume(cons("i = 3")));
    size_t z = at(ctx, Vertex::of_const(0));
    size_t tp = at(ctx, Vertex::of_var("$t", true));
    size_t i = at(ctx, Vertex::of_var("i"));
    s.set_entry(z, tp, ScalarValue::top(ctx->domain, ctx->universe).assume(cons("a <= 2")));
    ContentState n = s.normalize();
    CHECK(n.read_entry(z, i).implies(cons("a <= 2")));
}

TEST_CASE("an impossible segment constrains the scalars") {
    // psi(n, i+) = bottom can only hold when [n, i+1) is empty, i.e. i < n.
    for (bool sparse : {false, true}) {
        CAPTURE(sparse);
        auto ctx = loop_ctx(DomainKind::Dbm, sparse);
        ContentState s = ContentState::top(ctx);
        size_t nn = at(ctx, Vertex::of_var("n"));
        size_t ip = at(ctx, Vertex::of_var("i", true));
        s.set_entry(nn, ip, ScalarValue::bottom(ctx->domain, ctx->universe));
        ContentState r = s.normalize();
        CHECK(r.phi().implies(cons("n - i >= 1")));
        size_t i = at(ctx, Vertex::of_var("i"));
        CHECK(r.read_entry(i, ip).implies(cons("n - i >= 1")));
    }
}

TEST_CASE("a bottom scalar part collapses the whole state") {
    auto ctx = loop_ctx(DomainKind::Dbm, false);
    ContentState s = ContentState::top(ctx);
    s.set_phi(s.phi().assume(cons("i >= 1")).assume(cons("i <= 0")));
    ContentState n = s.normalize();
    CHECK(n.is_bottom());
    CHECK(ContentState::equal(n, ContentState::bottom(ctx)));
}

TEST_CASE("normalized states satisfy the internal-consistency bound") {
    // At a fixpoint every edge is below the join of any two-step split.
    std::mt19937_64 rng(2026);
    for (int it = 0; it < 50; ++it) {
        auto ctx = props::random_norm_ctx(rng, DomainKind::Dbm, false);
        ContentState s = props::random_content_state(rng, ctx).normalize();
        if (s.is_bottom()) {
            continue;
        }
        size_t n = ctx->num_verts();
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < n; ++j) {
                if (i == j) {
                    continue;
                }
                for (size_t k = 0; k < n; ++k) {
                    if (k == i || k == j) {
                        continue;
                    }
                    bool ok = s.entry(i, j).leq(s.entry(i, k).join(s.entry(k, j)));
                    if (!ok) {
                        CAPTURE(i);
                        CAPTURE(j);
                        CAPTURE(k);
                        CAPTURE(s.render(false));
                    }
                    REQUIRE(ok);
                }
            }
        }
    }
}

TEST_CASE("state lattice operations are bounds") {
    std::mt19937_64 rng(77);
    for (int it = 0; it < 60; ++it) {
        auto ctx = props::random_norm_ctx(rng, DomainKind::Dbm, false);
        ContentState a = props::random_content_state(rng, ctx).normalize();
        ContentState b = props::random_content_state(rng, ctx).normalize();
        ContentState j = ContentState::join(a, b);
        CHECK(ContentState::leq(a, j));
        CHECK(ContentState::leq(b, j));
        ContentState m = ContentState::meet(a, b);
        CHECK(ContentState::leq(m, a));
        CHECK(ContentState::leq(m, b));
        ContentState w = ContentState::widen(a, b);
        CHECK(ContentState::leq(b, w));
    }
}

TEST_CASE("repeated widening stabilizes") {
    std::mt19937_64 rng(4242);
    for (int chain = 0; chain < 20; ++chain) {
        auto ctx = props::random_norm_ctx(rng, DomainKind::Dbm, false);
        ContentState acc = props::random_content_state(rng, ctx).normalize();
        int strict = 0;
        for (int step = 0; step < 200; ++step) {
            ContentState nxt = props::random_content_state(rng, ctx).normalize();
            ContentState w = ContentState::widen(acc, ContentState::join(acc, nxt));
            if (!ContentState::equal(w, acc)) {
                ++strict;
            }
            acc = w;
        }
        CHECK(strict < 150);
    }
}

TEST_CASE("normalization terminates within budget and is idempotent") {
    auto naive = props::run_normalize_props(DomainKind::Dbm, false, 250, 11);
    CAPTURE(naive.first_failure);
    CHECK(naive.budget_failures == 0);
    CHECK(naive.idempotence_failures == 0);

    auto sparse = props::run_normalize_props(DomainKind::Dbm, true, 250, 12);
    CAPTURE(sparse.first_failure);
    CHECK(sparse.budget_failures == 0);
    CHECK(sparse.idempotence_failures == 0);

    auto itv = props::run_normalize_props(DomainKind::Interval, false, 150, 13);
    CAPTURE(itv.first_failure);
    CHECK(itv.budget_failures == 0);
    CHECK(itv.idempotence_failures == 0);
}

TEST_CASE("vertex-set changes keep surviving edges") {
    auto small = loop_ctx(DomainKind::Dbm, false);
    auto big = loop_ctx(DomainKind::Dbm, false, true);
    ContentState s = ContentState::top(small);
    size_t z = at(small, Vertex::of_const(0));
    size_t i = at(small, Vertex::of_var("i"));
    s.set_entry(z, i, ScalarValue::top(small->domain, small->universe).assume(cons("a >= 0")));
    ContentState grown = s.with_vertices(big);
    CHECK(grown.entry(at(big, Vertex::of_const(0)), at(big, Vertex::of_var("i")))
              .implies(cons("a >= 0")));
    ContentState back = grown.with_vertices(small);
    CHECK(back.entry(z, i).implies(cons("a >= 0")));
}
