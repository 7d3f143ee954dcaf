// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "acg/engine.hpp"
#include "acg/parser.hpp"

using namespace acg;

namespace {

const char* kCopy = R"(# copy A into B
array A, B;
var i, n, v;

head:
  i = 0
  br guard

guard:
  if (i < n) body tail

body:
  v = A[i]
  B[i] = v
  i = i + 1
  br guard

tail:
  end

check tail: forall [0, n) of B : b = a
)";

const char* kArrayMax = R"(# running maximum of A
array A;
var i, n, x, v;

head:
  x = A[0]
  i = 1
  br guard

guard:
  if (i < n) body tail

body:
  v = A[i]
  if (x < v) upd next

upd:
  x = v
  br next

next:
  i = i + 1
  br guard

tail:
  end

check tail: forall [0, n) of A : x - a >= 0
)";

LinCons cons(const std::string& text) { return parse_lincons(text); }

// Every CFG edge must carry a state below its target's entry state.
void check_post_fixpoint(const Program& p, const AnalysisResult& r) {
    for (const auto& b : p.blocks) {
        ContentState s = r.states.at(b.label);
        for (const auto& ins : b.instrs) {
            s = tf_instr(s, ins);
        }
        auto check_edge = [&](const std::string& target, const ContentState& e) {
            CAPTURE(b.label);
            CAPTURE(target);
            CHECK(ContentState::leq(e, r.states.at(target)));
        };
        const Jump& j = b.jump;
        if (j.kind == Jump::Kind::Cond) {
            check_edge(j.then_label, tf_assume(s, j.lhs, j.op, j.rhs));
            check_edge(j.else_label, tf_assume(s, j.lhs, negate_cmp(j.op), j.rhs));
        } else if (j.kind == Jump::Kind::Br) {
            check_edge(j.then_label, s);
        }
    }
}

} // namespace

TEST_CASE("bound computation closes over index dataflow") {
    Program p = parse_program(kCopy);
    Bounds b = compute_bounds(p);
    CHECK(b.index_vars == std::set<std::string>{"i", "n"});
    CHECK(b.constants == std::set<int64_t>{0});

    Program q = parse_program(kArrayMax);
    Bounds bq = compute_bounds(q);
    CHECK(bq.index_vars == std::set<std::string>{"i", "n"});
    CHECK(bq.constants == std::set<int64_t>{0, 1});
}

TEST_CASE("a program without arrays needs no vertices beyond the constants") {
    Program p = parse_program("var x;\nmain:\n  x = 1\n  end\n");
    Bounds b = compute_bounds(p);
    CHECK(b.index_vars.empty());
    CHECK(b.constants == std::set<int64_t>{0});
}

TEST_CASE("the element-wise copy is proved in both modes and domains") {
    Program p = parse_program(kCopy);
    for (bool sparse : {false, true}) {
        AnalysisOptions opts;
        opts.sparse = sparse;
        AnalysisResult r = analyze(p, opts);
        CAPTURE(sparse);
        REQUIRE(r.verdicts.size() == 1);
        CHECK(r.verdicts[0] == Verdict::Proved);
        check_post_fixpoint(p, r);
        // Exit knows the loop ran to completion.
        CHECK(r.states.at("tail").phi().implies(cons("i - n >= 0")));
    }
}

TEST_CASE("the running maximum invariant is proved") {
    Program p = parse_program(kArrayMax);
    for (bool sparse : {false, true}) {
        AnalysisOptions opts;
        opts.sparse = sparse;
        AnalysisResult r = analyze(p, opts);
        CAPTURE(sparse);
        REQUIRE(r.verdicts.size() == 1);
        CHECK(r.verdicts[0] == Verdict::Proved);
        check_post_fixpoint(p, r);
    }
}

TEST_CASE("single-block programs analyze without iteration") {
    Program p = parse_program("array A;\nvar x;\nmain:\n  end\n");
    AnalysisResult r = analyze(p);
    CHECK(r.states.at("main").phi().is_top());
    CHECK(r.stats.block_visits == 1);
}

TEST_CASE("checks over provably empty segments hold vacuously") {
    Program p = parse_program(R"(array A;
var n;
main:
  n = 0
  br done
done:
  end
check done: forall [0, n) of A : a = 99
)");
    AnalysisResult r = analyze(p);
    REQUIRE(r.verdicts.size() == 1);
    CHECK(r.verdicts[0] == Verdict::Proved);
}

TEST_CASE("unreachable blocks stay at bottom and their checks hold") {
    Program p = parse_program(R"(array A;
var i;
main:
  br out
dead:
  A[i] = 1
  br out
out:
  end
check dead: forall [0, i) of A : a = 7
)");
    AnalysisResult r = analyze(p);
    CHECK(r.states.at("dead").is_bottom());
    REQUIRE(r.verdicts.size() == 1);
    CHECK(r.verdicts[0] == Verdict::Proved);
}

TEST_CASE("an unprovable claim comes back unknown, never disproved") {
    Program p = parse_program(R"(array A;
var i, n;
head:
  i = 0
  br guard
guard:
  if (i < n) body tail
body:
  A[i] = 0
  i = i + 1
  br guard
tail:
  end
check tail: forall [0, n) of A : a = 1
)");
    AnalysisResult r = analyze(p);
    REQUIRE(r.verdicts.size() == 1);
    CHECK(r.verdicts[0] == Verdict::Unknown);
}

TEST_CASE("interval domain proves value-only invariants over fixed indices") {
    // Boxes carry no variable-to-variable relations, so loop-carried segment
    // growth is out of reach; constant-index writes are provable.
    Program p = parse_program(R"(array A;
var n;
head:
  n = 2
  A[0] = 3
  A[1] = 3
  br tail
tail:
  end
check tail: forall [0, n) of A : a = 3
)");
    for (bool sparse : {false, true}) {
        AnalysisOptions opts;
        opts.domain = DomainKind::Interval;
        opts.sparse = sparse;
        AnalysisResult r = analyze(p, opts);
        CAPTURE(sparse);
        REQUIRE(r.verdicts.size() == 1);
        CHECK(r.verdicts[0] == Verdict::Proved);
    }
}
