// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "acg/content_state.hpp"
#include "acg/program.hpp"
#include "acg/transfer.hpp"

namespace acg {

struct AnalysisOptions {
    DomainKind domain = DomainKind::Dbm;
    bool sparse = false;
    int widen_delay = 2;
    int descend_iters = 1;
    int norm_budget_factor = 4;
    int visit_cap = 1000;
    RelaxMode relax_mode = RelaxMode::Cheap;
    bool skip_weak_updates = false; // mutation hook for soundness testing
};

enum class Verdict { Proved, Unknown };

const char* render_verdict(Verdict v);

/// Index-relevant variables and constants; their plain and successor forms
/// become the segment-bound vertices.
struct Bounds {
    std::set<std::string> index_vars;
    std::set<int64_t> constants;
};

/// Dataflow closure: index operands seed the set; assignment sources and
/// guard comparands of members join it.  Constants come from assignments and
/// comparisons against members plus check-directive bounds.
Bounds compute_bounds(const Program& p);

struct AnalysisStats {
    size_t block_visits = 0;
    size_t num_verts = 0;
    double seconds = 0.0;
};

struct AnalysisResult {
    CtxPtr ctx;
    std::map<std::string, ContentState> states; // block label -> entry state
    std::vector<Verdict> verdicts;              // parallel to program.checks
    AnalysisStats stats;
};

/// Worklist fixpoint over the control-flow graph: reverse postorder, join at
/// merge points, widening at back-edge targets after widen_delay joins, then
/// descend_iters descending passes.  Throws std::runtime_error when a block
/// exceeds visit_cap visits and NormBudgetExceeded from normalization.
AnalysisResult analyze(const Program& p, const AnalysisOptions& opts = {});

/// PROVED iff the segment is provably empty or every conjunct holds on
/// phi meet psi(lo, hi) in the state at the directive's label.
Verdict check_directive(const AnalysisResult& r, const Program& p, const CheckDirective& d);

} // namespace acg
