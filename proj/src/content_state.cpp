// SPDX-License-Identifier: Apache-2.0
#include "acg/content_state.hpp"

#include <deque>
#include <sstream>

namespace acg {

namespace {

void check_same_ctx(const CtxPtr& a, const CtxPtr& b) {
    if (a != b && (!a || !b || a->verts != b->verts || a->universe->names() != b->universe->names())) {
        throw std::logic_error("content state operation across different contexts");
    }
}

} // namespace

size_t StateCtx::index_of(const Vertex& v) const {
    auto found = find(v);
    if (!found) {
        throw std::invalid_argument("vertex not in context: " + v.render());
    }
    return *found;
}

std::optional<size_t> StateCtx::find(const Vertex& v) const {
    for (size_t i = 0; i < verts.size(); ++i) {
        if (verts[i] == v) {
            return i;
        }
    }
    return std::nullopt;
}

// meaning(p) - meaning(q) >= m as a constraint over base variables.
static std::optional<LinCons> diff_cons(const StateCtx& ctx, size_t p, size_t q, int64_t m,
                                        bool* infeasible) {
    *infeasible = false;
    const Vertex& vp = ctx.verts[p];
    const Vertex& vq = ctx.verts[q];
    Rational bound = Rational(m - vp.offset() + vq.offset());
    if (vp.is_const && vq.is_const) {
        if (Rational(vp.k - vq.k) < bound) {
            *infeasible = true;
        }
        return std::nullopt;
    }
    if (!vp.is_const && !vq.is_const && vp.var == vq.var) {
        if (Rational(0) < bound) {
            *infeasible = true;
        }
        return std::nullopt;
    }
    std::map<std::string, Rational> terms;
    if (vp.is_const) {
        bound -= vp.k;
    } else {
        terms[vp.var] += 1;
    }
    if (vq.is_const) {
        bound += vq.k;
    } else {
        terms[vq.var] -= 1;
    }
    return LinCons(std::move(terms), std::move(bound), Rel::Geq);
}

std::optional<LinCons> StateCtx::diff_geq(size_t p, size_t q, int64_t m, bool* infeasible) const {
    auto key = std::make_tuple(p, q, m);
    auto it = diff_memo_.find(key);
    if (it == diff_memo_.end()) {
        bool inf = false;
        auto c = diff_cons(*this, p, q, m, &inf);
        it = diff_memo_.emplace(key, std::make_pair(std::move(c), inf)).first;
    }
    *infeasible = it->second.second;
    return it->second.first;
}

std::optional<LinCons> StateCtx::lt_cons(size_t i, size_t j, bool* infeasible) const {
    return diff_geq(j, i, 1, infeasible);
}

std::optional<LinCons> StateCtx::geq_cons(size_t i, size_t j, bool* infeasible) const {
    return diff_geq(i, j, 0, infeasible);
}

CtxPtr make_ctx(std::vector<Vertex> verts, UniversePtr universe,
                std::vector<std::string> cell_vars, DomainKind domain, bool sparse,
                int norm_budget_factor, RelaxMode relax_mode) {
    auto ctx = std::make_shared<StateCtx>();
    ctx->verts = std::move(verts);
    ctx->universe = std::move(universe);
    ctx->cell_vars = std::move(cell_vars);
    for (const auto& c : ctx->cell_vars) {
        ctx->ui.insert(c);
    }
    ctx->ui.insert("idx");
    ctx->domain = domain;
    ctx->sparse = sparse;
    ctx->relax_mode = relax_mode;
    ctx->norm_budget_factor = norm_budget_factor;
    return ctx;
}

ContentState::ContentState(CtxPtr ctx, ScalarValue phi) : ctx_(std::move(ctx)), phi_(std::move(phi)) {
    size_t m = n();
    psi_.reserve(m * m);
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) {
            psi_.push_back(structural_bottom(i, j)
                               ? ScalarValue::bottom(ctx_->domain, ctx_->universe)
                               : ScalarValue::top(ctx_->domain, ctx_->universe));
        }
    }
    rebuild_index();
}

ContentState ContentState::top(CtxPtr ctx) {
    ScalarValue phi = ScalarValue::top(ctx->domain, ctx->universe);
    return ContentState(std::move(ctx), std::move(phi));
}

ContentState ContentState::bottom(CtxPtr ctx) {
    ContentState s(ctx, ScalarValue::bottom(ctx->domain, ctx->universe));
    ScalarValue bot = ScalarValue::bottom(ctx->domain, ctx->universe);
    for (auto& e : s.psi_) {
        e = bot;
    }
    s.rebuild_index();
    return s;
}

bool ContentState::structural_bottom(size_t i, size_t j) const {
    if (i == j) {
        return true;
    }
    const Vertex& a = ctx_->verts[i];
    const Vertex& b = ctx_->verts[j];
    return a.same_base(b) && a.plus && !b.plus;
}

ScalarValue ContentState::read_entry(size_t i, size_t j) const {
    const ScalarValue& stored = entry(i, j);
    if (!ctx_->sparse || structural_bottom(i, j)) {
        return stored;
    }
    bool infeasible = false;
    auto lt = ctx_->lt_cons(i, j, &infeasible);
    if (infeasible) {
        return ScalarValue::bottom(ctx_->domain, ctx_->universe);
    }
    ScalarValue out = stored.meet(phi_);
    if (lt) {
        out = out.assume(*lt);
    }
    return out;
}

void ContentState::set_phi(ScalarValue v) { phi_ = std::move(v); }

void ContentState::set_entry(size_t i, size_t j, ScalarValue v) {
    if (structural_bottom(i, j) && !v.is_bottom()) {
        throw std::logic_error("attempt to weaken a structurally empty segment");
    }
    bool nontop = !v.is_top();
    psi_[i * n() + j] = std::move(v);
    if (nontop) {
        rows_[i].insert(j);
        cols_[j].insert(i);
    } else {
        rows_[i].erase(j);
        cols_[j].erase(i);
    }
}

void ContentState::rebuild_index() {
    size_t m = n();
    rows_.assign(m, {});
    cols_.assign(m, {});
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) {
            if (!psi_[i * m + j].is_top()) {
                rows_[i].insert(j);
                cols_[j].insert(i);
            }
        }
    }
}

namespace {

/// Work shared by normalize: tracks the step budget and the worklist.
struct Normalizer {
    ContentState& s;
    const StateCtx& ctx;
    size_t nverts;
    size_t budget;
    size_t steps = 0;
    std::deque<std::pair<size_t, size_t>> work;
    std::vector<char> queued;

    ScalarValue bot;
    std::vector<int8_t> empty_cache; // -1 unknown, else phi_empty as 0/1

    Normalizer(ContentState& state, int factor)
        : s(state), ctx(*state.ctx()), nverts(ctx.num_verts()),
          bot(ScalarValue::bottom(ctx.domain, ctx.universe)) {
        size_t u = ctx.universe->size() + 1;
        budget = nverts * nverts * u * u * static_cast<size_t>(factor);
        queued.assign(nverts * nverts, 0);
        empty_cache.assign(nverts * nverts, -1);
    }

    void phi_changed() { empty_cache.assign(nverts * nverts, -1); }

    void bump() {
        if (++steps > budget) {
            std::ostringstream os;
            os << "normalization exceeded its step budget (" << budget << " descending steps, "
               << nverts << " vertices, " << ctx.universe->size() << " variables)";
            throw NormBudgetExceeded(os.str());
        }
    }

    void enqueue(size_t i, size_t j) {
        if (i == j || s.structural_bottom(i, j) || queued[i * nverts + j]) {
            return;
        }
        queued[i * nverts + j] = 1;
        work.emplace_back(i, j);
    }

    void enqueue_all() {
        for (size_t i = 0; i < nverts; ++i) {
            for (size_t j = 0; j < nverts; ++j) {
                enqueue(i, j);
            }
        }
    }

    /// Segment [i,j) known empty from phi alone (sparse rule-1 operands).
    bool phi_empty(size_t i, size_t j) {
        int8_t& memo = empty_cache[i * nverts + j];
        if (memo >= 0) {
            return memo != 0;
        }
        bool out;
        if (s.structural_bottom(i, j)) {
            out = true;
        } else {
            bool infeasible = false;
            auto geq = ctx.geq_cons(i, j, &infeasible);
            if (infeasible) {
                out = false; // meaning(i) >= meaning(j) can never hold
            } else if (!geq) {
                out = true; // trivially i >= j
            } else {
                out = s.phi().implies(*geq);
            }
        }
        memo = out ? 1 : 0;
        return out;
    }

    // Sparse variant of rule 2: re-thin each stored entry against the current
    // phi.  The full edge phi /\ boundary /\ stored can entail cell facts (by
    // closure) that the stored constraints alone do not mention; those must be
    // written back before assignments project away the linking scalars.
    bool rule2_sparse() {
        bool changed = false;
        for (size_t i = 0; i < nverts; ++i) {
            for (size_t j = 0; j < nverts; ++j) {
                const ScalarValue& stored = s.entry(i, j);
                if (s.structural_bottom(i, j) || stored.is_bottom()) {
                    continue;
                }
                bool infeasible = false;
                auto lt = ctx.lt_cons(i, j, &infeasible);
                ScalarValue next = bot;
                if (!infeasible) {
                    ScalarValue boundary = lt ? s.phi().assume(*lt) : s.phi();
                    ScalarValue full = stored.meet(boundary);
                    if (!full.is_bottom()) {
                        ScalarValue thin = relax_entry(full, ctx.ui, ctx.relax_mode, &boundary);
                        next = stored.meet(thin);
                    }
                }
                if (!stored.leq(next)) {
                    bump();
                    changed = true;
                    s.set_entry(i, j, std::move(next));
                    enqueue_sources(i, j);
                }
            }
        }
        return changed;
    }

    // Rule 2: every entry is bounded by phi and its segment boundary.
    bool rule2() {
        if (ctx.sparse) {
            return rule2_sparse();
        }
        bool changed = false;
        for (size_t i = 0; i < nverts; ++i) {
            for (size_t j = 0; j < nverts; ++j) {
                if (s.structural_bottom(i, j) || s.entry(i, j).is_bottom()) {
                    continue;
                }
                bool infeasible = false;
                auto lt = ctx.lt_cons(i, j, &infeasible);
                ScalarValue v = s.entry(i, j).meet(s.phi());
                if (infeasible) {
                    v = ScalarValue::bottom(ctx.domain, ctx.universe);
                } else if (lt && !ctx.verts[i].same_base(ctx.verts[j])) {
                    v = v.assume(*lt);
                }
                if (!s.entry(i, j).leq(v)) {
                    bump();
                    changed = true;
                    s.set_entry(i, j, std::move(v));
                    enqueue_sources(i, j);
                } else if (!v.leq(s.entry(i, j))) {
                    // can't happen: v is a meet with the entry
                    s.set_entry(i, j, std::move(v));
                }
            }
        }
        return changed;
    }

    // Rule 4: an empty segment forces its bounds out of order.
    bool rule4() {
        bool changed = false;
        for (size_t i = 0; i < nverts; ++i) {
            for (size_t j = 0; j < nverts; ++j) {
                if (s.structural_bottom(i, j) || !s.entry(i, j).is_bottom()) {
                    continue;
                }
                bool infeasible = false;
                auto geq = ctx.geq_cons(i, j, &infeasible);
                ScalarValue next = infeasible ? ScalarValue::bottom(ctx.domain, ctx.universe)
                                              : (geq ? s.phi().assume(*geq) : s.phi());
                if (!next.leq(s.phi()) || s.phi().leq(next)) {
                    continue; // no new information
                }
                changed = true;
                s.set_phi(std::move(next));
                phi_changed();
                if (s.phi().is_bottom()) {
                    return true;
                }
            }
        }
        return changed;
    }

    // Rule 3: a known-nonempty segment's scalar consequences flow into phi.
    bool rule3() {
        bool changed = false;
        for (size_t i = 0; i < nverts; ++i) {
            for (size_t j = 0; j < nverts; ++j) {
                if (s.structural_bottom(i, j)) {
                    continue;
                }
                bool infeasible = false;
                auto lt = ctx.lt_cons(i, j, &infeasible);
                if (infeasible) {
                    continue;
                }
                if (lt && !s.phi().implies(*lt)) {
                    continue;
                }
                ScalarValue v = s.read_entry(i, j);
                for (const auto& u : ctx.ui) {
                    v = v.project(u);
                }
                ScalarValue next = s.phi().meet(v);
                if (!next.leq(s.phi()) || s.phi().leq(next)) {
                    continue;
                }
                changed = true;
                s.set_phi(std::move(next));
                phi_changed();
                if (s.phi().is_bottom()) {
                    return true;
                }
            }
        }
        return changed;
    }

    void enqueue_sources(size_t i, size_t j) {
        for (size_t a = 0; a < nverts; ++a) {
            enqueue(i, a); // (i,j) feeds (i,a) through middle j
            enqueue(a, j); // and (a,j) through middle i
        }
    }

    /// Rule-1 operand: in sparse mode a phi-empty segment acts as bottom even
    /// when its relaxed entry stores something weaker.
    const ScalarValue* operand(size_t i, size_t j) {
        const ScalarValue& e = s.entry(i, j);
        if (ctx.sparse && !e.is_bottom() && phi_empty(i, j)) {
            return &bot;
        }
        return &e;
    }

    // Rule 1: a segment is covered by any split of it.
    bool rule1() {
        bool any = false;
        while (!work.empty()) {
            auto [i, j] = work.front();
            work.pop_front();
            queued[i * nverts + j] = 0;
            ScalarValue cur = s.entry(i, j);
            if (cur.is_bottom()) {
                continue;
            }
            bool changed = false;
            for (size_t k = 0; k < nverts && !cur.is_bottom(); ++k) {
                if (k == i || k == j) {
                    continue;
                }
                const ScalarValue* p = operand(i, k);
                const ScalarValue* q = operand(k, j);
                if (p->is_top() || q->is_top()) {
                    continue;
                }
                if (cur.leq(*p) || cur.leq(*q)) {
                    continue;
                }
                ScalarValue next = cur.meet(*p).join(cur.meet(*q));
                if (!cur.leq(next)) {
                    bump();
                    changed = true;
                    cur = std::move(next);
                }
            }
            if (changed) {
                any = true;
                s.set_entry(i, j, std::move(cur));
                enqueue_sources(i, j);
            }
        }
        return any;
    }
};

} // namespace

ContentState ContentState::normalize(NormStats* stats) const {
    ContentState s = *this;
    if (s.is_bottom()) {
        return bottom(ctx_);
    }
    Normalizer nz(s, ctx_->norm_budget_factor);
    while (true) {
        bool changed = false;
        changed |= nz.rule2();
        changed |= nz.rule4();
        if (s.is_bottom()) {
            break;
        }
        changed |= nz.rule3();
        if (s.is_bottom()) {
            break;
        }
        nz.enqueue_all();
        changed |= nz.rule1();
        if (!changed) {
            break;
        }
    }
    if (stats) {
        stats->descending_steps = nz.steps;
        stats->budget = nz.budget;
    }
    if (s.is_bottom()) {
        return bottom(ctx_);
    }
    return s;
}

namespace {

/// Sparse entries of segments the scalar part proves empty mean bottom; the
/// lattice operations must honor that, or joining with a state whose segment
/// is empty would erase facts arriving from the non-empty side.  (Naive mode
/// stores that bottom explicitly via normalization.)
ScalarValue sparse_effective(const ContentState& s, size_t i, size_t j) {
    const ScalarValue& stored = s.entry(i, j);
    if (!s.ctx()->sparse || stored.is_bottom()) {
        return stored;
    }
    bool infeasible = false;
    auto geq = s.ctx()->geq_cons(i, j, &infeasible);
    bool empty = infeasible ? false : (!geq || s.phi().implies(*geq));
    if (empty) {
        return ScalarValue::bottom(s.ctx()->domain, s.ctx()->universe);
    }
    return stored;
}

} // namespace

ContentState ContentState::join(const ContentState& a, const ContentState& b) {
    check_same_ctx(a.ctx_, b.ctx_);
    if (a.is_bottom()) {
        return b;
    }
    if (b.is_bottom()) {
        return a;
    }
    ContentState out = a;
    out.set_phi(a.phi_.join(b.phi_));
    size_t m = a.n();
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) {
            if (!out.structural_bottom(i, j)) {
                out.set_entry(i, j, sparse_effective(a, i, j).join(sparse_effective(b, i, j)));
            }
        }
    }
    return out.normalize();
}

ContentState ContentState::meet(const ContentState& a, const ContentState& b) {
    check_same_ctx(a.ctx_, b.ctx_);
    ContentState out = a;
    out.set_phi(a.phi_.meet(b.phi_));
    if (out.is_bottom()) {
        return bottom(a.ctx_);
    }
    size_t m = a.n();
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) {
            if (!out.structural_bottom(i, j)) {
                out.set_entry(i, j, sparse_effective(a, i, j).meet(sparse_effective(b, i, j)));
            }
        }
    }
    return out.normalize();
}

bool ContentState::leq(const ContentState& a, const ContentState& b) {
    check_same_ctx(a.ctx_, b.ctx_);
    if (a.is_bottom()) {
        return true;
    }
    if (!a.phi_.leq(b.phi_)) {
        return false;
    }
    size_t m = a.n();
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) {
            if (!sparse_effective(a, i, j).leq(sparse_effective(b, i, j))) {
                return false;
            }
        }
    }
    return true;
}

ContentState ContentState::widen(const ContentState& a, const ContentState& b) {
    check_same_ctx(a.ctx_, b.ctx_);
    if (a.is_bottom()) {
        return b;
    }
    if (b.is_bottom()) {
        return a;
    }
    ContentState out = a;
    out.set_phi(a.phi_.widen(b.phi_));
    size_t m = a.n();
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) {
            if (out.structural_bottom(i, j)) {
                continue;
            }
            ScalarValue w = a.entry(i, j).widen(sparse_effective(b, i, j));
            if (!a.ctx_->sparse && !w.is_bottom() && !w.is_top()) {
                // Re-inject only the boundary, through the non-closing path;
                // a full normalize here would undo the widening.
                bool infeasible = false;
                auto lt = a.ctx_->lt_cons(i, j, &infeasible);
                if (infeasible) {
                    w = ScalarValue::bottom(a.ctx_->domain, a.ctx_->universe);
                } else if (lt && !a.ctx_->verts[i].same_base(a.ctx_->verts[j])) {
                    w = w.assume_raw(*lt);
                }
            }
            out.set_entry(i, j, std::move(w));
        }
    }
    return out;
}

bool ContentState::equal(const ContentState& a, const ContentState& b) {
    check_same_ctx(a.ctx_, b.ctx_);
    if (a.is_bottom() || b.is_bottom()) {
        return a.is_bottom() == b.is_bottom();
    }
    if (!a.phi_.equal(b.phi_)) {
        return false;
    }
    size_t m = a.n();
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) {
            if (!a.entry(i, j).equal(b.entry(i, j))) {
                return false;
            }
        }
    }
    return true;
}

ContentState ContentState::with_vertices(const CtxPtr& target) const {
    if (target->universe->names() != ctx_->universe->names()) {
        throw std::logic_error("vertex change must keep the scalar universe");
    }
    ContentState out = is_bottom() ? bottom(target) : top(target);
    if (is_bottom()) {
        return out;
    }
    out.set_phi(phi_);
    size_t m = target->num_verts();
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) {
            if (out.structural_bottom(i, j)) {
                continue;
            }
            auto oi = ctx_->find(target->verts[i]);
            auto oj = ctx_->find(target->verts[j]);
            if (oi && oj) {
                out.set_entry(i, j, entry(*oi, *oj));
            }
        }
    }
    return out;
}

std::string ContentState::render(bool reduced) const {
    std::ostringstream os;
    if (is_bottom()) {
        return "state: _|_\n";
    }
    os << "phi: " << phi_.render() << "\n";
    size_t m = n();
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) {
            if (structural_bottom(i, j) || entry(i, j).is_top()) {
                continue;
            }
            if (reduced && !entry(i, j).is_bottom()) {
                // Elide entries recoverable from a two-step split.
                bool derivable = false;
                for (size_t k = 0; k < m && !derivable; ++k) {
                    if (k == i || k == j) {
                        continue;
                    }
                    if (entry(i, k).is_top() || entry(k, j).is_top()) {
                        continue;
                    }
                    derivable = entry(i, k).join(entry(k, j)).leq(entry(i, j)) &&
                                entry(i, j).leq(entry(i, k).join(entry(k, j)));
                }
                if (derivable) {
                    continue;
                }
            }
            os << "psi(" << ctx_->verts[i].render() << ", " << ctx_->verts[j].render()
               << "): " << entry(i, j).render() << "\n";
        }
    }
    return os.str();
}

} // namespace acg
