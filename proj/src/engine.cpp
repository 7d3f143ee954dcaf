// SPDX-License-Identifier: Apache-2.0
#include "acg/engine.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace acg {

namespace {

void seed_operand(Bounds& b, const Operand& o) {
    if (o.is_var) {
        b.index_vars.insert(o.var);
    } else {
        b.constants.insert(o.value);
    }
}

// One round of the dataflow closure; true when anything was added.
bool bounds_round(Bounds& b, const Program& p) {
    bool changed = false;
    auto add_var = [&](const std::string& v) {
        if (b.index_vars.insert(v).second) {
            changed = true;
        }
    };
    auto add_const = [&](int64_t k) {
        if (b.constants.insert(k).second) {
            changed = true;
        }
    };
    for (const auto& blk : p.blocks) {
        for (const auto& ins : blk.instrs) {
            if (ins.kind == Instr::Kind::ArrayRead || ins.kind == Instr::Kind::ArrayWrite ||
                !b.index_vars.count(ins.v)) {
                continue;
            }
            switch (ins.kind) {
            case Instr::Kind::ConstAssign:
                add_const(ins.a.value);
                break;
            case Instr::Kind::NegAssign:
                if (ins.a.is_var) {
                    add_var(ins.a.var);
                } else {
                    add_const(-ins.a.value);
                }
                break;
            case Instr::Kind::BinopAssign:
                if (ins.a.is_var) {
                    add_var(ins.a.var);
                }
                if (ins.b.is_var) {
                    add_var(ins.b.var);
                }
                break;
            default:
                break;
            }
        }
        if (blk.jump.kind == Jump::Kind::Cond) {
            const Operand& l = blk.jump.lhs;
            const Operand& r = blk.jump.rhs;
            bool l_in = l.is_var && b.index_vars.count(l.var);
            bool r_in = r.is_var && b.index_vars.count(r.var);
            if (l_in) {
                if (r.is_var) {
                    add_var(r.var);
                } else {
                    add_const(r.value);
                }
            }
            if (r_in) {
                if (l.is_var) {
                    add_var(l.var);
                } else {
                    add_const(l.value);
                }
            }
        }
    }
    return changed;
}

} // namespace

const char* render_verdict(Verdict v) { return v == Verdict::Proved ? "PROVED" : "UNKNOWN"; }

Bounds compute_bounds(const Program& p) {
    Bounds b;
    b.constants.insert(0);
    for (const auto& blk : p.blocks) {
        for (const auto& ins : blk.instrs) {
            if (ins.kind == Instr::Kind::ArrayRead || ins.kind == Instr::Kind::ArrayWrite) {
                seed_operand(b, ins.a);
            }
        }
    }
    for (const auto& chk : p.checks) {
        seed_operand(b, chk.lo.base);
        seed_operand(b, chk.hi.base);
    }
    while (bounds_round(b, p)) {
    }
    return b;
}

namespace {

struct Cfg {
    std::vector<std::vector<size_t>> succs;          // block -> successor blocks
    std::vector<std::vector<size_t>> preds;          // block -> predecessor blocks
    std::vector<size_t> rpo;                         // reachable blocks in RPO
    std::vector<size_t> rpo_pos;                     // block -> position (SIZE_MAX if unreachable)
    std::vector<bool> widen_point;                   // back-edge targets
};

Cfg build_cfg(const Program& p) {
    size_t n = p.blocks.size();
    Cfg g;
    g.succs.resize(n);
    g.preds.resize(n);
    g.rpo_pos.assign(n, SIZE_MAX);
    g.widen_point.assign(n, false);
    for (size_t i = 0; i < n; ++i) {
        const Jump& j = p.blocks[i].jump;
        if (j.kind == Jump::Kind::Cond) {
            g.succs[i] = {p.block_index.at(j.then_label), p.block_index.at(j.else_label)};
        } else if (j.kind == Jump::Kind::Br) {
            g.succs[i] = {p.block_index.at(j.then_label)};
        }
        for (size_t s : g.succs[i]) {
            g.preds[s].push_back(i);
        }
    }
    // Iterative DFS: postorder plus back-edge detection.
    enum { White, Gray, Black };
    std::vector<int> color(n, White);
    std::vector<std::pair<size_t, size_t>> stack; // (block, next successor index)
    std::vector<size_t> postorder;
    if (n > 0) {
        stack.emplace_back(0, 0);
        color[0] = Gray;
        while (!stack.empty()) {
            auto& [b, next] = stack.back();
            if (next < g.succs[b].size()) {
                size_t s = g.succs[b][next++];
                if (color[s] == White) {
                    color[s] = Gray;
                    stack.emplace_back(s, 0);
                } else if (color[s] == Gray) {
                    g.widen_point[s] = true;
                }
            } else {
                color[b] = Black;
                postorder.push_back(b);
                stack.pop_back();
            }
        }
    }
    g.rpo.assign(postorder.rbegin(), postorder.rend());
    for (size_t pos = 0; pos < g.rpo.size(); ++pos) {
        g.rpo_pos[g.rpo[pos]] = pos;
    }
    return g;
}

ContentState transfer_block(const ContentState& in, const Block& b, const TransferOptions& topts) {
    ContentState s = in;
    for (const auto& ins : b.instrs) {
        s = tf_instr(s, ins, topts);
    }
    return s;
}

ContentState edge_state(const ContentState& out, const Block& b, size_t succ_idx) {
    const Jump& j = b.jump;
    if (j.kind != Jump::Kind::Cond) {
        return out;
    }
    CmpOp op = succ_idx == 0 ? j.op : negate_cmp(j.op);
    return tf_assume(out, j.lhs, op, j.rhs);
}

} // namespace

AnalysisResult analyze(const Program& p, const AnalysisOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    AnalysisResult res;

    Bounds bounds = compute_bounds(p);
    std::vector<std::string> names = p.scalars;
    names.push_back("$t");
    std::vector<std::string> cells;
    for (const auto& a : p.arrays) {
        cells.push_back(Program::cell_var(a));
        names.push_back(cells.back());
    }
    names.push_back("idx");
    auto univ = make_universe(std::move(names));

    std::vector<Vertex> verts;
    for (int64_t c : bounds.constants) {
        verts.push_back(Vertex::of_const(c));
        verts.push_back(Vertex::of_const(c, true));
    }
    for (const auto& v : bounds.index_vars) {
        verts.push_back(Vertex::of_var(v));
        verts.push_back(Vertex::of_var(v, true));
    }
    res.ctx = make_ctx(std::move(verts), univ, cells, opts.domain, opts.sparse,
                       opts.norm_budget_factor, opts.relax_mode);
    res.stats.num_verts = res.ctx->num_verts();

    size_t n = p.blocks.size();
    Cfg g = build_cfg(p);
    TransferOptions topts;
    topts.skip_weak_updates = opts.skip_weak_updates;

    std::vector<ContentState> in(n, ContentState::bottom(res.ctx));
    std::vector<int> merges(n, 0);
    std::vector<int> visits(n, 0);

    if (n > 0) {
        in[0] = ContentState::top(res.ctx).normalize();
        // Round-based chaotic iteration: within a round blocks run in
        // reverse postorder; a back edge defers its target to the next
        // round.  Every latch of a loop therefore contributes once per
        // visit of the head, keeping joins balanced before widening.
        std::set<size_t> work; // RPO positions, current round
        std::set<size_t> later; // next round
        work.insert(g.rpo_pos[0]);
        while (!work.empty() || !later.empty()) {
            if (work.empty()) {
                std::swap(work, later);
            }
            size_t b = g.rpo[*work.begin()];
            work.erase(work.begin());
            if (++visits[b] > opts.visit_cap) {
                throw std::runtime_error("analysis did not stabilize: block '" +
                                         p.blocks[b].label + "' exceeded " +
                                         std::to_string(opts.visit_cap) + " visits");
            }
            ++res.stats.block_visits;
            if (g.widen_point[b]) {
                ++merges[b];
            }
            ContentState out = transfer_block(in[b], p.blocks[b], topts);
            for (size_t k = 0; k < g.succs[b].size(); ++k) {
                size_t s = g.succs[b][k];
                ContentState cand = edge_state(out, p.blocks[b], k);
                ContentState merged = ContentState::join(in[s], cand);
                // The delay counts completed visits of the target, not
                // incoming joins: a loop head with several latch branches
                // must absorb one full round of plain joins per visit.
                if (g.widen_point[s] && !in[s].is_bottom() && merges[s] > opts.widen_delay) {
                    merged = ContentState::widen(in[s], merged);
                }
                if (const char* tb = std::getenv("ACG_TRACE_BLOCK");
                    tb && p.blocks[s].label == tb) {
                    const char* te = std::getenv("ACG_TRACE_ENTRY");
                    std::string pre = p.blocks[b].label;
                    fprintf(stderr, "[trace] %s <- %s(succ %zu)\n", tb, pre.c_str(), k);
                    auto show = [&](const char* tag, const ContentState& st) {
                        fprintf(stderr, "  %s phi: %s\n", tag, st.phi().render().c_str());
                        if (te) {
                            size_t ti, tj;
                            if (sscanf(te, "%zu,%zu", &ti, &tj) == 2) {
                                fprintf(stderr, "  %s psi(%zu,%zu): %s\n", tag, ti, tj,
                                        st.entry(ti, tj).render().c_str());
                            }
                        }
                    };
                    show("cand", cand);
                    show("merged", merged);
                }
                if (!ContentState::equal(merged, in[s])) {
                    in[s] = std::move(merged);
                    if (g.rpo_pos[s] > g.rpo_pos[b]) {
                        work.insert(g.rpo_pos[s]);
                    } else {
                        later.insert(g.rpo_pos[s]);
                    }
                }
            }
        }

        // Descending passes: recompute every reachable block's input from the
        // previous iterate and meet, which stays above the least fixpoint.
        for (int it = 0; it < opts.descend_iters; ++it) {
            std::vector<ContentState> next = in;
            for (size_t pos = 1; pos < g.rpo.size(); ++pos) {
                size_t b = g.rpo[pos];
                ContentState acc = ContentState::bottom(res.ctx);
                for (size_t pr : g.preds[b]) {
                    if (g.rpo_pos[pr] == SIZE_MAX || in[pr].is_bottom()) {
                        continue;
                    }
                    ContentState out = transfer_block(in[pr], p.blocks[pr], topts);
                    size_t k = std::find(g.succs[pr].begin(), g.succs[pr].end(), b) -
                               g.succs[pr].begin();
                    acc = ContentState::join(acc, edge_state(out, p.blocks[pr], k));
                }
                next[b] = ContentState::meet(in[b], acc);
            }
            in = std::move(next);
        }
    }

    for (size_t b = 0; b < n; ++b) {
        res.states.emplace(p.blocks[b].label, in[b]);
    }
    for (const auto& chk : p.checks) {
        res.verdicts.push_back(check_directive(res, p, chk));
    }
    res.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

Verdict check_directive(const AnalysisResult& r, const Program& p, const CheckDirective& d) {
    (void)p;
    auto it = r.states.find(d.at_label);
    if (it == r.states.end()) {
        throw std::invalid_argument("check refers to unknown label: " + d.at_label);
    }
    ContentState s = it->second.normalize();
    if (s.is_bottom()) {
        return Verdict::Proved; // unreachable program point
    }
    // Vacuity: lo >= hi makes the segment empty.
    {
        std::map<std::string, Rational> terms;
        Rational bound = 0;
        auto add = [&](const CheckBound& cb, int sign) {
            if (cb.base.is_var) {
                terms[cb.base.var] += sign;
            } else {
                bound -= sign * Rational(cb.base.value);
            }
            if (cb.plus) {
                bound -= sign;
            }
        };
        add(d.lo, 1);
        add(d.hi, -1);
        std::erase_if(terms, [](const auto& t) { return t.second == 0; });
        if (terms.empty()) {
            if (bound <= 0) {
                return Verdict::Proved;
            }
        } else if (s.phi().implies(LinCons(std::move(terms), bound, Rel::Geq))) {
            return Verdict::Proved;
        }
    }
    auto vertex_of = [&](const CheckBound& cb) {
        Vertex v = cb.base.is_var ? Vertex::of_var(cb.base.var) : Vertex::of_const(cb.base.value);
        v.plus = cb.plus;
        auto idx = r.ctx->find(v);
        if (!idx) {
            throw std::invalid_argument("check bound is not a segment vertex: " + cb.render());
        }
        return *idx;
    };
    size_t lo = vertex_of(d.lo);
    size_t hi = vertex_of(d.hi);
    ScalarValue val = s.read_entry(lo, hi).meet(s.phi());
    for (const auto& c : d.conjuncts) {
        if (!val.implies(c)) {
            return Verdict::Unknown;
        }
    }
    return Verdict::Proved;
}

} // namespace acg
