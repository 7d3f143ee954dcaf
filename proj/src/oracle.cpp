// SPDX-License-Identifier: Apache-2.0
#include "acg/oracle.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace acg {

std::string ConcreteState::render() const {
    std::ostringstream os;
    os << "at ";
    os << "block#" << block << "+" << offset << " sigma{";
    bool first = true;
    for (const auto& [v, k] : sigma) {
        os << (first ? "" : ", ") << v << ":" << k;
        first = false;
    }
    os << "}";
    for (const auto& [a, cells] : rho) {
        os << " " << a << "[";
        for (size_t i = 0; i < cells.size(); ++i) {
            os << (i ? "," : "") << cells[i];
        }
        os << "]";
    }
    return os.str();
}

namespace {

struct EvalError {
    std::string what;
};

int64_t eval_operand(const ConcreteState& c, const Operand& o) {
    if (!o.is_var) {
        return o.value;
    }
    auto it = c.sigma.find(o.var);
    if (it == c.sigma.end()) {
        throw EvalError{"unbound variable: " + o.var};
    }
    return it->second;
}

bool eval_cmp(int64_t l, CmpOp op, int64_t r) {
    switch (op) {
    case CmpOp::Lt: return l < r;
    case CmpOp::Le: return l <= r;
    case CmpOp::Eq: return l == r;
    case CmpOp::Ne: return l != r;
    case CmpOp::Ge: return l >= r;
    case CmpOp::Gt: return l > r;
    }
    return false;
}

} // namespace

StepResult concrete_step(const Program& p, const ConcreteState& c, const ChoiceFn& choice) {
    StepResult res;
    res.next = c;
    if (c.block >= p.blocks.size()) {
        res.outcome = StepOutcome::Error;
        res.what = "invalid block index";
        return res;
    }
    const Block& blk = p.blocks[c.block];
    try {
        if (c.offset < blk.instrs.size()) {
            const Instr& ins = blk.instrs[c.offset];
            switch (ins.kind) {
            case Instr::Kind::ConstAssign:
                res.next.sigma[ins.v] = eval_operand(c, ins.a);
                break;
            case Instr::Kind::NegAssign:
                res.next.sigma[ins.v] = -eval_operand(c, ins.a);
                break;
            case Instr::Kind::BinopAssign: {
                int64_t a = eval_operand(c, ins.a);
                int64_t b = eval_operand(c, ins.b);
                int64_t out = ins.op == BinOp::Add ? a + b : ins.op == BinOp::Sub ? a - b : a * b;
                res.next.sigma[ins.v] = out;
                break;
            }
            case Instr::Kind::Havoc:
                res.next.sigma[ins.v] = choice ? choice() : 0;
                break;
            case Instr::Kind::ArrayRead: {
                int64_t idx = eval_operand(c, ins.a);
                const auto& cells = c.rho.at(ins.array);
                if (idx < 0 || static_cast<size_t>(idx) >= cells.size()) {
                    res.outcome = StepOutcome::Error;
                    res.what = "read out of range: " + ins.array + "[" + std::to_string(idx) + "]";
                    return res;
                }
                res.next.sigma[ins.v] = cells[idx];
                break;
            }
            case Instr::Kind::ArrayWrite: {
                int64_t idx = eval_operand(c, ins.a);
                auto& cells = res.next.rho.at(ins.array);
                if (idx < 0 || static_cast<size_t>(idx) >= cells.size()) {
                    res.outcome = StepOutcome::Error;
                    res.what = "write out of range: " + ins.array + "[" + std::to_string(idx) + "]";
                    return res;
                }
                cells[idx] = eval_operand(c, ins.b);
                break;
            }
            }
            res.next.offset = c.offset + 1;
            return res;
        }
        const Jump& j = blk.jump;
        switch (j.kind) {
        case Jump::Kind::End:
            res.outcome = StepOutcome::Halt;
            return res;
        case Jump::Kind::Error:
            res.outcome = StepOutcome::Error;
            res.what = "error jump executed";
            return res;
        case Jump::Kind::Br:
            res.next.block = p.block_index.at(j.then_label);
            res.next.offset = 0;
            return res;
        case Jump::Kind::Cond: {
            bool taken = eval_cmp(eval_operand(c, j.lhs), j.op, eval_operand(c, j.rhs));
            res.next.block = p.block_index.at(taken ? j.then_label : j.else_label);
            res.next.offset = 0;
            return res;
        }
        }
    } catch (const EvalError& e) {
        res.outcome = StepOutcome::Error;
        res.what = e.what;
    } catch (const std::out_of_range&) {
        res.outcome = StepOutcome::Error;
        res.what = "unbound array";
    }
    return res;
}

namespace {

using Store = std::map<std::string, int64_t>;

bool satisfies(const Store& store, const LinCons& c) {
    Rational sum = 0;
    for (const auto& [v, k] : c.terms) {
        auto it = store.find(v);
        if (it == store.end()) {
            return true; // unconstrained dimension: ignore (closed values)
        }
        sum += k * Rational(it->second);
    }
    switch (c.rel) {
    case Rel::Geq: return sum >= c.bound;
    case Rel::Gt: return sum > c.bound;
    case Rel::Eq: return sum == c.bound;
    }
    return true;
}

bool satisfies_all(const Store& store, const std::vector<LinCons>& cs) {
    return std::all_of(cs.begin(), cs.end(),
                       [&](const LinCons& c) { return satisfies(store, c); });
}

std::optional<int64_t> vertex_meaning(const ConcreteState& c, const Vertex& v) {
    if (v.is_const) {
        return v.k + v.offset();
    }
    auto it = c.sigma.find(v.var);
    if (it == c.sigma.end()) {
        return std::nullopt;
    }
    return it->second + v.offset();
}

/// Per-block constraint tables so enumeration does not re-extract them for
/// every concrete state.
struct MemberTable {
    bool bottom = false;
    std::vector<LinCons> phi;
    struct Edge {
        size_t i, j;
        std::vector<LinCons> cs;
        bool is_bottom = false;
    };
    std::vector<Edge> edges;
};

MemberTable build_table(const ContentState& s) {
    MemberTable t;
    if (s.is_bottom()) {
        t.bottom = true;
        return t;
    }
    t.phi = s.phi().constraints();
    size_t m = s.ctx()->num_verts();
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) {
            if (s.structural_bottom(i, j)) {
                continue; // empty by construction, nothing to require
            }
            ScalarValue v = s.read_entry(i, j);
            MemberTable::Edge e;
            e.i = i;
            e.j = j;
            e.is_bottom = v.is_bottom();
            if (!e.is_bottom) {
                e.cs = v.constraints();
                if (e.cs.empty()) {
                    continue; // top edge constrains nothing
                }
            }
            t.edges.push_back(std::move(e));
        }
    }
    return t;
}

bool member_against(const MemberTable& t, const StateCtx& ctx,
                    const std::vector<std::pair<std::string, std::string>>& cell_of,
                    const ConcreteState& c) {
    if (t.bottom) {
        return false;
    }
    Store store = c.sigma;
    if (!satisfies_all(store, t.phi)) {
        return false;
    }
    for (const auto& e : t.edges) {
        auto lo = vertex_meaning(c, ctx.verts[e.i]);
        auto hi = vertex_meaning(c, ctx.verts[e.j]);
        if (!lo || !hi) {
            continue; // meaning undefined: no cells selected
        }
        for (int64_t l = *lo; l < *hi; ++l) {
            bool in_range = false;
            for (const auto& [arr, cell] : cell_of) {
                const auto& cells = c.rho.at(arr);
                if (l >= 0 && static_cast<size_t>(l) < cells.size()) {
                    store[cell] = cells[l];
                    in_range = true;
                } else {
                    store.erase(cell);
                }
            }
            if (!in_range) {
                continue; // cell outside the finite arrays: vacuous
            }
            store["idx"] = l;
            bool ok = !e.is_bottom && satisfies_all(store, e.cs);
            store.erase("idx");
            for (const auto& [arr, cell] : cell_of) {
                (void)arr;
                store.erase(cell);
            }
            if (!ok) {
                return false;
            }
        }
    }
    return true;
}

std::vector<std::pair<std::string, std::string>> cell_map(const Program& p) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& a : p.arrays) {
        out.emplace_back(a, Program::cell_var(a));
    }
    return out;
}

/// Scalars that may be read before any write on some path from entry; only
/// these need enumerated initial values, the rest start at zero.
std::set<std::string> entry_read_vars(const Program& p) {
    size_t n = p.blocks.size();
    // unwritten[b]: vars possibly still at their initial value at entry of b
    std::vector<std::set<std::string>> unwritten(n);
    std::set<std::string> all(p.scalars.begin(), p.scalars.end());
    if (n == 0) {
        return {};
    }
    unwritten[0] = all;
    std::set<std::string> result;
    auto read_op = [&](const std::set<std::string>& live, const Operand& o) {
        if (o.is_var && live.count(o.var)) {
            result.insert(o.var);
        }
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t b = 0; b < n; ++b) {
            std::set<std::string> live = unwritten[b];
            for (const auto& ins : p.blocks[b].instrs) {
                switch (ins.kind) {
                case Instr::Kind::ConstAssign:
                case Instr::Kind::Havoc:
                    break;
                case Instr::Kind::NegAssign:
                case Instr::Kind::ArrayRead:
                    read_op(live, ins.a);
                    break;
                case Instr::Kind::BinopAssign:
                case Instr::Kind::ArrayWrite:
                    read_op(live, ins.a);
                    read_op(live, ins.b);
                    break;
                }
                if (ins.kind != Instr::Kind::ArrayWrite) {
                    live.erase(ins.v);
                }
            }
            const Jump& j = p.blocks[b].jump;
            if (j.kind == Jump::Kind::Cond) {
                read_op(live, j.lhs);
                read_op(live, j.rhs);
            }
            std::vector<std::string> succs;
            if (j.kind == Jump::Kind::Cond) {
                succs = {j.then_label, j.else_label};
            } else if (j.kind == Jump::Kind::Br) {
                succs = {j.then_label};
            }
            for (const auto& s : succs) {
                size_t t = p.block_index.at(s);
                size_t before = unwritten[t].size();
                unwritten[t].insert(live.begin(), live.end());
                if (unwritten[t].size() != before) {
                    changed = true;
                }
            }
        }
    }
    return result;
}

} // namespace

bool gamma_member(const ContentState& s, const ConcreteState& c) {
    MemberTable t = build_table(s);
    std::vector<std::pair<std::string, std::string>> cells;
    for (const auto& cv : s.ctx()->cell_vars) {
        // Recover the array name: cell vars are the lowercase array names,
        // and membership only needs the rho key, which tests set up to match.
        std::string arr;
        for (const auto& [a, v] : c.rho) {
            if (Program::cell_var(a) == cv) {
                arr = a;
            }
        }
        if (!arr.empty()) {
            cells.emplace_back(arr, cv);
        }
    }
    return member_against(t, *s.ctx(), cells, c);
}

EnumReport soundness_enumerate(const Program& p, const AnalysisResult& r, const EnumBounds& b) {
    EnumReport rep;
    if (p.blocks.empty()) {
        return rep;
    }
    std::map<size_t, MemberTable> tables;
    for (size_t i = 0; i < p.blocks.size(); ++i) {
        tables.emplace(i, build_table(r.states.at(p.blocks[i].label)));
    }
    auto cells = cell_map(p);
    const StateCtx& ctx = *r.ctx;

    std::set<std::string> enumerated = entry_read_vars(p);
    std::vector<int64_t> havoc_vals;
    for (int64_t v = b.scalar_lo; v <= b.scalar_hi; ++v) {
        havoc_vals.push_back(v);
    }

    // Seed states: every combination of entry-read scalar values and array
    // contents over one shared length.
    std::deque<std::pair<ConcreteState, size_t>> work; // state, steps taken
    std::set<ConcreteState> seen;
    auto push = [&](ConcreteState&& c, size_t steps) {
        if (rep.states_visited >= b.state_cap) {
            rep.capped = true;
            return;
        }
        if (seen.insert(c).second) {
            ++rep.states_visited;
            work.emplace_back(std::move(c), steps);
        }
    };

    ConcreteState base;
    for (const auto& v : p.scalars) {
        base.sigma[v] = 0;
    }
    std::vector<std::string> enum_vars(enumerated.begin(), enumerated.end());
    for (size_t len = 0; len <= b.max_len; ++len) {
        std::vector<ConcreteState> seeds{base};
        for (auto& s : seeds) {
            for (const auto& a : p.arrays) {
                s.rho[a] = std::vector<int64_t>(len, b.cell_lo);
            }
        }
        // Enumerate scalar values.
        for (const auto& v : enum_vars) {
            std::vector<ConcreteState> next;
            for (const auto& s : seeds) {
                for (int64_t k = b.scalar_lo; k <= b.scalar_hi; ++k) {
                    ConcreteState s2 = s;
                    s2.sigma[v] = k;
                    next.push_back(std::move(s2));
                }
            }
            seeds = std::move(next);
        }
        // Enumerate cell values.
        for (const auto& a : p.arrays) {
            for (size_t i = 0; i < len; ++i) {
                std::vector<ConcreteState> next;
                for (const auto& s : seeds) {
                    for (int64_t k = b.cell_lo; k <= b.cell_hi; ++k) {
                        ConcreteState s2 = s;
                        s2.rho[a][i] = k;
                        next.push_back(std::move(s2));
                    }
                }
                seeds = std::move(next);
            }
        }
        for (auto& s : seeds) {
            push(std::move(s), 0);
        }
    }

    auto check_entry = [&](const ConcreteState& c) {
        if (c.offset != 0) {
            return;
        }
        if (!member_against(tables.at(c.block), ctx, cells, c)) {
            rep.violations.push_back({p.blocks[c.block].label, c});
        }
    };

    while (!work.empty()) {
        auto [cur, steps] = std::move(work.front());
        work.pop_front();
        check_entry(cur);
        if (steps >= b.max_steps) {
            continue;
        }
        bool is_havoc = cur.block < p.blocks.size() &&
                        cur.offset < p.blocks[cur.block].instrs.size() &&
                        p.blocks[cur.block].instrs[cur.offset].kind == Instr::Kind::Havoc;
        if (is_havoc) {
            for (int64_t v : havoc_vals) {
                StepResult sr = concrete_step(p, cur, [v] { return v; });
                if (sr.outcome == StepOutcome::Ok) {
                    push(std::move(sr.next), steps + 1);
                }
            }
        } else {
            StepResult sr = concrete_step(p, cur, nullptr);
            if (sr.outcome == StepOutcome::Ok) {
                push(std::move(sr.next), steps + 1);
            }
        }
    }
    return rep;
}

namespace {

// Symbols for the ordering counter.  Classes hold sorted symbol ids; an
// ordering is the list of classes in increasing value order.
using Cls = std::vector<int>;
using Ordering = std::vector<Cls>;

constexpr int kZero = 0;
constexpr int kN = 1;
constexpr int kMark = 2; // the first cell's upper bound (distinguish_zero)
int sym_i(int k) { return 3 + 2 * (k - 1); }
int sym_ip(int k) { return 4 + 2 * (k - 1); }

size_t class_of(const Ordering& o, int sym) {
    for (size_t i = 0; i < o.size(); ++i) {
        if (std::find(o[i].begin(), o[i].end(), sym) != o[i].end()) {
            return i;
        }
    }
    throw std::logic_error("symbol missing from ordering");
}

void add_to_class(Ordering& o, size_t c, int sym) {
    o[c].insert(std::upper_bound(o[c].begin(), o[c].end(), sym), sym);
}

/// True when a new class inserted in gap g (between classes g-1 and g) would
/// separate a value from its immediate successor.
bool gap_breaks(const Ordering& o, const std::vector<std::pair<int, int>>& pairs, size_t g) {
    if (g == 0 || g >= o.size()) {
        return false;
    }
    for (const auto& [a, b] : pairs) {
        bool a_left = std::find(o[g - 1].begin(), o[g - 1].end(), a) != o[g - 1].end();
        bool b_right = std::find(o[g].begin(), o[g].end(), b) != o[g].end();
        if (a_left && b_right) {
            return true;
        }
    }
    return false;
}

/// All orderings reachable by inserting the value `lo` and its immediate
/// successor `hi`, with class(lo) between class(lo_bound) and class(up_bound).
void insert_pair(const Ordering& o, const std::vector<std::pair<int, int>>& pairs, int lo, int hi,
                 std::set<Ordering>& out) {
    size_t c0 = class_of(o, kZero);
    size_t cn = class_of(o, kN);
    size_t ncls = o.size();
    auto emit_hi = [&](Ordering base, size_t lo_cls, bool lo_was_gap) {
        // hi joins the class right after lo's, or forms a new one there.
        if (lo_cls + 1 < base.size()) {
            Ordering v = base;
            add_to_class(v, lo_cls + 1, hi);
            out.insert(std::move(v));
        }
        bool blocked = !lo_was_gap && gap_breaks(o, pairs, lo_cls + 1);
        if (!blocked) {
            Ordering v = std::move(base);
            v.insert(v.begin() + static_cast<long>(lo_cls) + 1, Cls{hi});
            out.insert(std::move(v));
        }
    };
    for (size_t c = c0; c <= cn && c < ncls; ++c) {
        Ordering base = o;
        add_to_class(base, c, lo);
        emit_hi(std::move(base), c, false);
    }
    for (size_t g = c0 + 1; g <= cn; ++g) {
        if (gap_breaks(o, pairs, g)) {
            continue;
        }
        Ordering base = o;
        base.insert(base.begin() + static_cast<long>(g), Cls{lo});
        emit_hi(std::move(base), g, true);
    }
}

} // namespace

uint64_t count_orderings(const OrderingProblem& prob) {
    if (prob.m < 1) {
        throw std::invalid_argument("ordering problem needs m >= 1");
    }
    std::set<Ordering> cur = {{{kZero, kN}}, {{kZero}, {kN}}};
    std::vector<std::pair<int, int>> pairs;
    if (prob.distinguish_zero) {
        std::set<Ordering> next;
        for (const auto& o : cur) {
            size_t c0 = class_of(o, kZero);
            if (c0 + 1 < o.size()) {
                Ordering v = o;
                add_to_class(v, c0 + 1, kMark);
                next.insert(std::move(v));
            }
            Ordering v = o;
            v.insert(v.begin() + static_cast<long>(c0) + 1, Cls{kMark});
            next.insert(std::move(v));
        }
        cur = std::move(next);
        pairs.emplace_back(kZero, kMark);
    }
    for (int k = 1; k <= prob.m; ++k) {
        std::set<Ordering> next;
        for (const auto& o : cur) {
            insert_pair(o, pairs, sym_i(k), sym_ip(k), next);
        }
        pairs.emplace_back(sym_i(k), sym_ip(k));
        cur = std::move(next);
    }
    return cur.size();
}

} // namespace acg
