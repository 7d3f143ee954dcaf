// SPDX-License-Identifier: Apache-2.0
#include "acg/transfer.hpp"

#include <stdexcept>

namespace acg {

namespace {

// Right-hand side of a scalar assignment, in one of the shapes the domains
// can consume.
struct Rhs {
    enum class Kind { Havoc, Linear, Mul };
    Kind kind = Kind::Havoc;
    LinExpr e1, e2; // Linear uses e1; Mul uses e1 * e2

    static Rhs havoc() { return Rhs{}; }
    static Rhs linear(LinExpr e) {
        Rhs r;
        r.kind = Kind::Linear;
        r.e1 = std::move(e);
        return r;
    }
    static Rhs mul(LinExpr a, LinExpr b) {
        Rhs r;
        r.kind = Kind::Mul;
        r.e1 = std::move(a);
        r.e2 = std::move(b);
        return r;
    }

    bool mentions(const std::string& v) const {
        return e1.mentions(v) || (kind == Kind::Mul && e2.mentions(v));
    }
    Rhs renamed(const std::string& from, const std::string& to) const {
        auto ren = [&](LinExpr e) {
            auto it = e.terms.find(from);
            if (it != e.terms.end()) {
                Rational k = it->second;
                e.terms.erase(it);
                e.terms[to] += k;
            }
            return e;
        };
        Rhs r = *this;
        r.e1 = ren(r.e1);
        r.e2 = ren(r.e2);
        return r;
    }
};

LinExpr operand_expr(const Operand& o) {
    return o.is_var ? LinExpr::of_var(o.var) : LinExpr::of_const(o.value);
}

LinExpr pruned(LinExpr e) {
    std::erase_if(e.terms, [](const auto& t) { return t.second == 0; });
    return e;
}

bool vertex_based_on(const Vertex& x, const std::string& v) { return !x.is_const && x.var == v; }

bool has_vertex_base(const StateCtx& ctx, const std::string& v) {
    for (const auto& x : ctx.verts) {
        if (vertex_based_on(x, v)) {
            return true;
        }
    }
    return false;
}

ScalarValue apply_phi(const ScalarValue& phi, const std::string& v, const Rhs& rhs) {
    switch (rhs.kind) {
    case Rhs::Kind::Havoc:
        return phi.project(v);
    case Rhs::Kind::Linear:
        return phi.assign(v, rhs.e1);
    case Rhs::Kind::Mul:
        return phi.assign_mul(v, rhs.e1, rhs.e2);
    }
    return phi.project(v);
}

/// Store an edge value, thinning it first in sparse mode.
void store_entry(ContentState& s, size_t i, size_t j, ScalarValue v) {
    const StateCtx& ctx = *s.ctx();
    if (ctx.sparse && !v.is_bottom() && !v.is_top()) {
        if (ctx.relax_mode == RelaxMode::Cheap) {
            v = relax_entry(v, ctx.ui, RelaxMode::Cheap, nullptr);
        } else {
            bool inf = false;
            auto lt = ctx.lt_cons(i, j, &inf);
            ScalarValue context =
                inf ? ScalarValue::bottom(ctx.domain, ctx.universe)
                    : (lt ? s.phi().assume(*lt) : s.phi());
            v = relax_entry(v, ctx.ui, RelaxMode::Exact, &context);
        }
    }
    s.set_entry(i, j, std::move(v));
}

/// Shared body of assignments and havoc: no self-reference on the right.
ContentState assign_straight(const ContentState& s, const std::string& v, const Rhs& rhs) {
    if (s.is_bottom()) {
        return s;
    }
    const StateCtx& ctx = *s.ctx();
    ContentState out = s;
    out.set_phi(apply_phi(s.phi(), v, rhs));
    size_t n = ctx.num_verts();
    ScalarValue top = ScalarValue::top(ctx.domain, ctx.universe);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (i == j || s.structural_bottom(i, j)) {
                continue;
            }
            const ScalarValue& e = s.entry(i, j);
            if (vertex_based_on(ctx.verts[i], v) || vertex_based_on(ctx.verts[j], v)) {
                // The bound's meaning changed; the old segment property is void.
                if (!e.is_top()) {
                    out.set_entry(i, j, top);
                }
            } else if (!e.is_top() && !e.is_bottom() && e.constrains(v)) {
                out.set_entry(i, j, e.project(v));
            }
        }
    }
    return out.normalize();
}

ContentState assign_core(const ContentState& s, const std::string& v, const Rhs& rhs) {
    if (s.is_bottom() || rhs.kind == Rhs::Kind::Havoc || !rhs.mentions(v)) {
        return assign_straight(s, v, rhs);
    }
    const StateCtx& ctx = *s.ctx();
    // Self-referential: save the old value in the reserved temporary, assign
    // from it, then drop the temporary.
    if (v == "$t" || !ctx.universe->contains("$t")) {
        return assign_straight(s, v, Rhs::havoc());
    }
    Rhs renamed = rhs.renamed(v, "$t");
    if (!has_vertex_base(ctx, v)) {
        ContentState s1 = assign_straight(s, "$t", Rhs::linear(LinExpr::of_var(v)));
        ContentState s2 = assign_straight(s1, v, renamed);
        return assign_straight(s2, "$t", Rhs::havoc());
    }
    // v is a segment bound: give the temporary its own vertices so edges can
    // migrate from the old meaning of v to the new one.
    std::vector<Vertex> verts = ctx.verts;
    verts.push_back(Vertex::of_var("$t"));
    verts.push_back(Vertex::of_var("$t", true));
    CtxPtr ctx_t = make_ctx(verts, ctx.universe, ctx.cell_vars, ctx.domain, ctx.sparse,
                            ctx.norm_budget_factor, ctx.relax_mode);
    ContentState s1 = assign_straight(s.with_vertices(ctx_t), "$t", Rhs::linear(LinExpr::of_var(v)));
    ContentState s2 = assign_straight(s1, v, renamed);
    ContentState s3 = s2;
    s3.set_phi(s2.phi().project("$t"));
    size_t n = ctx_t->num_verts();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (i == j || s2.structural_bottom(i, j)) {
                continue;
            }
            const ScalarValue& e = s2.entry(i, j);
            if (!e.is_top() && !e.is_bottom()) {
                s3.set_entry(i, j, e.project("$t"));
            }
        }
    }
    return s3.with_vertices(s.ctx()).normalize();
}

} // namespace

ContentState tf_assign(const ContentState& s, const std::string& v, const LinExpr& e) {
    return assign_core(s, v, Rhs::linear(e));
}

ContentState tf_assign_mul(const ContentState& s, const std::string& v, const LinExpr& e1,
                           const LinExpr& e2) {
    return assign_core(s, v, Rhs::mul(e1, e2));
}

ContentState tf_havoc(const ContentState& s, const std::string& v) {
    return assign_core(s, v, Rhs::havoc());
}

ContentState tf_array_read(const ContentState& s, const std::string& v, const std::string& array,
                           const Operand& idx) {
    if (s.is_bottom()) {
        return s;
    }
    if (idx.is_var && idx.var == v) {
        // Target doubles as the index: read into the temporary first.
        ContentState s1 = tf_array_read(s, "$t", array, idx);
        ContentState s2 = tf_assign(s1, v, LinExpr::of_var("$t"));
        return tf_havoc(s2, "$t");
    }
    const StateCtx& ctx = *s.ctx();
    Vertex iv = idx.is_var ? Vertex::of_var(idx.var) : Vertex::of_const(idx.value);
    Vertex ivp = iv;
    ivp.plus = true;
    auto pi = ctx.find(iv);
    auto pip = ctx.find(ivp);
    if (!pi || !pip) {
        return tf_havoc(s, v); // untracked index: only the target changes
    }
    std::string cell = Program::cell_var(array);
    ContentState out = s;
    out.set_phi(s.phi().project(v));
    size_t n = ctx.num_verts();
    ScalarValue top = ScalarValue::top(ctx.domain, ctx.universe);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (i == j || s.structural_bottom(i, j)) {
                continue;
            }
            const ScalarValue& e = s.entry(i, j);
            if (vertex_based_on(ctx.verts[i], v) || vertex_based_on(ctx.verts[j], v)) {
                if (!e.is_top()) {
                    out.set_entry(i, j, top);
                }
                continue;
            }
            ScalarValue ne = (e.is_top() || e.is_bottom()) ? e : e.project(v);
            if (i == *pi && j == *pip) {
                ne = ne.assume(LinCons({{cell, 1}, {v, -1}}, 0, Rel::Eq));
                if (iv.is_const) {
                    ne = ne.assume(LinCons({{"idx", 1}}, iv.k, Rel::Eq));
                } else {
                    ne = ne.assume(LinCons({{"idx", 1}, {iv.var, -1}}, 0, Rel::Eq));
                }
                store_entry(out, i, j, std::move(ne));
            } else if (!ne.equal(e)) {
                out.set_entry(i, j, std::move(ne));
            }
        }
    }
    return out.normalize();
}

ContentState tf_array_write(const ContentState& s, const std::string& array, const Operand& idx,
                            const Operand& val, const TransferOptions& opts) {
    if (s.is_bottom()) {
        return s;
    }
    const StateCtx& ctx = *s.ctx();
    std::string cell = Program::cell_var(array);
    LinCons cell_eq = val.is_var ? LinCons({{cell, 1}, {val.var, -1}}, 0, Rel::Eq)
                                 : LinCons({{cell, 1}}, val.value, Rel::Eq);
    Vertex iv = idx.is_var ? Vertex::of_var(idx.var) : Vertex::of_const(idx.value);
    Vertex ivp = iv;
    ivp.plus = true;
    auto pi = ctx.find(iv);
    auto pip = ctx.find(ivp);
    size_t n = ctx.num_verts();
    ContentState out = s;

    auto written = [&](const ScalarValue& e) {
        ScalarValue w = e.project(cell).assume(cell_eq);
        if (pi) { // the written cell's position is the index's meaning
            if (iv.is_const) {
                w = w.assume(LinCons({{"idx", 1}}, iv.k, Rel::Eq));
            } else {
                w = w.assume(LinCons({{"idx", 1}, {iv.var, -1}}, 0, Rel::Eq));
            }
        }
        return w;
    };

    if (!pi || !pip) {
        // Untracked index: every segment of this array may contain the cell.
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = 0; j < n; ++j) {
                if (i == j || s.structural_bottom(i, j) || s.entry(i, j).is_top()) {
                    continue;
                }
                if (opts.skip_weak_updates) {
                    continue;
                }
                const ScalarValue& e = s.entry(i, j);
                store_entry(out, i, j, e.join(written(e)));
            }
        }
        return out.normalize();
    }

    // True when phi entails meaning(p) - meaning(q) >= m.
    auto entailed = [&](size_t p, size_t q, int64_t m) {
        bool inf = false;
        auto c = ctx.diff_geq(p, q, m, &inf);
        if (inf) {
            return false;
        }
        return !c || s.phi().implies(*c);
    };

    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (i == j || s.structural_bottom(i, j)) {
                continue;
            }
            const ScalarValue& e = s.entry(i, j);
            if (i == *pi && j == *pip) {
                store_entry(out, i, j, written(e)); // strong update
                continue;
            }
            // Untouched when the segment lies entirely above or below the cell.
            if (entailed(i, *pi, 1) || entailed(*pi, j, 0)) {
                continue;
            }
            if (opts.skip_weak_updates || e.is_top()) {
                continue;
            }
            store_entry(out, i, j, e.join(written(e)));
        }
    }
    return out.normalize();
}

ContentState tf_assume(const ContentState& s, const Operand& lhs, CmpOp op, const Operand& rhs) {
    if (s.is_bottom()) {
        return s;
    }
    if (!lhs.is_var && !rhs.is_var) {
        bool sat = false;
        switch (op) {
        case CmpOp::Lt: sat = lhs.value < rhs.value; break;
        case CmpOp::Le: sat = lhs.value <= rhs.value; break;
        case CmpOp::Eq: sat = lhs.value == rhs.value; break;
        case CmpOp::Ne: sat = lhs.value != rhs.value; break;
        case CmpOp::Ge: sat = lhs.value >= rhs.value; break;
        case CmpOp::Gt: sat = lhs.value > rhs.value; break;
        }
        return sat ? s : ContentState::bottom(s.ctx());
    }
    ContentState out = s;
    if (op == CmpOp::Ne) {
        out.set_phi(s.phi().assume_noteq(operand_expr(lhs), operand_expr(rhs)));
        return out.normalize();
    }
    // Reduce to  (positive side) - (negative side) >= m.
    std::map<std::string, Rational> terms;
    Rational bound = 0;
    Rel rel = Rel::Geq;
    auto add = [&](const Operand& o, int sign) {
        if (o.is_var) {
            terms[o.var] += sign;
        } else {
            bound -= sign * Rational(o.value);
        }
    };
    switch (op) {
    case CmpOp::Lt: add(rhs, 1); add(lhs, -1); bound += 1; break;
    case CmpOp::Le: add(rhs, 1); add(lhs, -1); break;
    case CmpOp::Gt: add(lhs, 1); add(rhs, -1); bound += 1; break;
    case CmpOp::Ge: add(lhs, 1); add(rhs, -1); break;
    case CmpOp::Eq: add(lhs, 1); add(rhs, -1); rel = Rel::Eq; break;
    default: throw std::logic_error("unreachable comparison");
    }
    LinCons c(std::move(terms), bound, rel);
    if (c.terms.empty()) { // e.g. x < x
        bool sat = rel == Rel::Eq ? c.bound == 0 : c.bound <= 0;
        return sat ? s : ContentState::bottom(s.ctx());
    }
    out.set_phi(s.phi().assume(c));
    return out.normalize();
}

ContentState tf_instr(const ContentState& s, const Instr& ins, const TransferOptions& opts) {
    switch (ins.kind) {
    case Instr::Kind::ConstAssign:
        return tf_assign(s, ins.v, operand_expr(ins.a));
    case Instr::Kind::NegAssign: {
        LinExpr e = operand_expr(ins.a);
        for (auto& [w, k] : e.terms) {
            k = -k;
        }
        e.constant = -e.constant;
        return tf_assign(s, ins.v, e);
    }
    case Instr::Kind::BinopAssign: {
        LinExpr a = operand_expr(ins.a);
        LinExpr b = operand_expr(ins.b);
        switch (ins.op) {
        case BinOp::Add: {
            LinExpr e = a;
            for (const auto& [w, k] : b.terms) {
                e.terms[w] += k;
            }
            e.constant += b.constant;
            return tf_assign(s, ins.v, pruned(e));
        }
        case BinOp::Sub: {
            LinExpr e = a;
            for (const auto& [w, k] : b.terms) {
                e.terms[w] -= k;
            }
            e.constant -= b.constant;
            return tf_assign(s, ins.v, pruned(e));
        }
        case BinOp::Mul:
            return tf_assign_mul(s, ins.v, a, b);
        }
        break;
    }
    case Instr::Kind::Havoc:
        return tf_havoc(s, ins.v);
    case Instr::Kind::ArrayRead:
        return tf_array_read(s, ins.v, ins.array, ins.a);
    case Instr::Kind::ArrayWrite:
        return tf_array_write(s, ins.array, ins.a, ins.b, opts);
    }
    throw std::logic_error("unreachable instruction kind");
}

} // namespace acg
