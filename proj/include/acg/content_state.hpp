// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "acg/relax.hpp"
#include "acg/scalar_value.hpp"
#include "acg/vertex.hpp"

namespace acg {

/// Thrown when normalization exceeds its descending-step budget.  Must never
/// fire for the shipped scalar domains; it guards hypothetical plug-ins whose
/// rewrite system might diverge.
class NormBudgetExceeded : public std::runtime_error {
  public:
    explicit NormBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct NormStats {
    size_t descending_steps = 0;
    size_t budget = 0;
};

/// Immutable per-analysis context shared by all states: the vertex set, the
/// scalar universe (program scalars, the reserved temporary, one cell
/// variable per array, and idx), and analysis settings.
struct StateCtx {
    std::vector<Vertex> verts;
    UniversePtr universe;
    std::vector<std::string> cell_vars; // lowercase array names
    std::set<std::string> ui;           // cell_vars + idx
    DomainKind domain = DomainKind::Dbm;
    bool sparse = false;
    RelaxMode relax_mode = RelaxMode::Cheap;
    int norm_budget_factor = 4;

    size_t num_verts() const { return verts.size(); }
    size_t index_of(const Vertex& v) const;
    std::optional<size_t> find(const Vertex& v) const;

    /// meaning(p) - meaning(q) >= m as a constraint; nullopt when trivially
    /// true, `infeasible` set when trivially false.
    std::optional<LinCons> diff_geq(size_t p, size_t q, int64_t m, bool* infeasible) const;
    /// meaning(i) < meaning(j); same conventions.
    std::optional<LinCons> lt_cons(size_t i, size_t j, bool* infeasible) const;
    /// meaning(i) >= meaning(j), same conventions.
    std::optional<LinCons> geq_cons(size_t i, size_t j, bool* infeasible) const;

  private:
    // diff_geq depends only on (p, q, m) and the fixed vertex list, so the
    // built constraints are memoized.
    mutable std::map<std::tuple<size_t, size_t, int64_t>,
                     std::pair<std::optional<LinCons>, bool>>
        diff_memo_;
};

using CtxPtr = std::shared_ptr<const StateCtx>;

CtxPtr make_ctx(std::vector<Vertex> verts, UniversePtr universe,
                std::vector<std::string> cell_vars, DomainKind domain, bool sparse,
                int norm_budget_factor = 4, RelaxMode relax_mode = RelaxMode::Cheap);

/// Abstract state: scalar part phi plus a matrix of segment properties.
/// Entry (i,j) constrains every array cell with index in [meaning(i),
/// meaning(j)).  In sparse mode entries store relaxed values (constraints
/// mentioning a cell variable or idx only); the full strength of an entry is
/// recovered by read_entry.
class ContentState {
  public:
    static ContentState top(CtxPtr ctx);
    static ContentState bottom(CtxPtr ctx);

    const CtxPtr& ctx() const { return ctx_; }
    bool is_bottom() const { return phi_.is_bottom(); }

    const ScalarValue& phi() const { return phi_; }
    const ScalarValue& entry(size_t i, size_t j) const { return psi_[i * n() + j]; }
    /// Full strength of an edge: the stored value in naive mode, and
    /// phi meet boundary meet stored value in sparse mode.
    ScalarValue read_entry(size_t i, size_t j) const;

    void set_phi(ScalarValue v);
    void set_entry(size_t i, size_t j, ScalarValue v);

    /// True for (v,v), and (v+,v): segments that are empty by construction.
    bool structural_bottom(size_t i, size_t j) const;

    const std::set<size_t>& row_nontop(size_t i) const { return rows_[i]; }
    const std::set<size_t>& col_nontop(size_t j) const { return cols_[j]; }

    ContentState normalize(NormStats* stats = nullptr) const;

    static ContentState join(const ContentState& a, const ContentState& b);
    static ContentState meet(const ContentState& a, const ContentState& b);
    static bool leq(const ContentState& a, const ContentState& b);
    /// Pointwise widening; re-injects only the boundary constraints, never a
    /// full normalize (which would undo the extrapolation).
    static ContentState widen(const ContentState& a, const ContentState& b);
    static bool equal(const ContentState& a, const ContentState& b);

    /// Same state over a different vertex set (shared universe); entries over
    /// surviving vertex pairs are kept, new pairs start unconstrained.
    ContentState with_vertices(const CtxPtr& target) const;

    std::string render(bool reduced = true) const;

  private:
    ContentState(CtxPtr ctx, ScalarValue phi);
    size_t n() const { return ctx_->num_verts(); }
    void rebuild_index();

    CtxPtr ctx_;
    ScalarValue phi_;
    std::vector<ScalarValue> psi_;
    std::vector<std::set<size_t>> rows_; // per-row non-top column indices
    std::vector<std::set<size_t>> cols_; // per-column non-top row indices
};

} // namespace acg
