// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "acg/lincons.hpp"
#include "acg/universe.hpp"

namespace acg {

/// Difference-bound matrix over a universe of integer variables plus a
/// distinguished zero node.  Entry (i,j) is an upper bound on x_i - x_j;
/// node 0 is the constant 0, so (i,0) bounds x_i and (0,j) bounds -x_j.
///
/// Non-bottom values are kept transitively closed except immediately after
/// widening, which must not be re-closed (closure would undo the
/// extrapolation); closed_form() produces a closed copy on demand.
class Dbm {
  public:
    static constexpr int64_t kInf = INT64_MAX;

    static Dbm top(UniversePtr u);
    static Dbm bottom(UniversePtr u);

    const UniversePtr& universe() const { return univ_; }
    bool is_bottom() const { return bottom_; }
    bool is_top() const;
    bool is_closed() const { return bottom_ || closed_; }

    /// Transitively closed equivalent (identity when already closed).
    Dbm closed_form() const;

    Dbm join(const Dbm& o) const;
    Dbm meet(const Dbm& o) const;
    bool leq(const Dbm& o) const;
    Dbm widen(const Dbm& o) const;
    bool equal(const Dbm& o) const; // semantic equality (closed comparison)

    /// Existential quantification: drop every constraint mentioning v.
    Dbm project(const std::string& v) const;
    /// True when some stored edge mentions v (so project(v) could change
    /// the value); closure cannot introduce an edge on an untouched node.
    bool constrains(const std::string& v) const;

    Dbm assign_const(const std::string& v, int64_t k) const;
    Dbm assign_copy(const std::string& v, const std::string& w) const;      // v := w
    Dbm assign_offset(const std::string& v, const std::string& w, int64_t k) const; // v := w + k
    Dbm havoc(const std::string& v) const { return project(v); }

    /// Meet with a constraint; inexpressible constraints are a sound no-op.
    Dbm assume(const LinCons& c) const;
    bool implies(const LinCons& c) const;

    /// Closed edge set as canonical linear constraints ({0 >= 1} for bottom).
    std::vector<LinCons> constraints() const;

    /// Keep only the closed edges that mention a variable in keep (bounds of
    /// keep variables, and differences with at least one end in keep), then
    /// re-close.  Equivalent to filtering constraints() by mention.
    Dbm keep_mentioning(const std::set<std::string>& keep) const;

    /// Meet with a single difference edge without re-closing.  Used by the
    /// widening path, where closure must stay lazy.
    void add_edge_raw(size_t i, size_t j, int64_t w);

    std::string render() const;

    // Node helpers: node 0 is the zero node, variable v is node index+1.
    size_t node_of(const std::string& v) const { return univ_->index_of(v) + 1; }
    size_t num_nodes() const { return univ_->size() + 1; }
    int64_t at(size_t i, size_t j) const { return mat_[i * n_ + j]; }

  private:
    Dbm(UniversePtr u, bool bottom);

    int64_t& cell(size_t i, size_t j) { return mat_[i * n_ + j]; }
    void close(); // Floyd-Warshall; sets bottom on a negative cycle
    void close_incremental(size_t u, size_t v, int64_t w);
    void set_bottom();
    /// Meet in a DBM-expressible constraint; returns false if inexpressible.
    bool meet_lincons(const LinCons& c);
    std::optional<int64_t> implied_bound(size_t i, size_t j) const;

    UniversePtr univ_;
    size_t n_ = 0;
    bool bottom_ = false;
    bool closed_ = true;
    std::vector<int64_t> mat_;
};

} // namespace acg
