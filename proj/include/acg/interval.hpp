// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "acg/lincons.hpp"
#include "acg/universe.hpp"

namespace acg {

/// One variable's range; absent bounds are infinite.
struct Itv {
    std::optional<int64_t> lo;
    std::optional<int64_t> hi;

    bool is_top() const { return !lo && !hi; }
    bool is_empty() const { return lo && hi && *lo > *hi; }
    bool operator==(const Itv&) const = default;
};

/// Non-relational box domain over the universe.
class Box {
  public:
    static Box top(UniversePtr u);
    static Box bottom(UniversePtr u);

    const UniversePtr& universe() const { return univ_; }
    bool is_bottom() const { return bottom_; }
    bool is_top() const { return !bottom_ && ranges_.empty(); }

    Box join(const Box& o) const;
    Box meet(const Box& o) const;
    bool leq(const Box& o) const;
    Box widen(const Box& o) const;
    bool equal(const Box& o) const;

    Box project(const std::string& v) const;
    bool constrains(const std::string& v) const { return !bottom_ && ranges_.count(v) != 0; }

    Box assign_const(const std::string& v, int64_t k) const;
    Box assign_copy(const std::string& v, const std::string& w) const;
    Box assign_neg(const std::string& v, const Itv& w) const;
    Box assign_add(const std::string& v, const Itv& w1, const Itv& w2) const;
    Box assign_sub(const std::string& v, const Itv& w1, const Itv& w2) const;
    Box assign_mul(const std::string& v, const Itv& w1, const Itv& w2) const;

    Box assume(const LinCons& c) const;
    /// Disequality x != y: trims a bound when the other side is a point.
    Box assume_noteq(const Itv& x, const std::string* xvar, const Itv& y,
                     const std::string* yvar) const;
    bool implies(const LinCons& c) const;

    Itv range(const std::string& v) const;
    Box with_range(const std::string& v, Itv r) const;

    std::vector<LinCons> constraints() const;

    /// Keep only the ranges of variables in keep (box constraints mention
    /// exactly one variable each).
    Box keep_mentioning(const std::set<std::string>& keep) const;

    std::string render() const;

  private:
    explicit Box(UniversePtr u, bool bottom) : univ_(std::move(u)), bottom_(bottom) {}
    void set_range(const std::string& v, Itv r); // normalizes top/empty

    UniversePtr univ_;
    bool bottom_ = false;
    std::map<std::string, Itv> ranges_; // only non-top entries
};

} // namespace acg
