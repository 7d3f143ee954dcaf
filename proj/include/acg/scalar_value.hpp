// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <variant>
#include <vector>

#include "acg/dbm.hpp"
#include "acg/interval.hpp"
#include "acg/lincons.hpp"
#include "acg/universe.hpp"

namespace acg {

enum class DomainKind { Interval, Dbm };

/// Linear expression  sum(k_v * v) + constant.
struct LinExpr {
    std::map<std::string, Rational> terms;
    Rational constant = 0;

    static LinExpr of_const(Rational k);
    static LinExpr of_var(const std::string& v);
    static LinExpr of_offset(const std::string& v, Rational k); // v + k

    bool mentions(const std::string& v) const { return terms.count(v) != 0; }
    std::string render() const;
};

/// Numeric abstract value, either a box or a difference-bound matrix, behind
/// one interface so the segment analysis is domain-agnostic.
class ScalarValue {
  public:
    static ScalarValue top(DomainKind k, UniversePtr u);
    static ScalarValue bottom(DomainKind k, UniversePtr u);

    DomainKind kind() const;
    const UniversePtr& universe() const;

    bool is_bottom() const;
    bool is_top() const;

    ScalarValue join(const ScalarValue& o) const;
    ScalarValue meet(const ScalarValue& o) const;
    bool leq(const ScalarValue& o) const;
    ScalarValue widen(const ScalarValue& o) const;
    bool equal(const ScalarValue& o) const;

    ScalarValue project(const std::string& v) const;
    /// True when some stored constraint mentions v.
    bool constrains(const std::string& v) const {
        return std::visit([&](const auto& d) { return d.constrains(v); }, v_);
    }
    ScalarValue havoc(const std::string& v) const { return project(v); }

    /// v := e.  Self-referential right-hand sides are handled exactly for
    /// offsets and via the reserved temporary "$t" otherwise.
    ScalarValue assign(const std::string& v, const LinExpr& e) const;
    /// v := e1 * e2; intervals evaluate the product, the DBM leaves v free
    /// unless both factors are constant.
    ScalarValue assign_mul(const std::string& v, const LinExpr& e1, const LinExpr& e2) const;

    ScalarValue assume(const LinCons& c) const;
    /// Meet in a constraint without re-closing a DBM.  Needed right after
    /// widening, where closure would undo the extrapolation.
    ScalarValue assume_raw(const LinCons& c) const;
    /// lhs != rhs; each side is a variable or a constant.
    ScalarValue assume_noteq(const LinExpr& lhs, const LinExpr& rhs) const;
    bool implies(const LinCons& c) const;

    std::vector<LinCons> constraints() const;
    /// Keep only the constraints mentioning a variable in keep.
    ScalarValue keep_mentioning(const std::set<std::string>& keep) const;
    std::string render() const;

    const Dbm* as_dbm() const { return std::get_if<Dbm>(&v_); }
    const Box* as_box() const { return std::get_if<Box>(&v_); }

  private:
    explicit ScalarValue(Dbm d) : v_(std::move(d)) {}
    explicit ScalarValue(Box b) : v_(std::move(b)) {}

    std::variant<Box, Dbm> v_;
    // Values are immutable once wrapped, so top-ness is computed lazily and
    // cached; -1 = unknown.
    mutable signed char top_memo_ = -1;
};

} // namespace acg
