// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <vector>

#include "acg/scalar_value.hpp"

namespace acg {

/// How sparse mode thins out an edge before storing it.
enum class RelaxMode {
    /// Keep the closed constraints that mention a cell variable or idx.
    Cheap,
    /// Keep the constraints not already implied by the scalar state plus the
    /// edge's boundary; applied to the given constraint list as-is, without
    /// re-closing it first.
    Exact,
};

/// Filter an explicit constraint list by implication against `context`
/// (typically phi meet the edge boundary).  No closure is performed, so facts
/// only derivable by combining constraints are not rediscovered.
std::vector<LinCons> drop_implied(const std::vector<LinCons>& cons, const ScalarValue& context);

/// Thin an edge value for sparse storage.  Bottom passes through unchanged:
/// empty segments carry information the normalization rules need.
/// `context` is only consulted in Exact mode and may be null otherwise.
ScalarValue relax_entry(const ScalarValue& value, const std::set<std::string>& keep,
                        RelaxMode mode, const ScalarValue* context);

} // namespace acg
