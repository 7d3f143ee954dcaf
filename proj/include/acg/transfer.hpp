// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "acg/content_state.hpp"
#include "acg/program.hpp"

namespace acg {

struct TransferOptions {
    /// Mutation hook for soundness testing: drop case-(c) weak updates of
    /// array writes, leaving possibly-overlapping segments stale.
    bool skip_weak_updates = false;
};

/// v := e (linear right-hand side; self-reference is handled via the
/// reserved temporary and, when v is a vertex base, temporary vertices).
ContentState tf_assign(const ContentState& s, const std::string& v, const LinExpr& e);

/// v := e1 * e2 with at least the interval domain evaluating the product.
ContentState tf_assign_mul(const ContentState& s, const std::string& v, const LinExpr& e1,
                           const LinExpr& e2);

/// v := ?
ContentState tf_havoc(const ContentState& s, const std::string& v);

/// v := A[i]
ContentState tf_array_read(const ContentState& s, const std::string& v, const std::string& array,
                           const Operand& idx);

/// A[i] := val; strong update on the singleton edge, weak update on edges
/// that may contain the written cell.
ContentState tf_array_write(const ContentState& s, const std::string& array, const Operand& idx,
                            const Operand& val, const TransferOptions& opts = {});

/// Branch refinement lhs cmp rhs.
ContentState tf_assume(const ContentState& s, const Operand& lhs, CmpOp op, const Operand& rhs);

/// Dispatch over the instruction kinds.
ContentState tf_instr(const ContentState& s, const Instr& ins, const TransferOptions& opts = {});

} // namespace acg
