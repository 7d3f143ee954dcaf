// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "acg/engine.hpp"
#include "acg/program.hpp"

namespace acg {

/// Concrete machine state: scalar store, one finite array store per declared
/// array (all sharing one length), and a program counter.
struct ConcreteState {
    std::map<std::string, int64_t> sigma;
    std::map<std::string, std::vector<int64_t>> rho;
    size_t block = 0;  // block index
    size_t offset = 0; // instruction offset; == instrs.size() means the jump

    bool operator==(const ConcreteState&) const = default;
    bool operator<(const ConcreteState& o) const {
        return std::tie(block, offset, sigma, rho) < std::tie(o.block, o.offset, o.sigma, o.rho);
    }
    std::string render() const;
};

enum class StepOutcome { Ok, Halt, Error };

struct StepResult {
    StepOutcome outcome = StepOutcome::Ok;
    ConcreteState next;
    std::string what; // Error description
};

/// Supplies values for havoc instructions.
using ChoiceFn = std::function<int64_t()>;

/// Executes one instruction or jump under standard integer semantics.
/// Out-of-range array accesses and unbound variables yield an Error outcome.
StepResult concrete_step(const Program& p, const ConcreteState& c, const ChoiceFn& choice);

/// True iff the scalar store satisfies phi and, for every vertex pair (i,j)
/// and every cell index l in [meaning(i), meaning(j)) inside the arrays'
/// range, the store extended with each array's cell value and idx := l
/// satisfies the edge property.  Constraints mentioning variables absent
/// from the (extended) store are ignored; closed values make that exact
/// projection.
bool gamma_member(const ContentState& s, const ConcreteState& c);

struct EnumBounds {
    int64_t scalar_lo = -2;
    int64_t scalar_hi = 3;
    size_t max_len = 3;   // array lengths enumerated in [0, max_len]
    int64_t cell_lo = 0;
    int64_t cell_hi = 2;  // initial cell values
    size_t max_steps = 200;
    size_t state_cap = 2000000;
};

struct Violation {
    std::string block;
    ConcreteState state;
};

struct EnumReport {
    std::vector<Violation> violations;
    size_t states_visited = 0;
    bool capped = false; // state cap hit: partial result, not a failure
};

/// Breadth-first enumeration of every reachable concrete state within the
/// bounds (initial values for entry-read scalars, all array contents, havoc
/// draws from the scalar range), checking gamma_member against the analyzer
/// state at each block entry.  Error runs (out-of-range accesses) terminate
/// silently.  Memoizes visited states so havoc-heavy programs stay tractable.
EnumReport soundness_enumerate(const Program& p, const AnalysisResult& r,
                               const EnumBounds& b = {});

struct OrderingProblem {
    int m = 1;
    bool distinguish_zero = false;
};

/// Number of feasible ordered partitions (weak orders, classes listed in
/// increasing order) of {0, n} and {i_k, i_k+ | k <= m} under: 0 <= i_k <= n,
/// i_k+ is the immediate successor value of i_k, and both base orderings
/// [{0,n}] and [{0},{n}] are counted.  With distinguish_zero the marker for
/// the first cell's upper bound joins the symbol set, immediately above 0.
uint64_t count_orderings(const OrderingProblem& prob);

} // namespace acg
