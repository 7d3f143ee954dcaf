// SPDX-License-Identifier: Apache-2.0
#include "acg/relax.hpp"

namespace acg {

std::vector<LinCons> drop_implied(const std::vector<LinCons>& cons, const ScalarValue& context) {
    std::vector<LinCons> out;
    for (const auto& c : cons) {
        if (!context.implies(c)) {
            out.push_back(c);
        }
    }
    return out;
}

ScalarValue relax_entry(const ScalarValue& value, const std::set<std::string>& keep,
                        RelaxMode mode, const ScalarValue* context) {
    if (value.is_bottom() || value.is_top()) {
        return value;
    }
    if (mode == RelaxMode::Cheap) {
        return value.keep_mentioning(keep);
    }
    ScalarValue out = ScalarValue::top(value.kind(), value.universe());
    for (const auto& c : value.constraints()) {
        if (context == nullptr || !context->implies(c)) {
            out = out.assume(c);
        }
    }
    return out;
}

} // namespace acg
