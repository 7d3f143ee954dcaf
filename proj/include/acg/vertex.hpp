// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace acg {

/// Segment bound: an index-relevant variable or constant, optionally in its
/// successor (+1) form.
struct Vertex {
    bool is_const = false;
    std::string var;
    int64_t k = 0;
    bool plus = false;

    static Vertex of_var(std::string v, bool plus = false) {
        Vertex x;
        x.var = std::move(v);
        x.plus = plus;
        return x;
    }
    static Vertex of_const(int64_t c, bool plus = false) {
        Vertex x;
        x.is_const = true;
        x.k = c;
        x.plus = plus;
        return x;
    }

    Vertex base() const {
        Vertex x = *this;
        x.plus = false;
        return x;
    }
    bool same_base(const Vertex& o) const {
        return is_const == o.is_const && (is_const ? k == o.k : var == o.var);
    }
    /// Offset added to the base's value (successor forms stand for base + 1).
    int64_t offset() const { return plus ? 1 : 0; }

    bool operator==(const Vertex&) const = default;
    bool operator<(const Vertex& o) const {
        if (is_const != o.is_const) {
            return is_const < o.is_const;
        }
        if (is_const) {
            if (k != o.k) {
                return k < o.k;
            }
        } else if (var != o.var) {
            return var < o.var;
        }
        return plus < o.plus;
    }

    std::string render() const {
        std::string s = is_const ? std::to_string(k) : var;
        if (plus) {
            s += "+";
        }
        return s;
    }
};

} // namespace acg
