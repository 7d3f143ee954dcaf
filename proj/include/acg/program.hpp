// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "acg/lincons.hpp"

namespace acg {

/// A scalar variable or an integer literal.
struct Operand {
    bool is_var = false;
    std::string var;
    int64_t value = 0;

    static Operand of_var(std::string v) {
        Operand o;
        o.is_var = true;
        o.var = std::move(v);
        return o;
    }
    static Operand of_int(int64_t k) {
        Operand o;
        o.value = k;
        return o;
    }
    bool operator==(const Operand&) const = default;
    std::string render() const { return is_var ? var : std::to_string(value); }
};

enum class CmpOp { Lt, Le, Eq, Ne, Ge, Gt };
enum class BinOp { Add, Sub, Mul };

const char* render_cmp(CmpOp op);
CmpOp negate_cmp(CmpOp op);
CmpOp flip_cmp(CmpOp op); // swap sides: a op b == b flip(op) a

struct Instr {
    enum class Kind { ConstAssign, NegAssign, BinopAssign, Havoc, ArrayRead, ArrayWrite };

    Kind kind = Kind::Havoc;
    std::string v;     // target scalar
    std::string array; // ArrayRead/ArrayWrite
    BinOp op = BinOp::Add;
    // BinopAssign operands; for array access `a` is the index and, for
    // ArrayWrite, `b` is the stored value.  NegAssign negates `a`.
    Operand a, b;

    bool operator==(const Instr&) const = default;
    std::string render() const;
};

struct Jump {
    enum class Kind { Cond, Br, End, Error };

    Kind kind = Kind::End;
    Operand lhs, rhs;
    CmpOp op = CmpOp::Lt;
    std::string then_label; // Br target lives here too
    std::string else_label;

    bool operator==(const Jump&) const = default;
    std::string render() const;
};

struct Block {
    std::string label;
    std::vector<Instr> instrs;
    Jump jump;

    bool operator==(const Block&) const = default;
};

/// Segment bound appearing in a check: an operand, optionally its successor
/// (written with a trailing `+`).
struct CheckBound {
    Operand base;
    bool plus = false;

    bool operator==(const CheckBound&) const = default;
    std::string render() const { return base.render() + (plus ? "+" : ""); }
};

/// `check L: forall [lo, hi) of A : c1 && c2` — at the entry of block L,
/// every cell A[l] with lo <= l < hi must satisfy each conjunct, where the
/// cell's value is named by the lowercase array name and its position by idx.
struct CheckDirective {
    std::string at_label;
    CheckBound lo, hi;
    std::string array;
    std::vector<LinCons> conjuncts;

    bool operator==(const CheckDirective&) const = default;
    std::string render() const;
};

struct Program {
    std::vector<std::string> arrays;
    std::vector<std::string> scalars;
    std::vector<Block> blocks;
    std::vector<CheckDirective> checks;
    std::map<std::string, size_t> block_index;

    const Block& block(const std::string& label) const { return blocks.at(block_index.at(label)); }
    bool is_scalar(const std::string& v) const;
    bool is_array(const std::string& v) const;

    /// Cell variable naming a segment's content in checks and invariants.
    static std::string cell_var(const std::string& array);

    std::string pretty_print() const;
};

} // namespace acg
