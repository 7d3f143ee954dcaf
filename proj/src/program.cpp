// SPDX-License-Identifier: Apache-2.0
#include "acg/program.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace acg {

const char* render_cmp(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    }
    return "?";
}

CmpOp negate_cmp(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Ge: return CmpOp::Lt;
    case CmpOp::Gt: return CmpOp::Le;
    }
    return op;
}

CmpOp flip_cmp(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return CmpOp::Gt;
    case CmpOp::Le: return CmpOp::Ge;
    case CmpOp::Ge: return CmpOp::Le;
    case CmpOp::Gt: return CmpOp::Lt;
    case CmpOp::Eq:
    case CmpOp::Ne: return op;
    }
    return op;
}

std::string Instr::render() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::ConstAssign:
        os << v << " = " << a.render();
        break;
    case Kind::NegAssign:
        os << v << " = -" << a.render();
        break;
    case Kind::BinopAssign:
        if (op == BinOp::Add && !b.is_var && b.value == 0) {
            os << v << " = " << a.render();
        } else {
            const char* o = (op == BinOp::Add) ? "+" : (op == BinOp::Sub) ? "-" : "*";
            os << v << " = " << a.render() << " " << o << " " << b.render();
        }
        break;
    case Kind::Havoc:
        os << v << " = ?";
        break;
    case Kind::ArrayRead:
        os << v << " = " << array << "[" << a.render() << "]";
        break;
    case Kind::ArrayWrite:
        os << array << "[" << a.render() << "] = " << b.render();
        break;
    }
    return os.str();
}

std::string Jump::render() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::Cond:
        os << "if (" << lhs.render() << " " << render_cmp(op) << " " << rhs.render() << ") "
           << then_label << " " << else_label;
        break;
    case Kind::Br:
        os << "br " << then_label;
        break;
    case Kind::End:
        os << "end";
        break;
    case Kind::Error:
        os << "error";
        break;
    }
    return os.str();
}

std::string CheckDirective::render() const {
    std::ostringstream os;
    os << "check " << at_label << ": forall [" << lo.render() << ", " << hi.render() << ") of "
       << array << " : ";
    for (size_t i = 0; i < conjuncts.size(); ++i) {
        if (i) {
            os << " && ";
        }
        os << conjuncts[i].render();
    }
    return os.str();
}

bool Program::is_scalar(const std::string& v) const {
    return std::find(scalars.begin(), scalars.end(), v) != scalars.end();
}

bool Program::is_array(const std::string& v) const {
    return std::find(arrays.begin(), arrays.end(), v) != arrays.end();
}

std::string Program::cell_var(const std::string& array) {
    std::string out = array;
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string Program::pretty_print() const {
    std::ostringstream os;
    auto list = [&](const char* kw, const std::vector<std::string>& names) {
        if (names.empty()) {
            return;
        }
        os << kw << " ";
        for (size_t i = 0; i < names.size(); ++i) {
            if (i) {
                os << ", ";
            }
            os << names[i];
        }
        os << ";\n";
    };
    list("array", arrays);
    list("var", scalars);
    for (const auto& b : blocks) {
        os << "\n" << b.label << ":\n";
        for (const auto& ins : b.instrs) {
            os << "  " << ins.render() << "\n";
        }
        os << "  " << b.jump.render() << "\n";
    }
    if (!checks.empty()) {
        os << "\n";
        for (const auto& c : checks) {
            os << c.render() << "\n";
        }
    }
    return os.str();
}

} // namespace acg
