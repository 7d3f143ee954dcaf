// SPDX-License-Identifier: Apache-2.0
#include "acg/parser.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace acg {

namespace {

const char* kind_name(ParseErrorKind k) {
    switch (k) {
    case ParseErrorKind::Lexical: return "lexical error";
    case ParseErrorKind::Structure: return "structure error";
    case ParseErrorKind::DuplicateLabel: return "duplicate label";
    case ParseErrorKind::UnknownLabel: return "unknown label";
    case ParseErrorKind::Undeclared: return "undeclared identifier";
    case ParseErrorKind::DuplicateName: return "duplicate name";
    }
    return "error";
}

struct Tok {
    enum class Kind { Ident, Int, Sym, End };
    Kind kind = Kind::End;
    std::string text;
    int64_t value = 0;
    int col = 0;
};

class LineLexer {
  public:
    LineLexer(const std::string& line, int lineno) : line_(line), lineno_(lineno) { advance(); }

    const Tok& cur() const { return cur_; }
    int lineno() const { return lineno_; }

    [[noreturn]] void fail(ParseErrorKind k, const std::string& msg) const {
        throw ParseError(k, lineno_, cur_.col, msg);
    }

    bool at_sym(const std::string& s) const { return cur_.kind == Tok::Kind::Sym && cur_.text == s; }
    bool at_ident() const { return cur_.kind == Tok::Kind::Ident; }
    bool at_int() const { return cur_.kind == Tok::Kind::Int; }
    bool at_end() const { return cur_.kind == Tok::Kind::End; }

    Tok take() {
        Tok t = cur_;
        advance();
        return t;
    }

    void expect_sym(const std::string& s) {
        if (!at_sym(s)) {
            fail(ParseErrorKind::Lexical, "expected '" + s + "'");
        }
        advance();
    }

    std::string expect_ident(const char* what) {
        if (!at_ident()) {
            fail(ParseErrorKind::Lexical, std::string("expected ") + what);
        }
        return take().text;
    }

    void expect_end() {
        if (!at_end()) {
            fail(ParseErrorKind::Lexical, "trailing input '" + cur_.text + "'");
        }
    }

    /// Rest of the raw line from the current token on (used for check
    /// predicates, which have their own constraint syntax).
    std::string rest() const {
        size_t from = cur_.col > 0 ? static_cast<size_t>(cur_.col - 1) : line_.size();
        return line_.substr(from);
    }

  private:
    void advance() {
        while (p_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[p_]))) {
            ++p_;
        }
        cur_ = Tok{};
        cur_.col = static_cast<int>(p_) + 1;
        if (p_ >= line_.size()) {
            cur_.kind = Tok::Kind::End;
            return;
        }
        char c = line_[p_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = p_;
            while (p_ < line_.size() && (std::isalnum(static_cast<unsigned char>(line_[p_])) ||
                                         line_[p_] == '_')) {
                ++p_;
            }
            cur_.kind = Tok::Kind::Ident;
            cur_.text = line_.substr(start, p_ - start);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = p_;
            while (p_ < line_.size() && std::isdigit(static_cast<unsigned char>(line_[p_]))) {
                ++p_;
            }
            cur_.kind = Tok::Kind::Int;
            cur_.text = line_.substr(start, p_ - start);
            cur_.value = std::stoll(cur_.text);
            return;
        }
        // Multi-character comparison operators, then single symbols.
        for (const char* two : {"<=", ">=", "==", "!="}) {
            if (line_.compare(p_, 2, two) == 0) {
                cur_.kind = Tok::Kind::Sym;
                cur_.text = two;
                p_ += 2;
                return;
            }
        }
        cur_.kind = Tok::Kind::Sym;
        cur_.text = std::string(1, c);
        ++p_;
    }

    const std::string& line_;
    int lineno_;
    size_t p_ = 0;
    Tok cur_;
};

struct PendingLabelRef {
    int line;
    std::string label;
};

class ProgramParser {
  public:
    explicit ProgramParser(const std::string& text) : text_(text) {}

    Program run() {
        std::istringstream in(text_);
        std::string raw;
        int lineno = 0;
        while (std::getline(in, raw)) {
            ++lineno;
            size_t hash = raw.find('#');
            if (hash != std::string::npos) {
                raw = raw.substr(0, hash);
            }
            lines_.emplace_back(lineno, std::move(raw));
        }
        for (const auto& [no, line] : lines_) {
            LineLexer lx(line, no);
            if (lx.at_end()) {
                continue;
            }
            dispatch(lx);
        }
        finish();
        return std::move(prog_);
    }

  private:
    void dispatch(LineLexer& lx) {
        if (lx.at_ident()) {
            const std::string w = lx.cur().text;
            if (w == "array" || w == "var") {
                parse_decl(lx);
                return;
            }
            if (w == "check") {
                parse_check(lx);
                return;
            }
        }
        if (!in_block_) {
            parse_block_header(lx);
            return;
        }
        parse_statement(lx);
    }

    void parse_decl(LineLexer& lx) {
        if (!prog_.blocks.empty() || in_block_) {
            lx.fail(ParseErrorKind::Structure, "declarations must precede all blocks");
        }
        bool is_array = lx.take().text == "array";
        while (true) {
            Tok name = lx.cur().kind == Tok::Kind::Ident
                           ? lx.take()
                           : (lx.fail(ParseErrorKind::Lexical, "expected identifier"), Tok{});
            declare(lx, name.text, is_array);
            if (lx.at_sym(",")) {
                lx.take();
                continue;
            }
            lx.expect_sym(";");
            lx.expect_end();
            return;
        }
    }

    void declare(LineLexer& lx, const std::string& name, bool is_array) {
        if (prog_.is_array(name) || prog_.is_scalar(name)) {
            throw ParseError(ParseErrorKind::DuplicateName, lx.lineno(), lx.cur().col,
                             "'" + name + "' declared twice");
        }
        (is_array ? prog_.arrays : prog_.scalars).push_back(name);
    }

    void parse_block_header(LineLexer& lx) {
        std::string label = lx.expect_ident("block label");
        lx.expect_sym(":");
        lx.expect_end();
        if (prog_.block_index.count(label)) {
            throw ParseError(ParseErrorKind::DuplicateLabel, lx.lineno(), 1,
                             "label '" + label + "' already defined");
        }
        prog_.block_index[label] = prog_.blocks.size();
        prog_.blocks.push_back(Block{label, {}, Jump{}});
        in_block_ = true;
    }

    Operand parse_operand(LineLexer& lx) {
        if (lx.at_ident()) {
            Tok t = lx.take();
            require_scalar(lx, t);
            return Operand::of_var(t.text);
        }
        bool neg = false;
        if (lx.at_sym("-")) {
            lx.take();
            neg = true;
        }
        if (!lx.at_int()) {
            lx.fail(ParseErrorKind::Lexical, "expected variable or integer");
        }
        int64_t k = lx.take().value;
        return Operand::of_int(neg ? -k : k);
    }

    void require_scalar(const LineLexer& lx, const Tok& t) {
        if (!prog_.is_scalar(t.text)) {
            throw ParseError(ParseErrorKind::Undeclared, lx.lineno(), t.col,
                             "'" + t.text + "' is not a declared scalar");
        }
    }

    void require_array(const LineLexer& lx, const Tok& t) {
        if (!prog_.is_array(t.text)) {
            throw ParseError(ParseErrorKind::Undeclared, lx.lineno(), t.col,
                             "'" + t.text + "' is not a declared array");
        }
    }

    void parse_statement(LineLexer& lx) {
        Block& blk = prog_.blocks.back();
        if (lx.at_ident()) {
            const std::string w = lx.cur().text;
            if (w == "if") {
                parse_cond(lx, blk);
                return;
            }
            if (w == "br") {
                lx.take();
                Tok target = lx.at_ident()
                                 ? lx.take()
                                 : (lx.fail(ParseErrorKind::Lexical, "expected label"), Tok{});
                lx.expect_end();
                blk.jump.kind = Jump::Kind::Br;
                blk.jump.then_label = target.text;
                label_refs_.push_back({lx.lineno(), target.text});
                in_block_ = false;
                return;
            }
            if (w == "end" || w == "error") {
                lx.take();
                lx.expect_end();
                blk.jump.kind = (w == "end") ? Jump::Kind::End : Jump::Kind::Error;
                in_block_ = false;
                return;
            }
        }
        parse_assign_or_store(lx, blk);
    }

    void parse_cond(LineLexer& lx, Block& blk) {
        lx.take(); // if
        lx.expect_sym("(");
        Jump j;
        j.kind = Jump::Kind::Cond;
        j.lhs = parse_operand(lx);
        if (lx.cur().kind != Tok::Kind::Sym) {
            lx.fail(ParseErrorKind::Lexical, "expected comparison operator");
        }
        std::string op = lx.take().text;
        if (op == "<") {
            j.op = CmpOp::Lt;
        } else if (op == "<=") {
            j.op = CmpOp::Le;
        } else if (op == "==" || op == "=") {
            j.op = CmpOp::Eq;
        } else if (op == "!=") {
            j.op = CmpOp::Ne;
        } else if (op == ">=") {
            j.op = CmpOp::Ge;
        } else if (op == ">") {
            j.op = CmpOp::Gt;
        } else {
            lx.fail(ParseErrorKind::Lexical, "unknown comparison '" + op + "'");
        }
        j.rhs = parse_operand(lx);
        lx.expect_sym(")");
        j.then_label = lx.expect_ident("then-label");
        j.else_label = lx.expect_ident("else-label");
        lx.expect_end();
        label_refs_.push_back({lx.lineno(), j.then_label});
        label_refs_.push_back({lx.lineno(), j.else_label});
        blk.jump = j;
        in_block_ = false;
    }

    void parse_assign_or_store(LineLexer& lx, Block& blk) {
        if (!lx.at_ident()) {
            lx.fail(ParseErrorKind::Lexical, "expected statement");
        }
        Tok first = lx.take();
        Instr ins;
        if (lx.at_sym("[")) { // A[i] = v
            require_array(lx, first);
            lx.take();
            ins.kind = Instr::Kind::ArrayWrite;
            ins.array = first.text;
            ins.a = parse_operand(lx);
            lx.expect_sym("]");
            lx.expect_sym("=");
            ins.b = parse_operand(lx);
            lx.expect_end();
            blk.instrs.push_back(std::move(ins));
            return;
        }
        require_scalar(lx, first);
        ins.v = first.text;
        lx.expect_sym("=");
        if (lx.at_sym("?")) {
            lx.take();
            lx.expect_end();
            ins.kind = Instr::Kind::Havoc;
            blk.instrs.push_back(std::move(ins));
            return;
        }
        if (lx.at_sym("-")) { // v = -w  or a negative literal
            lx.take();
            if (lx.at_ident()) {
                Tok w = lx.take();
                require_scalar(lx, w);
                lx.expect_end();
                ins.kind = Instr::Kind::NegAssign;
                ins.a = Operand::of_var(w.text);
                blk.instrs.push_back(std::move(ins));
                return;
            }
            if (!lx.at_int()) {
                lx.fail(ParseErrorKind::Lexical, "expected variable or integer after '-'");
            }
            ins.kind = Instr::Kind::ConstAssign;
            ins.a = Operand::of_int(-lx.take().value);
            lx.expect_end();
            blk.instrs.push_back(std::move(ins));
            return;
        }
        if (lx.at_ident()) {
            Tok src = lx.take();
            if (lx.at_sym("[")) { // v = A[i]
                require_array(lx, src);
                lx.take();
                ins.kind = Instr::Kind::ArrayRead;
                ins.array = src.text;
                ins.a = parse_operand(lx);
                lx.expect_sym("]");
                lx.expect_end();
                blk.instrs.push_back(std::move(ins));
                return;
            }
            require_scalar(lx, src);
            Operand a = Operand::of_var(src.text);
            finish_binop(lx, blk, std::move(ins), a);
            return;
        }
        if (lx.at_int()) {
            Tok k = lx.take();
            if (lx.at_end()) {
                ins.kind = Instr::Kind::ConstAssign;
                ins.a = Operand::of_int(k.value);
                blk.instrs.push_back(std::move(ins));
                return;
            }
            finish_binop(lx, blk, std::move(ins), Operand::of_int(k.value));
            return;
        }
        lx.fail(ParseErrorKind::Lexical, "malformed assignment");
    }

    void finish_binop(LineLexer& lx, Block& blk, Instr ins, const Operand& a) {
        ins.a = a;
        if (lx.at_end()) { // plain copy v = w, canonicalized as w + 0
            ins.kind = Instr::Kind::BinopAssign;
            ins.op = BinOp::Add;
            ins.b = Operand::of_int(0);
            blk.instrs.push_back(std::move(ins));
            return;
        }
        if (lx.cur().kind != Tok::Kind::Sym ||
            (lx.cur().text != "+" && lx.cur().text != "-" && lx.cur().text != "*")) {
            lx.fail(ParseErrorKind::Lexical, "expected '+', '-' or '*'");
        }
        std::string op = lx.take().text;
        ins.kind = Instr::Kind::BinopAssign;
        ins.op = (op == "+") ? BinOp::Add : (op == "-") ? BinOp::Sub : BinOp::Mul;
        ins.b = parse_operand(lx);
        lx.expect_end();
        blk.instrs.push_back(std::move(ins));
    }

    CheckBound parse_bound(LineLexer& lx) {
        CheckBound b;
        b.base = parse_operand(lx);
        if (lx.at_sym("+")) {
            lx.take();
            b.plus = true;
        }
        return b;
    }

    void parse_check(LineLexer& lx) {
        if (in_block_) {
            lx.fail(ParseErrorKind::Structure, "check directives may not appear inside a block");
        }
        lx.take(); // check
        CheckDirective c;
        c.at_label = lx.expect_ident("label");
        label_refs_.push_back({lx.lineno(), c.at_label});
        lx.expect_sym(":");
        if (lx.expect_ident("'forall'") != "forall") {
            lx.fail(ParseErrorKind::Lexical, "expected 'forall'");
        }
        lx.expect_sym("[");
        c.lo = parse_bound(lx);
        lx.expect_sym(",");
        c.hi = parse_bound(lx);
        lx.expect_sym(")");
        if (lx.expect_ident("'of'") != "of") {
            lx.fail(ParseErrorKind::Lexical, "expected 'of'");
        }
        Tok arr = lx.at_ident() ? lx.take()
                                : (lx.fail(ParseErrorKind::Lexical, "expected array name"), Tok{});
        require_array(lx, arr);
        c.array = arr.text;
        lx.expect_sym(":");
        std::string pred = lx.rest();
        if (pred.empty()) {
            lx.fail(ParseErrorKind::Lexical, "check needs at least one conjunct");
        }
        size_t pos = 0;
        while (pos != std::string::npos) {
            size_t amp = pred.find("&&", pos);
            std::string piece =
                (amp == std::string::npos) ? pred.substr(pos) : pred.substr(pos, amp - pos);
            try {
                c.conjuncts.push_back(parse_lincons(piece));
            } catch (const std::runtime_error& e) {
                lx.fail(ParseErrorKind::Lexical, e.what());
            }
            pos = (amp == std::string::npos) ? std::string::npos : amp + 2;
        }
        validate_check_vars(lx, c);
        prog_.checks.push_back(std::move(c));
    }

    void validate_check_vars(LineLexer& lx, const CheckDirective& c) {
        std::set<std::string> allowed;
        for (const auto& s : prog_.scalars) {
            allowed.insert(s);
        }
        allowed.insert("idx");
        // Conjuncts may relate the cells of several arrays at one index,
        // e.g. `b = a` after copying A into B.
        for (const auto& a : prog_.arrays) {
            allowed.insert(Program::cell_var(a));
        }
        for (const auto& cons : c.conjuncts) {
            for (const auto& [v, k] : cons.terms) {
                (void)k;
                if (!allowed.count(v)) {
                    lx.fail(ParseErrorKind::Undeclared,
                            "'" + v + "' is not usable in this check predicate");
                }
            }
        }
    }

    void finish() {
        if (prog_.blocks.empty()) {
            throw ParseError(ParseErrorKind::Structure, 1, 1, "program needs at least one block");
        }
        if (in_block_) {
            throw ParseError(ParseErrorKind::Structure, lines_.empty() ? 1 : lines_.back().first, 1,
                             "block '" + prog_.blocks.back().label + "' has no terminating jump");
        }
        for (const auto& ref : label_refs_) {
            if (!prog_.block_index.count(ref.label)) {
                throw ParseError(ParseErrorKind::UnknownLabel, ref.line, 1,
                                 "label '" + ref.label + "' is not defined");
            }
        }
        for (const auto& a : prog_.arrays) {
            if (prog_.is_scalar(Program::cell_var(a))) {
                throw ParseError(ParseErrorKind::DuplicateName, 1, 1,
                                 "scalar '" + Program::cell_var(a) +
                                     "' collides with the cell variable of array '" + a + "'");
            }
        }
    }

    const std::string& text_;
    std::vector<std::pair<int, std::string>> lines_;
    Program prog_;
    bool in_block_ = false;
    std::vector<PendingLabelRef> label_refs_;
};

} // namespace {

ParseError::ParseError(ParseErrorKind kind, int line, int col, const std::string& msg)
    : std::runtime_error(std::string(kind_name(kind)) + " at " + std::to_string(line) + ":" +
                         std::to_string(col) + ": " + msg),
      kind_(kind), line_(line), col_(col) {}

Program parse_program(const std::string& text) { return ProgramParser(text).run(); }

} // namespace acg
