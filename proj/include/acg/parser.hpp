// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

#include "acg/program.hpp"

namespace acg {

enum class ParseErrorKind {
    Lexical,
    Structure,
    DuplicateLabel,
    UnknownLabel,
    Undeclared,
    DuplicateName,
};

class ParseError : public std::runtime_error {
  public:
    ParseError(ParseErrorKind kind, int line, int col, const std::string& msg);

    ParseErrorKind kind() const { return kind_; }
    int line() const { return line_; }
    int col() const { return col_; }

  private:
    ParseErrorKind kind_;
    int line_;
    int col_;
};

/// Parses and validates a program; throws ParseError with a 1-based source
/// location on any malformed or inconsistent input.
Program parse_program(const std::string& text);

} // namespace acg
