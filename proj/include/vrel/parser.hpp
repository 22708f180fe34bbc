#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vrel/ast.hpp"

namespace vrel {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Parses a constraint file: one universally quantified formula per
/// non-comment line (`#` starts a comment). Every predicate must occur in
/// `sig` with matching arity and every term must be a quantified variable
/// or a known constant. Returns the formulas in file order.
///
/// Grammar (precedence not > and > or > ->, `->` right-associative):
///   line    := "forall" varlist ":" body
///   varlist := NAME ("," NAME)*
///   body    := disj ("->" body)?
///   disj    := conj ("or" conj)*
///   conj    := unary ("and" unary)*
///   unary   := "not" unary | "(" body ")" | atom
///   atom    := NAME "(" NAME ("," NAME)* ")"
std::vector<FormulaPtr> parse_constraints(const std::string& text, const Signature& sig);

/// Parses a single formula line (no comments). Used by parse_constraints
/// and handy in tests.
FormulaPtr parse_formula(const std::string& line, const Signature& sig, int line_number = 1);

}  // namespace vrel
