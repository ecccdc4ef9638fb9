#pragma once

#include <stdexcept>
#include <string>

#include "quotrep/operator_engine.hpp"

namespace quotrep {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : std::runtime_error("parse error at position " + std::to_string(position) +
                           ": " + message),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

struct ExprAst {
  OperatorWord word;
  bool vacuum_target = true;
  std::string state_file;  // when vacuum_target is false
};

/// Grammar (whitespace separated):
///   expr   := token+ ("|0>" | "@" filename)
///   token  := kind "[" int "]" "(" class ")"
///   kind   := "a" | "f" | "m" | "h" | "e"
///   class  := term (("+" | "-") term)*
///   term   := rational ["*"] atom | rational | atom
///   atom   := "w" | "al" digits | "be" digits
///   rational := digits ["/" digits]
/// A bare rational is a multiple of the unit class; "1" is the unit class.
ExprAst parse_expr(const std::string& text, const ModuliParams& params);

}  // namespace quotrep
