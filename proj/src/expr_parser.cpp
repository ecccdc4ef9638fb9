#include "quotrep/expr_parser.hpp"

#include <cctype>

namespace quotrep {

namespace {

struct Lexer {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool accept(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!accept(c)) throw ParseError(pos, std::string("expected '") + c + "' " + what);
  }
  bool accept_word(const std::string& w) {
    skip_ws();
    if (text.compare(pos, w.size(), w) == 0) {
      pos += w.size();
      return true;
    }
    return false;
  }
  std::string read_ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos]))))
      ++pos;
    return text.substr(start, pos - start);
  }
  long long read_int() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (pos == start) throw ParseError(pos, "expected an integer");
    return std::stoll(text.substr(start, pos - start));
  }
};

Rational parse_rational(Lexer& lx) {
  long num = static_cast<long>(lx.read_int());
  if (lx.accept('/')) {
    std::size_t at = lx.pos;
    long den = static_cast<long>(lx.read_int());
    if (den == 0) throw ParseError(at, "zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  return Rational(num);
}

/// class := term (("+"|"-") term)*
CurveClass parse_class(Lexer& lx, const CurveAlgebra& alg, const std::string& label) {
  CurveClass out = alg.zero({label});
  bool first = true;
  while (true) {
    int sig = 1;
    lx.skip_ws();
    if (!first) {
      if (lx.accept('+')) {
        sig = 1;
      } else if (lx.accept('-')) {
        sig = -1;
      } else {
        break;
      }
    } else if (lx.accept('-')) {
      sig = -1;
    }
    first = false;
    Rational coeff(sig);
    LetterId letter = alg.unit();
    bool have_atom = false;
    lx.skip_ws();
    if (lx.pos < lx.text.size() && std::isdigit(static_cast<unsigned char>(lx.text[lx.pos]))) {
      coeff *= parse_rational(lx);
      lx.accept('*');
      lx.skip_ws();
    } else {
      have_atom = true;  // a bare atom is required below
    }
    if (lx.pos < lx.text.size() && std::isalpha(static_cast<unsigned char>(lx.text[lx.pos]))) {
      std::size_t at = lx.pos;
      std::string name = lx.read_ident();
      auto id = alg.letter_from_name(name);
      if (!id) throw ParseError(at, "unknown class letter '" + name + "'");
      letter = *id;
    } else if (have_atom) {
      throw ParseError(lx.pos, "expected a class term");
    }
    out = alg.add(out, alg.letter_class(label, letter, coeff));
  }
  return out;
}

}  // namespace

ExprAst parse_expr(const std::string& text, const ModuliParams& params) {
  CurveAlgebra alg(params.g);
  Lexer lx{text};
  ExprAst ast;
  bool saw_target = false;
  while (!lx.done()) {
    lx.skip_ws();
    if (lx.accept_word("|0>")) {
      ast.vacuum_target = true;
      saw_target = true;
      break;
    }
    if (lx.accept('@')) {
      lx.skip_ws();
      std::size_t start = lx.pos;
      while (lx.pos < lx.text.size() &&
             !std::isspace(static_cast<unsigned char>(lx.text[lx.pos])))
        ++lx.pos;
      if (lx.pos == start) throw ParseError(lx.pos, "expected a file name after '@'");
      ast.vacuum_target = false;
      ast.state_file = text.substr(start, lx.pos - start);
      saw_target = true;
      break;
    }
    std::size_t at = lx.pos;
    std::string kind = lx.read_ident();
    OperatorToken tok;
    if (kind == "a") tok.kind = OpKind::A;
    else if (kind == "f") tok.kind = OpKind::F;
    else if (kind == "m") tok.kind = OpKind::M;
    else if (kind == "h") tok.kind = OpKind::H;
    else if (kind == "e") tok.kind = OpKind::E;
    else throw ParseError(at, "expected an operator kind a|f|m|h|e");
    lx.expect('[', "before the operator index");
    std::size_t iat = lx.pos;
    tok.index = static_cast<int>(lx.read_int());
    if (tok.kind == OpKind::A && (tok.index < 0 || tok.index >= params.r))
      throw ParseError(iat, "a-operator index out of range (rank " +
                                std::to_string(params.r) + ")");
    if (tok.kind == OpKind::M && tok.index > params.r)
      throw ParseError(iat, "m-operator index out of range (rank " +
                                std::to_string(params.r) + ")");
    lx.expect(']', "after the operator index");
    lx.expect('(', "before the cap class");
    tok.cap = parse_class(lx, alg, "c");
    lx.expect(')', "after the cap class");
    ast.word.tokens.push_back(std::move(tok));
  }
  if (!saw_target) throw ParseError(lx.pos, "expected a target '|0>' or '@file'");
  if (!lx.done()) throw ParseError(lx.pos, "unexpected trailing input");
  if (ast.word.tokens.empty()) throw ParseError(0, "expected at least one operator token");
  return ast;
}

}  // namespace quotrep
