#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "npefix/frontend/ast.hpp"

namespace npefix {

enum class Tok {
  Ident,
  IntLit,
  StringLit,
  // keywords
  KwClass, KwExtends, KwImplements, KwAbstract, KwInterface, KwStatic, KwVoid, KwIf, KwElse,
  KwWhile, KwReturn, KwThrow, KwTry, KwCatch, KwFinally, KwNew, KwNull, KwTrue, KwFalse, KwThis,
  KwInt, KwBool,
  // punctuation
  LBrace, RBrace, LParen, RParen, Semi, Comma, Dot, Assign,
  Plus, Minus, Star, Slash, Percent, Bang, EqEq, NotEq, Lt, Le, Gt, Ge, AndAnd, OrOr,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier name, decoded string literal, or integer digits
  Span span;
};

std::string_view describe(Tok kind);

/// Splits MiniJ source into tokens. Throws SyntaxError on malformed input.
std::vector<Token> tokenize(std::string_view path, std::string_view text);

}  // namespace npefix
