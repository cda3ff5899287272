#pragma once

#include <string>
#include <vector>

#include "dpq/common.hpp"

namespace dpq::surface {

enum class Tok {
  // keywords
  KwData,
  KwSimple,
  KwObject,
  KwGate,
  KwClass,
  KwInstance,
  KwWhere,
  KwLet,
  KwIn,
  KwCase,
  KwOf,
  KwDo,
  KwForall,
  KwType,
  // names and literals
  Ident,
  ConId,
  NatLit,
  // symbols
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  IdiomOpen,   // [|
  IdiomClose,  // |]
  Arrow,       // ->
  FatArrow,    // =>
  BindArrow,   // <-
  Colon,
  Comma,
  Equals,
  Pipe,
  Star,
  Bang,
  Lambda,  // \ or the Unicode lambda
  AndAnd,
  OrOr,
  Underscore,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  Span span;
  uint64_t nat = 0;  // valid when kind == NatLit
};

const char* tok_name(Tok t);

/// Lexes UTF-8 source into a token stream terminated by an End token.
/// `--` starts a line comment. Throws CompileError(LexError) on bad input.
std::vector<Token> tokenize(const std::string& source);

}  // namespace dpq::surface
