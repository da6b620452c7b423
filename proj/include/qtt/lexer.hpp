#pragma once

#include <cctype>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtt/surface.hpp"

namespace qtt {

struct SyntaxError : std::runtime_error {
  Span span;
  SyntaxError(Span sp, const std::string& msg)
      : std::runtime_error(msg), span(sp) {}
};

enum class TokKind : uint8_t {
  Ident,     // lower or upper identifiers
  Op,        // operator symbol sequence, incl. :: ++ >>= # +
  IntLit,
  StrLit,
  CharLit,
  Hole,      // ?name
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Semi,
  Colon,
  Equals,
  Arrow,     // ->
  FatArrow,  // =>
  BindArrow, // <-
  Backslash,
  Bar,
  Underscore,
  KwData,
  KwWhere,
  KwDo,
  KwCase,
  KwOf,
  KwLet,
  KwIn,
  KwImport,
  KwDefault,
  KwAuto,
  KwType,
  KwWorld,   // %World
  KwPrim,    // %prim
  End,
};

struct Token {
  TokKind kind;
  std::string text;
  long intVal = 0;
  Span span;
};

inline bool isOpChar(char c) {
  static const std::string chars = "+-*/<>=:#&!|.$@~^%";
  return chars.find(c) != std::string::npos;
}

inline bool isIdentStart(char c) { return std::isalpha((unsigned char)c) || c == '_'; }
inline bool isIdentChar(char c) {
  return std::isalnum((unsigned char)c) || c == '_' || c == '\'';
}

inline std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto here = [&]() { return Span{line, col}; };
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto push = [&](TokKind k, const std::string& text, Span sp) {
    Token t;
    t.kind = k;
    t.text = text;
    t.span = sp;
    out.push_back(t);
  };

  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      advance(1);
      continue;
    }
    // line comments
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Span sp = here();
    if (std::isdigit((unsigned char)c)) {
      size_t j = i;
      while (j < src.size() && std::isdigit((unsigned char)src[j])) ++j;
      Token t;
      t.kind = TokKind::IntLit;
      t.text = src.substr(i, j - i);
      t.intVal = std::stol(t.text);
      t.span = sp;
      out.push_back(t);
      advance(j - i);
      continue;
    }
    if (c == '"') {
      std::string s;
      size_t j = i + 1;
      while (j < src.size() && src[j] != '"') {
        if (src[j] == '\\' && j + 1 < src.size()) {
          char e = src[j + 1];
          if (e == 'n') s += '\n';
          else if (e == 't') s += '\t';
          else if (e == '\\') s += '\\';
          else if (e == '"') s += '"';
          else throw SyntaxError(sp, "unknown string escape");
          j += 2;
        } else {
          s += src[j++];
        }
      }
      if (j >= src.size()) throw SyntaxError(sp, "unterminated string literal");
      Token t;
      t.kind = TokKind::StrLit;
      t.text = s;
      t.span = sp;
      out.push_back(t);
      advance(j + 1 - i);
      continue;
    }
    if (c == '\'') {
      size_t j = i + 1;
      if (j >= src.size()) throw SyntaxError(sp, "unterminated char literal");
      char v = src[j];
      if (v == '\\') {
        ++j;
        if (j >= src.size()) throw SyntaxError(sp, "unterminated char literal");
        char e = src[j];
        if (e == 'n') v = '\n';
        else if (e == 't') v = '\t';
        else if (e == '\\') v = '\\';
        else if (e == '\'') v = '\'';
        else throw SyntaxError(sp, "unknown char escape");
      }
      ++j;
      if (j >= src.size() || src[j] != '\'')
        throw SyntaxError(sp, "unterminated char literal");
      Token t;
      t.kind = TokKind::CharLit;
      t.text = std::string(1, v);
      t.span = sp;
      out.push_back(t);
      advance(j + 1 - i);
      continue;
    }
    if (c == '%') {
      // %World and %prim keywords
      size_t j = i + 1;
      while (j < src.size() && isIdentChar(src[j])) ++j;
      std::string word = src.substr(i, j - i);
      if (word == "%World") {
        push(TokKind::KwWorld, word, sp);
        advance(j - i);
        continue;
      }
      if (word == "%prim") {
        push(TokKind::KwPrim, word, sp);
        advance(j - i);
        continue;
      }
      throw SyntaxError(sp, "unknown pragma '" + word + "'");
    }
    if (c == '?' && i + 1 < src.size() && isIdentStart(src[i + 1])) {
      size_t j = i + 1;
      while (j < src.size() && isIdentChar(src[j])) ++j;
      push(TokKind::Hole, src.substr(i + 1, j - i - 1), sp);
      advance(j - i);
      continue;
    }
    if (isIdentStart(c)) {
      size_t j = i;
      while (j < src.size() && isIdentChar(src[j])) ++j;
      std::string word = src.substr(i, j - i);
      TokKind k = TokKind::Ident;
      if (word == "_") k = TokKind::Underscore;
      else if (word == "data") k = TokKind::KwData;
      else if (word == "where") k = TokKind::KwWhere;
      else if (word == "do") k = TokKind::KwDo;
      else if (word == "case") k = TokKind::KwCase;
      else if (word == "of") k = TokKind::KwOf;
      else if (word == "let") k = TokKind::KwLet;
      else if (word == "in") k = TokKind::KwIn;
      else if (word == "import") k = TokKind::KwImport;
      else if (word == "default") k = TokKind::KwDefault;
      else if (word == "auto") k = TokKind::KwAuto;
      else if (word == "Type") k = TokKind::KwType;
      push(k, word, sp);
      advance(j - i);
      continue;
    }
    switch (c) {
      case '(': push(TokKind::LParen, "(", sp); advance(1); continue;
      case ')': push(TokKind::RParen, ")", sp); advance(1); continue;
      case '{': push(TokKind::LBrace, "{", sp); advance(1); continue;
      case '}': push(TokKind::RBrace, "}", sp); advance(1); continue;
      case '[': push(TokKind::LBracket, "[", sp); advance(1); continue;
      case ']': push(TokKind::RBracket, "]", sp); advance(1); continue;
      case ',': push(TokKind::Comma, ",", sp); advance(1); continue;
      case ';': push(TokKind::Semi, ";", sp); advance(1); continue;
      case '\\': push(TokKind::Backslash, "\\", sp); advance(1); continue;
      default: break;
    }
    if (isOpChar(c)) {
      size_t j = i;
      while (j < src.size() && isOpChar(src[j])) ++j;
      std::string op = src.substr(i, j - i);
      TokKind k = TokKind::Op;
      if (op == ":") k = TokKind::Colon;
      else if (op == "=") k = TokKind::Equals;
      else if (op == "->") k = TokKind::Arrow;
      else if (op == "=>") k = TokKind::FatArrow;
      else if (op == "<-") k = TokKind::BindArrow;
      else if (op == "|") k = TokKind::Bar;
      push(k, op, sp);
      advance(j - i);
      continue;
    }
    throw SyntaxError(sp, std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.kind = TokKind::End;
  end.span = {line, col};
  out.push_back(end);
  return out;
}

}  // namespace qtt
