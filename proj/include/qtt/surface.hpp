#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qtt/multiplicity.hpp"

namespace qtt {

struct Span {
  int line = 0;
  int col = 0;
};

enum class Plicity : uint8_t { Explicit, Implicit, Auto, DefaultImplicit };

struct STerm;
using SP = std::shared_ptr<STerm>;

enum class SKind : uint8_t {
  Var,
  App,
  Lam,
  Pi,
  Let,
  Case,
  Do,
  Hole,
  IntLit,
  StrLit,
  CharLit,
  ListLit,
  PairLit,
  UnitLit,
  Universe,
  WorldTy,
  Underscore,
};

struct SDoStmt {
  enum Kind { Bind, LetStmt, Expr } kind;
  SP pat;  // null for Expr
  SP expr;
  Span span;
};

struct SCaseAlt {
  SP pat;
  SP rhs;
};

struct SLetBinding {
  SP pat;  // variable or destructuring pattern
  SP val;
};

// One node type for the whole sugar-bearing syntax; `kind` selects which
// fields are meaningful.
struct STerm {
  SKind kind = SKind::Var;
  Span span;

  std::string name;  // Var, Hole, Lam binder, Pi binder

  // App
  SP fn, arg;
  std::string argName;  // nonempty for {name = e} application
  bool appImplicit = false;

  // Lam / Pi / Let
  SP body;
  Plicity plicity = Plicity::Explicit;
  bool hasMult = false;
  Mult mult = Mult::Omega;
  SP dom, cod;
  SP defaultVal;  // for {default t x : A}

  // Let
  std::vector<SLetBinding> bindings;

  // Case
  SP scrutinee;
  std::vector<SCaseAlt> alts;

  // Do
  std::vector<SDoStmt> stmts;

  // Literals
  long intVal = 0;
  std::string strVal;
  std::vector<SP> elems;  // ListLit, PairLit
};

inline SP mkSTerm(SKind k, Span sp = {}) {
  auto t = std::make_shared<STerm>();
  t->kind = k;
  t->span = sp;
  return t;
}

inline SP sVar(const std::string& n, Span sp = {}) {
  auto t = mkSTerm(SKind::Var, sp);
  t->name = n;
  return t;
}

inline SP sApp(SP f, SP a) {
  auto t = mkSTerm(SKind::App, f ? f->span : Span{});
  t->fn = std::move(f);
  t->arg = std::move(a);
  return t;
}

inline SP sLam(const std::string& n, SP body, Span sp = {}) {
  auto t = mkSTerm(SKind::Lam, sp);
  t->name = n;
  t->body = std::move(body);
  return t;
}

enum class DeclKind : uint8_t { Sig, Clause, Data, Import, Prim };

struct SConstructor {
  std::string name;
  SP type;
  Span span;
};

struct SDecl {
  DeclKind kind;
  Span span;
  std::string name;  // Sig/Data/Prim name, or Import target
  SP type;           // Sig: declared type; Data: tycon signature; Prim: type
  SP lhs, rhs;       // Clause
  std::vector<SConstructor> ctors;  // Data
};

struct SourceModule {
  std::string name;
  std::vector<std::string> imports;
  std::vector<SDecl> decls;
};

}  // namespace qtt
