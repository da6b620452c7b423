#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qtt/parser.hpp"

using namespace qtt;

static SP parse(const std::string& src) {
  Parser p(src);
  return p.parseSingleTerm();
}

TEST_CASE("application is left associative") {
  SP t = parse("f x y");
  REQUIRE(t->kind == SKind::App);
  REQUIRE(t->fn->kind == SKind::App);
  CHECK(t->fn->fn->name == "f");
  CHECK(t->fn->arg->name == "x");
  CHECK(t->arg->name == "y");
}

TEST_CASE("operators parse as named application") {
  SP t = parse("a + b");
  REQUIRE(t->kind == SKind::App);
  REQUIRE(t->fn->kind == SKind::App);
  CHECK(t->fn->fn->name == "+");
}

TEST_CASE("arrow types nest to the right") {
  SP t = parse("a -> b -> c");
  REQUIRE(t->kind == SKind::Pi);
  CHECK(t->cod->kind == SKind::Pi);
  CHECK(t->cod->cod->kind == SKind::Var);
}

TEST_CASE("multiplicity annotations on binders") {
  SP t = parse("(1 x : a) -> b");
  REQUIRE(t->kind == SKind::Pi);
  CHECK(t->mult == Mult::One);
  CHECK(t->name == "x");
  CHECK(t->hasMult);
  SP e = parse("(0 x : a) -> b");
  CHECK(e->mult == Mult::Zero);
}

TEST_CASE("implicit binders use braces") {
  SP t = parse("{0 a : Type} -> a -> a");
  REQUIRE(t->kind == SKind::Pi);
  CHECK(t->plicity == Plicity::Implicit);
  CHECK(t->mult == Mult::Zero);
}

TEST_CASE("literals") {
  CHECK(parse("42")->kind == SKind::IntLit);
  CHECK(parse("42")->intVal == 42);
  CHECK(parse("\"hi\"")->kind == SKind::StrLit);
  CHECK(parse("'a'")->kind == SKind::CharLit);
  CHECK(parse("[1, 2]")->kind == SKind::ListLit);
  CHECK(parse("(1, 2)")->kind == SKind::PairLit);
  CHECK(parse("()")->kind == SKind::UnitLit);
}

TEST_CASE("lambda and hole") {
  SP t = parse("\\x => ?goal");
  REQUIRE(t->kind == SKind::Lam);
  CHECK(t->body->kind == SKind::Hole);
  CHECK(t->body->name == "goal");
}

TEST_CASE("do notation parses statements") {
  SP t = parse("do x <- f\n   pure x");
  REQUIRE(t->kind == SKind::Do);
  CHECK(t->stmts.size() == 2);
}

TEST_CASE("module declarations and imports") {
  Parser p(
      "import prelude\n"
      "\n"
      "f : Nat -> Nat\n"
      "f Z = Z\n"
      "f (S n) = n\n"
      "\n"
      "data T = A | B\n");
  SourceModule m = p.parseModule("m");
  CHECK(m.imports == std::vector<std::string>{"prelude"});
  REQUIRE(m.decls.size() == 4);
  CHECK(m.decls[0].kind == DeclKind::Sig);
  CHECK(m.decls[1].kind == DeclKind::Clause);
  CHECK(m.decls[2].kind == DeclKind::Clause);
  CHECK(m.decls[3].kind == DeclKind::Data);
  CHECK(m.decls[3].ctors.size() == 2);
}

TEST_CASE("comments are skipped") {
  Parser p(
      "-- a line comment\n"
      "f : Nat\n"
      "f = Z -- trailing\n");
  SourceModule m = p.parseModule("m");
  CHECK(m.decls.size() == 2);
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse("\\x =>");
    FAIL("expected a syntax error");
  } catch (SyntaxError& e) {
    CHECK(e.span.line >= 1);
  }
}

TEST_CASE("gadt data blocks parse") {
  Parser p(
      "data Vect : Nat -> Type -> Type where\n"
      "  Nil : Vect Z a\n"
      "  (::) : a -> Vect k a -> Vect (S k) a\n");
  SourceModule m = p.parseModule("m");
  REQUIRE(m.decls.size() == 1);
  CHECK(m.decls[0].ctors.size() == 2);
  CHECK(m.decls[0].ctors[1].name == "::");
}
