#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

using namespace qtt;

// One shared driver: loading the prelude once keeps the suite fast.
static Driver& prelude() {
  static Driver d = [] {
    Driver dd;
    REQUIRE(dd.loadFile(oracle::corpusPath("prelude.qtt")));
    REQUIRE(dd.ok());
    return dd;
  }();
  return d;
}

static std::string evalLine(const std::string& src) {
  Driver& d = prelude();
  Parser p(src);
  auto [tm, ty] = d.elabInput(p.parseSingleTerm());
  return showValue(d.w, eval(d.w, nullptr, tm));
}

TEST_CASE("definitions unfold during evaluation") {
  // Z/S chains print as decimal literals
  CHECK(evalLine("S Z + S (S Z)") == "3");
  CHECK(evalLine("append (S Z :: Nil) (Z :: Nil)") == "1 :: (0 :: Nil)");
  CHECK(evalLine("length (Z :: Z :: Nil)") == "2");
}

TEST_CASE("primitive arithmetic computes on literals") {
  CHECK(evalLine("1 + 2") == "3");
  CHECK(evalLine("prim__mulInt 6 7") == "42");
  CHECK(evalLine("prim__eqInt 1 2") == "False");
  CHECK(evalLine("\"ab\" ++ \"cd\"") == "\"abcd\"");
}

TEST_CASE("beta reduction and closures") {
  CHECK(evalLine("(\\x => S x) Z") == "1");
  CHECK(evalLine("(\\x => \\y => x + y) (S Z) (S Z)") == "2");
}

TEST_CASE("conversion includes eta for functions") {
  Driver& d = prelude();
  Parser p1("\\x => S x");
  Parser p2("S");
  auto [t1, ty1] = d.elabInput(p1.parseSingleTerm());
  auto [t2, ty2] = d.elabInput(p2.parseSingleTerm());
  CHECK(conv(d.w, 0, eval(d.w, nullptr, t1), eval(d.w, nullptr, t2)));
}

TEST_CASE("quote after eval reaches a normal form") {
  Driver& d = prelude();
  Parser p("(\\x => x) (S ((\\y => y) Z))");
  auto [tm, ty] = d.elabInput(p.parseSingleTerm());
  CP nf = quote(d.w, 0, eval(d.w, nullptr, tm));
  CHECK(showTerm(d.w, nf) == "1");
}

TEST_CASE("case evaluation sticks on neutrals and resumes on constructors") {
  Driver& d = prelude();
  World& w = d.w;
  // `not x` for a free variable x stays a stuck case, and application of
  // the same function to a constructor computes
  CHECK(evalLine("not True") == "False");
  CHECK(evalLine("not (not False)") == "False");
  // a stuck scrutinee revives once the blocking meta is solved
  int m = w.metas.fresh("scrut");
  auto mv = mkV(VKind::VMeta);
  mv->meta = m;
  const auto* notIds = w.globals.lookup("not");
  REQUIRE(notIds);
  auto g = mkV(VKind::VGlobal);
  g->gid = (*notIds)[0];
  VP stuck = vApp(w, g, VArg{mv});
  CHECK(force(w, stuck)->kind == VKind::VGlobal);  // still stuck
  Parser pt("True");
  auto [tt, tty] = d.elabInput(pt.parseSingleTerm());
  REQUIRE(trySolveMeta(w, 0, m, {}, eval(w, nullptr, tt), Span{0, 0}));
  CHECK(showValue(w, force(w, stuck)) == "False");
}

TEST_CASE("pattern unification solves Miller spines") {
  Driver& d = prelude();
  World& w = d.w;
  // ?m x  =  S x   solves  ?m := \x => S x
  int m = w.metas.fresh("m");
  VP x = vVar(0);
  auto mv = mkV(VKind::VMeta);
  mv->meta = m;
  mv->spine.push_back(VArg{x});
  const auto* sIds = w.globals.lookup("S");
  auto sx = mkV(VKind::VCon);
  sx->gid = (*sIds)[0];
  sx->spine.push_back(VArg{x});
  unify(w, 1, mv, sx, Span{0, 0});
  REQUIRE(w.metas.solved(m));
  VP sol = eval(w, nullptr, w.metas.entries[m].solution);
  VP applied = vApp(w, sol, VArg{vVar(0)});
  CHECK(conv(w, 1, applied, sx));
}

TEST_CASE("duplicated spine variables take the innermost occurrence") {
  Driver& d = prelude();
  World& w = d.w;
  // ?m x x = x  must solve to \a, b => b
  int m = w.metas.fresh("dup");
  VP x = vVar(0);
  auto mv = mkV(VKind::VMeta);
  mv->meta = m;
  mv->spine.push_back(VArg{x});
  mv->spine.push_back(VArg{x});
  unify(w, 1, mv, x, Span{0, 0});
  REQUIRE(w.metas.solved(m));
  VP sol = eval(w, nullptr, w.metas.entries[m].solution);
  VP r = vApp(w, vApp(w, sol, VArg{vVar(5)}), VArg{vVar(6)});
  CHECK(force(w, r)->lvl == 6);
}

TEST_CASE("escaping spine arguments of an inner meta are pruned") {
  Driver& d = prelude();
  World& w = d.w;
  // ?m x  =  ?n x y :  y escapes ?m's scope, so ?n is pruned to ?n' x
  int m = w.metas.fresh("outer");
  int n = w.metas.fresh("inner");
  VP x = vVar(0), y = vVar(1);
  auto mv = mkV(VKind::VMeta);
  mv->meta = m;
  mv->spine.push_back(VArg{x});
  auto nv = mkV(VKind::VMeta);
  nv->meta = n;
  nv->spine.push_back(VArg{x});
  nv->spine.push_back(VArg{y});
  unify(w, 2, mv, nv, Span{0, 0});
  CHECK(w.metas.solved(m));
  CHECK(w.metas.solved(n));
}

TEST_CASE("occurs check rejects circular solutions") {
  Driver& d = prelude();
  World& w = d.w;
  int m = w.metas.fresh("circ");
  VP x = vVar(0);
  auto mv = mkV(VKind::VMeta);
  mv->meta = m;
  mv->spine.push_back(VArg{x});
  const auto* sIds = w.globals.lookup("S");
  auto rhs = mkV(VKind::VCon);
  rhs->gid = (*sIds)[0];
  rhs->spine.push_back(VArg{mv});
  CHECK_THROWS_AS(unify(w, 1, mv, rhs, Span{0, 0}), ElabError);
}

TEST_CASE("rigid mismatches fail to unify") {
  Driver& d = prelude();
  World& w = d.w;
  Parser p1("True");
  Parser p2("False");
  auto [t1, ty1] = d.elabInput(p1.parseSingleTerm());
  auto [t2, ty2] = d.elabInput(p2.parseSingleTerm());
  CHECK_THROWS_AS(
      unify(w, 0, eval(w, nullptr, t1), eval(w, nullptr, t2), Span{0, 0}),
      ElabError);
}
