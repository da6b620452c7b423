#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"

using namespace qtt;

static const GlobalDef& lookupFn(World& w, const std::string& n) {
  const auto* ids = w.globals.lookup(n);
  REQUIRE(ids);
  for (int g : *ids)
    if (w.globals[g].kind == GlobalKind::Function && !w.globals[g].clauses.empty())
      return w.globals[g];
  return w.globals[(*ids)[0]];
}

TEST_CASE("compiled trees test constructors and bind fields") {
  Driver d;
  REQUIRE(d.loadFile(oracle::corpusPath("prelude.qtt")));
  const GlobalDef& app = lookupFn(d.w, "append");
  REQUIRE(app.tree);
  // append scrutinises its first visible vector argument
  CHECK(app.tree->kind == CaseTree::Test);
  CHECK(app.tree->arms.size() == 2);
}

TEST_CASE("literal patterns compile to a literal test with fallback") {
  Driver d;
  REQUIRE(d.loadFile(oracle::corpusPath("prelude.qtt")));
  const GlobalDef& fi = lookupFn(d.w, "fromInteger");
  REQUIRE(fi.tree);
  CHECK(fi.tree->kind == CaseTree::LitTest);
  CHECK(fi.tree->litArms.size() == 2);
  CHECK(static_cast<bool>(fi.tree->fallback));
}

TEST_CASE("unreachable clauses and missing cases are reported") {
  namespace fs = std::filesystem;
  fs::path tmp = fs::temp_directory_path() / "casetree_warn.qtt";
  {
    std::ofstream out(tmp);
    out << "data B = T | F\n"
           "\n"
           "flip : B -> B\n"
           "flip T = F\n"
           "flip F = T\n"
           "flip T = T\n"
           "\n"
           "partialFlip : B -> B\n"
           "partialFlip T = F\n";
  }
  Driver d;
  REQUIRE(d.loadFile(tmp.string()));
  CHECK(d.ok());
  bool sawUnreachable = false, sawMissing = false;
  for (const std::string& l : d.lines) {
    if (l.find("flip: clause 3 is unreachable") != std::string::npos)
      sawUnreachable = true;
    if (l.find("partialFlip: missing cases") != std::string::npos)
      sawMissing = true;
  }
  CHECK(sawUnreachable);
  CHECK(sawMissing);
  fs::remove(tmp);
}

TEST_CASE("tree evaluation agrees with first-matching-clause evaluation") {
  Driver d;
  REQUIRE(d.loadFile(oracle::corpusPath("rle.qtt")));
  REQUIRE(d.ok());
  for (const char* n : {"not", "+", "++", "append", "fromInteger", "rep"}) {
    const auto* ids = d.w.globals.lookup(n);
    REQUIRE(ids);
    for (int g : *ids) {
      const GlobalDef& def = d.w.globals[g];
      if (def.kind != GlobalKind::Function || def.clauses.empty()) continue;
      CAPTURE(def.name);
      std::string why;
      if (!oracle::caseTreeOracle(d.w, def, 3, why)) {
        CAPTURE(why);
        CHECK(false);
      } else {
        CHECK(true);
      }
    }
  }
}

TEST_CASE("ground generation inverts indexed types") {
  Driver d;
  REQUIRE(d.loadFile(oracle::corpusPath("prelude.qtt")));
  oracle::GroundGen gen(d.w);
  // Vect (S (S Z)) Bool has exactly four inhabitants at depth 4
  auto [tm, ty] = d.elabInput(Parser("Vect (S (S Z)) Bool").parseSingleTerm());
  auto vs = gen.values(eval(d.w, nullptr, tm), 4);
  CHECK(vs.size() == 4);
  // and none at an impossible index depth
  auto [tz, tyz] = d.elabInput(Parser("Vect Z Bool").parseSingleTerm());
  auto zs = gen.values(eval(d.w, nullptr, tz), 4);
  REQUIRE(zs.size() == 1);
  CHECK(d.w.globals[zs[0]->gid].name == "Nil");
}
