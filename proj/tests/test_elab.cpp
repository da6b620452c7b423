#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

using namespace qtt;

static Driver loadCorpus(const std::string& rel) {
  Driver d;
  d.loadFile(oracle::corpusPath(rel));
  return d;
}

TEST_CASE("the whole corpus elaborates without errors or holes") {
  struct Row {
    const char* file;
    int decls;
  };
  const Row rows[] = {
      {"prelude.qtt", 44}, {"printf.qtt", 50}, {"rle.qtt", 49},
      {"sessions.qtt", 61}, {"utils.qtt", 66},  {"atm.qtt", 61},
  };
  for (const Row& r : rows) {
    CAPTURE(r.file);
    Driver d = loadCorpus(r.file);
    for (auto& e : d.errors) CAPTURE(e);
    CHECK(d.ok());
    CHECK(d.declCount == r.decls);
    CHECK(d.w.holes.empty());
  }
}

TEST_CASE("reject fixtures fail with the expected diagnostic") {
  const char* files[] = {"dup", "uncompress_cheat", "send_before_recv",
                         "server_no_close", "atm_no_eject"};
  for (const char* f : files) {
    CAPTURE(f);
    Driver d = loadCorpus("reject/" + std::string(f) + ".qtt");
    REQUIRE_FALSE(d.ok());
    std::string expected =
        oracle::readFile(oracle::corpusPath("reject/" + std::string(f) + ".expected"));
    std::istringstream is(expected);
    std::string kind;
    std::getline(is, kind);
    std::string detail, line;
    while (std::getline(is, line)) detail += (detail.empty() ? "" : "\n") + line;
    CAPTURE(d.errors[0]);
    CHECK(d.errors[0].find(": " + kind + ": ") != std::string::npos);
    if (!detail.empty())
      CHECK(d.errors[0].find(detail) != std::string::npos);
  }
}

TEST_CASE("hole reports show context entries with remaining multiplicities") {
  Driver d = loadCorpus("holes/id_explicit.qtt");
  CHECK(d.ok());
  REQUIRE(d.w.holes.size() == 1);
  std::string rep = d.holesReport();
  // the erased type binder, then the still-unused linear binder, in order
  size_t pa = rep.find(" 0 a : Type\n");
  size_t px = rep.find(" 1 x : a\n");
  REQUIRE(pa != std::string::npos);
  REQUIRE(px != std::string::npos);
  CHECK(pa < px);
  CHECK(rep.find("id_explicit_rhs : a") != std::string::npos);
}

TEST_CASE("hole reports account for uses before the hole") {
  Driver d = loadCorpus("holes/dup_partial.qtt");
  CHECK(d.ok());
  REQUIRE(d.w.holes.size() == 1);
  std::string rep = d.holesReport();
  // x was declared linear and already used once, so none remains
  CHECK(rep.find(" 0 x : a\n") != std::string::npos);
  CHECK(rep.find(" 1 x : a\n") == std::string::npos);
  CHECK(rep.find("second_x : a") != std::string::npos);
}

TEST_CASE("multi-hole and session-typed skeletons report goals") {
  Driver p = loadCorpus("holes/printf_skel.qtt");
  CHECK(p.ok());
  CHECK(p.w.holes.size() == 4);
  CHECK(p.holesReport().find("printfFmt_rhs_1 : Int -> PrintfType f") !=
        std::string::npos);

  Driver s = loadCorpus("holes/server_skel.qtt");
  CHECK(s.ok());
  REQUIRE(s.w.holes.size() == 1);
  std::string rep = s.holesReport();
  // the channel binder is still linear and its protocol type is unfolded
  CHECK(rep.find(" 1 chan : Channel (Recv Command") != std::string::npos);
  CHECK(rep.find("utilServer_rhs : L Unit") != std::string::npos);
}

TEST_CASE("dependent result types compute from value arguments") {
  Driver d = loadCorpus("printf.qtt");
  REQUIRE(d.ok());
  std::string got = d.typeOfLine("printf (Num (Lit \" \" (Str End)))") + "\n";
  CHECK(got == oracle::readFile(oracle::goldenPath("printf_type.txt")));
}

TEST_CASE("overloaded names resolve by argument type") {
  Driver d = loadCorpus("prelude.qtt");
  REQUIRE(d.ok());
  CHECK(d.typeOfLine("S Z + Z").find(" : Nat") != std::string::npos);
  CHECK(d.typeOfLine("1 + 2").find(" : Int") != std::string::npos);
  CHECK(d.typeOfLine("\"a\" ++ \"b\"").find(" : String") != std::string::npos);
  CHECK(d.typeOfLine("Nil ++ (Z :: Nil)").find(" : List Nat") !=
        std::string::npos);
  try {
    d.typeOfLine("True + Z");
    FAIL("expected an overload failure");
  } catch (ElabError& e) {
    CHECK(std::string(e.what()).find("no overload of '+' applies") !=
          std::string::npos);
  }
}

TEST_CASE("implicit arguments are solved from later explicit ones") {
  Driver d = loadCorpus("prelude.qtt");
  REQUIRE(d.ok());
  // length's {n} is recovered from the vector's index
  CHECK(d.typeOfLine("length (Z :: S Z :: Nil)").find(" : Nat") !=
        std::string::npos);
  auto [tm, ty] = d.elabInput(Parser("length (Z :: S Z :: Nil)").parseSingleTerm());
  CHECK(showValue(d.w, eval(d.w, nullptr, tm)) == "2");
}

TEST_CASE("every corpus function obeys its declared usage discipline") {
  for (const char* f : {"printf.qtt", "rle.qtt", "utils.qtt", "atm.qtt"}) {
    CAPTURE(f);
    Driver d = loadCorpus(f);
    REQUIRE(d.ok());
    for (const GlobalDef& def : d.w.globals.defs) {
      std::string why;
      if (!oracle::usageOracle(d.w, def, why)) {
        CAPTURE(why);
        CHECK(false);
      }
    }
  }
}
