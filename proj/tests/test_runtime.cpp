#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qtt/runtime.hpp"

using namespace qtt;

TEST_CASE("the session client/server pipeline computes over channels") {
  Driver d;
  REQUIRE(d.loadFile(oracle::corpusPath("utils.qtt")));
  REQUIRE(d.ok());

  RunResult r = d.exec("main");
  CHECK(r.exitOk);
  CHECK(r.stdoutText == oracle::readFile(oracle::goldenPath("utils_main.txt")));
  CHECK(r.liveChannels == 0);
  CHECK(r.blockedProcs == 0);

  RunResult rv = d.exec("mainRev");
  CHECK(rv.exitOk);
  CHECK(rv.stdoutText == oracle::readFile(oracle::goldenPath("utils_mainrev.txt")));
  CHECK(rv.liveChannels == 0);
  CHECK(rv.blockedProcs == 0);
}

TEST_CASE("scheduling is deterministic across repeated runs") {
  Driver d;
  REQUIRE(d.loadFile(oracle::corpusPath("utils.qtt")));
  REQUIRE(d.ok());
  std::string first = d.exec("main").stdoutText;
  for (int i = 0; i < 5; ++i) CHECK(d.exec("main").stdoutText == first);
}

TEST_CASE("the ATM walks its protocol and honours the PIN check") {
  Driver d;
  REQUIRE(d.loadFile(oracle::corpusPath("atm.qtt")));
  REQUIRE(d.ok());

  RunResult ok = d.exec("runATM");
  CHECK(ok.exitOk);
  CHECK(ok.stdoutText == oracle::readFile(oracle::goldenPath("atm_transcript.txt")));

  RunResult bad = d.exec("runATMWrong");
  CHECK(bad.exitOk);
  CHECK(bad.stdoutText == oracle::readFile(oracle::goldenPath("atm_wrong_pin.txt")));
  CHECK(bad.stdoutText.find("Dispensing cash") == std::string::npos);
}

TEST_CASE("stdin lines feed getLine in order") {
  Driver d;
  REQUIRE(d.loadFile(oracle::corpusPath("atm.qtt")));
  REQUIRE(d.ok());
  RunResult r = d.exec("atmEcho", "1234\nhello world\n");
  CHECK(r.exitOk);
  CHECK(r.stdoutText == "Please insert your card\nhello world\n");
  // exhausted stdin yields empty lines rather than an error
  RunResult empty = d.exec("atmEcho", "");
  CHECK(empty.exitOk);
  CHECK(empty.stdoutText == "Please insert your card\n\n");
}

TEST_CASE("running an unknown entry reports an error") {
  Driver d;
  REQUIRE(d.loadFile(oracle::corpusPath("utils.qtt")));
  RunResult r = d.exec("nonexistent");
  CHECK_FALSE(r.exitOk);
  CHECK_FALSE(r.error.empty());
}

TEST_CASE("world tokens are single use") {
  Driver d;
  REQUIRE(d.loadFile(oracle::corpusPath("prelude.qtt")));
  Machine m(d.w, "");
  Proc p;
  p.id = 0;
  p.gen = 3;
  m.procs.push_back(p);
  m.cur = &m.procs.front();
  auto tok = mkR(RKind::RWorld);
  tok->pid = 0;
  tok->gen = 3;
  RV fresh = m.useWorld(tok);
  CHECK(fresh->gen == 4);
  // replaying the consumed token must be caught by the generation counter
  CHECK_THROWS_AS(m.useWorld(tok), StaleWorld);
  // a token minted for another process is rejected too
  auto foreign = mkR(RKind::RWorld);
  foreign->pid = 7;
  foreign->gen = 4;
  CHECK_THROWS_AS(m.useWorld(foreign), StaleWorld);
}
