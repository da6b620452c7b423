#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <string>

#include "oracles.hpp"

// Drives the installed binary end to end through a shell.

namespace {

struct CmdResult {
  int status = -1;
  std::string out;
};

CmdResult sh(const std::string& cmd) {
  CmdResult r;
  FILE* p = popen(("QTT_NO_COLOR=1 " + cmd + " 2>&1").c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  r.status = pclose(p);
  return r;
}

std::string bin() { return QTT_BIN; }

}  // namespace

TEST_CASE("check reports per-declaration progress and a summary") {
  CmdResult r = sh(bin() + " check " + qtt::oracle::corpusPath("prelude.qtt"));
  CHECK(r.status == 0);
  CHECK(r.out.find("append OK") != std::string::npos);
  CHECK(r.out.find("44 declarations, 0 holes") != std::string::npos);
}

TEST_CASE("check fails with a located diagnostic on bad input") {
  CmdResult r = sh(bin() + " check " + qtt::oracle::corpusPath("reject/dup.qtt"));
  CHECK(r.status != 0);
  CHECK(r.out.find("dup.qtt:4:1: LinearityError: There are 2 uses of linear "
                   "name x") != std::string::npos);
}

TEST_CASE("run executes an entry point") {
  CmdResult r = sh(bin() + " run " + qtt::oracle::corpusPath("utils.qtt") +
                   " --entry main");
  CHECK(r.status == 0);
  CHECK(r.out.find("5") != std::string::npos);
}

TEST_CASE("run feeds stdin from a file") {
  std::string in = "/tmp/qtt_cli_stdin.txt";
  {
    FILE* f = fopen(in.c_str(), "w");
    REQUIRE(f);
    fputs("1234\nhello\n", f);
    fclose(f);
  }
  CmdResult r = sh(bin() + " run " + qtt::oracle::corpusPath("atm.qtt") +
                   " --entry atmEcho --stdin-file " + in);
  CHECK(r.status == 0);
  CHECK(r.out.find("hello") != std::string::npos);
  remove(in.c_str());
}

TEST_CASE("dump-erased prints the runtime form") {
  CmdResult r = sh(bin() + " dump-erased " +
                   qtt::oracle::corpusPath("prelude.qtt") + " append");
  CHECK(r.status == 0);
  CHECK(r.out.find("y2 :: append y3 x1") != std::string::npos);
}

TEST_CASE("repl answers :t and :holes and :exec") {
  CmdResult t = sh("printf ':t S Z\\n:q\\n' | " + bin() + " repl " +
                   qtt::oracle::corpusPath("prelude.qtt"));
  CHECK(t.status == 0);
  CHECK(t.out.find("1 : Nat") != std::string::npos);

  CmdResult h = sh("printf ':holes\\n:q\\n' | " + bin() + " repl " +
                   qtt::oracle::corpusPath("holes/id_explicit.qtt"));
  CHECK(h.status == 0);
  CHECK(h.out.find(" 0 a : Type") != std::string::npos);
  CHECK(h.out.find("id_explicit_rhs : a") != std::string::npos);

  CmdResult x = sh("printf ':exec main\\n:q\\n' | " + bin() + " repl " +
                   qtt::oracle::corpusPath("utils.qtt"));
  CHECK(x.status == 0);
  CHECK(x.out.find("5") != std::string::npos);
}
