#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "qtt/driver.hpp"

namespace {

bool useColor() {
  const char* v = std::getenv("QTT_NO_COLOR");
  return v == nullptr || std::string(v).empty();
}

std::string red(const std::string& s) {
  return useColor() ? "\033[31m" + s + "\033[0m" : s;
}

void printDiagnostics(const qtt::Driver& drv) {
  for (const auto& l : drv.lines) std::cout << l << "\n";
  for (const auto& e : drv.errors) std::cerr << red(e) << "\n";
}

int cmdCheck(const std::string& file) {
  qtt::Driver drv;
  drv.loadFile(file);
  printDiagnostics(drv);
  if (!drv.ok()) return 1;
  std::cout << drv.summary() << "\n";
  return 0;
}

int cmdRun(const std::string& file, const std::string& entry,
           const std::string& stdinFile) {
  qtt::Driver drv;
  drv.loadFile(file);
  if (!drv.ok()) {
    printDiagnostics(drv);
    return 1;
  }
  std::string input;
  if (!stdinFile.empty()) {
    std::ifstream in(stdinFile);
    if (!in) {
      std::cerr << red("cannot open stdin file: " + stdinFile) << "\n";
      return 1;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    input = buf.str();
  }
  qtt::RunResult res = drv.exec(entry, input);
  std::cout << res.stdoutText;
  if (!res.error.empty()) std::cerr << red(res.error) << "\n";
  return res.exitOk ? 0 : 1;
}

int cmdDumpErased(const std::string& file, const std::string& name) {
  qtt::Driver drv;
  drv.loadFile(file);
  if (!drv.ok()) {
    printDiagnostics(drv);
    return 1;
  }
  try {
    std::cout << drv.dumpErased(name);
  } catch (std::exception& e) {
    std::cerr << red(e.what()) << "\n";
    return 1;
  }
  return 0;
}

int cmdRepl(const std::string& file) {
  auto drv = std::make_unique<qtt::Driver>();
  if (!file.empty()) {
    drv->loadFile(file);
    printDiagnostics(*drv);
    if (drv->ok()) std::cout << drv->summary() << "\n";
  }
  std::string line;
  while (true) {
    std::cout << "qtt> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      qtt::ReplCommand cmd = qtt::parseReplInput(line);
      switch (cmd.kind) {
        case qtt::ReplCommand::Quit:
          return 0;
        case qtt::ReplCommand::Holes:
          std::cout << drv->holesReport();
          break;
        case qtt::ReplCommand::Load: {
          auto fresh = std::make_unique<qtt::Driver>();
          fresh->loadFile(cmd.arg);
          printDiagnostics(*fresh);
          if (fresh->ok()) {
            std::cout << fresh->summary() << "\n";
            drv = std::move(fresh);  // atomic replace on success only
          }
          break;
        }
        case qtt::ReplCommand::Exec: {
          qtt::RunResult res = drv->exec(cmd.arg);
          std::cout << res.stdoutText;
          if (!res.error.empty()) std::cout << red(res.error) << "\n";
          break;
        }
        case qtt::ReplCommand::TypeOf: {
          auto [tm, ty] = drv->elabInput(cmd.term);
          std::cout << qtt::showTerm(drv->w, tm) << " : "
                    << qtt::showValue(drv->w, ty) << "\n";
          break;
        }
        case qtt::ReplCommand::Eval: {
          auto [tm, ty] = drv->elabInput(cmd.term);
          qtt::VP v = qtt::eval(drv->w, nullptr, tm);
          std::cout << qtt::showValue(drv->w, v) << " : "
                    << qtt::showValue(drv->w, ty) << "\n";
          break;
        }
      }
    } catch (qtt::ElabError& e) {
      std::cout << red(std::string(e.errKind) + ": " + e.what()) << "\n";
    } catch (std::exception& e) {
      std::cout << red(e.what()) << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qtt: a small quantitative dependently typed language"};
  app.require_subcommand(1);

  std::string file, entry, stdinFile, name;

  auto* check = app.add_subcommand("check", "Typecheck a file");
  check->add_option("file", file)->required();

  auto* run = app.add_subcommand("run", "Run an entry point");
  run->add_option("file", file)->required();
  run->add_option("--entry", entry)->required();
  run->add_option("--stdin-file", stdinFile);

  auto* repl = app.add_subcommand("repl", "Interactive session");
  repl->add_option("file", file);

  auto* dump = app.add_subcommand("dump-erased", "Print a function's runtime form");
  dump->add_option("file", file)->required();
  dump->add_option("name", name)->required();

  CLI11_PARSE(app, argc, argv);

  if (check->parsed()) return cmdCheck(file);
  if (run->parsed()) return cmdRun(file, entry, stdinFile);
  if (dump->parsed()) return cmdDumpErased(file, name);
  return cmdRepl(file);
}
