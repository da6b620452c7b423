#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qtt/casetree.hpp"
#include "qtt/elab.hpp"
#include "qtt/parser.hpp"
#include "qtt/runtime.hpp"

namespace qtt {

inline std::string formatError(const std::string& file, Span sp,
                               const std::string& kind,
                               const std::string& msg) {
  std::ostringstream os;
  os << file << ":" << sp.line << ":" << sp.col << ": " << kind << ": " << msg;
  return os.str();
}

// Loads modules, sequences declarations through the elaborator, compiles
// clause groups to case trees and erases them.
class Driver {
 public:
  World w;
  std::vector<std::string> lines;   // per-declaration progress
  std::vector<std::string> errors;  // formatted diagnostics
  int declCount = 0;

  Driver() {
    for (const char* n : {"Int", "String", "Char", "%World", "RawChan", "Ref"}) {
      GlobalDef d;
      d.name = n;
      d.kind = GlobalKind::PrimTy;
      d.type = mkC(CKind::Universe);
      w.globals.add(std::move(d));
    }
  }

  bool ok() const { return errors.empty(); }

  std::string summary() const {
    std::ostringstream os;
    os << declCount << " declarations, " << w.holes.size() << " holes";
    return os.str();
  }

  bool loadFile(const std::string& path) {
    namespace fs = std::filesystem;
    fs::path p(path);
    std::ifstream in(p);
    if (!in) {
      errors.push_back("cannot open file: " + path);
      return false;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string modName = p.stem().string();
    if (loaded_.count(modName)) return true;
    loaded_.insert(modName);
    SourceModule mod;
    try {
      Parser parser(buf.str());
      mod = parser.parseModule(modName);
    } catch (SyntaxError& e) {
      errors.push_back(formatError(path, e.span, "SyntaxError", e.what()));
      return false;
    }
    fs::path dir = p.parent_path();
    for (const std::string& imp : mod.imports) {
      fs::path cand = dir / (imp + ".qtt");
      if (!fs::exists(cand)) cand = dir / ".." / (imp + ".qtt");
      if (!loadFile(cand.string())) return false;
    }
    return processModule(path, mod);
  }

  // Elaborate a standalone term in the empty context. Metas minted for the
  // input are dropped afterwards so repeated inputs don't grow the table;
  // the returned term and type are zonked first. Inputs that introduce
  // holes keep their metas: hole goals may still mention them.
  std::pair<CP, VP> elabInput(const SP& term) {
    size_t metasBefore = w.metas.entries.size();
    size_t holesBefore = w.holes.size();
    Elab el(w, "<repl>");
    auto [tm, tyv] = el.elabTerm(term);
    CP tyT = zonk(w.metas, quote(w, 0, tyv));
    if (w.holes.size() == holesBefore && w.metas.entries.size() > metasBefore)
      w.metas.entries.resize(metasBefore);
    return {tm, eval(w, nullptr, tyT)};
  }

  std::string typeOfLine(const std::string& src) {
    Parser p(src);
    SP raw = p.parseSingleTerm();
    auto [tm, ty] = elabInput(raw);
    return showTerm(w, tm) + " : " + showValue(w, ty);
  }

  static std::string holeLine(const std::string& mult, const std::string& name,
                              const std::string& ty) {
    return " " + mult + " " + name + " : " + ty;
  }

  std::string holeReport(const HoleInfo& h) {
    std::ostringstream os;
    std::vector<std::string> names;
    for (const auto& e : h.entries) {
      os << " " << multShow(e.remaining) << " " << e.name << " : "
         << showTerm(w, e.type, names) << "\n";
      names.push_back(e.name);
    }
    os << "------------------------------\n";
    os << h.name << " : " << showTerm(w, h.goal, names) << "\n";
    return os.str();
  }

  std::string holesReport() {
    if (w.holes.empty()) return "no holes\n";
    std::ostringstream os;
    bool first = true;
    for (const auto& h : w.holes) {
      if (!first) os << "\n";
      first = false;
      os << holeReport(h);
    }
    return os.str();
  }

  RunResult exec(const std::string& entry, const std::string& stdinText = "") {
    return runMain(w, entry, stdinText);
  }

  // Render the erased form of a function: "\x, y => <body>".
  std::string dumpErased(const std::string& name) {
    const auto* ids = w.globals.lookup(name);
    if (!ids || ids->empty())
      throw std::runtime_error("unknown name '" + name + "'");
    int gid = -1;
    for (int g : *ids)
      if (w.globals[g].kind == GlobalKind::Function) gid = g;
    if (gid < 0)
      throw std::runtime_error("'" + name + "' is not a function");
    const GlobalDef& def = w.globals[gid];
    if (!def.rtTree)
      throw std::runtime_error("'" + name + "' has no runtime definition");
    std::vector<std::string> names;
    {
      const CTerm* cur = def.type.get();
      for (int i = 0; i < def.arity && cur->kind == CKind::Pi; ++i) {
        if (def.argKept[i])
          names.push_back(cur->name == "_" || cur->name.empty()
                              ? "x" + std::to_string(names.size())
                              : cur->name);
        cur = cur->cod.get();
      }
    }
    std::ostringstream os;
    if (!names.empty()) {
      os << "\\";
      for (size_t i = 0; i < names.size(); ++i)
        os << (i ? ", " : "") << names[i];
      os << " => ";
    }
    renderTree(os, def.rtTree, names, 0);
    os << "\n";
    return os.str();
  }

 private:
  std::set<std::string> loaded_;

  void renderTree(std::ostringstream& os, const TreeP& t,
                  std::vector<std::string>& names, int indent) {
    auto pad = [&](int n) { return std::string(2 * n, ' '); };
    switch (t->kind) {
      case CaseTree::Leaf:
        os << showTerm(w, t->term, names);
        return;
      case CaseTree::Unmatched:
        os << "<unmatched>";
        return;
      case CaseTree::Test: {
        os << "case " << names[t->scrutVar] << " of\n";
        for (const auto& arm : t->arms) {
          os << pad(indent + 1) << w.globals[arm.conGid].name;
          size_t base = names.size();
          for (int i = 0; i < arm.nBinds; ++i) {
            std::string n = i < static_cast<int>(arm.names.size()) &&
                                    !arm.names[i].empty() && arm.names[i] != "_"
                                ? arm.names[i]
                                : "y" + std::to_string(base + i);
            os << " " << n;
            names.push_back(n);
          }
          os << " => ";
          renderTree(os, arm.sub, names, indent + 1);
          os << "\n";
          names.resize(base);
        }
        if (t->fallback) {
          os << pad(indent + 1) << "_ => ";
          renderTree(os, t->fallback, names, indent + 1);
          os << "\n";
        }
        os << pad(indent);
        return;
      }
      case CaseTree::LitTest: {
        os << "case " << names[t->scrutVar] << " of\n";
        for (const auto& arm : t->litArms) {
          os << pad(indent + 1);
          if (arm.litKind == CKind::LitInt)
            os << arm.intVal;
          else if (arm.litKind == CKind::LitStr)
            os << "\"" << arm.strVal << "\"";
          else
            os << "'" << arm.strVal << "'";
          os << " => ";
          renderTree(os, arm.sub, names, indent + 1);
          os << "\n";
        }
        if (t->fallback) {
          os << pad(indent + 1) << "_ => ";
          renderTree(os, t->fallback, names, indent + 1);
          os << "\n";
        }
        os << pad(indent);
        return;
      }
    }
  }

  bool processModule(const std::string& path, const SourceModule& mod) {
    Elab el(w, path);
    // clause group being accumulated for the current function
    int curGid = -1;
    std::vector<Clause> curClauses;
    auto finalize = [&]() -> bool {
      if (curGid < 0) return true;
      GlobalDef& def = w.globals[curGid];
      int arity = static_cast<int>(curClauses.front().pats.size());
      for (const auto& c : curClauses)
        if (static_cast<int>(c.pats.size()) != arity) {
          errors.push_back(formatError(
              path, Span{0, 0}, "SyntaxError",
              "clauses of '" + def.name + "' take different numbers of arguments"));
          return false;
        }
      def.arity = arity;
      def.clauses = curClauses;
      CompiledTree ct = compileClauses(w, def.name, curClauses, arity);
      def.tree = ct.tree;
      for (auto& warn : ct.warnings) lines.push_back("warning: " + warn);
      eraseDef(w, curGid);
      lines.push_back(def.name + " OK");
      ++declCount;
      curGid = -1;
      curClauses.clear();
      return true;
    };
    try {
      for (const SDecl& d : mod.decls) {
        if (d.kind == DeclKind::Clause) {
          std::string head = clauseHead(d.lhs);
          if (curGid >= 0 && w.globals[curGid].name != head) {
            if (!finalize()) return false;
          }
          if (curGid < 0) {
            const auto* ids = w.globals.lookup(head);
            int gid = -1;
            if (ids)
              for (int g : *ids)
                if (w.globals[g].kind == GlobalKind::Function &&
                    !w.globals[g].tree && w.globals[g].clauses.empty())
                  gid = g;
            if (gid < 0)
              throw ElabError(d.span, "UnknownName",
                              "no signature for '" + head + "'");
            curGid = gid;
          }
          curClauses.push_back(el.elabClause(curGid, d.lhs, d.rhs, d.span));
          continue;
        }
        if (!finalize()) return false;
        switch (d.kind) {
          case DeclKind::Sig:
            el.processSig(d);
            break;
          case DeclKind::Prim: {
            int gid = el.processPrim(d);
            eraseDef(w, gid);
            lines.push_back(d.name + " OK");
            ++declCount;
            break;
          }
          case DeclKind::Data: {
            el.processData(d);
            const auto* ids = w.globals.lookup(d.name);
            int tyGid = ids->back();
            for (int cg : w.globals[tyGid].dataCons) eraseDef(w, cg);
            lines.push_back(d.name + " OK");
            ++declCount;
            break;
          }
          default:
            break;
        }
      }
      if (!finalize()) return false;
    } catch (ElabError& e) {
      errors.push_back(formatError(path, e.span, e.errKind, e.what()));
      return false;
    } catch (DesugarError& e) {
      errors.push_back(formatError(path, e.span, "SyntaxError", e.what()));
      return false;
    } catch (SyntaxError& e) {
      errors.push_back(formatError(path, e.span, "SyntaxError", e.what()));
      return false;
    }
    for (auto& warn : el.warnings) lines.push_back("warning: " + warn);
    return true;
  }

  static std::string clauseHead(const SP& lhs) {
    const STerm* t = lhs.get();
    while (t->kind == SKind::App) t = t->fn.get();
    if (t->kind != SKind::Var)
      throw SyntaxError(t->span, "clause head is not a name");
    return t->name;
  }
};

}  // namespace qtt
