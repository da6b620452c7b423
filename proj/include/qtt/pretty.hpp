#pragma once

#include <sstream>

#include "qtt/eval.hpp"

namespace qtt {

// Precedence: 0 arrow, 1 operator, 2 application, 3 atom.
class Pretty {
 public:
  World& w;
  explicit Pretty(World& world) : w(world) {}

  std::string show(const CP& t, std::vector<std::string> names = {}) {
    return go(t, names, 0);
  }

 private:
  static bool isOpName(const std::string& n) {
    return !n.empty() && !std::isalpha((unsigned char)n[0]) && n[0] != '_';
  }

  static std::string paren(bool b, const std::string& s) {
    return b ? "(" + s + ")" : s;
  }

  std::string binderName(const std::string& n, std::vector<std::string>& names) {
    std::string base = n.empty() ? "_x" : n;
    std::string out = base;
    while (true) {
      bool clash = false;
      for (auto& m : names)
        if (m == out) clash = true;
      if (!clash) break;
      out += "'";
    }
    return out;
  }

  // Z / S chains render as decimal literals.
  bool natChain(const CP& t, long& out) {
    long n = 0;
    const CTerm* cur = t.get();
    while (true) {
      if (cur->kind == CKind::Global) {
        const auto& d = w.globals[cur->gid];
        if (d.name == "Z" && d.kind == GlobalKind::DataCon) {
          out = n;
          return true;
        }
        return false;
      }
      if (cur->kind == CKind::App) {
        const CTerm* head = cur->fn.get();
        if (head->kind == CKind::Global && w.globals[head->gid].name == "S" &&
            w.globals[head->gid].kind == GlobalKind::DataCon) {
          ++n;
          cur = cur->arg.get();
          continue;
        }
        return false;
      }
      return false;
    }
  }

 public:
  static bool usesVar(const CP& t, int idx) {
    if (!t) return false;
    switch (t->kind) {
      case CKind::Var:
        return t->idx == idx;
      case CKind::Global:
      case CKind::Universe:
      case CKind::LitInt:
      case CKind::LitStr:
      case CKind::LitChar:
        return false;
      case CKind::Meta:
        for (auto& s : t->spine)
          if (usesVar(s, idx)) return true;
        return false;
      case CKind::Pi:
        return usesVar(t->dom, idx) || usesVar(t->defaultVal, idx) ||
               usesVar(t->cod, idx + 1);
      case CKind::Lam:
        return usesVar(t->body, idx + 1);
      case CKind::App:
        return usesVar(t->fn, idx) || usesVar(t->arg, idx);
      case CKind::Let:
        return usesVar(t->letVal, idx) || usesVar(t->body, idx + 1);
      case CKind::Case: {
        if (usesVar(t->scrut, idx)) return true;
        for (auto& a : t->alts)
          if (usesVar(a.body, idx + static_cast<int>(a.binders.size())))
            return true;
        return false;
      }
    }
    return false;
  }

  std::string escapeStr(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '\n') out += "\\n";
      else if (c == '\t') out += "\\t";
      else if (c == '"') out += "\\\"";
      else if (c == '\\') out += "\\\\";
      else out += c;
    }
    return out + "\"";
  }

  std::string go(const CP& t, std::vector<std::string>& names, int prec) {
    if (!t) return "_";
    switch (t->kind) {
      case CKind::Var: {
        int pos = static_cast<int>(names.size()) - 1 - t->idx;
        if (pos >= 0 && pos < static_cast<int>(names.size())) return names[pos];
        return "!" + std::to_string(t->idx);
      }
      case CKind::Global: {
        const std::string& n = w.globals[t->gid].name;
        long nat;
        if (natChain(t, nat)) return std::to_string(nat);
        return isOpName(n) ? "(" + n + ")" : n;
      }
      case CKind::Meta: {
        const std::string& n = w.metas.entries[t->meta].name;
        return n.empty() ? "?_" : "?" + n;
      }
      case CKind::Universe:
        return "Type";
      case CKind::LitInt:
        return std::to_string(t->intVal);
      case CKind::LitStr:
        return escapeStr(t->strVal);
      case CKind::LitChar:
        return "'" + t->strVal + "'";
      case CKind::Lam: {
        std::vector<std::string> bound;
        const CTerm* cur = t.get();
        size_t pushed = 0;
        std::string header = "\\";
        while (cur->kind == CKind::Lam) {
          std::string n = binderName(cur->name, names);
          if (pushed) header += ", ";
          header += n;
          names.push_back(n);
          ++pushed;
          cur = cur->body.get();
        }
        // re-run on the shared_ptr chain to keep ownership simple
        CP body = t;
        for (size_t i = 0; i < pushed; ++i) body = body->body;
        std::string s = header + " => " + go(body, names, 0);
        names.resize(names.size() - pushed);
        return paren(prec > 0, s);
      }
      case CKind::Pi: {
        long nat;
        (void)nat;
        bool dependent = usesVar(t->cod, 0);
        std::string dom = go(t->dom, names, 0);
        std::string s;
        std::string n = binderName(t->name, names);
        if (t->plicity == Plicity::Explicit && !dependent &&
            t->mult == Mult::Omega) {
          s = go(t->dom, names, 1);
          names.push_back("");
          s += " -> " + go(t->cod, names, 0);
          names.pop_back();
          return paren(prec > 0, s);
        }
        std::string open = "(", close = ")";
        if (t->plicity != Plicity::Explicit) {
          open = "{";
          close = "}";
        }
        std::string multStr = multShow(t->mult);
        if (!multStr.empty()) multStr += " ";
        std::string pre;
        if (t->plicity == Plicity::Auto) pre = "auto ";
        if (t->plicity == Plicity::DefaultImplicit)
          pre = "default " + go(t->defaultVal, names, 3) + " ";
        s = open + pre + multStr + n + " : " + dom + close;
        names.push_back(n);
        s += " -> " + go(t->cod, names, 0);
        names.pop_back();
        return paren(prec > 0, s);
      }
      case CKind::App: {
        long nat;
        if (natChain(t, nat)) return std::to_string(nat);
        // collect the visible spine
        std::vector<CP> args;
        CP head = t;
        while (head->kind == CKind::App) {
          if (!head->implicitApp) args.push_back(head->arg);
          head = head->fn;
        }
        std::reverse(args.begin(), args.end());
        if (args.empty()) return go(head, names, prec);
        if (head->kind == CKind::Global) {
          const std::string& n = w.globals[head->gid].name;
          if (isOpName(n) && args.size() == 2) {
            std::string s =
                go(args[0], names, 2) + " " + n + " " + go(args[1], names, 2);
            return paren(prec > 1, s);
          }
        }
        std::string s = go(head, names, 2);
        for (auto& a : args) s += " " + go(a, names, 3);
        return paren(prec > 2, s);
      }
      case CKind::Let: {
        std::string n = binderName(t->name, names);
        std::string s = "let " + n + " = " + go(t->letVal, names, 0);
        names.push_back(n);
        s += " in " + go(t->body, names, 0);
        names.pop_back();
        return paren(prec > 0, s);
      }
      case CKind::Case: {
        std::string s = "case " + go(t->scrut, names, 2) + " of ";
        bool first = true;
        for (auto& a : t->alts) {
          if (!first) s += "; ";
          first = false;
          std::string lhs = a.conGid >= 0 ? a.conName : "_";
          size_t pushed = 0;
          for (auto& b : a.binders) {
            std::string bn = binderName(b, names);
            lhs += " " + bn;
            names.push_back(bn);
            ++pushed;
          }
          s += lhs + " => " + go(a.body, names, 0);
          names.resize(names.size() - pushed);
        }
        return paren(prec > 0, s);
      }
    }
    return "?";
  }
};

inline std::string showTerm(World& w, const CP& t,
                            std::vector<std::string> names = {}) {
  return Pretty(w).show(t, std::move(names));
}

inline std::string showValue(World& w, const VP& v, int depth = 0,
                             std::vector<std::string> names = {}) {
  return Pretty(w).show(quote(w, depth, v), std::move(names));
}

}  // namespace qtt
