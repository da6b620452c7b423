#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qtt/multiplicity.hpp"
#include "qtt/surface.hpp"

namespace qtt {

struct CTerm;
using CP = std::shared_ptr<CTerm>;

enum class CKind : uint8_t {
  Var,       // de Bruijn index
  Global,    // resolved reference into the global table
  Meta,      // metavariable applied to a spine of bound variables
  Universe,  // Type (type-in-type)
  Pi,
  Lam,
  App,
  Case,
  Let,
  LitInt,
  LitStr,
  LitChar,
};

struct CCaseAlt {
  int conGid = -1;  // -1 for a wildcard alternative
  std::string conName;
  std::vector<std::string> binders;  // explicit fields only
  CP body;                           // under `binders`
};

struct CTerm {
  CKind kind;

  int idx = 0;  // Var
  int gid = 0;  // Global
  int meta = 0;
  std::vector<CP> spine;  // Meta spine (all Vars)

  // Pi / Lam / Let binders
  Mult mult = Mult::Omega;
  Plicity plicity = Plicity::Explicit;
  std::string name;
  CP dom, cod;      // Pi
  CP defaultVal;    // Pi, DefaultImplicit only; scoped like `dom`
  CP body;          // Lam / Let
  CP letVal, annot; // Let

  // App
  CP fn, arg;
  bool implicitApp = false;

  // Case
  CP scrut;
  Mult scrutMult = Mult::Omega;
  std::string motiveName;
  CP motive;  // under one binder; may be null when non-dependent
  std::vector<CCaseAlt> alts;

  long intVal = 0;
  std::string strVal;
};

inline CP mkC(CKind k) {
  auto t = std::make_shared<CTerm>();
  t->kind = k;
  return t;
}

inline CP cVar(int idx) {
  auto t = mkC(CKind::Var);
  t->idx = idx;
  return t;
}

inline CP cGlobal(int gid) {
  auto t = mkC(CKind::Global);
  t->gid = gid;
  return t;
}

inline CP cApp(CP f, CP a, Mult m, bool implicit = false) {
  auto t = mkC(CKind::App);
  t->fn = std::move(f);
  t->arg = std::move(a);
  t->mult = m;
  t->implicitApp = implicit;
  return t;
}

// ---- patterns & case trees ----

struct Pat {
  enum Kind { PVar, PCon, PForced, PLitInt, PLitStr, PLitChar } kind;
  int varIdx = -1;  // PVar: index into the clause context
  int conGid = -1;  // PCon
  std::vector<Pat> args;
  CP forced;  // PForced: the forcing term, over the clause context
  long intVal = 0;
  std::string strVal;
};

struct Clause {
  std::vector<Pat> pats;  // one per consumed Pi of the signature
  CP rhs;                 // over the clause context
  int ctxSize = 0;
  std::vector<std::string> ctxNames;
};

struct CaseTree;
using TreeP = std::shared_ptr<CaseTree>;

struct CaseTree {
  enum Kind { Leaf, Test, LitTest, Unmatched } kind = Unmatched;

  CP term;  // Leaf: scoped over the tree environment at this node

  int scrutVar = -1;  // Test / LitTest: level within the tree environment
  struct Arm {
    int conGid;
    int nBinds;  // full constructor arity (implicits included)
    std::vector<std::string> names;
    TreeP sub;
  };
  std::vector<Arm> arms;

  struct LitArm {
    long intVal = 0;
    std::string strVal;
    CKind litKind = CKind::LitInt;
    TreeP sub;
  };
  std::vector<LitArm> litArms;
  TreeP fallback;  // LitTest default; also Test catch-all
};

// ---- globals ----

struct Value;
using VP = std::shared_ptr<Value>;

enum class GlobalKind : uint8_t { Function, DataCon, TyCon, PrimTy, PrimFn, Hole };

struct GlobalDef {
  std::string name;
  GlobalKind kind;
  CP type;  // closed

  // Function
  int arity = 0;  // number of leading Pis matched by the clauses
  TreeP tree;
  std::vector<Clause> clauses;

  // DataCon
  int ownerTyCon = -1;
  int conTag = 0;
  std::vector<Mult> fieldMults;       // every telescope position
  std::vector<Plicity> fieldPlicity;  // parallel to fieldMults

  // TyCon
  int tyConArity = 0;
  std::vector<int> dataCons;

  // PrimFn
  int primArity = 0;
  bool primEffectful = false;  // performed by the process machine, not eval

  // runtime (erased) artifacts
  int rtArity = -1;              // non-Zero Pis of the signature
  std::vector<bool> argKept;     // per signature Pi, mult != Zero
  TreeP rtTree;                  // erased case tree over retained args
  std::vector<bool> rtFieldKept; // DataCon: retained fields
};

struct Globals {
  std::vector<GlobalDef> defs;
  std::map<std::string, std::vector<int>> byName;

  int add(GlobalDef d) {
    int gid = static_cast<int>(defs.size());
    byName[d.name].push_back(gid);
    defs.push_back(std::move(d));
    return gid;
  }
  const std::vector<int>* lookup(const std::string& n) const {
    auto it = byName.find(n);
    return it == byName.end() ? nullptr : &it->second;
  }
  // Remove definitions added after a snapshot (overload-trial rollback).
  void truncate(size_t n) {
    while (defs.size() > n) {
      auto& v = byName[defs.back().name];
      v.pop_back();
      if (v.empty()) byName.erase(defs.back().name);
      defs.pop_back();
    }
  }
  GlobalDef& operator[](int gid) { return defs[gid]; }
  const GlobalDef& operator[](int gid) const { return defs[gid]; }
};

// ---- metavariables ----

struct MetaEntry {
  std::string name;      // display name (pattern variables carry the source name)
  CP solution;           // closed modulo other metas; null while unsolved
  bool isPatVar = false;
  bool patVisible = false;     // pattern variable named in the source clause
  Mult patMult = Mult::Omega;  // declared multiplicity when used as a pattern variable
  VP patType;                  // type of a pattern variable (over patvar metas)
  bool flexible = true;        // pattern variables that unification may force
  CP defaultVal;               // pending default-implicit fallback (closed)
};

struct MetaStore {
  std::vector<MetaEntry> entries;
  int fresh(const std::string& name) {
    entries.push_back(MetaEntry{name, nullptr});
    return static_cast<int>(entries.size()) - 1;
  }
  bool solved(int m) const { return entries[m].solution != nullptr; }
};

// ---- holes ----

struct HoleCtxEntry {
  std::string name;
  Mult declared;
  Mult remaining;
  CP type;  // scoped over the preceding entries
};

struct HoleInfo {
  std::string name;
  std::vector<HoleCtxEntry> entries;
  CP goal;  // scoped over all entries
  int gid = -1;
};

// The shared mutable world: global definitions, metas, reported holes.
struct World {
  Globals globals;
  MetaStore metas;
  std::vector<HoleInfo> holes;
};

// ---- term utilities ----

// Shift free variables at or above `cutoff` by `by`.
inline CP shiftTerm(const CP& t, int by, int cutoff = 0) {
  if (!t || by == 0) return t;
  switch (t->kind) {
    case CKind::Var:
      if (t->idx < cutoff) return t;
      return cVar(t->idx + by);
    case CKind::Global:
    case CKind::Universe:
    case CKind::LitInt:
    case CKind::LitStr:
    case CKind::LitChar:
      return t;
    case CKind::Meta: {
      auto r = std::make_shared<CTerm>(*t);
      for (auto& s : r->spine) s = shiftTerm(s, by, cutoff);
      return r;
    }
    case CKind::Pi: {
      auto r = std::make_shared<CTerm>(*t);
      r->dom = shiftTerm(t->dom, by, cutoff);
      r->defaultVal = shiftTerm(t->defaultVal, by, cutoff);
      r->cod = shiftTerm(t->cod, by, cutoff + 1);
      return r;
    }
    case CKind::Lam: {
      auto r = std::make_shared<CTerm>(*t);
      r->body = shiftTerm(t->body, by, cutoff + 1);
      return r;
    }
    case CKind::App: {
      auto r = std::make_shared<CTerm>(*t);
      r->fn = shiftTerm(t->fn, by, cutoff);
      r->arg = shiftTerm(t->arg, by, cutoff);
      return r;
    }
    case CKind::Let: {
      auto r = std::make_shared<CTerm>(*t);
      r->letVal = shiftTerm(t->letVal, by, cutoff);
      r->annot = shiftTerm(t->annot, by, cutoff);
      r->body = shiftTerm(t->body, by, cutoff + 1);
      return r;
    }
    case CKind::Case: {
      auto r = std::make_shared<CTerm>(*t);
      r->scrut = shiftTerm(t->scrut, by, cutoff);
      if (r->motive) r->motive = shiftTerm(t->motive, by, cutoff + 1);
      for (auto& a : r->alts)
        a.body = shiftTerm(a.body, by, cutoff + static_cast<int>(a.binders.size()));
      return r;
    }
  }
  return t;
}

// Substitute `args` for the outermost `n` lambda binders of a solution
// body. `args[i]` replaces the i-th lambda variable.
inline CP substArgs(const CP& t, const std::vector<CP>& args, int local = 0) {
  if (!t) return t;
  int n = static_cast<int>(args.size());
  switch (t->kind) {
    case CKind::Var: {
      if (t->idx < local) return t;
      int j = t->idx - local;
      if (j < n) return shiftTerm(args[n - 1 - j], local);
      return cVar(t->idx - n);
    }
    case CKind::Global:
    case CKind::Universe:
    case CKind::LitInt:
    case CKind::LitStr:
    case CKind::LitChar:
      return t;
    case CKind::Meta: {
      auto r = std::make_shared<CTerm>(*t);
      for (auto& s : r->spine) s = substArgs(s, args, local);
      return r;
    }
    case CKind::Pi: {
      auto r = std::make_shared<CTerm>(*t);
      r->dom = substArgs(t->dom, args, local);
      r->defaultVal = substArgs(t->defaultVal, args, local);
      r->cod = substArgs(t->cod, args, local + 1);
      return r;
    }
    case CKind::Lam: {
      auto r = std::make_shared<CTerm>(*t);
      r->body = substArgs(t->body, args, local + 1);
      return r;
    }
    case CKind::App: {
      auto r = std::make_shared<CTerm>(*t);
      r->fn = substArgs(t->fn, args, local);
      r->arg = substArgs(t->arg, args, local);
      return r;
    }
    case CKind::Let: {
      auto r = std::make_shared<CTerm>(*t);
      r->letVal = substArgs(t->letVal, args, local);
      r->annot = substArgs(t->annot, args, local);
      r->body = substArgs(t->body, args, local + 1);
      return r;
    }
    case CKind::Case: {
      auto r = std::make_shared<CTerm>(*t);
      r->scrut = substArgs(t->scrut, args, local);
      if (r->motive) r->motive = substArgs(t->motive, args, local + 1);
      for (auto& a : r->alts)
        a.body = substArgs(a.body, args, local + static_cast<int>(a.binders.size()));
      return r;
    }
  }
  return t;
}

// Replace solved metavariables by their (beta-reduced) solutions.
inline CP zonk(const MetaStore& ms, const CP& t) {
  if (!t) return t;
  switch (t->kind) {
    case CKind::Var:
    case CKind::Global:
    case CKind::Universe:
    case CKind::LitInt:
    case CKind::LitStr:
    case CKind::LitChar:
      return t;
    case CKind::Meta: {
      std::vector<CP> args;
      for (auto& s : t->spine) args.push_back(zonk(ms, s));
      if (!ms.solved(t->meta)) {
        auto r = std::make_shared<CTerm>(*t);
        r->spine = args;
        return r;
      }
      CP body = ms.entries[t->meta].solution;
      // peel exactly |spine| lambdas
      for (size_t i = 0; i < args.size(); ++i) body = body->body;
      return zonk(ms, substArgs(body, args));
    }
    case CKind::Pi: {
      auto r = std::make_shared<CTerm>(*t);
      r->dom = zonk(ms, t->dom);
      r->defaultVal = zonk(ms, t->defaultVal);
      r->cod = zonk(ms, t->cod);
      return r;
    }
    case CKind::Lam: {
      auto r = std::make_shared<CTerm>(*t);
      r->body = zonk(ms, t->body);
      return r;
    }
    case CKind::App: {
      auto r = std::make_shared<CTerm>(*t);
      r->fn = zonk(ms, t->fn);
      r->arg = zonk(ms, t->arg);
      return r;
    }
    case CKind::Let: {
      auto r = std::make_shared<CTerm>(*t);
      r->letVal = zonk(ms, t->letVal);
      r->annot = zonk(ms, t->annot);
      r->body = zonk(ms, t->body);
      return r;
    }
    case CKind::Case: {
      auto r = std::make_shared<CTerm>(*t);
      r->scrut = zonk(ms, t->scrut);
      r->motive = zonk(ms, t->motive);
      for (auto& a : r->alts) a.body = zonk(ms, a.body);
      return r;
    }
  }
  return t;
}

// ---- scope checking ----

inline bool wellScoped(const CP& t, int depth) {
  if (!t) return true;
  switch (t->kind) {
    case CKind::Var:
      return t->idx >= 0 && t->idx < depth;
    case CKind::Global:
    case CKind::Universe:
    case CKind::LitInt:
    case CKind::LitStr:
    case CKind::LitChar:
      return true;
    case CKind::Meta:
      for (auto& s : t->spine)
        if (!wellScoped(s, depth)) return false;
      return true;
    case CKind::Pi:
      return wellScoped(t->dom, depth) && wellScoped(t->cod, depth + 1) &&
             (!t->defaultVal || wellScoped(t->defaultVal, depth));
    case CKind::Lam:
      return wellScoped(t->body, depth + 1);
    case CKind::App:
      return wellScoped(t->fn, depth) && wellScoped(t->arg, depth);
    case CKind::Let:
      return wellScoped(t->letVal, depth) && wellScoped(t->annot, depth) &&
             wellScoped(t->body, depth + 1);
    case CKind::Case: {
      if (!wellScoped(t->scrut, depth)) return false;
      if (t->motive && !wellScoped(t->motive, depth + 1)) return false;
      for (auto& a : t->alts)
        if (!wellScoped(a.body, depth + static_cast<int>(a.binders.size())))
          return false;
      return true;
    }
  }
  return false;
}

// Alpha-equality on nameless terms (display names ignored).
inline bool termEq(const CP& a, const CP& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case CKind::Var: return a->idx == b->idx;
    case CKind::Global: return a->gid == b->gid;
    case CKind::Universe: return true;
    case CKind::LitInt: return a->intVal == b->intVal;
    case CKind::LitStr:
    case CKind::LitChar: return a->strVal == b->strVal;
    case CKind::Meta: {
      if (a->meta != b->meta || a->spine.size() != b->spine.size()) return false;
      for (size_t i = 0; i < a->spine.size(); ++i)
        if (!termEq(a->spine[i], b->spine[i])) return false;
      return true;
    }
    case CKind::Pi:
      return a->mult == b->mult && a->plicity == b->plicity &&
             termEq(a->dom, b->dom) && termEq(a->cod, b->cod);
    case CKind::Lam: return termEq(a->body, b->body);
    case CKind::App:
      return termEq(a->fn, b->fn) && termEq(a->arg, b->arg);
    case CKind::Let:
      return termEq(a->letVal, b->letVal) && termEq(a->body, b->body);
    case CKind::Case: {
      if (!termEq(a->scrut, b->scrut)) return false;
      if (a->alts.size() != b->alts.size()) return false;
      for (size_t i = 0; i < a->alts.size(); ++i) {
        if (a->alts[i].conGid != b->alts[i].conGid) return false;
        if (!termEq(a->alts[i].body, b->alts[i].body)) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace qtt
