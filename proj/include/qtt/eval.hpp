#pragma once

#include <cassert>
#include <stdexcept>

#include "qtt/core.hpp"

namespace qtt {

// ---- semantic values ----

struct Env {
  VP v;
  std::shared_ptr<Env> next;
};
using EnvP = std::shared_ptr<Env>;

inline EnvP envCons(VP v, EnvP next) {
  auto e = std::make_shared<Env>();
  e->v = std::move(v);
  e->next = std::move(next);
  return e;
}

inline const VP& envLookup(const EnvP& e, int idx) {
  const Env* p = e.get();
  for (int i = 0; i < idx; ++i) {
    assert(p);
    p = p->next.get();
  }
  assert(p);
  return p->v;
}

inline int envLen(const EnvP& e) {
  int n = 0;
  for (const Env* p = e.get(); p; p = p->next.get()) ++n;
  return n;
}

struct Closure {
  EnvP env;
  CP body;
};

enum class VKind : uint8_t {
  VVar,    // neutral: bound variable (de Bruijn level)
  VMeta,   // neutral: metavariable
  VGlobal, // neutral: hole, primitive, or stuck/unsaturated function
  VCon,    // data or type constructor applied to arguments
  VUniverse,
  VPi,
  VLam,
  VLitInt,
  VLitStr,
  VLitChar,
  VStuckCase,
};

struct VArg {
  VP v;
  Mult mult = Mult::Omega;
  bool implicit = false;
};

struct Value {
  VKind kind;

  int lvl = -1;  // VVar
  int meta = -1;
  int gid = -1;  // VGlobal / VCon
  std::vector<VArg> spine;

  // VPi / VLam
  Mult mult = Mult::Omega;
  Plicity plicity = Plicity::Explicit;
  std::string name;
  VP dom;
  Closure clo;         // Pi codomain / Lam body
  Closure defaultClo;  // default-implicit Pi

  long intVal = 0;
  std::string strVal;

  // VStuckCase
  VP scrut;
  EnvP env;
  CP caseTerm;
};

inline VP mkV(VKind k) {
  auto v = std::make_shared<Value>();
  v->kind = k;
  return v;
}

inline VP vVar(int lvl) {
  auto v = mkV(VKind::VVar);
  v->lvl = lvl;
  return v;
}

inline VP vUniverse() { return mkV(VKind::VUniverse); }

inline VP vLitInt(long n) {
  auto v = mkV(VKind::VLitInt);
  v->intVal = n;
  return v;
}
inline VP vLitStr(std::string s) {
  auto v = mkV(VKind::VLitStr);
  v->strVal = std::move(s);
  return v;
}
inline VP vLitChar(std::string s) {
  auto v = mkV(VKind::VLitChar);
  v->strVal = std::move(s);
  return v;
}

// ---- evaluation ----

VP eval(World& w, const EnvP& env, const CP& t);
VP vApp(World& w, VP f, VArg a);
// `patMap` maps unsolved pattern-variable metas to context levels; when
// given, those metas quote as bound variables.
CP quote(World& w, int depth, const VP& v,
         const std::map<int, int>* patMap = nullptr);
bool conv(World& w, int depth, VP a, VP b);

inline VP applyClosure(World& w, const Closure& c, VP v) {
  return eval(w, envCons(std::move(v), c.env), c.body);
}

inline VP tryUnfoldGlobal(World& w, VP v);
inline VP evalCase(World& w, const EnvP& env, const CP& t, VP scrutV);

// Resolve solved metavariables at the head of a value, and retry reductions
// that were stuck on a metavariable that has since been solved.
inline VP force(World& w, VP v) {
  while (true) {
    if (v->kind == VKind::VMeta && w.metas.solved(v->meta)) {
      VP sol = eval(w, nullptr, w.metas.entries[v->meta].solution);
      for (auto& a : v->spine) sol = vApp(w, std::move(sol), a);
      v = std::move(sol);
      continue;
    }
    if (v->kind == VKind::VGlobal && !v->spine.empty()) {
      VP u = tryUnfoldGlobal(w, v);
      if (u.get() != v.get()) {
        v = std::move(u);
        continue;
      }
    }
    if (v->kind == VKind::VStuckCase) {
      VP s = force(w, v->scrut);
      if (s->kind == VKind::VCon || s->kind == VKind::VLitInt ||
          s->kind == VKind::VLitStr || s->kind == VKind::VLitChar) {
        VP u = evalCase(w, v->env, v->caseTerm, s);
        if (u->kind != VKind::VStuckCase) {
          for (auto& a : v->spine) u = vApp(w, std::move(u), a);
          v = std::move(u);
          continue;
        }
      }
    }
    break;
  }
  return v;
}

inline int conGidByName(World& w, const std::string& n) {
  const auto* ids = w.globals.lookup(n);
  if (!ids || ids->size() != 1)
    throw std::runtime_error("missing builtin constructor " + n);
  return (*ids)[0];
}

inline VP vCon0(World& w, const std::string& name) {
  auto v = mkV(VKind::VCon);
  v->gid = conGidByName(w, name);
  return v;
}

// Pure primitives computed during evaluation.
inline VP primCompute(World& w, const std::string& name,
                      const std::vector<VArg>& args) {
  auto fi = [&](int i) { return force(w, args[i].v); };
  if (name == "prim__addInt") {
    VP a = fi(0), b = fi(1);
    if (a->kind == VKind::VLitInt && b->kind == VKind::VLitInt)
      return vLitInt(a->intVal + b->intVal);
    return nullptr;
  }
  if (name == "prim__subInt") {
    VP a = fi(0), b = fi(1);
    if (a->kind == VKind::VLitInt && b->kind == VKind::VLitInt)
      return vLitInt(a->intVal - b->intVal);
    return nullptr;
  }
  if (name == "prim__mulInt") {
    VP a = fi(0), b = fi(1);
    if (a->kind == VKind::VLitInt && b->kind == VKind::VLitInt)
      return vLitInt(a->intVal * b->intVal);
    return nullptr;
  }
  if (name == "prim__eqInt") {
    VP a = fi(0), b = fi(1);
    if (a->kind == VKind::VLitInt && b->kind == VKind::VLitInt)
      return vCon0(w, a->intVal == b->intVal ? "True" : "False");
    return nullptr;
  }
  if (name == "prim__eqChar") {
    VP a = fi(0), b = fi(1);
    if (a->kind == VKind::VLitChar && b->kind == VKind::VLitChar)
      return vCon0(w, a->strVal == b->strVal ? "True" : "False");
    return nullptr;
  }
  if (name == "prim__strConcat") {
    VP a = fi(0), b = fi(1);
    if (a->kind == VKind::VLitStr && b->kind == VKind::VLitStr)
      return vLitStr(a->strVal + b->strVal);
    return nullptr;
  }
  if (name == "prim__strReverse") {
    VP a = fi(0);
    if (a->kind == VKind::VLitStr)
      return vLitStr(std::string(a->strVal.rbegin(), a->strVal.rend()));
    return nullptr;
  }
  if (name == "prim__showInt") {
    VP a = fi(0);
    if (a->kind == VKind::VLitInt) return vLitStr(std::to_string(a->intVal));
    return nullptr;
  }
  return nullptr;
}

inline EnvP envFromLevels(const std::vector<VP>& levels) {
  EnvP e = nullptr;
  for (auto& v : levels) e = envCons(v, e);
  return e;
}

// Case tree evaluation; nullopt when the tree is stuck on a neutral value.
inline std::optional<VP> runCaseTree(World& w, const TreeP& tree,
                                     std::vector<VP> env) {
  const CaseTree* t = tree.get();
  while (true) {
    switch (t->kind) {
      case CaseTree::Leaf:
        return eval(w, envFromLevels(env), t->term);
      case CaseTree::Unmatched:
        return std::nullopt;
      case CaseTree::Test: {
        VP v = force(w, env[t->scrutVar]);
        if (v->kind != VKind::VCon) return std::nullopt;
        const CaseTree::Arm* hit = nullptr;
        for (auto& arm : t->arms)
          if (arm.conGid == v->gid) {
            hit = &arm;
            break;
          }
        if (!hit) {
          if (!t->fallback) return std::nullopt;
          t = t->fallback.get();
          continue;
        }
        if (static_cast<int>(v->spine.size()) != hit->nBinds)
          return std::nullopt;  // unsaturated constructor
        for (auto& a : v->spine) env.push_back(a.v);
        t = hit->sub.get();
        continue;
      }
      case CaseTree::LitTest: {
        VP v = force(w, env[t->scrutVar]);
        if (v->kind != VKind::VLitInt && v->kind != VKind::VLitStr &&
            v->kind != VKind::VLitChar)
          return std::nullopt;
        const CaseTree::LitArm* hit = nullptr;
        for (auto& arm : t->litArms) {
          bool match = false;
          if (v->kind == VKind::VLitInt && arm.litKind == CKind::LitInt)
            match = arm.intVal == v->intVal;
          else if (v->kind != VKind::VLitInt && arm.litKind != CKind::LitInt)
            match = arm.strVal == v->strVal;
          if (match) {
            hit = &arm;
            break;
          }
        }
        if (hit) {
          t = hit->sub.get();
          continue;
        }
        if (!t->fallback) return std::nullopt;
        t = t->fallback.get();
        continue;
      }
    }
  }
}

inline VP tryUnfoldGlobal(World& w, VP v) {
  const GlobalDef& def = w.globals[v->gid];
  if (def.kind == GlobalKind::Function) {
    if (static_cast<int>(v->spine.size()) < def.arity || !def.tree) return v;
    std::vector<VP> env;
    env.reserve(def.arity);
    for (int i = 0; i < def.arity; ++i) env.push_back(v->spine[i].v);
    auto res = runCaseTree(w, def.tree, std::move(env));
    if (!res) return v;
    VP out = *res;
    for (size_t i = def.arity; i < v->spine.size(); ++i)
      out = vApp(w, std::move(out), v->spine[i]);
    return out;
  }
  if (def.kind == GlobalKind::PrimFn && !def.primEffectful) {
    if (static_cast<int>(v->spine.size()) < def.primArity) return v;
    std::vector<VArg> head(v->spine.begin(), v->spine.begin() + def.primArity);
    VP out = primCompute(w, def.name, head);
    if (!out) return v;
    for (size_t i = def.primArity; i < v->spine.size(); ++i)
      out = vApp(w, std::move(out), v->spine[i]);
    return out;
  }
  return v;
}

inline VP vApp(World& w, VP f, VArg a) {
  f = force(w, std::move(f));
  switch (f->kind) {
    case VKind::VLam:
      return applyClosure(w, f->clo, a.v);
    case VKind::VCon: {
      auto v = mkV(VKind::VCon);
      v->gid = f->gid;
      v->spine = f->spine;
      v->spine.push_back(std::move(a));
      return v;
    }
    case VKind::VGlobal: {
      auto v = mkV(VKind::VGlobal);
      v->gid = f->gid;
      v->spine = f->spine;
      v->spine.push_back(std::move(a));
      return tryUnfoldGlobal(w, v);
    }
    case VKind::VVar:
    case VKind::VMeta:
    case VKind::VStuckCase: {
      auto v = std::make_shared<Value>(*f);
      v->spine.push_back(std::move(a));
      return v;
    }
    default:
      throw std::runtime_error("vApp: applying a non-function value");
  }
}

inline VP evalCase(World& w, const EnvP& env, const CP& t, VP scrutV) {
  scrutV = force(w, std::move(scrutV));
  if (scrutV->kind == VKind::VCon) {
    const GlobalDef& con = w.globals[scrutV->gid];
    const CCaseAlt* wild = nullptr;
    for (auto& alt : t->alts) {
      if (alt.conGid == -1) {
        wild = &alt;
        continue;
      }
      if (alt.conGid == scrutV->gid) {
        // bind the explicit fields, left to right
        EnvP e = env;
        size_t bound = 0;
        for (size_t i = 0; i < scrutV->spine.size(); ++i) {
          if (i < con.fieldPlicity.size() &&
              con.fieldPlicity[i] != Plicity::Explicit)
            continue;
          e = envCons(scrutV->spine[i].v, e);
          ++bound;
        }
        if (bound != alt.binders.size())
          throw std::runtime_error("case: field arity mismatch");
        return eval(w, e, alt.body);
      }
    }
    if (wild) return eval(w, env, wild->body);
    throw std::runtime_error("case: no matching alternative");
  }
  auto v = mkV(VKind::VStuckCase);
  v->scrut = std::move(scrutV);
  v->env = env;
  v->caseTerm = t;
  return v;
}

inline VP eval(World& w, const EnvP& env, const CP& t) {
  switch (t->kind) {
    case CKind::Var:
      return envLookup(env, t->idx);
    case CKind::Global: {
      const GlobalDef& def = w.globals[t->gid];
      if (def.kind == GlobalKind::DataCon || def.kind == GlobalKind::TyCon) {
        auto v = mkV(VKind::VCon);
        v->gid = t->gid;
        return v;
      }
      auto v = mkV(VKind::VGlobal);
      v->gid = t->gid;
      return tryUnfoldGlobal(w, v);
    }
    case CKind::Meta: {
      if (w.metas.solved(t->meta)) {
        VP sol = eval(w, nullptr, w.metas.entries[t->meta].solution);
        for (auto& s : t->spine)
          sol = vApp(w, std::move(sol), VArg{eval(w, env, s)});
        return sol;
      }
      auto v = mkV(VKind::VMeta);
      v->meta = t->meta;
      for (auto& s : t->spine) v->spine.push_back(VArg{eval(w, env, s)});
      return v;
    }
    case CKind::Universe:
      return vUniverse();
    case CKind::Pi: {
      auto v = mkV(VKind::VPi);
      v->mult = t->mult;
      v->plicity = t->plicity;
      v->name = t->name;
      v->dom = eval(w, env, t->dom);
      v->clo = Closure{env, t->cod};
      if (t->defaultVal) v->defaultClo = Closure{env, t->defaultVal};
      return v;
    }
    case CKind::Lam: {
      auto v = mkV(VKind::VLam);
      v->mult = t->mult;
      v->name = t->name;
      v->clo = Closure{env, t->body};
      return v;
    }
    case CKind::App:
      return vApp(w, eval(w, env, t->fn),
                  VArg{eval(w, env, t->arg), t->mult, t->implicitApp});
    case CKind::Let:
      return eval(w, envCons(eval(w, env, t->letVal), env), t->body);
    case CKind::Case:
      return evalCase(w, env, t, eval(w, env, t->scrut));
    case CKind::LitInt:
      return vLitInt(t->intVal);
    case CKind::LitStr:
      return vLitStr(t->strVal);
    case CKind::LitChar:
      return vLitChar(t->strVal);
  }
  throw std::runtime_error("eval: unreachable");
}

// ---- quotation ----

inline CP quoteNeutralHead(World& w, const VP& v) {
  switch (v->kind) {
    case VKind::VVar:
      return nullptr;  // handled by caller (needs depth)
    default:
      return nullptr;
  }
}

inline CP quote(World& w, int depth, const VP& v0,
                const std::map<int, int>* patMap) {
  VP v = force(w, v0);
  auto quoteSpine = [&](CP head, const std::vector<VArg>& spine) {
    for (auto& a : spine)
      head = cApp(std::move(head), quote(w, depth, a.v, patMap), a.mult,
                  a.implicit);
    return head;
  };
  switch (v->kind) {
    case VKind::VVar:
      return quoteSpine(cVar(depth - 1 - v->lvl), v->spine);
    case VKind::VMeta: {
      if (patMap) {
        auto it = patMap->find(v->meta);
        if (it != patMap->end())
          return quoteSpine(cVar(depth - 1 - it->second), v->spine);
      }
      auto m = mkC(CKind::Meta);
      m->meta = v->meta;
      for (auto& a : v->spine) m->spine.push_back(quote(w, depth, a.v, patMap));
      return m;
    }
    case VKind::VGlobal:
      return quoteSpine(cGlobal(v->gid), v->spine);
    case VKind::VCon:
      return quoteSpine(cGlobal(v->gid), v->spine);
    case VKind::VUniverse:
      return mkC(CKind::Universe);
    case VKind::VPi: {
      auto t = mkC(CKind::Pi);
      t->mult = v->mult;
      t->plicity = v->plicity;
      t->name = v->name;
      t->dom = quote(w, depth, v->dom, patMap);
      t->cod = quote(w, depth + 1, applyClosure(w, v->clo, vVar(depth)), patMap);
      if (v->defaultClo.body)
        t->defaultVal = quote(w, depth, eval(w, v->defaultClo.env, v->defaultClo.body), patMap);
      return t;
    }
    case VKind::VLam: {
      auto t = mkC(CKind::Lam);
      t->mult = v->mult;
      t->name = v->name;
      t->body = quote(w, depth + 1, applyClosure(w, v->clo, vVar(depth)), patMap);
      return t;
    }
    case VKind::VLitInt: {
      auto t = mkC(CKind::LitInt);
      t->intVal = v->intVal;
      return t;
    }
    case VKind::VLitStr: {
      auto t = mkC(CKind::LitStr);
      t->strVal = v->strVal;
      return t;
    }
    case VKind::VLitChar: {
      auto t = mkC(CKind::LitChar);
      t->strVal = v->strVal;
      return t;
    }
    case VKind::VStuckCase: {
      const CP& src = v->caseTerm;
      auto t = mkC(CKind::Case);
      t->scrut = quote(w, depth, v->scrut, patMap);
      t->scrutMult = src->scrutMult;
      t->motiveName = src->motiveName;
      if (src->motive) {
        VP mv = eval(w, envCons(vVar(depth), v->env), src->motive);
        t->motive = quote(w, depth + 1, mv, patMap);
      }
      for (auto& alt : src->alts) {
        CCaseAlt out;
        out.conGid = alt.conGid;
        out.conName = alt.conName;
        out.binders = alt.binders;
        EnvP e = v->env;
        int d = depth;
        for (size_t i = 0; i < alt.binders.size(); ++i) e = envCons(vVar(d++), e);
        out.body = quote(w, d, eval(w, e, alt.body), patMap);
        t->alts.push_back(std::move(out));
      }
      return quoteSpine(t, v->spine);
    }
  }
  throw std::runtime_error("quote: unreachable");
}

// ---- conversion ----

inline bool convSpine(World& w, int depth, const std::vector<VArg>& a,
                      const std::vector<VArg>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!conv(w, depth, a[i].v, b[i].v)) return false;
  return true;
}

inline bool conv(World& w, int depth, VP a, VP b) {
  a = force(w, std::move(a));
  b = force(w, std::move(b));
  if (a.get() == b.get()) return true;
  // eta for functions
  if (a->kind == VKind::VLam || b->kind == VKind::VLam) {
    VP x = vVar(depth);
    return conv(w, depth + 1, vApp(w, a, VArg{x}), vApp(w, b, VArg{x}));
  }
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case VKind::VVar:
      return a->lvl == b->lvl && convSpine(w, depth, a->spine, b->spine);
    case VKind::VMeta:
      return a->meta == b->meta && convSpine(w, depth, a->spine, b->spine);
    case VKind::VGlobal:
      return a->gid == b->gid && convSpine(w, depth, a->spine, b->spine);
    case VKind::VCon:
      return a->gid == b->gid && convSpine(w, depth, a->spine, b->spine);
    case VKind::VUniverse:
      return true;
    case VKind::VPi: {
      // multiplicity and plicitness are part of the type
      if (a->mult != b->mult || a->plicity != b->plicity) return false;
      if (!conv(w, depth, a->dom, b->dom)) return false;
      VP x = vVar(depth);
      return conv(w, depth + 1, applyClosure(w, a->clo, x),
                  applyClosure(w, b->clo, x));
    }
    case VKind::VLitInt:
      return a->intVal == b->intVal;
    case VKind::VLitStr:
    case VKind::VLitChar:
      return a->strVal == b->strVal;
    case VKind::VStuckCase:
      return termEq(quote(w, depth, a), quote(w, depth, b));
    default:
      return false;
  }
}

inline bool convertible(World& w, int depth, const VP& a, const VP& b) {
  return conv(w, depth, a, b);
}

// whnf helper used by the elaborator
inline VP whnf(World& w, const EnvP& env, const CP& t) { return eval(w, env, t); }

}  // namespace qtt
