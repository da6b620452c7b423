#pragma once

#include "qtt/eval.hpp"

namespace qtt {

struct ErasureLeak : std::runtime_error {
  explicit ErasureLeak(const std::string& msg) : std::runtime_error(msg) {}
};

// Erase multiplicity-0 binders, arguments and constructor fields from a
// term. `kept` records, innermost last, whether each enclosing binder
// survives erasure; variable indices are renumbered over the kept entries.
class Eraser {
 public:
  World& w;
  explicit Eraser(World& world) : w(world) {}

  CP term(const CP& t, std::vector<bool>& kept) {
    switch (t->kind) {
      case CKind::Var: {
        int pos = static_cast<int>(kept.size()) - 1 - t->idx;
        if (pos < 0 || pos >= static_cast<int>(kept.size()))
          throw ErasureLeak("variable index out of scope during erasure");
        if (!kept[pos])
          throw ErasureLeak("erased variable used in a runtime position");
        int newIdx = 0;
        for (int p = pos + 1; p < static_cast<int>(kept.size()); ++p)
          if (kept[p]) ++newIdx;
        return cVar(newIdx);
      }
      case CKind::Global:
      case CKind::Universe:
      case CKind::LitInt:
      case CKind::LitStr:
      case CKind::LitChar:
        return t;
      case CKind::Meta:
        throw ErasureLeak("unsolved metavariable survived to erasure");
      case CKind::Pi:
        // types never execute; a placeholder keeps indices consistent
        return mkC(CKind::Universe);
      case CKind::Lam: {
        if (t->mult == Mult::Zero) {
          kept.push_back(false);
          CP body = term(t->body, kept);
          kept.pop_back();
          return body;
        }
        kept.push_back(true);
        CP body = term(t->body, kept);
        kept.pop_back();
        auto r = mkC(CKind::Lam);
        r->mult = t->mult;
        r->name = t->name;
        r->body = body;
        return r;
      }
      case CKind::App: {
        if (t->mult == Mult::Zero) return term(t->fn, kept);
        return cApp(term(t->fn, kept), term(t->arg, kept), t->mult,
                    t->implicitApp);
      }
      case CKind::Let: {
        CP v = term(t->letVal, kept);
        kept.push_back(true);
        CP body = term(t->body, kept);
        kept.pop_back();
        auto r = mkC(CKind::Let);
        r->mult = t->mult;
        r->name = t->name;
        r->letVal = v;
        r->body = body;
        return r;
      }
      case CKind::Case: {
        auto r = mkC(CKind::Case);
        r->scrut = term(t->scrut, kept);
        r->scrutMult = t->scrutMult;
        for (auto& alt : t->alts) {
          CCaseAlt out;
          out.conGid = alt.conGid;
          out.conName = alt.conName;
          if (alt.conGid < 0) {
            out.body = term(alt.body, kept);
            r->alts.push_back(std::move(out));
            continue;
          }
          const GlobalDef& con = w.globals[alt.conGid];
          // typed alternatives bind the explicit fields; erased ones bind
          // every retained field
          size_t pushed = 0, bi = 0;
          for (size_t i = 0; i < con.fieldMults.size(); ++i) {
            bool explicitF = con.fieldPlicity[i] == Plicity::Explicit;
            bool keepF = con.fieldMults[i] != Mult::Zero;
            if (!explicitF && !keepF) continue;
            if (explicitF) {
              kept.push_back(keepF);
              ++pushed;
              if (keepF) out.binders.push_back(alt.binders[bi]);
              ++bi;
            } else {
              // retained implicit field: bound at runtime, invisible to the
              // typed body, so it cannot be referenced
              out.binders.push_back("_");
            }
          }
          // implicit retained fields precede nothing in the typed body, but
          // at runtime they occupy spine slots; reorder is unnecessary
          // because field binding walks the telescope in order on both sides
          CP body = term(alt.body, kept);
          // account for runtime-only binders: shift the body over them
          int runtimeOnly =
              static_cast<int>(out.binders.size()) - keptExplicit(con);
          if (runtimeOnly > 0) body = shiftRuntimeOnly(body, con);
          out.body = body;
          for (size_t i = 0; i < pushed; ++i) kept.pop_back();
          r->alts.push_back(std::move(out));
        }
        return r;
      }
    }
    throw ErasureLeak("unexpected term during erasure");
  }

 private:
  int keptExplicit(const GlobalDef& con) {
    int n = 0;
    for (size_t i = 0; i < con.fieldMults.size(); ++i)
      if (con.fieldPlicity[i] == Plicity::Explicit &&
          con.fieldMults[i] != Mult::Zero)
        ++n;
    return n;
  }

  // Insert de Bruijn gaps for retained implicit fields so the erased body
  // lines up with the runtime binding order of the full kept telescope.
  CP shiftRuntimeOnly(const CP& body, const GlobalDef& con) {
    // positions (from outermost) of kept fields; mark which are implicit
    std::vector<bool> implicitKept;
    for (size_t i = 0; i < con.fieldMults.size(); ++i) {
      if (con.fieldMults[i] == Mult::Zero) continue;
      implicitKept.push_back(con.fieldPlicity[i] != Plicity::Explicit);
    }
    // body currently indexes only the explicit kept fields; rebuild indices
    // over the full kept telescope
    int total = static_cast<int>(implicitKept.size());
    std::vector<int> explicitToFull;
    for (int i = 0; i < total; ++i)
      if (!implicitKept[i]) explicitToFull.push_back(i);
    int nExp = static_cast<int>(explicitToFull.size());
    std::function<CP(const CP&, int)> go = [&](const CP& t, int local) -> CP {
      if (!t) return t;
      switch (t->kind) {
        case CKind::Var: {
          if (t->idx < local) return t;
          int outer = t->idx - local;
          if (outer < nExp) {
            int pos = explicitToFull[nExp - 1 - outer];
            return cVar(local + (total - 1 - pos));
          }
          return cVar(t->idx + (total - nExp));
        }
        case CKind::Global:
        case CKind::Universe:
        case CKind::Meta:
        case CKind::LitInt:
        case CKind::LitStr:
        case CKind::LitChar:
          return t;
        case CKind::Pi:
          return t;
        case CKind::Lam: {
          auto r = std::make_shared<CTerm>(*t);
          r->body = go(t->body, local + 1);
          return r;
        }
        case CKind::App: {
          auto r = std::make_shared<CTerm>(*t);
          r->fn = go(t->fn, local);
          r->arg = go(t->arg, local);
          return r;
        }
        case CKind::Let: {
          auto r = std::make_shared<CTerm>(*t);
          r->letVal = go(t->letVal, local);
          r->body = go(t->body, local + 1);
          return r;
        }
        case CKind::Case: {
          auto r = std::make_shared<CTerm>(*t);
          r->scrut = go(t->scrut, local);
          for (auto& a : r->alts)
            a.body = go(a.body, local + static_cast<int>(a.binders.size()));
          return r;
        }
      }
      return t;
    };
    return go(body, 0);
  }

 public:
  TreeP tree(const TreeP& t, std::vector<bool>& kept) {
    if (!t) return nullptr;
    auto r = std::make_shared<CaseTree>();
    r->kind = t->kind;
    switch (t->kind) {
      case CaseTree::Leaf:
        r->term = term(t->term, kept);
        return r;
      case CaseTree::Unmatched:
        return r;
      case CaseTree::Test: {
        r->scrutVar = renumberLevel(t->scrutVar, kept);
        for (auto& arm : t->arms) {
          const GlobalDef& con = w.globals[arm.conGid];
          CaseTree::Arm out;
          out.conGid = arm.conGid;
          size_t pushed = 0;
          for (size_t i = 0; i < con.fieldMults.size(); ++i) {
            bool keepF = con.fieldMults[i] != Mult::Zero;
            kept.push_back(keepF);
            ++pushed;
            if (keepF) out.names.push_back(arm.names.size() > i ? arm.names[i] : "_");
          }
          out.nBinds = static_cast<int>(out.names.size());
          out.sub = tree(arm.sub, kept);
          for (size_t i = 0; i < pushed; ++i) kept.pop_back();
          r->arms.push_back(std::move(out));
        }
        if (t->fallback) r->fallback = tree(t->fallback, kept);
        return r;
      }
      case CaseTree::LitTest: {
        r->scrutVar = renumberLevel(t->scrutVar, kept);
        for (auto& arm : t->litArms) {
          CaseTree::LitArm out;
          out.intVal = arm.intVal;
          out.strVal = arm.strVal;
          out.litKind = arm.litKind;
          out.sub = tree(arm.sub, kept);
          r->litArms.push_back(std::move(out));
        }
        if (t->fallback) r->fallback = tree(t->fallback, kept);
        return r;
      }
    }
    return r;
  }

 private:
  int renumberLevel(int lvl, const std::vector<bool>& kept) {
    if (lvl < 0 || lvl >= static_cast<int>(kept.size()) || !kept[lvl])
      throw ErasureLeak("pattern match on an erased argument");
    int out = 0;
    for (int i = 0; i < lvl; ++i)
      if (kept[i]) ++out;
    return out;
  }
};

// Populate the runtime artifacts of a function definition.
inline void eraseDef(World& w, int gid) {
  GlobalDef& def = w.globals[gid];
  if (def.kind == GlobalKind::DataCon) {
    def.rtFieldKept.clear();
    for (Mult m : def.fieldMults) def.rtFieldKept.push_back(m != Mult::Zero);
    def.rtArity = 0;
    for (bool b : def.rtFieldKept)
      if (b) ++def.rtArity;
    return;
  }
  if (def.kind == GlobalKind::PrimFn) {
    def.argKept.clear();
    const CTerm* cur = def.type.get();
    while (cur->kind == CKind::Pi) {
      def.argKept.push_back(cur->mult != Mult::Zero);
      cur = cur->cod.get();
    }
    def.rtArity = 0;
    for (bool b : def.argKept)
      if (b) ++def.rtArity;
    return;
  }
  if (def.kind != GlobalKind::Function) return;
  def.argKept.clear();
  const CTerm* cur = def.type.get();
  for (int i = 0; i < def.arity && cur->kind == CKind::Pi; ++i) {
    def.argKept.push_back(cur->mult != Mult::Zero);
    cur = cur->cod.get();
  }
  def.rtArity = 0;
  for (bool b : def.argKept)
    if (b) ++def.rtArity;
  if (!def.tree) return;
  std::vector<bool> kept = def.argKept;
  Eraser er(w);
  def.rtTree = er.tree(def.tree, kept);
}

// Independent structural check that `erased` is the erasure of `typed`.
// Walks both terms in lockstep, tracking which typed binders survive.
inline bool checkErased(World& w, const CP& typed, const CP& erased,
                        std::vector<bool>& kept) {
  if (!typed || !erased) return typed == erased;
  switch (typed->kind) {
    case CKind::Var: {
      if (erased->kind != CKind::Var) return false;
      int pos = static_cast<int>(kept.size()) - 1 - typed->idx;
      if (pos < 0 || !kept[pos]) return false;
      int newIdx = 0;
      for (int p = pos + 1; p < static_cast<int>(kept.size()); ++p)
        if (kept[p]) ++newIdx;
      return erased->idx == newIdx;
    }
    case CKind::Global:
      return erased->kind == CKind::Global && erased->gid == typed->gid;
    case CKind::Universe:
      return erased->kind == CKind::Universe;
    case CKind::LitInt:
      return erased->kind == CKind::LitInt && erased->intVal == typed->intVal;
    case CKind::LitStr:
    case CKind::LitChar:
      return erased->kind == typed->kind && erased->strVal == typed->strVal;
    case CKind::Pi:
      return erased->kind == CKind::Universe;
    case CKind::Meta:
      return false;
    case CKind::Lam: {
      if (typed->mult == Mult::Zero) {
        kept.push_back(false);
        bool ok = checkErased(w, typed->body, erased, kept);
        kept.pop_back();
        return ok;
      }
      if (erased->kind != CKind::Lam) return false;
      kept.push_back(true);
      bool ok = checkErased(w, typed->body, erased->body, kept);
      kept.pop_back();
      return ok;
    }
    case CKind::App: {
      if (typed->mult == Mult::Zero)
        return checkErased(w, typed->fn, erased, kept);
      if (erased->kind != CKind::App) return false;
      return checkErased(w, typed->fn, erased->fn, kept) &&
             checkErased(w, typed->arg, erased->arg, kept);
    }
    case CKind::Let: {
      if (erased->kind != CKind::Let) return false;
      if (!checkErased(w, typed->letVal, erased->letVal, kept)) return false;
      kept.push_back(true);
      bool ok = checkErased(w, typed->body, erased->body, kept);
      kept.pop_back();
      return ok;
    }
    case CKind::Case: {
      if (erased->kind != CKind::Case) return false;
      if (!checkErased(w, typed->scrut, erased->scrut, kept)) return false;
      if (typed->alts.size() != erased->alts.size()) return false;
      for (size_t i = 0; i < typed->alts.size(); ++i)
        if (typed->alts[i].conGid != erased->alts[i].conGid) return false;
      // alternative bodies involve field reordering; compare against a
      // fresh erasure of the whole case
      try {
        Eraser er(w);
        return termEq(er.term(typed, kept), erased);
      } catch (ErasureLeak&) {
        return false;
      }
    }
  }
  return false;
}

}  // namespace qtt
