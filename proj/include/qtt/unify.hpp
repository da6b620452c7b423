#pragma once

#include "qtt/pretty.hpp"

namespace qtt {

struct ElabError : std::runtime_error {
  Span span;
  std::string errKind;
  ElabError(Span sp, std::string kind, const std::string& msg)
      : std::runtime_error(msg), span(sp), errKind(std::move(kind)) {}
};

namespace detail {

inline bool closedUnder(const CP& t, int k) {
  if (!t) return true;
  switch (t->kind) {
    case CKind::Var: return t->idx < k;
    case CKind::Meta: {
      for (auto& s : t->spine) if (!closedUnder(s, k)) return false;
      return true;
    }
    case CKind::Pi: return closedUnder(t->dom, k) && closedUnder(t->defaultVal, k) && closedUnder(t->cod, k + 1);
    case CKind::Lam: return closedUnder(t->body, k + 1);
    case CKind::App: return closedUnder(t->fn, k) && closedUnder(t->arg, k);
    case CKind::Let: return closedUnder(t->letVal, k) && closedUnder(t->annot, k) && closedUnder(t->body, k + 1);
    case CKind::Case: {
      if (!closedUnder(t->scrut, k)) return false;
      if (t->motive && !closedUnder(t->motive, k + 1)) return false;
      for (auto& a : t->alts)
        if (!closedUnder(a.body, k + (int)a.binders.size())) return false;
      return true;
    }
    default: return true;
  }
}

// Rename a quoted right-hand side into the scope of a meta solution.
// `lvlToPos` maps outer de Bruijn levels to solution-lambda positions.
inline CP renameRhs(World& w, const CP& t, int outerDepth,
                    const std::map<int, int>& lvlToPos, int n, int metaId,
                    Span sp, int localDepth = 0) {
  if (!t) return t;
  auto rec = [&](const CP& s, int extra) {
    return renameRhs(w, s, outerDepth, lvlToPos, n, metaId, sp,
                     localDepth + extra);
  };
  switch (t->kind) {
    case CKind::Var: {
      if (t->idx < localDepth) return t;
      int lvl = outerDepth - 1 - (t->idx - localDepth);
      auto it = lvlToPos.find(lvl);
      if (it == lvlToPos.end())
        throw ElabError(sp, "UnifyMismatch",
                        "variable escapes its scope in a unification solution");
      return cVar(localDepth + (n - 1 - it->second));
    }
    case CKind::Global:
    case CKind::Universe:
    case CKind::LitInt:
    case CKind::LitStr:
    case CKind::LitChar:
      return t;
    case CKind::Meta: {
      if (t->meta == metaId)
        throw ElabError(sp, "OccursCheck",
                        "occurs check failed solving metavariable");
      // Rename the spine; variable arguments that escape the solution's
      // scope are pruned by replacing the metavariable with a fresh one
      // over the surviving arguments.
      std::vector<CP> renamed;
      std::vector<bool> keep;
      bool pruned = false;
      for (const CP& s : t->spine) {
        try {
          renamed.push_back(rec(s, 0));
          keep.push_back(true);
        } catch (ElabError&) {
          if (s->kind != CKind::Var || w.metas.solved(t->meta) ||
              (w.metas.entries[t->meta].isPatVar &&
               !w.metas.entries[t->meta].flexible))
            throw;
          keep.push_back(false);
          pruned = true;
        }
      }
      if (!pruned) {
        auto r = std::make_shared<CTerm>(*t);
        r->spine = std::move(renamed);
        return r;
      }
      int m2 = w.metas.fresh(w.metas.entries[t->meta].name + "'");
      int nOld = static_cast<int>(keep.size());
      auto body = mkC(CKind::Meta);
      body->meta = m2;
      for (int i = 0; i < nOld; ++i)
        if (keep[i]) body->spine.push_back(cVar(nOld - 1 - i));
      CP sol = body;
      for (int i = nOld - 1; i >= 0; --i) {
        auto lam = mkC(CKind::Lam);
        lam->name = "x" + std::to_string(i);
        lam->body = sol;
        sol = lam;
      }
      assert(closedUnder(sol, 0));
      w.metas.entries[t->meta].solution = sol;
      auto r = mkC(CKind::Meta);
      r->meta = m2;
      r->spine = std::move(renamed);
      return r;
    }
    case CKind::Pi: {
      auto r = std::make_shared<CTerm>(*t);
      r->dom = rec(t->dom, 0);
      r->defaultVal = rec(t->defaultVal, 0);
      r->cod = rec(t->cod, 1);
      return r;
    }
    case CKind::Lam: {
      auto r = std::make_shared<CTerm>(*t);
      r->body = rec(t->body, 1);
      return r;
    }
    case CKind::App: {
      auto r = std::make_shared<CTerm>(*t);
      r->fn = rec(t->fn, 0);
      r->arg = rec(t->arg, 0);
      return r;
    }
    case CKind::Let: {
      auto r = std::make_shared<CTerm>(*t);
      r->letVal = rec(t->letVal, 0);
      r->annot = rec(t->annot, 0);
      r->body = rec(t->body, 1);
      return r;
    }
    case CKind::Case: {
      auto r = std::make_shared<CTerm>(*t);
      r->scrut = rec(t->scrut, 0);
      if (r->motive) r->motive = rec(t->motive, 1);
      for (auto& a : r->alts)
        a.body = rec(a.body, static_cast<int>(a.binders.size()));
      return r;
    }
  }
  return t;
}

}  // namespace detail

// Attempt to solve `?m spine = rhs` when the spine is a Miller pattern
// (distinct bound variables). Returns false when the spine is not a pattern.
inline bool trySolveMeta(World& w, int depth, int metaId,
                         const std::vector<VArg>& spine, const VP& rhs,
                         Span sp) {
  if (w.metas.entries[metaId].isPatVar && !w.metas.entries[metaId].flexible)
    throw ElabError(sp, "UnifyMismatch",
                    "cannot constrain pattern variable " +
                        w.metas.entries[metaId].name);
  std::map<int, int> lvlToPos;
  int n = static_cast<int>(spine.size());
  for (int i = 0; i < n; ++i) {
    VP v = force(w, spine[i].v);
    if (v->kind != VKind::VVar || !v->spine.empty()) return false;
    // a duplicated variable maps to its innermost occurrence
    lvlToPos[v->lvl] = i;
  }
  CP body = detail::renameRhs(w, quote(w, depth, rhs), depth, lvlToPos, n,
                              metaId, sp);
  for (int i = n - 1; i >= 0; --i) {
    auto lam = mkC(CKind::Lam);
    lam->name = "x" + std::to_string(i);
    lam->body = body;
    body = lam;
  }
  // renameRhs may allocate fresh metas while pruning, so index again here
  assert(detail::closedUnder(body, 0));
  w.metas.entries[metaId].solution = body;
  return true;
}

inline void unify(World& w, int depth, VP a, VP b, Span sp);

// A function application can be stuck because its case tree scrutinises an
// unsolved metavariable. Guess the scrutinee's head constructor from the
// tree's arms (with fresh metas for the fields) and retry the unification;
// the first guess under which it succeeds is kept.
inline bool tryInvertStuckGlobal(World& w, int depth, const VP& g,
                                 const VP& other, Span sp) {
  static thread_local int fuel = 0;
  if (g->kind != VKind::VGlobal || fuel > 16) return false;
  const GlobalDef& def = w.globals[g->gid];
  if (def.kind != GlobalKind::Function || !def.tree) return false;
  if (static_cast<int>(g->spine.size()) < def.arity) return false;
  std::vector<VP> env;
  for (int i = 0; i < def.arity; ++i) env.push_back(g->spine[i].v);
  const CaseTree* t = def.tree.get();
  while (true) {
    if (t->kind != CaseTree::Test) return false;
    VP v = force(w, env[t->scrutVar]);
    if (v->kind == VKind::VCon) {
      const CaseTree::Arm* hit = nullptr;
      for (auto& arm : t->arms)
        if (arm.conGid == v->gid) {
          hit = &arm;
          break;
        }
      if (!hit) {
        if (!t->fallback) return false;
        t = t->fallback.get();
        continue;
      }
      if (static_cast<int>(v->spine.size()) != hit->nBinds) return false;
      for (auto& a : v->spine) env.push_back(a.v);
      t = hit->sub.get();
      continue;
    }
    if (v->kind != VKind::VMeta || w.metas.solved(v->meta)) return false;
    if (w.metas.entries[v->meta].isPatVar &&
        !w.metas.entries[v->meta].flexible)
      return false;
    for (auto& arm : t->arms) {
      auto saved = w.metas.entries;
      const GlobalDef& con = w.globals[arm.conGid];
      auto rhs = mkV(VKind::VCon);
      rhs->gid = arm.conGid;
      for (int i = 0; i < arm.nBinds; ++i) {
        int mi = w.metas.fresh(con.name + "_a" + std::to_string(i));
        auto mv = mkV(VKind::VMeta);
        mv->meta = mi;
        mv->spine = v->spine;
        bool impl = i < static_cast<int>(con.fieldPlicity.size()) &&
                    con.fieldPlicity[i] != Plicity::Explicit;
        rhs->spine.push_back(VArg{mv, Mult::Omega, impl});
      }
      bool ok = false;
      try {
        ok = trySolveMeta(w, depth, v->meta, v->spine, rhs, sp);
      } catch (ElabError&) {
      }
      if (!ok) {
        w.metas.entries = std::move(saved);
        continue;
      }
      ++fuel;
      try {
        unify(w, depth, g, other, sp);
        --fuel;
        return true;
      } catch (ElabError&) {
        --fuel;
        w.metas.entries = std::move(saved);
      }
    }
    return false;
  }
}

inline void unifySpines(World& w, int depth, const std::vector<VArg>& a,
                        const std::vector<VArg>& b, Span sp,
                        const VP& va, const VP& vb) {
  if (a.size() != b.size())
    throw ElabError(sp, "UnifyMismatch",
                    "can't unify " + showValue(w, va, depth) + " with " +
                        showValue(w, vb, depth));
  for (size_t i = 0; i < a.size(); ++i) unify(w, depth, a[i].v, b[i].v, sp);
}

inline void unify(World& w, int depth, VP a, VP b, Span sp) {
  a = force(w, std::move(a));
  b = force(w, std::move(b));
  if (a.get() == b.get()) return;
  auto mismatch = [&]() -> ElabError {
    return ElabError(sp, "UnifyMismatch",
                     "can't unify " + showValue(w, a, depth) + " with " +
                         showValue(w, b, depth));
  };
  if (a->kind == VKind::VMeta && b->kind == VKind::VMeta && a->meta == b->meta) {
    unifySpines(w, depth, a->spine, b->spine, sp, a, b);
    return;
  }
  // Prefer solving an invisible pattern variable so that source-named ones
  // stay in the clause context.
  if (a->kind == VKind::VMeta && b->kind == VKind::VMeta &&
      w.metas.entries[a->meta].patVisible &&
      !w.metas.entries[b->meta].patVisible &&
      w.metas.entries[b->meta].flexible &&
      trySolveMeta(w, depth, b->meta, b->spine, a, sp))
    return;
  if (a->kind == VKind::VMeta && trySolveMeta(w, depth, a->meta, a->spine, b, sp))
    return;
  if (b->kind == VKind::VMeta && trySolveMeta(w, depth, b->meta, b->spine, a, sp))
    return;
  if (a->kind == VKind::VMeta || b->kind == VKind::VMeta) {
    if (conv(w, depth, a, b)) return;
    throw ElabError(sp, "NonPatternSpine",
                    "metavariable application is not a pattern: " +
                        showValue(w, a, depth) + " ~ " + showValue(w, b, depth));
  }
  if (a->kind == VKind::VLam || b->kind == VKind::VLam) {
    VP x = vVar(depth);
    unify(w, depth + 1, vApp(w, a, VArg{x}), vApp(w, b, VArg{x}), sp);
    return;
  }
  if (a->kind != b->kind) {
    if (tryInvertStuckGlobal(w, depth, a, b, sp)) return;
    if (tryInvertStuckGlobal(w, depth, b, a, sp)) return;
    throw mismatch();
  }
  switch (a->kind) {
    case VKind::VVar:
      if (a->lvl != b->lvl) throw mismatch();
      unifySpines(w, depth, a->spine, b->spine, sp, a, b);
      return;
    case VKind::VGlobal:
      if (a->gid != b->gid) {
        if (tryInvertStuckGlobal(w, depth, a, b, sp)) return;
        if (tryInvertStuckGlobal(w, depth, b, a, sp)) return;
        throw mismatch();
      }
      unifySpines(w, depth, a->spine, b->spine, sp, a, b);
      return;
    case VKind::VCon:
      if (a->gid != b->gid) throw mismatch();
      unifySpines(w, depth, a->spine, b->spine, sp, a, b);
      return;
    case VKind::VUniverse:
      return;
    case VKind::VPi: {
      if (a->mult != b->mult || a->plicity != b->plicity) throw mismatch();
      unify(w, depth, a->dom, b->dom, sp);
      VP x = vVar(depth);
      unify(w, depth + 1, applyClosure(w, a->clo, x), applyClosure(w, b->clo, x),
            sp);
      return;
    }
    case VKind::VLitInt:
      if (a->intVal != b->intVal) throw mismatch();
      return;
    case VKind::VLitStr:
    case VKind::VLitChar:
      if (a->strVal != b->strVal) throw mismatch();
      return;
    case VKind::VStuckCase: {
      unify(w, depth, a->scrut, b->scrut, sp);
      if (conv(w, depth, a, b)) return;
      throw mismatch();
    }
    default:
      throw mismatch();
  }
}

}  // namespace qtt
