#pragma once

// Independent oracles used by the unit and acceptance tests: ground-value
// generation, first-matching-clause evaluation, usage counting over erased
// trees, and a lockstep erasure check for whole case trees.

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qtt/driver.hpp"
#include "qtt/erase.hpp"
#include "qtt/unify.hpp"

namespace qtt::oracle {

inline std::string corpusPath(const std::string& rel) {
  return std::string(QTT_CORPUS_DIR) + "/" + rel;
}

inline std::string goldenPath(const std::string& rel) {
  return std::string(QTT_GOLDEN_DIR) + "/" + rel;
}

inline std::string readFile(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// ---- ground-value generation ----

// Enumerate closed constructor values of `ty` up to `depth` constructor
// nestings. Domains of sort Type are instantiated with Nat and Bool.
// Indexed or parameterised types are handled by unifying each constructor's
// result type with the target; types that can't be inverted contribute no
// values.
class GroundGen {
 public:
  World& w;
  explicit GroundGen(World& world) : w(world) {}

  std::vector<VP> values(const VP& ty, int depth) {
    VP f = force(w, ty);
    if (f->kind == VKind::VUniverse) {
      std::vector<VP> out;
      for (const char* n : {"Nat", "Bool"}) {
        const auto* ids = w.globals.lookup(n);
        if (!ids) continue;
        for (int g : *ids)
          if (w.globals[g].kind == GlobalKind::TyCon) {
            auto v = mkV(VKind::VCon);
            v->gid = g;
            out.push_back(v);
          }
      }
      return out;
    }
    if (f->kind != VKind::VCon || w.globals[f->gid].kind != GlobalKind::TyCon)
      return {};
    if (depth <= 0) return {};
    std::vector<VP> out;
    for (int conGid : w.globals[f->gid].dataCons) {
      auto vs = conValues(conGid, f, depth);
      out.insert(out.end(), vs.begin(), vs.end());
    }
    return out;
  }

 private:
  std::vector<VP> conValues(int conGid, const VP& target, int depth) {
    // instantiate the constructor telescope with metas, match the result
    // type against the target, then enumerate whatever stays unsolved
    auto saved = w.metas.entries;
    std::vector<VP> out;
    try {
      VP cty = eval(w, nullptr, w.globals[conGid].type);
      std::vector<VP> argMetas;
      std::vector<Mult> mults;
      std::vector<bool> implicits;
      VP cur = cty;
      while (true) {
        VP p = force(w, cur);
        if (p->kind != VKind::VPi) break;
        int m = w.metas.fresh("g");
        auto mv = mkV(VKind::VMeta);
        mv->meta = m;
        argMetas.push_back(mv);
        mults.push_back(p->mult);
        implicits.push_back(p->plicity != Plicity::Explicit);
        cur = applyClosure(w, p->clo, mv);
      }
      unify(w, 0, cur, target, Span{0, 0});
      // enumerate argument slots left to right
      std::vector<std::vector<VP>> slots;
      bool ok = true;
      VP walk = cty;
      for (size_t i = 0; i < argMetas.size(); ++i) {
        VP p = force(w, walk);
        VP v = force(w, argMetas[i]);
        if (v->kind != VKind::VMeta) {
          if (!isGroundValue(v)) {
            ok = false;
            break;
          }
          slots.push_back({v});
        } else {
          auto vs = values(force(w, p->dom), depth - 1);
          if (vs.empty()) {
            ok = false;
            break;
          }
          slots.push_back(vs);
        }
        walk = applyClosure(w, p->clo, argMetas[i]);
      }
      if (ok) {
        std::vector<size_t> idx(slots.size(), 0);
        while (true) {
          // re-check the telescope with this concrete choice: dependent
          // domains may reject combinations the meta pass allowed
          auto v = mkV(VKind::VCon);
          v->gid = conGid;
          for (size_t i = 0; i < slots.size(); ++i)
            v->spine.push_back(VArg{slots[i][idx[i]], mults[i], implicits[i]});
          out.push_back(v);
          size_t k = 0;
          while (k < idx.size() && ++idx[k] == slots[k].size()) idx[k++] = 0;
          if (k == idx.size()) break;
        }
      }
    } catch (ElabError&) {
    }
    w.metas.entries = std::move(saved);
    return out;
  }

  bool isGroundValue(const VP& v0) {
    VP v = force(w, v0);
    switch (v->kind) {
      case VKind::VCon: {
        for (auto& a : v->spine)
          if (!isGroundValue(a.v)) return false;
        return true;
      }
      case VKind::VLitInt:
      case VKind::VLitStr:
      case VKind::VLitChar:
        return true;
      default:
        return false;
    }
  }
};

// ---- first-matching-clause semantics ----

inline bool matchPat(World& w, const Pat& p, const VP& v0,
                     std::vector<VP>& env) {
  switch (p.kind) {
    case Pat::PVar:
      if (p.varIdx >= 0 && p.varIdx < static_cast<int>(env.size()))
        env[p.varIdx] = v0;
      return true;
    case Pat::PForced:
      return true;
    case Pat::PCon: {
      VP v = force(w, v0);
      if (v->kind != VKind::VCon || v->gid != p.conGid) return false;
      if (v->spine.size() != p.args.size()) return false;
      for (size_t i = 0; i < p.args.size(); ++i)
        if (!matchPat(w, p.args[i], v->spine[i].v, env)) return false;
      return true;
    }
    case Pat::PLitInt: {
      VP v = force(w, v0);
      return v->kind == VKind::VLitInt && v->intVal == p.intVal;
    }
    case Pat::PLitStr: {
      VP v = force(w, v0);
      return v->kind == VKind::VLitStr && v->strVal == p.strVal;
    }
    case Pat::PLitChar: {
      VP v = force(w, v0);
      return v->kind == VKind::VLitChar && v->strVal == p.strVal;
    }
  }
  return false;
}

// Evaluate `def` on ground arguments by scanning the clauses in source
// order and taking the first one whose patterns match.
inline std::optional<VP> clauseEval(World& w, const GlobalDef& def,
                                    const std::vector<VP>& args) {
  for (const Clause& c : def.clauses) {
    if (c.pats.size() != args.size()) continue;
    std::vector<VP> env(c.ctxSize);
    bool hit = true;
    for (size_t i = 0; i < c.pats.size(); ++i)
      if (!matchPat(w, c.pats[i], args[i], env)) {
        hit = false;
        break;
      }
    if (!hit) continue;
    EnvP e = nullptr;
    for (int i = 0; i < c.ctxSize; ++i)
      e = envCons(env[i] ? env[i] : vVar(100000 + i), e);
    return eval(w, e, c.rhs);
  }
  return std::nullopt;
}

// ---- usage counting over erased trees ----

inline int countVarUses(const CP& t, int targetIdx) {
  if (!t) return 0;
  switch (t->kind) {
    case CKind::Var:
      return t->idx == targetIdx ? 1 : 0;
    case CKind::Lam:
      return countVarUses(t->body, targetIdx + 1);
    case CKind::App:
      return countVarUses(t->fn, targetIdx) + countVarUses(t->arg, targetIdx);
    case CKind::Let:
      return countVarUses(t->letVal, targetIdx) +
             countVarUses(t->body, targetIdx + 1);
    case CKind::Case: {
      int n = countVarUses(t->scrut, targetIdx);
      int branch = -1;
      for (auto& a : t->alts) {
        int b = countVarUses(a.body, targetIdx + static_cast<int>(a.binders.size()));
        branch = std::max(branch, b);
      }
      return n + std::max(branch, 0);
    }
    default:
      return 0;
  }
}

// All distinct root-to-leaf use counts of erased-tree parameter `lvl`.
inline void pathUseCounts(const TreeP& t, int lvl, int envSize, int soFar,
                          std::set<int>& out) {
  if (!t) return;
  switch (t->kind) {
    case CaseTree::Leaf:
      out.insert(soFar + countVarUses(t->term, envSize - 1 - lvl));
      return;
    case CaseTree::Unmatched:
      return;
    case CaseTree::Test: {
      int add = t->scrutVar == lvl ? 1 : 0;
      for (auto& arm : t->arms)
        pathUseCounts(arm.sub, lvl, envSize + arm.nBinds, soFar + add, out);
      if (t->fallback) pathUseCounts(t->fallback, lvl, envSize, soFar + add, out);
      return;
    }
    case CaseTree::LitTest: {
      int add = t->scrutVar == lvl ? 1 : 0;
      for (auto& arm : t->litArms)
        pathUseCounts(arm.sub, lvl, envSize, soFar + add, out);
      if (t->fallback) pathUseCounts(t->fallback, lvl, envSize, soFar + add, out);
      return;
    }
  }
}

// Check the usage discipline of one function's erased tree against its
// signature: every declared-1 retained parameter is used exactly once on
// every path; declared-0 parameters are never retained.
inline bool usageOracle(World& w, const GlobalDef& def, std::string& why) {
  if (def.kind != GlobalKind::Function || !def.rtTree) return true;
  std::vector<Mult> declared;
  const CTerm* cur = def.type.get();
  for (int i = 0; i < def.arity && cur->kind == CKind::Pi; ++i) {
    declared.push_back(cur->mult);
    cur = cur->cod.get();
  }
  int lvl = 0;
  for (size_t i = 0; i < declared.size(); ++i) {
    if (declared[i] == Mult::Zero) {
      if (def.argKept[i]) {
        why = def.name + ": erased parameter retained";
        return false;
      }
      continue;
    }
    if (declared[i] == Mult::One) {
      std::set<int> counts;
      pathUseCounts(def.rtTree, lvl, def.rtArity, 0, counts);
      for (int c : counts)
        if (c != 1) {
          why = def.name + ": linear parameter used " + std::to_string(c) +
                " times on some path";
          return false;
        }
    }
    ++lvl;
  }
  return true;
}

// ---- lockstep erasure check over whole trees ----

inline bool checkErasedTree(World& w, const TreeP& typed, const TreeP& erased,
                            std::vector<bool>& kept) {
  if (!typed || !erased) return static_cast<bool>(typed) == static_cast<bool>(erased);
  if (typed->kind != erased->kind) return false;
  switch (typed->kind) {
    case CaseTree::Leaf:
      return checkErased(w, typed->term, erased->term, kept);
    case CaseTree::Unmatched:
      return true;
    case CaseTree::Test: {
      int keptBefore = 0;
      for (int i = 0; i < typed->scrutVar; ++i)
        if (kept[i]) ++keptBefore;
      if (!kept[typed->scrutVar] || erased->scrutVar != keptBefore) return false;
      if (typed->arms.size() != erased->arms.size()) return false;
      for (size_t a = 0; a < typed->arms.size(); ++a) {
        const auto& ta = typed->arms[a];
        const auto& ea = erased->arms[a];
        if (ta.conGid != ea.conGid) return false;
        const GlobalDef& con = w.globals[ta.conGid];
        size_t pushed = 0;
        int keptFields = 0;
        for (Mult m : con.fieldMults) {
          bool keepF = m != Mult::Zero;
          kept.push_back(keepF);
          ++pushed;
          if (keepF) ++keptFields;
        }
        bool ok = ea.nBinds == keptFields &&
                  checkErasedTree(w, ta.sub, ea.sub, kept);
        for (size_t i = 0; i < pushed; ++i) kept.pop_back();
        if (!ok) return false;
      }
      return checkErasedTree(w, typed->fallback, erased->fallback, kept);
    }
    case CaseTree::LitTest: {
      int keptBefore = 0;
      for (int i = 0; i < typed->scrutVar; ++i)
        if (kept[i]) ++keptBefore;
      if (!kept[typed->scrutVar] || erased->scrutVar != keptBefore) return false;
      if (typed->litArms.size() != erased->litArms.size()) return false;
      for (size_t a = 0; a < typed->litArms.size(); ++a)
        if (!checkErasedTree(w, typed->litArms[a].sub, erased->litArms[a].sub,
                             kept))
          return false;
      return checkErasedTree(w, typed->fallback, erased->fallback, kept);
    }
  }
  return false;
}

// Generate argument tuples for `def` (depth-bounded), skipping the function
// when some domain can't be enumerated.
inline std::vector<std::vector<VP>> groundInputs(World& w, const GlobalDef& def,
                                                 int depth, size_t cap = 400) {
  std::vector<std::vector<VP>> tuples;
  if (def.kind != GlobalKind::Function || def.clauses.empty()) return tuples;
  GroundGen gen(w);
  VP ty = eval(w, nullptr, def.type);
  std::vector<std::pair<std::vector<VP>, VP>> frontier;
  frontier.push_back({{}, ty});
  for (int i = 0; i < def.arity; ++i) {
    std::vector<std::pair<std::vector<VP>, VP>> next;
    for (auto& [args, cur] : frontier) {
      VP p = force(w, cur);
      if (p->kind != VKind::VPi) return {};
      auto vs = gen.values(force(w, p->dom), depth);
      for (auto& v : vs) {
        if (next.size() > cap) break;
        auto a2 = args;
        a2.push_back(v);
        next.push_back({std::move(a2), applyClosure(w, p->clo, v)});
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) return {};
  }
  for (auto& [args, cur] : frontier) tuples.push_back(args);
  if (tuples.size() > cap) tuples.resize(cap);
  return tuples;
}

// Result comparison ignoring erased constructor fields: the clause-side
// evaluation leaves unconstrained neutrals in forced (erased) positions.
inline bool convGround(World& w, VP a, VP b) {
  a = force(w, std::move(a));
  b = force(w, std::move(b));
  if (a->kind == VKind::VCon && b->kind == VKind::VCon) {
    if (a->gid != b->gid || a->spine.size() != b->spine.size()) return false;
    const GlobalDef& con = w.globals[a->gid];
    for (size_t i = 0; i < a->spine.size(); ++i) {
      if (i < con.fieldMults.size() && con.fieldMults[i] == Mult::Zero) continue;
      if (!convGround(w, a->spine[i].v, b->spine[i].v)) return false;
    }
    return true;
  }
  if (a->kind == VKind::VLitInt && b->kind == VKind::VLitInt)
    return a->intVal == b->intVal;
  if ((a->kind == VKind::VLitStr && b->kind == VKind::VLitStr) ||
      (a->kind == VKind::VLitChar && b->kind == VKind::VLitChar))
    return a->strVal == b->strVal;
  return conv(w, 0, a, b);
}

// Compare case-tree evaluation with first-matching-clause evaluation on
// every generated ground input of `def`.
inline bool caseTreeOracle(World& w, const GlobalDef& def, int depth,
                           std::string& why) {
  auto inputs = groundInputs(w, def, depth);
  for (auto& args : inputs) {
    auto byTree = runCaseTree(w, def.tree, args);
    auto byClause = clauseEval(w, def, args);
    if (byTree.has_value() != byClause.has_value()) {
      why = def.name + ": tree and clause semantics disagree on definedness";
      return false;
    }
    if (byTree && !convGround(w, *byTree, *byClause)) {
      why = def.name + ": tree and clause results differ";
      return false;
    }
  }
  return true;
}

}  // namespace qtt::oracle
