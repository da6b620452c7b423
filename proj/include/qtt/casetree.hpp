#pragma once

#include "qtt/eval.hpp"

namespace qtt {

// Compile a group of elaborated clauses into a case tree over the tree
// environment: levels 0..arity-1 are the function arguments, and each Test
// arm pushes the full constructor telescope.
class TreeCompiler {
 public:
  World& w;
  std::string fname;
  std::vector<std::string> warnings;
  bool missing = false;
  std::vector<bool> used;

  TreeCompiler(World& world, std::string name) : w(world), fname(std::move(name)) {}

  struct Row {
    int clause;
    std::map<int, Pat> pats;   // tree level -> pending pattern
    std::map<int, int> binds;  // clause ctx level -> tree level
  };

  TreeP run(const std::vector<Clause>& clauses, int arity) {
    used.assign(clauses.size(), false);
    std::vector<Row> rows;
    for (size_t i = 0; i < clauses.size(); ++i) {
      Row r;
      r.clause = static_cast<int>(i);
      for (int a = 0; a < arity; ++a) r.pats[a] = clauses[i].pats[a];
      rows.push_back(std::move(r));
    }
    TreeP t = compile(clauses, std::move(rows), arity);
    if (missing)
      warnings.push_back(fname + ": missing cases");
    for (size_t i = 0; i < clauses.size(); ++i)
      if (!used[i])
        warnings.push_back(fname + ": clause " + std::to_string(i + 1) +
                           " is unreachable");
    return t;
  }

 private:
  static bool irrefutable(const Pat& p) {
    return p.kind == Pat::PVar || p.kind == Pat::PForced;
  }

  std::vector<std::string> conFieldNames(int conGid) {
    std::vector<std::string> names;
    const CTerm* cur = w.globals[conGid].type.get();
    while (cur->kind == CKind::Pi) {
      names.push_back(cur->name);
      cur = cur->cod.get();
    }
    return names;
  }

  TreeP compile(const std::vector<Clause>& clauses, std::vector<Row> rows,
                int envSize) {
    auto t = std::make_shared<CaseTree>();
    if (rows.empty()) {
      missing = true;
      t->kind = CaseTree::Unmatched;
      return t;
    }
    Row& top = rows.front();
    int col = -1;
    for (auto& [lvl, p] : top.pats)
      if (!irrefutable(p)) {
        col = lvl;
        break;
      }
    if (col < 0) {
      // first row matches unconditionally
      for (auto& [lvl, p] : top.pats)
        if (p.kind == Pat::PVar) top.binds[p.varIdx] = lvl;
      const Clause& c = clauses[top.clause];
      used[top.clause] = true;
      t->kind = CaseTree::Leaf;
      t->term = renameClause(c.rhs, top.binds, c.ctxSize, envSize, 0);
      return t;
    }
    // split remaining rows on `col`
    const Pat& scrutPat = rowPatAt(top, col);
    if (scrutPat.kind == Pat::PCon)
      return compileCon(clauses, std::move(rows), envSize, col);
    return compileLit(clauses, std::move(rows), envSize, col);
  }

  static const Pat& rowPatAt(const Row& r, int col) { return r.pats.at(col); }

  TreeP compileCon(const std::vector<Clause>& clauses, std::vector<Row> rows,
                   int envSize, int col) {
    auto t = std::make_shared<CaseTree>();
    t->kind = CaseTree::Test;
    t->scrutVar = col;
    int tycon = -1;
    std::vector<int> armOrder;
    for (auto& r : rows) {
      const Pat& p = r.pats.at(col);
      if (p.kind != Pat::PCon) continue;
      if (tycon < 0) tycon = w.globals[p.conGid].ownerTyCon;
      bool seen = false;
      for (int g : armOrder)
        if (g == p.conGid) seen = true;
      if (!seen) armOrder.push_back(p.conGid);
    }
    for (int conGid : armOrder) {
      int nBinds = static_cast<int>(w.globals[conGid].fieldMults.size());
      std::vector<Row> sub;
      for (auto& r : rows) {
        const Pat& p = r.pats.at(col);
        if (p.kind == Pat::PCon) {
          if (p.conGid != conGid) continue;
          Row nr = r;
          nr.pats.erase(col);
          for (int i = 0; i < nBinds; ++i) nr.pats[envSize + i] = p.args[i];
          sub.push_back(std::move(nr));
        } else if (irrefutable(p)) {
          Row nr = r;
          nr.pats.erase(col);
          if (p.kind == Pat::PVar) nr.binds[p.varIdx] = col;
          // re-add the variable binding by keeping it bound to `col`;
          // the constructor fields are not visible to this row
          for (int i = 0; i < nBinds; ++i) {
            // placeholder forced pats so levels stay consistent
          }
          sub.push_back(std::move(nr));
        }
      }
      // rows falling through an irrefutable pattern still live in the
      // extended environment of the arm
      CaseTree::Arm arm;
      arm.conGid = conGid;
      arm.nBinds = nBinds;
      arm.names = conFieldNames(conGid);
      arm.sub = compile(clauses, std::move(sub), envSize + nBinds);
      t->arms.push_back(std::move(arm));
    }
    // default: rows with an irrefutable pattern at `col`
    std::vector<Row> dflt;
    for (auto& r : rows) {
      const Pat& p = r.pats.at(col);
      if (!irrefutable(p)) continue;
      Row nr = r;
      nr.pats.erase(col);
      if (p.kind == Pat::PVar) nr.binds[p.varIdx] = col;
      dflt.push_back(std::move(nr));
    }
    bool covered = tycon >= 0 &&
                   armOrder.size() == w.globals[tycon].dataCons.size();
    if (!covered) {
      t->fallback = compile(clauses, std::move(dflt), envSize);
    } else if (!dflt.empty()) {
      // full coverage by constructors; defaults are redundant here but may
      // still be reachable through other columns, so keep the fallback
      t->fallback = compile(clauses, std::move(dflt), envSize);
    }
    return t;
  }

  TreeP compileLit(const std::vector<Clause>& clauses, std::vector<Row> rows,
                   int envSize, int col) {
    auto t = std::make_shared<CaseTree>();
    t->kind = CaseTree::LitTest;
    t->scrutVar = col;
    std::vector<Pat> litOrder;
    auto same = [](const Pat& a, const Pat& b) {
      if (a.kind != b.kind) return false;
      if (a.kind == Pat::PLitInt) return a.intVal == b.intVal;
      return a.strVal == b.strVal;
    };
    for (auto& r : rows) {
      const Pat& p = r.pats.at(col);
      if (p.kind != Pat::PLitInt && p.kind != Pat::PLitStr &&
          p.kind != Pat::PLitChar)
        continue;
      bool seen = false;
      for (auto& q : litOrder)
        if (same(p, q)) seen = true;
      if (!seen) litOrder.push_back(p);
    }
    for (auto& lit : litOrder) {
      std::vector<Row> sub;
      for (auto& r : rows) {
        const Pat& p = r.pats.at(col);
        if (same(p, lit)) {
          Row nr = r;
          nr.pats.erase(col);
          sub.push_back(std::move(nr));
        } else if (irrefutable(p)) {
          Row nr = r;
          nr.pats.erase(col);
          if (p.kind == Pat::PVar) nr.binds[p.varIdx] = col;
          sub.push_back(std::move(nr));
        }
      }
      CaseTree::LitArm arm;
      if (lit.kind == Pat::PLitInt) {
        arm.litKind = CKind::LitInt;
        arm.intVal = lit.intVal;
      } else {
        arm.litKind = lit.kind == Pat::PLitStr ? CKind::LitStr : CKind::LitChar;
        arm.strVal = lit.strVal;
      }
      arm.sub = compile(clauses, std::move(sub), envSize);
      t->litArms.push_back(std::move(arm));
    }
    std::vector<Row> dflt;
    for (auto& r : rows) {
      const Pat& p = r.pats.at(col);
      if (!irrefutable(p)) continue;
      Row nr = r;
      nr.pats.erase(col);
      if (p.kind == Pat::PVar) nr.binds[p.varIdx] = col;
      dflt.push_back(std::move(nr));
    }
    t->fallback = compile(clauses, std::move(dflt), envSize);
    return t;
  }

  // Rename a right-hand side from the clause context (size ctxSize) into the
  // tree environment (size envSize) using the accumulated bindings.
  CP renameClause(const CP& t, const std::map<int, int>& binds, int ctxSize,
                  int envSize, int local) {
    if (!t) return t;
    auto rec = [&](const CP& s, int extra) {
      return renameClause(s, binds, ctxSize, envSize, local + extra);
    };
    switch (t->kind) {
      case CKind::Var: {
        if (t->idx < local) return t;
        int clauseLvl = ctxSize - 1 - (t->idx - local);
        auto it = binds.find(clauseLvl);
        if (it == binds.end())
          throw std::runtime_error(fname + ": unbound clause variable");
        return cVar(local + (envSize - 1 - it->second));
      }
      case CKind::Global:
      case CKind::Universe:
      case CKind::LitInt:
      case CKind::LitStr:
      case CKind::LitChar:
        return t;
      case CKind::Meta: {
        auto r = std::make_shared<CTerm>(*t);
        for (auto& s : r->spine) s = rec(s, 0);
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
};

struct CompiledTree {
  TreeP tree;
  std::vector<std::string> warnings;
};

inline CompiledTree compileClauses(World& w, const std::string& fname,
                                   const std::vector<Clause>& clauses,
                                   int arity) {
  TreeCompiler tc(w, fname);
  CompiledTree out;
  out.tree = tc.run(clauses, arity);
  out.warnings = std::move(tc.warnings);
  return out;
}

}  // namespace qtt
