#pragma once

#include <cctype>
#include <functional>
#include <set>

#include "qtt/desugar.hpp"
#include "qtt/unify.hpp"

namespace qtt {

enum class Mode { Erased, Relevant };

struct CtxEntry {
  std::string name;
  Mult declared = Mult::Omega;
  VP type;
  bool isLet = false;
};

class Elab {
 public:
  World& w;
  std::string file;
  Desugar dsg;
  std::vector<std::string> warnings;

  Elab(World& world, std::string fileName) : w(world), file(std::move(fileName)) {}

  // ---- context ----

  std::vector<CtxEntry> ctx;
  std::vector<VP> envVec;  // level-indexed values (VVar or let value)
  EnvP env;

  int depth() const { return static_cast<int>(ctx.size()); }

  int push(const std::string& name, Mult declared, VP type, VP letVal = nullptr) {
    int lvl = depth();
    ctx.push_back(CtxEntry{name, declared, std::move(type), letVal != nullptr});
    VP v = letVal ? letVal : vVar(lvl);
    envVec.push_back(v);
    env = envCons(std::move(v), env);
    return lvl;
  }

  void pop() {
    ctx.pop_back();
    envVec.pop_back();
    env = env->next;
  }

  [[noreturn]] void err(Span sp, const std::string& kind, const std::string& msg) {
    throw ElabError(sp, kind, msg);
  }

  // ---- per-unit state ----

  struct PendingAuto {
    int metaId;
    VP metaVal;
    VP goal;
    Span span;
  };
  struct PendingDefault {
    int metaId;
    VP metaVal;
    VP defaultV;
    Span span;
  };

  std::vector<int> unitMetas;
  std::map<int, Span> metaSpans;
  std::vector<PendingAuto> autos;
  std::vector<PendingDefault> defaults;

  // pattern-variable metas of the clause being elaborated
  std::vector<int> patVarOrder;
  std::map<std::string, int> patVarNames;

  void beginUnit() {
    unitMetas.clear();
    metaSpans.clear();
    autos.clear();
    defaults.clear();
    patVarOrder.clear();
    patVarNames.clear();
  }

  void endUnit(Span sp) {
    for (int m : unitMetas) {
      if (!w.metas.solved(m) && !w.metas.entries[m].isPatVar) {
        Span where = metaSpans.count(m) ? metaSpans[m] : sp;
        std::string n = w.metas.entries[m].name;
        err(where, "UnsolvedMeta", "unsolved metavariable ?" + (n.empty() ? "_" : n));
      }
    }
  }

  CP freshMetaTerm(const std::string& name, Span sp) {
    int m = w.metas.fresh(name);
    unitMetas.push_back(m);
    metaSpans[m] = sp;
    auto t = mkC(CKind::Meta);
    t->meta = m;
    for (int lvl = 0; lvl < depth(); ++lvl) {
      if (ctx[lvl].isLet) continue;  // keep the spine a pattern
      t->spine.push_back(cVar(depth() - 1 - lvl));
    }
    return t;
  }

  // ---- snapshots (overload trials) ----

  struct Snapshot {
    std::vector<MetaEntry> metas;
    size_t holes, globals, autosN, defaultsN, unitMetasN, patVarsN, ctxN;
  };

  Snapshot snap() {
    return Snapshot{w.metas.entries, w.holes.size(), w.globals.defs.size(),
                    autos.size(),    defaults.size(), unitMetas.size(),
                    patVarOrder.size(), ctx.size()};
  }

  void rollback(const Snapshot& s) {
    w.metas.entries = s.metas;
    w.holes.resize(s.holes);
    w.globals.truncate(s.globals);
    autos.resize(s.autosN);
    defaults.resize(s.defaultsN);
    unitMetas.resize(s.unitMetasN);
    patVarOrder.resize(s.patVarsN);
    // a trial that throws mid-binder leaves pushed context entries behind
    while (ctx.size() > s.ctxN) pop();
  }

  // ---- usage ----

  void countVarUse(int lvl, Mode sigma, UsageVector& use, Span sp) {
    if (sigma != Mode::Relevant) return;
    if (ctx[lvl].declared == Mult::Zero)
      err(sp, "ErasedUsage", ctx[lvl].name + " is not available at run time");
    use.use(lvl, Mult::One);
  }

  void bindOk(int lvl, const std::string& name, Mult declared, Mode sigma,
              const UsageVector& use, Span sp) {
    if (sigma != Mode::Relevant || declared != Mult::One) return;
    Mult u = use.get(lvl);
    if (u == Mult::Omega)
      err(sp, "LinearityError", "There are 2 uses of linear name " + name);
    if (u == Mult::Zero && !use.hasHole)
      err(sp, "LinearityError", "There are 0 uses of linear name " + name);
  }

  // ---- primitive type lookups ----

  VP primTyV(const std::string& name, Span sp) {
    const auto* ids = w.globals.lookup(name);
    if (!ids || ids->empty()) err(sp, "UnknownName", "undefined name '" + name + "'");
    auto v = mkV(VKind::VGlobal);
    v->gid = (*ids)[0];
    return v;
  }

  bool isPrimTy(const VP& v, const std::string& name) {
    return v->kind == VKind::VGlobal && v->spine.empty() &&
           w.globals[v->gid].kind == GlobalKind::PrimTy &&
           w.globals[v->gid].name == name;
  }

  // ---- subsumption ----

  void subsume(const VP& got, const VP& want, Span sp) {
    try {
      unify(w, depth(), got, want, sp);
    } catch (ElabError& e) {
      if (e.errKind == "UnifyMismatch")
        err(sp, "TypeMismatch",
            "expected " + showValue(w, want, depth(), ctxNames()) + ", got " +
                showValue(w, got, depth(), ctxNames()));
      throw;
    }
  }

  std::vector<std::string> ctxNames() {
    std::vector<std::string> out;
    for (auto& e : ctx) out.push_back(e.name);
    return out;
  }

  // ---- applications ----

  struct SpineArg {
    SP expr;
    std::string name;  // nonempty: by-name implicit argument
  };

  static void flattenApp(const SP& t, SP& head, std::vector<SpineArg>& args) {
    if (t->kind == SKind::App) {
      flattenApp(t->fn, head, args);
      args.push_back(SpineArg{t->arg, t->argName});
    } else {
      head = t;
    }
  }

  VP expectPi(VP& fTy, Span sp) {
    VP f = force(w, fTy);
    if (f->kind == VKind::VPi) return f;
    if (f->kind == VKind::VMeta) {
      CP domT = freshMetaTerm("argTy", sp);
      VP domV = eval(w, env, domT);
      push("x", Mult::Omega, domV);
      CP codT = freshMetaTerm("resTy", sp);
      pop();
      auto piT = mkC(CKind::Pi);
      piT->mult = Mult::Omega;
      piT->plicity = Plicity::Explicit;
      piT->name = "x";
      piT->dom = domT;
      piT->cod = codT;
      VP piV = eval(w, env, piT);
      unify(w, depth(), f, piV, sp);
      fTy = piV;
      return force(w, piV);
    }
    err(sp, "NotAFunction",
        "expected a function type, got " + showValue(w, f, depth(), ctxNames()));
  }

  CP implicitMeta(const VP& f, Span sp, VP& mV) {
    CP mT = freshMetaTerm(f->name.empty() ? "imp" : f->name, sp);
    mV = eval(w, env, mT);
    int metaId = mT->meta;
    if (f->plicity == Plicity::Auto)
      autos.push_back(PendingAuto{metaId, mV, f->dom, sp});
    if (f->plicity == Plicity::DefaultImplicit && f->defaultClo.body) {
      VP dv = eval(w, f->defaultClo.env, f->defaultClo.body);
      defaults.push_back(PendingDefault{metaId, mV, dv, sp});
    }
    return mT;
  }

  void insertImplicit(const VP& f, CP& fTerm, VP& fTy, Span sp) {
    VP mV;
    CP mT = implicitMeta(f, sp, mV);
    fTerm = cApp(std::move(fTerm), mT, f->mult, true);
    fTy = applyClosure(w, f->clo, mV);
  }

  void resolveAutosAndDefaults(size_t autoStart, size_t defaultStart,
                               Mode sigma, UsageVector& use) {
    for (size_t i = autoStart; i < autos.size(); ++i) {
      PendingAuto& p = autos[i];
      if (w.metas.solved(p.metaId)) continue;
      CP sol = searchAuto(force(w, p.goal), p.span, 8, sigma, use);
      unify(w, depth(), p.metaVal, eval(w, env, sol), p.span);
    }
    autos.resize(autoStart);
    for (size_t i = defaultStart; i < defaults.size(); ++i) {
      PendingDefault& p = defaults[i];
      if (w.metas.solved(p.metaId)) continue;
      unify(w, depth(), p.metaVal, p.defaultV, p.span);
    }
    defaults.resize(defaultStart);
  }

  // Constructor search for auto implicits: local context entries first, then
  // the goal type's data constructors in declaration order.
  CP searchAuto(const VP& goal, Span sp, int fuel, Mode sigma, UsageVector& use) {
    if (fuel <= 0)
      err(sp, "AutoSearchFailure",
          "can't find an implementation for " +
              showValue(w, goal, depth(), ctxNames()));
    for (int lvl = depth() - 1; lvl >= 0; --lvl) {
      if (ctx[lvl].declared == Mult::One) continue;  // don't steal linear budget
      Snapshot s = snap();
      try {
        unify(w, depth(), ctx[lvl].type, goal, sp);
        return cVar(depth() - 1 - lvl);
      } catch (ElabError&) {
        rollback(s);
      }
    }
    if (goal->kind == VKind::VCon &&
        w.globals[goal->gid].kind == GlobalKind::TyCon) {
      for (int conGid : w.globals[goal->gid].dataCons) {
        Snapshot s = snap();
        try {
          VP cty = eval(w, nullptr, w.globals[conGid].type);
          CP term = cGlobal(conGid);
          while (true) {
            VP f = force(w, cty);
            if (f->kind != VKind::VPi) break;
            if (f->plicity == Plicity::Implicit ||
                f->plicity == Plicity::DefaultImplicit) {
              insertImplicit(f, term, cty, sp);
            } else {
              CP sub = searchAuto(force(w, f->dom), sp, fuel - 1, sigma, use);
              term = cApp(std::move(term), sub, f->mult, f->plicity != Plicity::Explicit);
              cty = applyClosure(w, f->clo, eval(w, env, sub));
            }
          }
          unify(w, depth(), cty, goal, sp);
          return term;
        } catch (ElabError&) {
          rollback(s);
        }
      }
    }
    err(sp, "AutoSearchFailure",
        "can't find an implementation for " +
            showValue(w, goal, depth(), ctxNames()));
  }

  // Expected-type-directed application: walk the telescope with placeholder
  // metas for the explicit arguments, unify the result type with the
  // expectation, then elaborate the arguments against the refined domains.
  // Returns nullopt when this approach does not apply; the caller falls back
  // to plain left-to-right elaboration.
  std::optional<std::pair<CP, VP>> elabSpineDirected(
      CP fTerm, VP fTy, const std::vector<SpineArg>& args, Mode sigma,
      UsageVector& use, Span sp, const VP& expected, size_t autoStart,
      size_t defaultStart) {
    struct Slot {
      bool isArg;
      CP term;  // implicit meta term when !isArg
      SP expr;
      VP dom;
      Mult mult = Mult::Omega;
      Plicity pl = Plicity::Explicit;
      VP ph;  // placeholder value for the argument
      Span span;
    };
    std::vector<Slot> slots;
    VP ty = fTy;
    for (auto& arg : args) {
      VP f;
      while (true) {
        f = force(w, ty);
        if (f->kind != VKind::VPi) return std::nullopt;
        if (!arg.name.empty()) {
          if (f->plicity == Plicity::Explicit) return std::nullopt;
          if (f->name == arg.name) break;
        } else if (f->plicity == Plicity::Explicit) {
          break;
        }
        VP mV;
        CP mT = implicitMeta(f, sp, mV);
        slots.push_back(Slot{false, mT, nullptr, nullptr, f->mult, f->plicity,
                             mV, sp});
        ty = applyClosure(w, f->clo, mV);
      }
      CP phT = freshMetaTerm("arg", sp);
      VP phV = eval(w, env, phT);
      slots.push_back(Slot{true, nullptr, arg.expr, f->dom, f->mult, f->plicity,
                           phV, arg.expr ? arg.expr->span : sp});
      ty = applyClosure(w, f->clo, phV);
    }
    while (true) {
      VP f = force(w, ty);
      if (f->kind != VKind::VPi || f->plicity == Plicity::Explicit) break;
      VP e = force(w, expected);
      if (e->kind == VKind::VPi && e->plicity == f->plicity) break;
      VP mV;
      CP mT = implicitMeta(f, sp, mV);
      slots.push_back(Slot{false, mT, nullptr, nullptr, f->mult, f->plicity,
                           mV, sp});
      ty = applyClosure(w, f->clo, mV);
    }
    try {
      unify(w, depth(), ty, expected, sp);
    } catch (ElabError&) {
      return std::nullopt;
    }
    for (auto& sl : slots) {
      if (!sl.isArg) {
        fTerm = cApp(std::move(fTerm), sl.term, sl.mult, true);
        continue;
      }
      Mode argMode = (sigma == Mode::Erased || sl.mult == Mult::Zero)
                         ? Mode::Erased
                         : Mode::Relevant;
      CP a = check(sl.expr, sl.dom, argMode, use);
      unify(w, depth(), sl.ph, eval(w, env, a), sl.span);
      fTerm = cApp(std::move(fTerm), a, sl.mult, sl.pl != Plicity::Explicit);
    }
    resolveAutosAndDefaults(autoStart, defaultStart, sigma, use);
    return {{fTerm, ty}};
  }

  std::pair<CP, VP> elabSpine(CP fTerm, VP fTy, const std::vector<SpineArg>& args,
                              Mode sigma, UsageVector& use, Span sp,
                              const VP* expected) {
    size_t autoStart = autos.size();
    size_t defaultStart = defaults.size();
    if (expected) {
      Snapshot s = snap();
      UsageVector u2 = use;
      try {
        if (auto r = elabSpineDirected(fTerm, fTy, args, sigma, u2, sp,
                                       *expected, autoStart, defaultStart)) {
          use = u2;
          return *r;
        }
      } catch (ElabError&) {
        rollback(s);
        throw;
      }
      rollback(s);
    }
    for (auto& arg : args) {
      VP f;
      while (true) {
        f = expectPi(fTy, sp);
        if (!arg.name.empty()) {
          if (f->plicity == Plicity::Explicit)
            err(sp, "UnknownName",
                "no implicit argument named '" + arg.name + "' to apply");
          if (f->name == arg.name) break;
          insertImplicit(f, fTerm, fTy, sp);
          continue;
        }
        if (f->plicity == Plicity::Explicit) break;
        insertImplicit(f, fTerm, fTy, sp);
      }
      Mode argMode =
          (sigma == Mode::Erased || f->mult == Mult::Zero) ? Mode::Erased
                                                           : Mode::Relevant;
      Span argSp = arg.expr ? arg.expr->span : sp;
      CP a = check(arg.expr, f->dom, argMode, use);
      (void)argSp;
      fTerm = cApp(std::move(fTerm), a, f->mult, f->plicity != Plicity::Explicit);
      fTy = applyClosure(w, f->clo, eval(w, env, a));
    }
    if (expected) {
      while (true) {
        VP f = force(w, fTy);
        if (f->kind != VKind::VPi || f->plicity == Plicity::Explicit) break;
        VP e = force(w, *expected);
        if (e->kind == VKind::VPi && e->plicity == f->plicity) break;
        insertImplicit(f, fTerm, fTy, sp);
      }
    }
    resolveAutosAndDefaults(autoStart, defaultStart, sigma, use);
    return {fTerm, fTy};
  }

  std::pair<CP, VP> elabVarApp(const SP& t, Mode sigma, UsageVector& use,
                               const VP* expected) {
    SP head;
    std::vector<SpineArg> args;
    flattenApp(t, head, args);
    Span sp = t->span;
    if (head->kind != SKind::Var) {
      auto [hT, hTy] = infer(head, sigma, use);
      auto r = elabSpine(hT, hTy, args, sigma, use, sp, expected);
      if (expected) subsume(r.second, *expected, sp);
      return r;
    }
    const std::string& name = head->name;
    for (int lvl = depth() - 1; lvl >= 0; --lvl) {
      if (ctx[lvl].name != name) continue;
      countVarUse(lvl, sigma, use, head->span);
      auto r = elabSpine(cVar(depth() - 1 - lvl), ctx[lvl].type, args, sigma,
                         use, sp, expected);
      if (expected) subsume(r.second, *expected, sp);
      return r;
    }
    const auto* cands = w.globals.lookup(name);
    if (!cands || cands->empty())
      err(head->span, "UnknownName", "undefined name '" + name + "'");
    auto tryCand = [&](int gid, UsageVector& u) -> std::pair<CP, VP> {
      VP ty = eval(w, nullptr, w.globals[gid].type);
      auto r = elabSpine(cGlobal(gid), ty, args, sigma, u, sp, expected);
      if (expected) subsume(r.second, *expected, sp);
      return r;
    };
    if (cands->size() == 1) return tryCand((*cands)[0], use);
    std::optional<ElabError> first, usage;
    std::string detail;
    for (int gid : *cands) {
      Snapshot s = snap();
      UsageVector u2 = use;
      try {
        auto r = tryCand(gid, u2);
        use = u2;
        return r;
      } catch (ElabError& e) {
        rollback(s);
        if (!first) first = e;
        // a usage error means the candidate matched type-wise
        if (!usage && (e.errKind == "LinearityError" || e.errKind == "ErasedUsage"))
          usage = e;
        detail += std::string("\n  candidate ") +
                  showTerm(w, w.globals[gid].type) + ": " + e.what();
      }
    }
    if (usage) throw *usage;
    throw ElabError(sp, first->errKind,
                    "no overload of '" + name + "' applies" + detail);
  }

  // ---- literals ----

  CP checkIntLit(const SP& t, const VP& ty, Mode sigma, UsageVector& use) {
    VP f = force(w, ty);
    auto lit = [&]() {
      auto r = mkC(CKind::LitInt);
      r->intVal = t->intVal;
      return r;
    };
    if (isPrimTy(f, "Int")) return lit();
    if (f->kind == VKind::VMeta) {
      unify(w, depth(), f, primTyV("Int", t->span), t->span);
      return lit();
    }
    const auto* cands = w.globals.lookup("fromInteger");
    std::optional<ElabError> last;
    if (cands) {
      for (int gid : *cands) {
        Snapshot s = snap();
        UsageVector u2 = use;
        try {
          VP gty = eval(w, nullptr, w.globals[gid].type);
          auto litS = mkSTerm(SKind::IntLit, t->span);
          litS->intVal = t->intVal;
          auto r = elabSpine(cGlobal(gid), gty, {SpineArg{litS, ""}}, sigma, u2,
                             t->span, &ty);
          subsume(r.second, ty, t->span);
          use = u2;
          return r.first;
        } catch (ElabError& e) {
          rollback(s);
          last = e;
        }
      }
    }
    err(t->span, "TypeMismatch",
        "integer literal is not valid at type " +
            showValue(w, ty, depth(), ctxNames()));
  }

  // ---- holes ----

  CP mkHole(const SP& t, const VP& goal, UsageVector& use) {
    use.hasHole = true;
    std::string name = t->name.empty() ? "hole" : t->name;
    while (w.globals.lookup(name)) name += "'";
    HoleInfo hi;
    hi.name = name;
    for (int lvl = 0; lvl < depth(); ++lvl) {
      Mult rem = ctx[lvl].declared;
      if (rem == Mult::One && use.get(lvl) != Mult::Zero) rem = Mult::Zero;
      hi.entries.push_back(HoleCtxEntry{ctx[lvl].name, ctx[lvl].declared, rem,
                                        quote(w, lvl, ctx[lvl].type)});
    }
    hi.goal = quote(w, depth(), goal);
    CP closed = hi.goal;
    for (int lvl = depth() - 1; lvl >= 0; --lvl) {
      auto pi = mkC(CKind::Pi);
      pi->mult = ctx[lvl].declared;
      pi->plicity = Plicity::Explicit;
      pi->name = ctx[lvl].name;
      pi->dom = hi.entries[lvl].type;
      pi->cod = closed;
      closed = pi;
    }
    GlobalDef gd;
    gd.name = name;
    gd.kind = GlobalKind::Hole;
    gd.type = closed;
    int gid = w.globals.add(std::move(gd));
    hi.gid = gid;
    w.holes.push_back(hi);
    CP tm = cGlobal(gid);
    for (int lvl = 0; lvl < depth(); ++lvl)
      tm = cApp(std::move(tm), cVar(depth() - 1 - lvl), ctx[lvl].declared);
    return tm;
  }

  // ---- lambda / let / case ----

  CP checkLam(const SP& t, VP ty, Mode sigma, UsageVector& use) {
    VP f = expectPi(ty, t->span);
    if (f->plicity != Plicity::Explicit) {
      int lvl = push(f->name, f->mult, f->dom);
      CP body = check(t, applyClosure(w, f->clo, vVar(lvl)), sigma, use);
      use.counts.erase(lvl);
      pop();
      auto lam = mkC(CKind::Lam);
      lam->mult = f->mult;
      lam->name = f->name;
      lam->body = body;
      return lam;
    }
    int lvl = push(t->name, f->mult, f->dom);
    CP body = check(t->body, applyClosure(w, f->clo, vVar(lvl)), sigma, use);
    bindOk(lvl, t->name, f->mult, sigma, use, t->span);
    use.counts.erase(lvl);
    pop();
    auto lam = mkC(CKind::Lam);
    lam->mult = f->mult;
    lam->name = t->name;
    lam->body = body;
    return lam;
  }

  std::pair<CP, VP> elabLet(const SP& t, const VP* ty, Mode sigma,
                            UsageVector& use) {
    const SLetBinding& b = t->bindings.at(0);
    UsageVector uval;
    auto [vT, vTy] = infer(b.val, sigma, uval);
    Mult lm = Mult::Omega;
    for (auto& [l, m] : uval.counts)
      if (l < depth() && ctx[l].declared == Mult::One && m != Mult::Zero)
        lm = Mult::One;
    use.addAll(uval);
    VP vV = eval(w, env, vT);
    std::string name = b.pat->name;
    int lvl = push(name, lm, vTy, vV);
    CP body;
    VP bodyTy;
    if (ty) {
      body = check(t->body, *ty, sigma, use);
      bodyTy = *ty;
    } else {
      auto r = infer(t->body, sigma, use);
      body = r.first;
      CP q = quote(w, depth(), r.second);
      bodyTy = r.second;  // replaced below after pop
      bindOk(lvl, name, lm, sigma, use, t->span);
      use.counts.erase(lvl);
      pop();
      bodyTy = eval(w, envCons(vV, env), q);
      auto let = mkC(CKind::Let);
      let->mult = lm;
      let->name = name;
      let->letVal = vT;
      let->annot = quote(w, depth(), vTy);
      let->body = body;
      return {let, bodyTy};
    }
    bindOk(lvl, name, lm, sigma, use, t->span);
    use.counts.erase(lvl);
    pop();
    auto let = mkC(CKind::Let);
    let->mult = lm;
    let->name = name;
    let->letVal = vT;
    let->annot = quote(w, depth(), vTy);
    let->body = body;
    return {let, bodyTy};
  }

  std::pair<CP, VP> elabCase(const SP& t, const VP* expectedP, Mode sigma,
                             UsageVector& use) {
    Span sp = t->span;
    UsageVector uscr;
    auto [scrT, scrTyRaw] = infer(t->scrutinee, sigma, uscr);
    VP scrTy = force(w, scrTyRaw);
    Mult scrutM = Mult::Omega;
    int scrutLvl = -1;
    if (scrT->kind == CKind::Var) {
      int lvl = depth() - 1 - scrT->idx;
      if (!ctx[lvl].isLet) {
        scrutLvl = lvl;
        scrutM = ctx[lvl].declared;
      }
    }
    if (scrutLvl < 0)
      for (auto& [l, m] : uscr.counts)
        if (ctx[l].declared == Mult::One && m != Mult::Zero) scrutM = Mult::One;
    use.addAll(uscr);
    if (scrTy->kind != VKind::VCon ||
        w.globals[scrTy->gid].kind != GlobalKind::TyCon)
      err(sp, "TypeMismatch",
          "case scrutinee type is not a data type: " +
              showValue(w, scrTy, depth(), ctxNames()));
    int tyconGid = scrTy->gid;
    VP expected;
    if (expectedP) {
      expected = *expectedP;
    } else {
      CP m = freshMetaTerm("caseTy", sp);
      expected = eval(w, env, m);
    }
    int d0 = depth();
    CP qExp = quote(w, d0, expected);

    auto refEnv = [&](int upto, const VP& conVal) {
      EnvP e = nullptr;
      for (int l = 0; l < upto; ++l)
        e = envCons(l == scrutLvl ? conVal : envVec[l], e);
      return e;
    };

    auto caseT = mkC(CKind::Case);
    caseT->scrut = scrT;
    caseT->scrutMult = scrutM;
    std::vector<UsageVector> branchUses;
    for (auto& alt : t->alts) {
      if (alt.pat->kind == SKind::Underscore) {
        UsageVector ub;
        CP body = check(alt.rhs, expected, sigma, ub);
        CCaseAlt ca;
        ca.conGid = -1;
        ca.conName = "_";
        ca.body = body;
        caseT->alts.push_back(std::move(ca));
        branchUses.push_back(std::move(ub));
        continue;
      }
      SP phead;
      std::vector<SpineArg> pargs;
      flattenApp(alt.pat, phead, pargs);
      if (phead->kind != SKind::Var)
        err(sp, "SyntaxError", "invalid pattern in case alternative");
      int conGid = -1;
      if (const auto* cs = w.globals.lookup(phead->name)) {
        for (int gid : *cs)
          if (w.globals[gid].kind == GlobalKind::DataCon &&
              w.globals[gid].ownerTyCon == tyconGid)
            conGid = gid;
      }
      if (conGid < 0)
        err(phead->span, "UnknownName",
            "'" + phead->name + "' is not a constructor of " +
                w.globals[tyconGid].name);
      const GlobalDef& con = w.globals[conGid];
      VP cty = eval(w, nullptr, con.type);
      std::vector<VArg> conArgs;
      std::vector<std::string> binders;
      std::vector<int> fieldLvls;
      std::vector<Mult> fieldDecl;
      size_t ai = 0;
      while (true) {
        VP f = force(w, cty);
        if (f->kind != VKind::VPi) break;
        if (f->plicity == Plicity::Explicit) {
          if (ai >= pargs.size())
            err(sp, "PatternArityMismatch",
                "too few arguments to constructor " + con.name);
          SP pv = pargs[ai].expr;
          ++ai;
          if (pv->kind != SKind::Var && pv->kind != SKind::Underscore)
            err(pv->span, "SyntaxError",
                "case patterns bind variables only at this depth");
          std::string bn = pv->kind == SKind::Underscore ? "_" : pv->name;
          Mult dm = multMul(scrutM, f->mult);
          int lvl = push(bn, dm, f->dom);
          conArgs.push_back(VArg{vVar(lvl), f->mult, false});
          binders.push_back(bn);
          fieldLvls.push_back(lvl);
          fieldDecl.push_back(dm);
          cty = applyClosure(w, f->clo, vVar(lvl));
        } else {
          CP mT = freshMetaTerm(f->name, sp);
          VP mV = eval(w, env, mT);
          conArgs.push_back(VArg{mV, f->mult, true});
          cty = applyClosure(w, f->clo, mV);
        }
      }
      if (ai != pargs.size())
        err(sp, "PatternArityMismatch",
            "too many arguments to constructor " + con.name);
      try {
        unify(w, depth(), cty, scrTy, sp);
      } catch (ElabError& e) {
        if (scrutLvl < 0 && scrT->kind != CKind::Var)
          err(sp, "CannotRefineNonVariableScrutinee", e.what());
        throw;
      }
      VP branchExpected = expected;
      std::vector<std::pair<int, VP>> savedTypes;
      if (scrutLvl >= 0) {
        auto conVal = mkV(VKind::VCon);
        conVal->gid = conGid;
        conVal->spine = conArgs;
        branchExpected = eval(w, refEnv(d0, conVal), qExp);
        for (int l = scrutLvl + 1; l < d0; ++l) {
          CP qty = quote(w, l, ctx[l].type);
          if (!Pretty::usesVar(qty, l - 1 - scrutLvl)) continue;
          savedTypes.push_back({l, ctx[l].type});
          ctx[l].type = eval(w, refEnv(l, conVal), qty);
        }
      }
      UsageVector ub;
      CP body = check(alt.rhs, branchExpected, sigma, ub);
      for (size_t i = 0; i < fieldLvls.size(); ++i)
        bindOk(fieldLvls[i], binders[i], fieldDecl[i], sigma, ub, sp);
      for (auto& [l, tv] : savedTypes) ctx[l].type = tv;
      for (size_t i = fieldLvls.size(); i-- > 0;) {
        ub.counts.erase(fieldLvls[i]);
        pop();
      }
      CCaseAlt ca;
      ca.conGid = conGid;
      ca.conName = con.name;
      ca.binders = binders;
      ca.body = body;
      caseT->alts.push_back(std::move(ca));
      branchUses.push_back(std::move(ub));
    }
    // Linear variables must be consumed identically in every alternative.
    for (int l = 0; l < d0; ++l) {
      if (ctx[l].declared != Mult::One) continue;
      std::optional<Mult> req;
      for (auto& ub : branchUses) {
        if (ub.hasHole) continue;
        Mult u = ub.get(l);
        if (!req) {
          req = u;
        } else if (*req != u) {
          err(sp, "LinearityError",
              "inconsistent uses of linear name " + ctx[l].name +
                  " across case alternatives");
        }
      }
    }
    UsageVector comb;
    for (auto& ub : branchUses) comb.maxAll(ub);
    use.addAll(comb);
    return {caseT, expected};
  }

  // ---- check / infer ----

  CP check(const SP& t, const VP& ty, Mode sigma, UsageVector& use) {
    switch (t->kind) {
      case SKind::Lam:
        return checkLam(t, ty, sigma, use);
      case SKind::Let:
        return elabLet(t, &ty, sigma, use).first;
      case SKind::Case:
        return elabCase(t, &ty, sigma, use).first;
      case SKind::Do:
      case SKind::ListLit:
        return check(dsg.term(t), ty, sigma, use);
      case SKind::Hole:
        return mkHole(t, ty, use);
      case SKind::Underscore:
        return freshMetaTerm("_", t->span);
      case SKind::IntLit:
        return checkIntLit(t, ty, sigma, use);
      case SKind::StrLit: {
        subsume(primTyV("String", t->span), ty, t->span);
        auto r = mkC(CKind::LitStr);
        r->strVal = t->strVal;
        return r;
      }
      case SKind::CharLit: {
        subsume(primTyV("Char", t->span), ty, t->span);
        auto r = mkC(CKind::LitChar);
        r->strVal = t->strVal;
        return r;
      }
      case SKind::PairLit:
        return check(pairSugar(t, force(w, ty)->kind == VKind::VUniverse), ty,
                     sigma, use);
      case SKind::UnitLit:
        return check(sVar(force(w, ty)->kind == VKind::VUniverse ? "Unit"
                                                                 : "MkUnit",
                          t->span),
                     ty, sigma, use);
      case SKind::Var:
      case SKind::App:
        return elabVarApp(t, sigma, use, &ty).first;
      default: {
        auto [tm, got] = infer(t, sigma, use);
        subsume(got, ty, t->span);
        return tm;
      }
    }
  }

  SP pairSugar(const SP& t, bool typeLevel) {
    const std::string name = typeLevel ? "Pair" : "MkPair";
    SP acc = t->elems.back();
    for (auto it = t->elems.rbegin() + 1; it != t->elems.rend(); ++it)
      acc = sApp(sApp(sVar(name, t->span), *it), acc);
    return acc;
  }

  std::pair<CP, VP> infer(const SP& t, Mode sigma, UsageVector& use) {
    switch (t->kind) {
      case SKind::Var:
      case SKind::App:
        return elabVarApp(t, sigma, use, nullptr);
      case SKind::Universe:
        return {mkC(CKind::Universe), vUniverse()};
      case SKind::WorldTy: {
        const auto* ids = w.globals.lookup("%World");
        return {cGlobal((*ids)[0]), vUniverse()};
      }
      case SKind::Pi:
        return elabPi(t, sigma, use);
      case SKind::IntLit: {
        auto r = mkC(CKind::LitInt);
        r->intVal = t->intVal;
        return {r, primTyV("Int", t->span)};
      }
      case SKind::StrLit: {
        auto r = mkC(CKind::LitStr);
        r->strVal = t->strVal;
        return {r, primTyV("String", t->span)};
      }
      case SKind::CharLit: {
        auto r = mkC(CKind::LitChar);
        r->strVal = t->strVal;
        return {r, primTyV("Char", t->span)};
      }
      case SKind::Hole: {
        CP m = freshMetaTerm(t->name + "Ty", t->span);
        VP goal = eval(w, env, m);
        return {mkHole(t, goal, use), goal};
      }
      case SKind::Underscore: {
        CP mty = freshMetaTerm("ty", t->span);
        VP tyV = eval(w, env, mty);
        CP m = freshMetaTerm("_", t->span);
        return {m, tyV};
      }
      case SKind::Case:
        return elabCase(t, nullptr, sigma, use);
      case SKind::Let:
        return elabLet(t, nullptr, sigma, use);
      case SKind::Do:
      case SKind::ListLit:
        return infer(dsg.term(t), sigma, use);
      case SKind::PairLit:
        return infer(pairSugar(t, false), sigma, use);
      case SKind::UnitLit:
        return infer(sVar("MkUnit", t->span), sigma, use);
      case SKind::Lam: {
        CP domT = freshMetaTerm("argTy", t->span);
        VP domV = eval(w, env, domT);
        int lvl = push(t->name, Mult::Omega, domV);
        auto [body, bodyTy] = infer(t->body, sigma, use);
        CP codT = quote(w, depth(), bodyTy);
        use.counts.erase(lvl);
        pop();
        auto lam = mkC(CKind::Lam);
        lam->mult = Mult::Omega;
        lam->name = t->name;
        lam->body = body;
        auto piT = mkC(CKind::Pi);
        piT->mult = Mult::Omega;
        piT->plicity = Plicity::Explicit;
        piT->name = t->name;
        piT->dom = domT;
        piT->cod = codT;
        return {lam, eval(w, env, piT)};
      }
    }
    err(t->span, "SyntaxError", "cannot infer a type for this term");
  }

  std::pair<CP, VP> elabPi(const SP& t, Mode sigma, UsageVector& use) {
    (void)sigma;
    SP domS = t->dom ? t->dom : mkSTerm(SKind::Underscore, t->span);
    CP dom = check(domS, vUniverse(), Mode::Erased, use);
    CP dflt;
    VP domV = eval(w, env, dom);
    if (t->defaultVal) dflt = check(t->defaultVal, domV, Mode::Erased, use);
    Mult declared = t->hasMult
                        ? t->mult
                        : (t->plicity == Plicity::Auto ? Mult::Zero : Mult::Omega);
    push(t->name, declared, domV);
    CP cod = check(t->cod, vUniverse(), Mode::Erased, use);
    pop();
    auto pi = mkC(CKind::Pi);
    pi->mult = declared;
    pi->plicity = t->plicity;
    pi->name = t->name;
    pi->dom = dom;
    pi->cod = cod;
    pi->defaultVal = dflt;
    return {pi, vUniverse()};
  }

  // ---- declarations ----

  std::set<std::string> effectfulPrims = {
      "prim__putStr",  "prim__getLine", "prim__fork",    "prim__chSend",
      "prim__chRecv",  "prim__chClose", "prim__newRef",  "prim__readRef",
      "prim__writeRef", "prim__freeRef"};

  static int countPis(const CP& ty) {
    int n = 0;
    const CTerm* cur = ty.get();
    while (cur->kind == CKind::Pi) {
      ++n;
      cur = cur->cod.get();
    }
    return n;
  }

  CP elabSignatureType(const SP& sig, Span sp) {
    SP ty0 = dsg.term(sig);
    SP ty1 = autobindImplicits(
        ty0, [&](const std::string& n) { return w.globals.lookup(n) != nullptr; });
    beginUnit();
    UsageVector u;
    CP ty = check(ty1, vUniverse(), Mode::Erased, u);
    endUnit(sp);
    return zonk(w.metas, ty);
  }

  int processSig(const SDecl& d) {
    CP ty = elabSignatureType(d.type, d.span);
    GlobalDef gd;
    gd.name = d.name;
    gd.kind = GlobalKind::Function;
    gd.type = ty;
    return w.globals.add(std::move(gd));
  }

  int processPrim(const SDecl& d) {
    CP ty = elabSignatureType(d.type, d.span);
    GlobalDef gd;
    gd.name = d.name;
    gd.kind = GlobalKind::PrimFn;
    gd.type = ty;
    gd.primArity = countPis(ty);
    gd.primEffectful = effectfulPrims.count(d.name) > 0;
    return w.globals.add(std::move(gd));
  }

  void processData(const SDecl& d) {
    CP tyty = elabSignatureType(d.type, d.span);
    {
      const CTerm* cur = tyty.get();
      while (cur->kind == CKind::Pi) cur = cur->cod.get();
      if (cur->kind != CKind::Universe)
        err(d.span, "TypeMismatch",
            "data type signature must end in Type: " + d.name);
    }
    GlobalDef td;
    td.name = d.name;
    td.kind = GlobalKind::TyCon;
    td.type = tyty;
    td.tyConArity = countPis(tyty);
    int tyGid = w.globals.add(std::move(td));
    int tag = 0;
    for (auto& c : d.ctors) {
      CP cty = elabSignatureType(c.type, c.span);
      GlobalDef cd;
      cd.name = c.name;
      cd.kind = GlobalKind::DataCon;
      cd.type = cty;
      cd.ownerTyCon = tyGid;
      cd.conTag = tag++;
      const CTerm* cur = cty.get();
      while (cur->kind == CKind::Pi) {
        cd.fieldMults.push_back(cur->mult);
        cd.fieldPlicity.push_back(cur->plicity);
        cur = cur->cod.get();
      }
      cd.arity = static_cast<int>(cd.fieldMults.size());
      const CTerm* headT = cur;
      while (headT->kind == CKind::App) headT = headT->fn.get();
      if (headT->kind != CKind::Global || headT->gid != tyGid)
        err(c.span, "InvalidConstructorReturnType",
            "constructor " + c.name + " must construct " + d.name);
      int cgid = w.globals.add(std::move(cd));
      w.globals[tyGid].dataCons.push_back(cgid);
    }
  }

  // ---- clauses ----

  struct ProtoPat {
    enum K { Var, Con, Lit } k = Var;
    int metaId = -1;
    int conGid = -1;
    std::vector<ProtoPat> args;
    CKind litKind = CKind::LitInt;
    long intVal = 0;
    std::string strVal;
  };

  std::pair<VP, ProtoPat> freshPatVar(const std::string& name, const VP& ty,
                                      Mult declared, bool visible) {
    int m = w.metas.fresh(name);
    MetaEntry& e = w.metas.entries[m];
    e.isPatVar = true;
    e.patVisible = visible;
    e.patMult = declared;
    e.patType = ty;
    e.flexible = true;
    patVarOrder.push_back(m);
    if (visible) patVarNames[name] = m;
    auto v = mkV(VKind::VMeta);
    v->meta = m;
    ProtoPat pp;
    pp.k = ProtoPat::Var;
    pp.metaId = m;
    return {v, pp};
  }

  static bool isConHead(const std::string& n) {
    return !n.empty() &&
           !(std::islower((unsigned char)n[0]) || n[0] == '_' || n[0] == '$');
  }

  std::pair<VP, ProtoPat> elabPat(const SP& p, const VP& ty, Mult pathMult,
                                  Span sp) {
    switch (p->kind) {
      case SKind::Underscore:
        return freshPatVar("_", ty, pathMult, false);
      case SKind::Var:
        if (!isConHead(p->name)) {
          if (patVarNames.count(p->name))
            err(p->span, "SyntaxError",
                "non-linear pattern: '" + p->name + "' bound twice");
          return freshPatVar(p->name, ty, pathMult, true);
        }
        break;  // constructor with no arguments
      case SKind::IntLit: {
        subsume(primTyV("Int", p->span), ty, p->span);
        ProtoPat pp;
        pp.k = ProtoPat::Lit;
        pp.litKind = CKind::LitInt;
        pp.intVal = p->intVal;
        return {vLitInt(p->intVal), pp};
      }
      case SKind::StrLit: {
        subsume(primTyV("String", p->span), ty, p->span);
        ProtoPat pp;
        pp.k = ProtoPat::Lit;
        pp.litKind = CKind::LitStr;
        pp.strVal = p->strVal;
        return {vLitStr(p->strVal), pp};
      }
      case SKind::CharLit: {
        subsume(primTyV("Char", p->span), ty, p->span);
        ProtoPat pp;
        pp.k = ProtoPat::Lit;
        pp.litKind = CKind::LitChar;
        pp.strVal = p->strVal;
        return {vLitChar(p->strVal), pp};
      }
      default:
        break;
    }
    SP head;
    std::vector<SpineArg> pargs;
    flattenApp(p, head, pargs);
    if (head->kind != SKind::Var || !isConHead(head->name))
      err(p->span, "SyntaxError", "invalid pattern");
    VP tyF = force(w, ty);
    int ownerFilter = -1;
    if (tyF->kind == VKind::VCon &&
        w.globals[tyF->gid].kind == GlobalKind::TyCon)
      ownerFilter = tyF->gid;
    std::vector<int> matches;
    if (const auto* cs = w.globals.lookup(head->name))
      for (int gid : *cs)
        if (w.globals[gid].kind == GlobalKind::DataCon &&
            (ownerFilter < 0 || w.globals[gid].ownerTyCon == ownerFilter))
          matches.push_back(gid);
    if (matches.empty())
      err(head->span, "UnknownName",
          "'" + head->name + "' is not a data constructor here");
    if (matches.size() > 1)
      err(head->span, "AmbiguousName",
          "ambiguous constructor '" + head->name + "' in pattern");
    int conGid = matches[0];
    const GlobalDef& con = w.globals[conGid];
    VP cty = eval(w, nullptr, con.type);
    auto conVal = mkV(VKind::VCon);
    conVal->gid = conGid;
    ProtoPat pp;
    pp.k = ProtoPat::Con;
    pp.conGid = conGid;
    size_t ai = 0;
    while (true) {
      VP f = force(w, cty);
      if (f->kind != VKind::VPi) break;
      std::pair<VP, ProtoPat> sub;
      if (f->plicity == Plicity::Explicit) {
        if (ai >= pargs.size() || !pargs[ai].name.empty())
          err(sp, "PatternArityMismatch",
              "too few arguments to constructor " + con.name);
        sub = elabPat(pargs[ai].expr, f->dom, multMul(pathMult, f->mult),
                      pargs[ai].expr->span);
        ++ai;
      } else if (ai < pargs.size() && pargs[ai].name == f->name) {
        sub = elabPat(pargs[ai].expr, f->dom, multMul(pathMult, f->mult),
                      pargs[ai].expr->span);
        ++ai;
      } else {
        sub = freshPatVar(f->name, f->dom, multMul(pathMult, f->mult), false);
      }
      conVal->spine.push_back(VArg{sub.first, f->mult, f->plicity != Plicity::Explicit});
      pp.args.push_back(sub.second);
      cty = applyClosure(w, f->clo, sub.first);
    }
    if (ai != pargs.size())
      err(sp, "PatternArityMismatch",
          "too many arguments to constructor " + con.name);
    unify(w, depth(), cty, ty, sp);
    return {conVal, pp};
  }

  Pat finalizePat(const ProtoPat& pp, const std::map<int, int>& patMap, int n) {
    Pat out;
    switch (pp.k) {
      case ProtoPat::Var: {
        if (w.metas.solved(pp.metaId)) {
          out.kind = Pat::PForced;
          VP sol = eval(w, nullptr, w.metas.entries[pp.metaId].solution);
          out.forced = quote(w, n, sol, &patMap);
        } else {
          out.kind = Pat::PVar;
          out.varIdx = patMap.at(pp.metaId);
        }
        return out;
      }
      case ProtoPat::Con: {
        out.kind = Pat::PCon;
        out.conGid = pp.conGid;
        for (auto& a : pp.args) out.args.push_back(finalizePat(a, patMap, n));
        return out;
      }
      case ProtoPat::Lit: {
        if (pp.litKind == CKind::LitInt) {
          out.kind = Pat::PLitInt;
          out.intVal = pp.intVal;
        } else if (pp.litKind == CKind::LitStr) {
          out.kind = Pat::PLitStr;
          out.strVal = pp.strVal;
        } else {
          out.kind = Pat::PLitChar;
          out.strVal = pp.strVal;
        }
        return out;
      }
    }
    return out;
  }

  Clause elabClause(int gid, const SP& lhsRaw, const SP& rhsRaw, Span sp) {
    if (depth() != 0)
      throw std::runtime_error("clause elaborated in nonempty context");
    beginUnit();
    const GlobalDef& def = w.globals[gid];
    SP lhs = dsg.pattern(lhsRaw);
    SP rhs = dsg.term(rhsRaw);
    SP head;
    std::vector<SpineArg> args;
    flattenApp(lhs, head, args);
    if (head->kind != SKind::Var || head->name != def.name)
      err(sp, "SyntaxError", "clause head does not match '" + def.name + "'");
    VP fty = eval(w, nullptr, def.type);
    std::vector<ProtoPat> protos;
    size_t ai = 0;
    while (true) {
      VP f = force(w, fty);
      if (f->kind != VKind::VPi) break;
      std::pair<VP, ProtoPat> pv;
      if (f->plicity == Plicity::Explicit) {
        if (ai >= args.size()) break;
        if (!args[ai].name.empty())
          err(sp, "SyntaxError", "unexpected named argument in pattern");
        pv = elabPat(args[ai].expr, f->dom, f->mult, args[ai].expr->span);
        ++ai;
      } else if (ai < args.size() && args[ai].name == f->name) {
        pv = elabPat(args[ai].expr, f->dom, f->mult, args[ai].expr->span);
        ++ai;
      } else {
        pv = freshPatVar(f->name, f->dom, f->mult, false);
      }
      protos.push_back(pv.second);
      fty = applyClosure(w, f->clo, pv.first);
    }
    if (ai != args.size())
      err(sp, "PatternArityMismatch", "too many patterns for " + def.name);

    // Linearize the unsolved pattern variables into a clause context,
    // ordered so each type only mentions earlier variables.
    std::vector<int> unsolved;
    std::set<int> unsolvedSet;
    for (int m : patVarOrder)
      if (!w.metas.solved(m)) {
        unsolved.push_back(m);
        unsolvedSet.insert(m);
      }
    auto depsOf = [&](int m) {
      std::set<int> out;
      CP qt = quote(w, 0, w.metas.entries[m].patType);
      collectMetas(qt, unsolvedSet, out);
      return out;
    };
    std::vector<int> order;
    std::set<int> placed;
    while (order.size() < unsolved.size()) {
      bool progress = false;
      for (int m : unsolved) {
        if (placed.count(m)) continue;
        bool ready = true;
        for (int d : depsOf(m))
          if (d != m && !placed.count(d)) ready = false;
        if (!ready) continue;
        order.push_back(m);
        placed.insert(m);
        progress = true;
      }
      if (!progress)
        err(sp, "SyntaxError", "cyclic dependency among pattern variables");
    }
    std::map<int, int> patMap;
    std::vector<std::string> names;
    for (int m : order) {
      int lvl = static_cast<int>(patMap.size());
      MetaEntry& e = w.metas.entries[m];
      CP qt = quote(w, lvl, e.patType, &patMap);
      VP tv = eval(w, env, qt);
      push(e.name, e.patMult, tv);
      patMap[m] = lvl;
      names.push_back(e.name);
      e.flexible = false;
    }
    int n = depth();
    CP qrt = quote(w, n, fty, &patMap);
    VP rhsTy = eval(w, env, qrt);
    UsageVector use;
    CP rhsT = check(rhs, rhsTy, Mode::Relevant, use);
    for (int l = n - 1; l >= 0; --l)
      bindOk(l, ctx[l].name, ctx[l].declared, Mode::Relevant, use, sp);
    endUnit(sp);
    Clause c;
    c.ctxSize = n;
    c.ctxNames = names;
    for (auto& pp : protos) c.pats.push_back(finalizePat(pp, patMap, n));
    c.rhs = zonk(w.metas, rhsT);
    while (depth() > 0) pop();
    return c;
  }

  static void collectMetas(const CP& t, const std::set<int>& filter,
                           std::set<int>& out) {
    if (!t) return;
    if (t->kind == CKind::Meta && filter.count(t->meta)) out.insert(t->meta);
    for (const CP& s :
         {t->dom, t->cod, t->defaultVal, t->body, t->letVal, t->annot, t->fn,
          t->arg, t->scrut, t->motive})
      collectMetas(s, filter, out);
    for (auto& s : t->spine) collectMetas(s, filter, out);
    for (auto& a : t->alts) collectMetas(a.body, filter, out);
  }

  // ---- standalone terms (REPL) ----

  std::pair<CP, VP> elabTerm(const SP& raw) {
    beginUnit();
    SP t = dsg.term(raw);
    UsageVector use;
    auto [tm, ty] = infer(t, Mode::Relevant, use);
    endUnit(raw->span);
    return {zonk(w.metas, tm), ty};
  }
};

}  // namespace qtt
