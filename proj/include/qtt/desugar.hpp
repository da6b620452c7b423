#pragma once

#include <functional>
#include <set>

#include "qtt/lexer.hpp"
#include "qtt/surface.hpp"

namespace qtt {

struct DesugarError : std::runtime_error {
  Span span;
  std::string errKind;
  DesugarError(Span sp, std::string kind, const std::string& msg)
      : std::runtime_error(msg), span(sp), errKind(std::move(kind)) {}
};

class Desugar {
 public:
  SP term(const SP& t) {
    if (!t) return t;
    switch (t->kind) {
      case SKind::Var:
      case SKind::Hole:
      case SKind::IntLit:
      case SKind::StrLit:
      case SKind::CharLit:
      case SKind::UnitLit:
      case SKind::Universe:
      case SKind::WorldTy:
      case SKind::Underscore:
        return t;
      case SKind::App: {
        auto r = std::make_shared<STerm>(*t);
        r->fn = term(t->fn);
        r->arg = term(t->arg);
        return r;
      }
      case SKind::Lam: {
        auto r = std::make_shared<STerm>(*t);
        r->body = term(t->body);
        return r;
      }
      case SKind::Pi: {
        auto r = std::make_shared<STerm>(*t);
        r->dom = term(t->dom);
        r->cod = term(t->cod);
        r->defaultVal = term(t->defaultVal);
        return r;
      }
      case SKind::Let:
        return letBindings(t, 0);
      case SKind::Case: {
        auto r = mkSTerm(SKind::Case, t->span);
        r->scrutinee = term(t->scrutinee);
        for (auto& alt : t->alts) r->alts.push_back(flattenAlt(alt));
        return r;
      }
      case SKind::Do:
        return doStmts(t, 0);
      case SKind::ListLit: {
        SP acc = sVar("Nil", t->span);
        for (auto it = t->elems.rbegin(); it != t->elems.rend(); ++it)
          acc = sApp(sApp(sVar("::", t->span), term(*it)), acc);
        return acc;
      }
      case SKind::PairLit: {
        auto r = std::make_shared<STerm>(*t);
        for (auto& e : r->elems) e = term(e);
        return r;
      }
    }
    return t;
  }

  // Clause left-hand sides: expand pattern sugar only.
  SP pattern(const SP& p) { return expandPatSugar(p); }

  // Wrap free lowercase identifiers of a signature in {0 x : _} binders,
  // in first-use order. `isDefined` answers whether a name resolves globally.
  SP autobind(const SP& sig, const std::function<bool(const std::string&)>& isDefined) {
    std::vector<std::string> order;
    std::set<std::string> seen, bound;
    collectFree(sig, isDefined, bound, seen, order);
    SP out = sig;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      auto pi = mkSTerm(SKind::Pi, sig->span);
      pi->name = *it;
      pi->plicity = Plicity::Implicit;
      pi->hasMult = true;
      pi->mult = Mult::Zero;
      pi->dom = mkSTerm(SKind::Underscore, sig->span);
      pi->cod = out;
      out = pi;
    }
    return out;
  }

 private:
  int freshCounter_ = 0;
  std::string fresh() { return "$p" + std::to_string(freshCounter_++); }

  static bool isSimpleBinderPat(const SP& p) {
    return p && (p->kind == SKind::Underscore ||
                 (p->kind == SKind::Var && !p->name.empty() &&
                  (std::islower((unsigned char)p->name[0]) || p->name[0] == '_' ||
                   p->name[0] == '$')));
  }

  // Patterns in alternative position: expand list/pair/unit sugar into
  // constructor applications, then flatten nested arguments into fresh
  // variables with inner case expressions around the right-hand side.
  SP expandPatSugar(const SP& p) {
    if (!p) return p;
    switch (p->kind) {
      case SKind::PairLit: {
        SP acc = expandPatSugar(p->elems.back());
        for (auto it = p->elems.rbegin() + 1; it != p->elems.rend(); ++it)
          acc = sApp(sApp(sVar("MkPair", p->span), expandPatSugar(*it)), acc);
        return acc;
      }
      case SKind::UnitLit:
        return sVar("MkUnit", p->span);
      case SKind::ListLit: {
        SP acc = sVar("Nil", p->span);
        for (auto it = p->elems.rbegin(); it != p->elems.rend(); ++it)
          acc = sApp(sApp(sVar("::", p->span), expandPatSugar(*it)), acc);
        return acc;
      }
      case SKind::App: {
        auto r = std::make_shared<STerm>(*p);
        r->fn = expandPatSugar(p->fn);
        r->arg = expandPatSugar(p->arg);
        return r;
      }
      default:
        return p;
    }
  }

  SCaseAlt flattenAlt(const SCaseAlt& alt) {
    SP pat = expandPatSugar(alt.pat);
    SP rhs = term(alt.rhs);
    // decompose the application spine
    std::vector<SP*> argSlots;
    SP patCopy = clone(pat);
    SP* cur = &patCopy;
    while ((*cur)->kind == SKind::App) {
      argSlots.push_back(&(*cur)->arg);
      cur = &(*cur)->fn;
    }
    // arguments were collected right-to-left
    for (auto it = argSlots.begin(); it != argSlots.end(); ++it) {
      SP& a = **it;
      if (isSimpleBinderPat(a) || a->kind == SKind::IntLit ||
          a->kind == SKind::StrLit || a->kind == SKind::CharLit)
        continue;
      std::string v = fresh();
      auto inner = mkSTerm(SKind::Case, a->span);
      inner->scrutinee = sVar(v, a->span);
      SCaseAlt sub;
      sub.pat = a;
      sub.rhs = rhs;
      inner->alts.push_back(flattenAlt(sub));
      rhs = inner;
      a = sVar(v, a->span);
    }
    SCaseAlt out;
    out.pat = patCopy;
    out.rhs = rhs;
    return out;
  }

  static SP clone(const SP& t) {
    if (!t) return t;
    auto r = std::make_shared<STerm>(*t);
    if (r->fn) r->fn = clone(r->fn);
    if (r->arg) r->arg = clone(r->arg);
    return r;
  }

  // Bind `pat` to `val` in `rest`: a plain let for variables, otherwise a
  // one-alternative case.
  SP bindPattern(const SP& pat, SP val, SP rest, Span sp) {
    if (isSimpleBinderPat(pat)) {
      auto let = mkSTerm(SKind::Let, sp);
      SLetBinding b;
      b.pat = pat->kind == SKind::Underscore ? sVar(fresh(), sp) : pat;
      b.val = std::move(val);
      let->bindings.push_back(std::move(b));
      let->body = std::move(rest);
      return let;
    }
    auto cse = mkSTerm(SKind::Case, sp);
    cse->scrutinee = std::move(val);
    SCaseAlt alt;
    alt.pat = expandPatSugar(pat);
    alt.rhs = std::move(rest);
    cse->alts.push_back(flattenAlt(alt));
    return cse;
  }

  SP letBindings(const SP& t, size_t i) {
    if (i == t->bindings.size()) return term(t->body);
    const SLetBinding& b = t->bindings[i];
    SP rest = letBindings(t, i + 1);
    return bindPattern(b.pat, term(b.val), std::move(rest), t->span);
  }

  SP doStmts(const SP& t, size_t i) {
    if (t->stmts.empty())
      throw DesugarError(t->span, "EmptyDoBlock",
                         "a do-block must end in an expression statement");
    const SDoStmt& s = t->stmts[i];
    bool last = i + 1 == t->stmts.size();
    if (last) {
      if (s.kind != SDoStmt::Expr)
        throw DesugarError(s.span, "EmptyDoBlock",
                           "a do-block must end in an expression statement");
      return term(s.expr);
    }
    SP rest = doStmts(t, i + 1);
    switch (s.kind) {
      case SDoStmt::LetStmt:
        return bindPattern(s.pat, term(s.expr), std::move(rest), s.span);
      case SDoStmt::Expr: {
        // e >>= \_ => rest
        auto k = sLam(fresh(), std::move(rest), s.span);
        return sApp(sApp(sVar(">>=", s.span), term(s.expr)), k);
      }
      case SDoStmt::Bind: {
        SP k;
        if (isSimpleBinderPat(s.pat)) {
          std::string n = s.pat->kind == SKind::Underscore ? fresh() : s.pat->name;
          k = sLam(n, std::move(rest), s.span);
        } else {
          std::string v = fresh();
          auto cse = mkSTerm(SKind::Case, s.span);
          cse->scrutinee = sVar(v, s.span);
          SCaseAlt alt;
          alt.pat = expandPatSugar(s.pat);
          alt.rhs = std::move(rest);
          cse->alts.push_back(flattenAlt(alt));
          k = sLam(v, cse, s.span);
        }
        return sApp(sApp(sVar(">>=", s.span), term(s.expr)), k);
      }
    }
    return rest;
  }

  void collectFree(const SP& t, const std::function<bool(const std::string&)>& isDefined,
                   std::set<std::string>& bound, std::set<std::string>& seen,
                   std::vector<std::string>& order) {
    if (!t) return;
    switch (t->kind) {
      case SKind::Var: {
        const std::string& n = t->name;
        if (n.empty() || !std::islower((unsigned char)n[0])) return;
        if (bound.count(n) || seen.count(n) || isDefined(n)) return;
        seen.insert(n);
        order.push_back(n);
        return;
      }
      case SKind::Pi: {
        collectFree(t->dom, isDefined, bound, seen, order);
        collectFree(t->defaultVal, isDefined, bound, seen, order);
        bool added = !t->name.empty() && !bound.count(t->name);
        if (added) bound.insert(t->name);
        collectFree(t->cod, isDefined, bound, seen, order);
        if (added) bound.erase(t->name);
        return;
      }
      case SKind::Lam: {
        bool added = !t->name.empty() && !bound.count(t->name);
        if (added) bound.insert(t->name);
        collectFree(t->body, isDefined, bound, seen, order);
        if (added) bound.erase(t->name);
        return;
      }
      default: {
        collectFree(t->fn, isDefined, bound, seen, order);
        collectFree(t->arg, isDefined, bound, seen, order);
        collectFree(t->dom, isDefined, bound, seen, order);
        collectFree(t->cod, isDefined, bound, seen, order);
        collectFree(t->body, isDefined, bound, seen, order);
        collectFree(t->scrutinee, isDefined, bound, seen, order);
        for (auto& e : t->elems) collectFree(e, isDefined, bound, seen, order);
        for (auto& a : t->alts) {
          collectFree(a.pat, isDefined, bound, seen, order);
          collectFree(a.rhs, isDefined, bound, seen, order);
        }
        for (auto& s : t->stmts) {
          collectFree(s.pat, isDefined, bound, seen, order);
          collectFree(s.expr, isDefined, bound, seen, order);
        }
        for (auto& b : t->bindings) {
          collectFree(b.pat, isDefined, bound, seen, order);
          collectFree(b.val, isDefined, bound, seen, order);
        }
        return;
      }
    }
  }
};

inline SP desugarTerm(const SP& t) { return Desugar{}.term(t); }

inline SP autobindImplicits(const SP& sig,
                            const std::function<bool(const std::string&)>& isDefined) {
  return Desugar{}.autobind(sig, isDefined);
}

}  // namespace qtt
