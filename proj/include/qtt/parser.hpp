#pragma once

#include <functional>
#include <optional>

#include "qtt/lexer.hpp"
#include "qtt/surface.hpp"

namespace qtt {

struct OpInfo {
  int prec;
  enum Assoc { Left, Right, Non } assoc;
};

// Fixed operator table; no user-defined fixity.
inline const OpInfo* opInfo(const std::string& op) {
  static const std::map<std::string, OpInfo> table = {
      {">>=", {1, OpInfo::Left}}, {"#", {2, OpInfo::Non}},
      {"::", {5, OpInfo::Right}}, {"++", {5, OpInfo::Right}},
      {"+", {8, OpInfo::Left}},
  };
  auto it = table.find(op);
  return it == table.end() ? nullptr : &it->second;
}

class Parser {
 public:
  explicit Parser(std::string src) : toks_(lex(std::move(src))) {}

  SourceModule parseModule(const std::string& modName) {
    SourceModule m;
    m.name = modName;
    parseBlock([&] {
      SDecl d = parseDecl();
      if (d.kind == DeclKind::Import)
        m.imports.push_back(d.name);
      else
        m.decls.push_back(std::move(d));
    });
    if (cur().kind != TokKind::End)
      throw SyntaxError(cur().span, "expected declaration, found '" + cur().text + "'");
    return m;
  }

  // Parse a single term followed by end of input (REPL expressions).
  SP parseSingleTerm() {
    layout_.push_back({0, cur().span.line});
    SP t = parseTerm();
    layout_.pop_back();
    if (cur().kind != TokKind::End)
      throw SyntaxError(cur().span, "unexpected trailing input '" + cur().text + "'");
    return t;
  }

 private:
  struct Item {
    int col;
    int line;
  };
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<Item> layout_;

  const Token& raw() const { return toks_[pos_]; }
  const Token& cur() const { return toks_[pos_]; }

  // A token on a later line at or left of the current item's start column
  // belongs to an outer construct.
  bool blocked() const {
    const Token& t = toks_[pos_];
    if (t.kind == TokKind::End) return true;
    if (layout_.empty()) return false;
    const Item& it = layout_.back();
    return t.span.line > it.line && t.span.col <= it.col;
  }

  TokKind k() const { return blocked() ? TokKind::End : toks_[pos_].kind; }

  Token next() {
    if (blocked())
      throw SyntaxError(toks_[pos_].span, "unexpected layout break");
    return toks_[pos_++];
  }

  Token expect(TokKind kind, const std::string& what) {
    if (k() != kind)
      throw SyntaxError(cur().span, "expected " + what + ", found '" +
                                        (cur().kind == TokKind::End ? "<end>" : cur().text) + "'");
    return next();
  }

  // Parse a sequence of items that all start at the same column.
  // Semicolons separate items on one line.
  void parseBlock(const std::function<void()>& item) {
    if (blocked() || k() == TokKind::End) return;
    int c = toks_[pos_].span.col;
    bool afterSemi = false;
    while (true) {
      if (toks_[pos_].kind == TokKind::End) break;
      if (blocked()) break;  // outer layout claims this token
      if (!afterSemi && toks_[pos_].span.col != c) break;
      if (toks_[pos_].kind == TokKind::KwIn) break;
      layout_.push_back({c, toks_[pos_].span.line});
      item();
      layout_.pop_back();
      afterSemi = false;
      if (!blocked() && toks_[pos_].kind == TokKind::Semi) {
        ++pos_;
        afterSemi = true;
      }
    }
  }

  // ---- declarations ----

  SDecl parseDecl() {
    Span sp = cur().span;
    if (k() == TokKind::KwImport) {
      next();
      Token n = expect(TokKind::Ident, "module name");
      SDecl d;
      d.kind = DeclKind::Import;
      d.span = sp;
      d.name = n.text;
      return d;
    }
    if (k() == TokKind::KwPrim) {
      next();
      std::string name = parseDeclName();
      expect(TokKind::Colon, "':'");
      SDecl d;
      d.kind = DeclKind::Prim;
      d.span = sp;
      d.name = name;
      d.type = parseTerm();
      return d;
    }
    if (k() == TokKind::KwData) return parseData(sp);
    // signature: name ':' type   (tentative, since a clause LHS may also
    // start with a name)
    size_t save = pos_;
    if (k() == TokKind::Ident || k() == TokKind::LParen) {
      try {
        std::string name = parseDeclName();
        if (k() == TokKind::Colon) {
          next();
          SDecl d;
          d.kind = DeclKind::Sig;
          d.span = sp;
          d.name = name;
          d.type = parseTerm();
          return d;
        }
      } catch (SyntaxError&) {
      }
      pos_ = save;
    }
    // clause: opexpr '=' term
    SDecl d;
    d.kind = DeclKind::Clause;
    d.span = sp;
    d.lhs = parseOpExpr(0);
    expect(TokKind::Equals, "'=' in clause");
    d.rhs = parseTerm();
    return d;
  }

  std::string parseDeclName() {
    if (k() == TokKind::Ident) return next().text;
    if (k() == TokKind::LParen) {
      next();
      Token op = expect(TokKind::Op, "operator name");
      expect(TokKind::RParen, "')'");
      return op.text;
    }
    throw SyntaxError(cur().span, "expected name");
  }

  SDecl parseData(Span sp) {
    next();  // data
    std::string name = expect(TokKind::Ident, "type constructor name").text;
    SDecl d;
    d.kind = DeclKind::Data;
    d.span = sp;
    d.name = name;
    if (k() == TokKind::Colon) {
      next();
      d.type = parseTerm();
      expect(TokKind::KwWhere, "'where'");
      parseBlock([&] {
        SConstructor c;
        c.span = cur().span;
        c.name = parseDeclName();
        expect(TokKind::Colon, "':'");
        c.type = parseTerm();
        d.ctors.push_back(std::move(c));
      });
      return d;
    }
    // short form: data Nat = Z | S Nat
    expect(TokKind::Equals, "':' or '='");
    d.type = mkSTerm(SKind::Universe, sp);
    while (true) {
      SConstructor c;
      c.span = cur().span;
      c.name = expect(TokKind::Ident, "constructor name").text;
      std::vector<SP> args;
      while (atomStart()) args.push_back(parseAtom());
      SP ty = sVar(name, c.span);
      for (auto it = args.rbegin(); it != args.rend(); ++it) {
        auto pi = mkSTerm(SKind::Pi, c.span);
        pi->plicity = Plicity::Explicit;
        pi->name = "_";
        pi->dom = *it;
        pi->cod = ty;
        ty = pi;
      }
      c.type = ty;
      d.ctors.push_back(std::move(c));
      if (k() == TokKind::Bar) {
        next();
        continue;
      }
      break;
    }
    return d;
  }

  // ---- terms ----

  SP parseTerm() {
    Span sp = cur().span;
    switch (k()) {
      case TokKind::Backslash: {
        next();
        std::string n = k() == TokKind::Underscore ? (next(), "_")
                                                   : expect(TokKind::Ident, "lambda binder").text;
        expect(TokKind::FatArrow, "'=>'");
        return sLam(n, parseTerm(), sp);
      }
      case TokKind::KwLet:
        return parseLet(sp);
      case TokKind::KwDo:
        return parseDo(sp);
      case TokKind::KwCase:
        return parseCase(sp);
      default:
        break;
    }
    if (auto pi = tryParseBinder()) return *pi;
    SP t = parseOpExpr(0);
    if (k() == TokKind::Arrow) {
      next();
      auto pi = mkSTerm(SKind::Pi, sp);
      pi->plicity = Plicity::Explicit;
      pi->name = "_";
      pi->dom = t;
      pi->cod = parseTerm();
      return pi;
    }
    if (k() == TokKind::FatArrow) {
      // auto-implicit sugar: Constraint => T
      next();
      auto pi = mkSTerm(SKind::Pi, sp);
      pi->plicity = Plicity::Auto;
      pi->hasMult = true;
      pi->mult = Mult::Zero;
      pi->name = "_";
      pi->dom = t;
      pi->cod = parseTerm();
      return pi;
    }
    return t;
  }

  std::optional<SP> tryParseBinder() {
    size_t save = pos_;
    try {
      Span sp = cur().span;
      if (k() == TokKind::LParen) {
        next();
        auto [hasMult, mult] = parseOptMult();
        std::string n = parseBinderName();
        expect(TokKind::Colon, "':'");
        SP dom = parseTerm();
        expect(TokKind::RParen, "')'");
        if (k() != TokKind::Arrow) throw SyntaxError(cur().span, "not a binder");
        next();
        auto pi = mkSTerm(SKind::Pi, sp);
        pi->plicity = Plicity::Explicit;
        pi->hasMult = hasMult;
        pi->mult = hasMult ? mult : Mult::Omega;
        pi->name = n;
        pi->dom = dom;
        pi->cod = parseTerm();
        return pi;
      }
      if (k() == TokKind::LBrace) {
        next();
        Plicity pl = Plicity::Implicit;
        SP defVal;
        bool hasMult = false;
        Mult mult = Mult::Omega;
        if (k() == TokKind::KwAuto) {
          next();
          pl = Plicity::Auto;
          hasMult = true;
          mult = Mult::Zero;
        } else if (k() == TokKind::KwDefault) {
          next();
          pl = Plicity::DefaultImplicit;
          defVal = parseAtom();
        } else {
          std::tie(hasMult, mult) = parseOptMult();
        }
        std::string n = parseBinderName();
        expect(TokKind::Colon, "':'");
        SP dom = parseTerm();
        expect(TokKind::RBrace, "'}'");
        expect(TokKind::Arrow, "'->'");
        auto pi = mkSTerm(SKind::Pi, cur().span);
        pi->plicity = pl;
        pi->hasMult = hasMult;
        pi->mult = hasMult ? mult : Mult::Omega;
        pi->name = n;
        pi->dom = dom;
        pi->cod = parseTerm();
        pi->defaultVal = defVal;
        return pi;
      }
    } catch (SyntaxError&) {
    }
    pos_ = save;
    return std::nullopt;
  }

  std::pair<bool, Mult> parseOptMult() {
    // multiplicity annotations appear only right after the opening
    // delimiter: (0 x : A), {1 x : A}
    if (k() == TokKind::IntLit && (cur().intVal == 0 || cur().intVal == 1)) {
      const Token& la = toks_[pos_ + 1];
      if (la.kind == TokKind::Ident || la.kind == TokKind::Underscore) {
        long v = next().intVal;
        return {true, v == 0 ? Mult::Zero : Mult::One};
      }
    }
    return {false, Mult::Omega};
  }

  std::string parseBinderName() {
    if (k() == TokKind::Underscore) {
      next();
      return "_";
    }
    return expect(TokKind::Ident, "binder name").text;
  }

  SP parseLet(Span sp) {
    next();  // let
    auto t = mkSTerm(SKind::Let, sp);
    parseBlock([&] {
      SLetBinding b;
      b.pat = parseOpExpr(0);
      expect(TokKind::Equals, "'=' in let binding");
      b.val = parseTerm();
      t->bindings.push_back(std::move(b));
    });
    if (t->bindings.empty())
      throw SyntaxError(sp, "empty let block");
    expect(TokKind::KwIn, "'in'");
    t->body = parseTerm();
    return t;
  }

  SP parseDo(Span sp) {
    next();  // do
    auto t = mkSTerm(SKind::Do, sp);
    parseBlock([&] {
      SDoStmt s;
      s.span = cur().span;
      if (k() == TokKind::KwLet) {
        next();
        s.kind = SDoStmt::LetStmt;
        s.pat = parseOpExpr(0);
        expect(TokKind::Equals, "'=' in do-let");
        s.expr = parseTerm();
        t->stmts.push_back(std::move(s));
        return;
      }
      size_t save = pos_;
      try {
        SP pat = parseOpExpr(0);
        if (k() == TokKind::BindArrow) {
          next();
          s.kind = SDoStmt::Bind;
          s.pat = pat;
          s.expr = parseTerm();
          t->stmts.push_back(std::move(s));
          return;
        }
      } catch (SyntaxError&) {
      }
      pos_ = save;
      s.kind = SDoStmt::Expr;
      s.expr = parseTerm();
      t->stmts.push_back(std::move(s));
    });
    if (t->stmts.empty()) throw SyntaxError(sp, "empty do block");
    return t;
  }

  SP parseCase(Span sp) {
    next();  // case
    auto t = mkSTerm(SKind::Case, sp);
    t->scrutinee = parseOpExpr(0);
    expect(TokKind::KwOf, "'of'");
    parseBlock([&] {
      SCaseAlt a;
      a.pat = parseOpExpr(0);
      expect(TokKind::FatArrow, "'=>'");
      a.rhs = parseTerm();
      t->alts.push_back(std::move(a));
    });
    if (t->alts.empty()) throw SyntaxError(sp, "case with no alternatives");
    return t;
  }

  SP parseOpExpr(int minPrec) {
    SP lhs = parseOperand();
    while (k() == TokKind::Op) {
      const OpInfo* info = opInfo(cur().text);
      if (!info)
        throw SyntaxError(cur().span, "unknown operator '" + cur().text + "'");
      if (info->prec < minPrec) break;
      Token op = next();
      int rhsMin = info->assoc == OpInfo::Left ? info->prec + 1 : info->prec;
      if (info->assoc == OpInfo::Non) rhsMin = info->prec + 1;
      SP rhs = parseOpExprOperandChain(rhsMin);
      SP opv = sVar(op.text, op.span);
      lhs = sApp(sApp(opv, lhs), rhs);
      if (info->assoc == OpInfo::Non) break;
    }
    return lhs;
  }

  SP parseOpExprOperandChain(int minPrec) { return parseOpExpr(minPrec); }

  SP parseOperand() {
    switch (k()) {
      case TokKind::Backslash:
      case TokKind::KwLet:
      case TokKind::KwDo:
      case TokKind::KwCase:
        return parseTerm();
      default:
        return parseApp();
    }
  }

  SP parseApp() {
    SP head = parseAtom();
    while (true) {
      if (atomStart()) {
        head = sApp(head, parseAtom());
        continue;
      }
      if (k() == TokKind::LBrace) {
        Span sp = cur().span;
        next();
        std::string name = expect(TokKind::Ident, "implicit argument name").text;
        SP val;
        if (k() == TokKind::Equals) {
          next();
          val = parseTerm();
        } else {
          val = sVar(name, sp);
        }
        expect(TokKind::RBrace, "'}'");
        auto app = mkSTerm(SKind::App, sp);
        app->fn = head;
        app->arg = val;
        app->argName = name;
        app->appImplicit = true;
        head = app;
        continue;
      }
      break;
    }
    return head;
  }

  bool atomStart() const {
    switch (k()) {
      case TokKind::Ident:
      case TokKind::IntLit:
      case TokKind::StrLit:
      case TokKind::CharLit:
      case TokKind::Hole:
      case TokKind::LParen:
      case TokKind::LBracket:
      case TokKind::Underscore:
      case TokKind::KwType:
      case TokKind::KwWorld:
        return true;
      default:
        return false;
    }
  }

  SP parseAtom() {
    Span sp = cur().span;
    switch (k()) {
      case TokKind::Ident:
        return sVar(next().text, sp);
      case TokKind::Underscore:
        next();
        return mkSTerm(SKind::Underscore, sp);
      case TokKind::IntLit: {
        auto t = mkSTerm(SKind::IntLit, sp);
        t->intVal = next().intVal;
        return t;
      }
      case TokKind::StrLit: {
        auto t = mkSTerm(SKind::StrLit, sp);
        t->strVal = next().text;
        return t;
      }
      case TokKind::CharLit: {
        auto t = mkSTerm(SKind::CharLit, sp);
        t->strVal = next().text;
        return t;
      }
      case TokKind::Hole: {
        auto t = mkSTerm(SKind::Hole, sp);
        t->name = next().text;
        return t;
      }
      case TokKind::KwType:
        next();
        return mkSTerm(SKind::Universe, sp);
      case TokKind::KwWorld:
        next();
        return mkSTerm(SKind::WorldTy, sp);
      case TokKind::LBracket: {
        next();
        auto t = mkSTerm(SKind::ListLit, sp);
        if (k() != TokKind::RBracket) {
          t->elems.push_back(parseTerm());
          while (k() == TokKind::Comma) {
            next();
            t->elems.push_back(parseTerm());
          }
        }
        expect(TokKind::RBracket, "']'");
        return t;
      }
      case TokKind::LParen: {
        next();
        if (k() == TokKind::RParen) {
          next();
          return mkSTerm(SKind::UnitLit, sp);
        }
        if (k() == TokKind::Op && toks_[pos_ + 1].kind == TokKind::RParen) {
          std::string op = next().text;
          next();
          return sVar(op, sp);
        }
        SP t = parseTerm();
        if (k() == TokKind::Comma) {
          std::vector<SP> elems = {t};
          while (k() == TokKind::Comma) {
            next();
            elems.push_back(parseTerm());
          }
          expect(TokKind::RParen, "')'");
          // right-nest n-ary tuples as pairs
          SP acc = elems.back();
          for (size_t i = elems.size() - 1; i-- > 0;) {
            auto p = mkSTerm(SKind::PairLit, sp);
            p->elems = {elems[i], acc};
            acc = p;
          }
          return acc;
        }
        expect(TokKind::RParen, "')'");
        return t;
      }
      default:
        throw SyntaxError(sp, "expected expression, found '" +
                                  (cur().kind == TokKind::End ? "<end>" : cur().text) + "'");
    }
  }
};

// ---- REPL command parsing ----

struct ReplCommand {
  enum Kind { TypeOf, Eval, Load, Holes, Exec, Quit } kind;
  SP term;
  std::string arg;
};

inline ReplCommand parseReplInput(const std::string& text) {
  auto trim = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    size_t b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  std::string s = trim(text);
  ReplCommand cmd;
  if (s == ":q" || s == ":quit") {
    cmd.kind = ReplCommand::Quit;
    return cmd;
  }
  if (s == ":holes") {
    cmd.kind = ReplCommand::Holes;
    return cmd;
  }
  if (s.rfind(":t ", 0) == 0) {
    cmd.kind = ReplCommand::TypeOf;
    Parser p(s.substr(3));
    cmd.term = p.parseSingleTerm();
    return cmd;
  }
  if (s.rfind(":load ", 0) == 0) {
    cmd.kind = ReplCommand::Load;
    cmd.arg = trim(s.substr(6));
    return cmd;
  }
  if (s.rfind(":exec ", 0) == 0) {
    cmd.kind = ReplCommand::Exec;
    cmd.arg = trim(s.substr(6));
    return cmd;
  }
  if (!s.empty() && s[0] == ':')
    throw SyntaxError({1, 1}, "unknown REPL command '" + s + "'");
  cmd.kind = ReplCommand::Eval;
  Parser p(s);
  cmd.term = p.parseSingleTerm();
  return cmd;
}

}  // namespace qtt
