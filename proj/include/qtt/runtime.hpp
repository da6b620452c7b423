#pragma once

#include <deque>
#include <functional>
#include <sstream>

#include "qtt/erase.hpp"

namespace qtt {

// ---- runtime values ----

struct RValue;
using RV = std::shared_ptr<RValue>;

struct REnv {
  RV v;
  std::shared_ptr<REnv> next;
};
using REnvP = std::shared_ptr<REnv>;

inline REnvP rCons(RV v, REnvP next) {
  auto e = std::make_shared<REnv>();
  e->v = std::move(v);
  e->next = std::move(next);
  return e;
}

enum class RKind : uint8_t {
  RCon,      // constructor applied to its retained fields
  RClo,      // lambda closure
  RPartial,  // under-applied function or primitive
  RLitInt,
  RLitStr,
  RLitChar,
  RWorld,    // linear world token
  RChan,     // channel endpoint
  RRef,      // linear reference
  RType,     // erased type placeholder
};

struct RValue {
  RKind kind;
  int gid = -1;               // RCon / RPartial
  std::vector<RV> args;       // RCon fields / RPartial args
  REnvP env;                  // RClo
  CP body;                    // RClo
  long intVal = 0;            // RLitInt / RChan id / RRef id
  std::string strVal;         // RLitStr / RLitChar
  int pid = -1, gen = -1;     // RWorld
  int end = 0;                // RChan
};

inline RV mkR(RKind k) {
  auto v = std::make_shared<RValue>();
  v->kind = k;
  return v;
}

inline RV rInt(long n) {
  auto v = mkR(RKind::RLitInt);
  v->intVal = n;
  return v;
}
inline RV rStr(std::string s) {
  auto v = mkR(RKind::RLitStr);
  v->strVal = std::move(s);
  return v;
}

struct StaleWorld : std::runtime_error {
  explicit StaleWorld(const std::string& m) : std::runtime_error(m) {}
};

struct BlockedOnRecv {
  int chanId;
  int end;
};

struct RuntimeError : std::runtime_error {
  explicit RuntimeError(const std::string& m) : std::runtime_error(m) {}
};

// ---- processes and channels ----

struct RtChannel {
  std::deque<RV> inbox[2];  // inbox[e]: messages waiting for end e
  bool closed[2] = {false, false};
  bool alive = true;
};

enum class ProcStatus : uint8_t { Runnable, Blocked, Finished };

struct Proc {
  int id = 0;
  RV current;  // pending L value
  // continuation stack: (continuation, usage of the delivered result)
  std::vector<std::pair<RV, RV>> kstack;
  ProcStatus status = ProcStatus::Runnable;
  int gen = 0;
  int blockedChan = -1, blockedEnd = -1;
};

struct RunResult {
  std::string stdoutText;
  bool exitOk = true;
  int liveChannels = 0;
  int blockedProcs = 0;
  std::string error;
};

class Machine {
 public:
  World& w;
  // deque: fork pushes a process while a reference to the running one is held
  std::deque<Proc> procs;
  std::vector<RtChannel> channels;
  std::string out;
  std::vector<std::string> stdinLines;
  size_t stdinPos = 0;
  int liveRefs = 0;
  int nextRef = 0;
  bool yieldFlag = false;
  Proc* cur = nullptr;
  std::string failure;

  explicit Machine(World& world, const std::string& stdinText = "") : w(world) {
    std::istringstream in(stdinText);
    std::string line;
    while (std::getline(in, line)) stdinLines.push_back(line);
  }

  int gidOf(const std::string& n) {
    const auto* ids = w.globals.lookup(n);
    if (!ids || ids->empty()) throw RuntimeError("missing global " + n);
    if (ids->size() == 1) return (*ids)[0];
    // prefer the data constructor among overloads
    for (int g : *ids)
      if (w.globals[g].kind == GlobalKind::DataCon) return g;
    return (*ids)[0];
  }

  const std::string& conName(const RV& v) { return w.globals[v->gid].name; }

  // ---- erased-term interpretation ----

  RV rEval(const REnvP& env, const CP& t) {
    switch (t->kind) {
      case CKind::Var: {
        const REnv* p = env.get();
        for (int i = 0; i < t->idx; ++i) p = p->next.get();
        return p->v;
      }
      case CKind::Global: {
        const GlobalDef& def = w.globals[t->gid];
        switch (def.kind) {
          case GlobalKind::DataCon:
          case GlobalKind::TyCon: {
            auto v = mkR(RKind::RCon);
            v->gid = t->gid;
            return v;
          }
          case GlobalKind::PrimTy:
            return mkR(RKind::RType);
          case GlobalKind::Hole:
            throw RuntimeError("evaluated a hole: " + def.name);
          default: {
            auto v = mkR(RKind::RPartial);
            v->gid = t->gid;
            return maybeReduce(std::move(v));
          }
        }
      }
      case CKind::Universe:
        return mkR(RKind::RType);
      case CKind::Lam: {
        auto v = mkR(RKind::RClo);
        v->env = env;
        v->body = t->body;
        return v;
      }
      case CKind::App:
        return apply(rEval(env, t->fn), rEval(env, t->arg));
      case CKind::Let:
        return rEval(rCons(rEval(env, t->letVal), env), t->body);
      case CKind::Case: {
        RV s = rEval(env, t->scrut);
        if (s->kind != RKind::RCon)
          throw RuntimeError("case scrutinee is not a constructor value");
        const CCaseAlt* wild = nullptr;
        for (auto& alt : t->alts) {
          if (alt.conGid < 0) {
            wild = &alt;
            continue;
          }
          if (alt.conGid != s->gid) continue;
          if (s->args.size() != alt.binders.size())
            throw RuntimeError("case arity mismatch on " + conName(s));
          REnvP e = env;
          for (auto& f : s->args) e = rCons(f, e);
          return rEval(e, alt.body);
        }
        if (wild) return rEval(env, wild->body);
        throw RuntimeError("no matching case alternative for " + conName(s));
      }
      case CKind::LitInt:
        return rInt(t->intVal);
      case CKind::LitStr:
        return rStr(t->strVal);
      case CKind::LitChar: {
        auto v = mkR(RKind::RLitChar);
        v->strVal = t->strVal;
        return v;
      }
      case CKind::Meta:
      case CKind::Pi:
        throw RuntimeError("non-runtime term reached the interpreter");
    }
    throw RuntimeError("rEval: unreachable");
  }

  RV apply(RV f, RV a) {
    switch (f->kind) {
      case RKind::RClo:
        return rEval(rCons(std::move(a), f->env), f->body);
      case RKind::RCon: {
        auto v = mkR(RKind::RCon);
        v->gid = f->gid;
        v->args = f->args;
        v->args.push_back(std::move(a));
        return v;
      }
      case RKind::RPartial: {
        auto v = mkR(RKind::RPartial);
        v->gid = f->gid;
        v->args = f->args;
        v->args.push_back(std::move(a));
        return maybeReduce(std::move(v));
      }
      default:
        throw RuntimeError("applied a non-function runtime value");
    }
  }

  RV maybeReduce(RV v) {
    const GlobalDef& def = w.globals[v->gid];
    if (def.kind == GlobalKind::Function) {
      if (def.rtArity < 0 || !def.rtTree) return v;
      if (static_cast<int>(v->args.size()) < def.rtArity) return v;
      return runTree(def.rtTree, v->args, def.name);
    }
    if (def.kind == GlobalKind::PrimFn) {
      if (static_cast<int>(v->args.size()) < def.rtArity) return v;
      return prim(def.name, v->args);
    }
    return v;
  }

  RV runTree(const TreeP& tree, std::vector<RV> env, const std::string& fname) {
    const CaseTree* t = tree.get();
    while (true) {
      switch (t->kind) {
        case CaseTree::Leaf: {
          REnvP e = nullptr;
          for (auto& v : env) e = rCons(v, e);
          return rEval(e, t->term);
        }
        case CaseTree::Unmatched:
          throw RuntimeError(fname + ": missing case at run time");
        case CaseTree::Test: {
          RV s = env[t->scrutVar];
          if (s->kind != RKind::RCon)
            throw RuntimeError(fname + ": match on a non-constructor value");
          const CaseTree::Arm* hit = nullptr;
          for (auto& arm : t->arms)
            if (arm.conGid == s->gid) {
              hit = &arm;
              break;
            }
          if (!hit) {
            if (!t->fallback)
              throw RuntimeError(fname + ": missing case at run time");
            t = t->fallback.get();
            continue;
          }
          for (auto& f : s->args) env.push_back(f);
          t = hit->sub.get();
          continue;
        }
        case CaseTree::LitTest: {
          RV s = env[t->scrutVar];
          const CaseTree::LitArm* hit = nullptr;
          for (auto& arm : t->litArms) {
            bool m = false;
            if (s->kind == RKind::RLitInt && arm.litKind == CKind::LitInt)
              m = arm.intVal == s->intVal;
            else if (s->kind == RKind::RLitStr && arm.litKind == CKind::LitStr)
              m = arm.strVal == s->strVal;
            else if (s->kind == RKind::RLitChar && arm.litKind == CKind::LitChar)
              m = arm.strVal == s->strVal;
            if (m) {
              hit = &arm;
              break;
            }
          }
          if (hit) {
            t = hit->sub.get();
            continue;
          }
          if (!t->fallback)
            throw RuntimeError(fname + ": missing case at run time");
          t = t->fallback.get();
          continue;
        }
      }
    }
  }

  // ---- primitives ----

  RV rBool(bool b) {
    auto v = mkR(RKind::RCon);
    v->gid = gidOf(b ? "True" : "False");
    return v;
  }
  RV rUnit() {
    auto v = mkR(RKind::RCon);
    v->gid = gidOf("MkUnit");
    return v;
  }

  // consume and renew the current process's world token
  RV useWorld(const RV& tok) {
    if (!cur) throw RuntimeError("effectful primitive outside a process");
    if (tok->kind != RKind::RWorld || tok->pid != cur->id ||
        tok->gen != cur->gen)
      throw StaleWorld("world token used more than once");
    ++cur->gen;
    auto v = mkR(RKind::RWorld);
    v->pid = cur->id;
    v->gen = cur->gen;
    return v;
  }

  RV iores(RV result, RV world) {
    auto v = mkR(RKind::RCon);
    v->gid = gidOf("MkIORes");
    v->args = {std::move(result), std::move(world)};
    return v;
  }

  RV prim(const std::string& name, std::vector<RV>& a) {
    auto asInt = [&](int i) { return a[i]->intVal; };
    if (name == "prim__addInt") return rInt(asInt(0) + asInt(1));
    if (name == "prim__subInt") return rInt(asInt(0) - asInt(1));
    if (name == "prim__mulInt") return rInt(asInt(0) * asInt(1));
    if (name == "prim__eqInt") return rBool(asInt(0) == asInt(1));
    if (name == "prim__eqChar") return rBool(a[0]->strVal == a[1]->strVal);
    if (name == "prim__strConcat") return rStr(a[0]->strVal + a[1]->strVal);
    if (name == "prim__strReverse")
      return rStr(std::string(a[0]->strVal.rbegin(), a[0]->strVal.rend()));
    if (name == "prim__showInt") return rStr(std::to_string(a[0]->intVal));

    // effectful primitives: the world token is the last argument
    if (name == "prim__putStr") {
      RV w2 = useWorld(a[1]);
      out += a[0]->strVal;
      return iores(rUnit(), w2);
    }
    if (name == "prim__getLine") {
      RV w2 = useWorld(a[0]);
      std::string line;
      if (stdinPos < stdinLines.size()) line = stdinLines[stdinPos++];
      return iores(rStr(line), w2);
    }
    if (name == "prim__newRef") {
      RV w2 = useWorld(a[0]);
      auto r = mkR(RKind::RRef);
      r->intVal = nextRef++;
      ++liveRefs;
      return iores(std::move(r), w2);
    }
    if (name == "prim__freeRef") {
      RV w2 = useWorld(a[1]);
      --liveRefs;
      return iores(rUnit(), w2);
    }
    if (name == "prim__fork") {
      RV w2 = useWorld(a[1]);
      int cid = static_cast<int>(channels.size());
      channels.emplace_back();
      auto serverEnd = mkR(RKind::RChan);
      serverEnd->intVal = cid;
      serverEnd->end = 1;
      auto chanCon = mkR(RKind::RCon);
      chanCon->gid = gidOf("MkChannel");
      chanCon->args = {serverEnd};
      Proc p;
      p.id = static_cast<int>(procs.size());
      Proc* saved = cur;
      p.current = apply(a[0], chanCon);
      cur = saved;
      procs.push_back(std::move(p));
      auto clientEnd = mkR(RKind::RChan);
      clientEnd->intVal = cid;
      clientEnd->end = 0;
      yieldFlag = true;
      return iores(std::move(clientEnd), w2);
    }
    if (name == "prim__chSend") {
      RV w2 = useWorld(a[2]);
      RV& ch = a[0];
      RtChannel& c = channels.at(ch->intVal);
      int dest = 1 - ch->end;
      c.inbox[dest].push_back(a[1]);
      // wake anyone waiting on that end
      for (auto& p : procs)
        if (p.status == ProcStatus::Blocked && p.blockedChan == ch->intVal &&
            p.blockedEnd == dest)
          p.status = ProcStatus::Runnable;
      yieldFlag = true;
      return iores(ch, w2);
    }
    if (name == "prim__chRecv") {
      RV& ch = a[0];
      RtChannel& c = channels.at(ch->intVal);
      if (c.inbox[ch->end].empty()) throw BlockedOnRecv{(int)ch->intVal, ch->end};
      RV w2 = useWorld(a[1]);
      RV v = c.inbox[ch->end].front();
      c.inbox[ch->end].pop_front();
      auto pair = mkR(RKind::RCon);
      pair->gid = gidOf("MkPair");
      pair->args = {std::move(v), ch};
      yieldFlag = true;
      return iores(std::move(pair), w2);
    }
    if (name == "prim__chClose") {
      RV w2 = useWorld(a[1]);
      RV& ch = a[0];
      RtChannel& c = channels.at(ch->intVal);
      c.closed[ch->end] = true;
      if (c.closed[0] && c.closed[1]) {
        if (!c.inbox[0].empty() || !c.inbox[1].empty())
          throw RuntimeError("channel closed with undelivered messages");
        c.alive = false;
      }
      yieldFlag = true;
      return iores(rUnit(), w2);
    }
    throw RuntimeError("unknown primitive " + name);
  }

  // ---- the L machine ----

  RV runIO(Proc& p, const RV& io) {
    if (io->kind != RKind::RCon || conName(io) != "MkIO")
      throw RuntimeError("expected an IO action");
    auto tok = mkR(RKind::RWorld);
    tok->pid = p.id;
    tok->gen = p.gen;
    RV res = apply(io->args.at(0), tok);
    if (res->kind != RKind::RCon || conName(res) != "MkIORes")
      throw RuntimeError("IO action did not produce a result");
    RV w2 = res->args.at(1);
    if (w2->kind != RKind::RWorld || w2->pid != p.id || w2->gen != p.gen)
      throw StaleWorld("world token lost or duplicated");
    return res->args.at(0);
  }

  void deliver(Proc& p, RV result) {
    if (p.kstack.empty()) {
      p.status = ProcStatus::Finished;
      return;
    }
    auto [k, u] = p.kstack.back();
    p.kstack.pop_back();
    if (u->kind == RKind::RCon && conName(u) == "None") {
      // erased continuation: the binder was dropped, k is the next program
      p.current = std::move(k);
    } else {
      p.current = apply(std::move(k), std::move(result));
    }
  }

  void runSlice(Proc& p) {
    cur = &p;
    while (p.status == ProcStatus::Runnable) {
      yieldFlag = false;
      RV v = p.current;
      if (v->kind != RKind::RCon)
        throw RuntimeError("process state is not a program value");
      const std::string& n = conName(v);
      if (n == "Bind") {
        p.kstack.push_back({v->args.at(2), v->args.at(0)});
        p.current = v->args.at(1);
      } else if (n == "PureW" || n == "Pure1") {
        deliver(p, v->args.at(0));
      } else if (n == "Pure0") {
        deliver(p, nullptr);
      } else if (n == "Act" || n == "Act1") {
        try {
          RV r = runIO(p, v->args.at(0));
          deliver(p, std::move(r));
        } catch (BlockedOnRecv& b) {
          p.status = ProcStatus::Blocked;
          p.blockedChan = b.chanId;
          p.blockedEnd = b.end;
          break;  // p.current unchanged: the action is retried on wakeup
        }
      } else if (n == "MkIO") {
        // a bare IO entry point
        RV r = runIO(p, v);
        (void)r;
        p.status = ProcStatus::Finished;
      } else {
        throw RuntimeError("not a runnable program: " + n);
      }
      if (yieldFlag) break;
    }
    cur = nullptr;
  }

  RunResult run(RV program) {
    RunResult res;
    Proc main;
    main.id = 0;
    main.current = std::move(program);
    procs.push_back(std::move(main));
    try {
      while (true) {
        Proc* next = nullptr;
        for (auto& p : procs)
          if (p.status == ProcStatus::Runnable) {
            next = &p;
            break;
          }
        if (!next) break;
        runSlice(*next);
      }
    } catch (StaleWorld& e) {
      res.exitOk = false;
      res.error = e.what();
    } catch (RuntimeError& e) {
      res.exitOk = false;
      res.error = e.what();
    }
    res.stdoutText = out;
    for (auto& c : channels)
      if (c.alive) ++res.liveChannels;
    for (auto& p : procs) {
      if (p.status == ProcStatus::Blocked) ++res.blockedProcs;
      if (p.status != ProcStatus::Finished && res.error.empty())
        res.exitOk = false;
    }
    if (res.blockedProcs > 0) {
      res.exitOk = false;
      if (res.error.empty()) res.error = "deadlock: blocked processes remain";
    }
    return res;
  }
};

// Evaluate an erased global of runtime arity zero to its program value and
// run it under the scheduler.
inline RunResult runMain(World& w, const std::string& entry,
                         const std::string& stdinText = "") {
  Machine m(w, stdinText);
  const auto* ids = w.globals.lookup(entry);
  RunResult bad;
  bad.exitOk = false;
  if (!ids || ids->empty()) {
    bad.error = "unknown entry point '" + entry + "'";
    return bad;
  }
  int gid = (*ids)[0];
  const GlobalDef& def = w.globals[gid];
  if (def.kind != GlobalKind::Function || !def.rtTree || def.rtArity != 0) {
    bad.error = "'" + entry + "' is not a runnable nullary definition";
    return bad;
  }
  try {
    RV prog = m.runTree(def.rtTree, {}, def.name);
    return m.run(std::move(prog));
  } catch (RuntimeError& e) {
    bad.error = e.what();
    return bad;
  }
}

}  // namespace qtt
