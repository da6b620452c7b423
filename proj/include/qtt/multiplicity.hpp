#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace qtt {

// The three-point quantity semiring {0, 1, w}. Addition saturates: two
// definite uses already exceed a linear budget, so One + One = Omega.
enum class Mult : uint8_t { Zero = 0, One = 1, Omega = 2 };

inline Mult multAdd(Mult a, Mult b) {
  if (a == Mult::Zero) return b;
  if (b == Mult::Zero) return a;
  return Mult::Omega;
}

inline Mult multMul(Mult a, Mult b) {
  if (a == Mult::Zero || b == Mult::Zero) return Mult::Zero;
  if (a == Mult::One) return b;
  if (b == Mult::One) return a;
  return Mult::Omega;
}

// A declared-0 binder must be unused, a declared-1 binder used exactly
// once, and a declared-w binder is unconstrained.
inline bool multAdmissible(Mult declared, Mult used) {
  switch (declared) {
    case Mult::Zero: return used == Mult::Zero;
    case Mult::One: return used == Mult::One;
    case Mult::Omega: return true;
  }
  return false;
}

// Display convention from hole printouts: omega is shown as a blank.
inline std::string multShow(Mult m) {
  switch (m) {
    case Mult::Zero: return "0";
    case Mult::One: return "1";
    case Mult::Omega: return "";
  }
  return "";
}

inline char multChar(Mult m) {
  switch (m) {
    case Mult::Zero: return '0';
    case Mult::One: return '1';
    case Mult::Omega: return ' ';
  }
  return ' ';
}

// Per-variable usage counts for a typing context, keyed by de Bruijn
// level. Absent entries mean Zero.
struct UsageVector {
  std::map<int, Mult> counts;
  bool hasHole = false;  // a hole absorbs any unconsumed linear budget

  Mult get(int level) const {
    auto it = counts.find(level);
    return it == counts.end() ? Mult::Zero : it->second;
  }

  void use(int level, Mult m) {
    if (m == Mult::Zero) return;
    counts[level] = multAdd(get(level), m);
  }

  void addAll(const UsageVector& other) {
    for (auto& [lvl, m] : other.counts) use(lvl, m);
    hasHole = hasHole || other.hasHole;
  }

  // Pointwise max; used when combining case branches, where each run
  // takes exactly one branch.
  void maxAll(const UsageVector& other) {
    for (auto& [lvl, m] : other.counts) {
      Mult cur = get(lvl);
      if (static_cast<int>(m) > static_cast<int>(cur)) counts[lvl] = m;
    }
    hasHole = hasHole || other.hasHole;
  }
};

}  // namespace qtt
