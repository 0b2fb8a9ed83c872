#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace csilp {

using ComponentId = std::uint32_t;

// State of an n-component system as a packed bit vector.
// Bit (i-1) set <=> component i is failed. The partial order is set inclusion.
struct SystemState {
  std::uint32_t n = 0;
  std::vector<std::uint64_t> words;  // ceil(n/64) words, unused high bits stay zero

  SystemState() = default;
  explicit SystemState(std::uint32_t n_) : n(n_), words((n_ + 63u) / 64u, 0) {}

  static SystemState from_components(std::uint32_t n, const std::vector<ComponentId>& ids) {
    SystemState s(n);
    for (ComponentId id : ids) s.set(id);
    return s;
  }

  bool test(ComponentId id) const {
    check_id(id);
    return (words[(id - 1u) >> 6] >> ((id - 1u) & 63u)) & 1u;
  }
  void set(ComponentId id) {
    check_id(id);
    words[(id - 1u) >> 6] |= std::uint64_t(1) << ((id - 1u) & 63u);
  }
  void reset(ComponentId id) {
    check_id(id);
    words[(id - 1u) >> 6] &= ~(std::uint64_t(1) << ((id - 1u) & 63u));
  }

  // Failed components in ascending id order.
  std::vector<ComponentId> components() const {
    std::vector<ComponentId> out;
    for (std::size_t w = 0; w < words.size(); ++w) {
      std::uint64_t x = words[w];
      while (x) {
        out.push_back(ComponentId(w * 64 + std::uint32_t(std::countr_zero(x)) + 1));
        x &= x - 1;
      }
    }
    return out;
  }

  bool operator==(const SystemState& o) const { return n == o.n && words == o.words; }
  bool operator!=(const SystemState& o) const { return !(*this == o); }

 private:
  void check_id(ComponentId id) const {
    if (id < 1 || id > n) throw std::out_of_range("component id " + std::to_string(id) + " outside 1.." + std::to_string(n));
  }
};

inline void check_same_universe(const SystemState& a, const SystemState& b) {
  if (a.n != b.n) throw std::invalid_argument("states belong to different component universes");
}

// Number of failed components.
inline std::uint32_t level(const SystemState& s) {
  std::uint32_t c = 0;
  for (std::uint64_t w : s.words) c += std::uint32_t(std::popcount(w));
  return c;
}

// Subset order: every component failed in s is failed in t.
inline bool leq(const SystemState& s, const SystemState& t) {
  check_same_universe(s, t);
  for (std::size_t i = 0; i < s.words.size(); ++i)
    if (s.words[i] & ~t.words[i]) return false;
  return true;
}

inline SystemState join(const SystemState& s, const SystemState& t) {
  check_same_universe(s, t);
  SystemState r(s.n);
  for (std::size_t i = 0; i < s.words.size(); ++i) r.words[i] = s.words[i] | t.words[i];
  return r;
}

inline SystemState meet(const SystemState& s, const SystemState& t) {
  check_same_universe(s, t);
  SystemState r(s.n);
  for (std::size_t i = 0; i < s.words.size(); ++i) r.words[i] = s.words[i] & t.words[i];
  return r;
}

// Complement within the universe (every component flips).
inline SystemState complement(const SystemState& s) {
  SystemState r(s.n);
  for (std::size_t i = 0; i < s.words.size(); ++i) r.words[i] = ~s.words[i];
  if (!r.words.empty() && (s.n & 63u)) r.words.back() &= (std::uint64_t(1) << (s.n & 63u)) - 1;
  return r;
}

// Total order used for deterministic discovery bookkeeping: the state containing
// the smallest differing component precedes. On equal-level states this is the
// lexicographic order of the sorted component lists.
inline bool lex_less(const SystemState& s, const SystemState& t) {
  check_same_universe(s, t);
  for (std::size_t i = 0; i < s.words.size(); ++i) {
    std::uint64_t d = s.words[i] ^ t.words[i];
    if (d) {
      std::uint64_t low = d & ~(d - 1);
      return (s.words[i] & low) != 0;
    }
  }
  return false;
}

// "{1,3,5}" for diagnostics.
inline std::string to_string(const SystemState& s) {
  std::string out = "{";
  bool first = true;
  for (ComponentId id : s.components()) {
    if (!first) out += ",";
    out += std::to_string(id);
    first = false;
  }
  return out + "}";
}

struct StateHash {
  std::size_t operator()(const SystemState& s) const {
    std::uint64_t h = 0xcbf29ce484222325ull ^ s.n;
    for (std::uint64_t w : s.words) {
      h ^= w;
      h *= 0x100000001b3ull;
      h ^= h >> 29;
    }
    return std::size_t(h);
  }
};

// Per-component failure probabilities p_i; availability q_i = 1 - p_i.
struct ComponentReliability {
  std::vector<double> p;  // index i-1 -> component i

  ComponentReliability() = default;
  explicit ComponentReliability(std::vector<double> probs) : p(std::move(probs)) {
    for (double v : p)
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("failure probability outside [0,1]");
  }
  static ComponentReliability uniform(std::uint32_t n, double prob) {
    return ComponentReliability(std::vector<double>(n, prob));
  }
  std::uint32_t n() const { return std::uint32_t(p.size()); }
};

// P(s) = prod_{i in s} p_i * prod_{i not in s} (1 - p_i).
inline double state_probability(const SystemState& s, const ComponentReliability& rel) {
  if (rel.n() != s.n) throw std::invalid_argument("reliability vector does not match universe");
  double prod = 1.0;
  for (std::uint32_t i = 1; i <= s.n; ++i) prod *= s.test(i) ? rel.p[i - 1] : 1.0 - rel.p[i - 1];
  return prod;
}

// Interval [lower, upper] in the subset order.
struct Lattice {
  SystemState lower;
  SystemState upper;

  Lattice() = default;
  Lattice(SystemState lo, SystemState up) : lower(std::move(lo)), upper(std::move(up)) {
    if (!leq(lower, upper)) throw std::invalid_argument("lattice requires lower <= upper");
  }

  std::uint32_t dimension() const { return level(upper) - level(lower); }

  bool contains(const SystemState& s) const { return leq(lower, s) && leq(s, upper); }

  // Components free to vary inside the interval, ascending id.
  std::vector<ComponentId> free_components() const {
    std::vector<ComponentId> out;
    for (std::size_t i = 0; i < upper.words.size(); ++i) {
      std::uint64_t x = upper.words[i] & ~lower.words[i];
      while (x) {
        out.push_back(ComponentId(i * 64 + std::uint32_t(std::countr_zero(x)) + 1));
        x &= x - 1;
      }
    }
    return out;
  }

  bool operator==(const Lattice& o) const { return lower == o.lower && upper == o.upper; }
  bool operator!=(const Lattice& o) const { return !(*this == o); }
};

// P([lo,up]) = prod_{i in lo} p_i * prod_{i not in up} q_i; free components integrate out.
inline double lattice_probability(const Lattice& l, const ComponentReliability& rel) {
  if (rel.n() != l.lower.n) throw std::invalid_argument("reliability vector does not match universe");
  double prod = 1.0;
  for (std::uint32_t i = 1; i <= l.lower.n; ++i) {
    if (l.lower.test(i))
      prod *= rel.p[i - 1];
    else if (!l.upper.test(i))
      prod *= 1.0 - rel.p[i - 1];
  }
  return prod;
}

// Members at relative level k (k free components added to lower), in lexicographic
// order of the chosen free-component index tuples.
inline std::vector<SystemState> lattice_members(const Lattice& l, std::uint32_t k) {
  std::uint32_t dim = l.dimension();
  if (k > dim) throw std::invalid_argument("relative level exceeds lattice dimension");
  std::vector<ComponentId> free = l.free_components();
  std::vector<SystemState> out;
  if (k == 0) {
    out.push_back(l.lower);
    return out;
  }
  std::vector<std::uint32_t> idx(k);
  for (std::uint32_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    SystemState s = l.lower;
    for (std::uint32_t i : idx) s.set(free[i]);
    out.push_back(std::move(s));
    // advance combination
    std::int64_t pos = std::int64_t(k) - 1;
    while (pos >= 0 && idx[std::size_t(pos)] == dim - k + std::uint32_t(pos)) --pos;
    if (pos < 0) break;
    ++idx[std::size_t(pos)];
    for (std::size_t j = std::size_t(pos) + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace csilp

template <>
struct std::hash<csilp::SystemState> {
  std::size_t operator()(const csilp::SystemState& s) const { return csilp::StateHash{}(s); }
};
