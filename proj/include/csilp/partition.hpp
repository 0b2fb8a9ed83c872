#pragma once

#include <algorithm>
#include <cstdint>

#include "state.hpp"

namespace csilp {

// Column selection for interval partitions: a permutation of the free components
// plus, per column, the order in which that column consumes its later partners.
// partners[i] is always a permutation of the tail set {columns[i+1..]}; splitting a
// column by its own partner order is still an exact partition of the column, which
// is what makes per-column failure-pair contiguity achievable in general.
struct ColumnOrder {
  std::vector<ComponentId> columns;
  std::vector<std::vector<ComponentId>> partners;
};

// Fills tail partner orders for a given column permutation.
inline ColumnOrder make_column_order(std::vector<ComponentId> columns) {
  ColumnOrder o;
  o.partners.resize(columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i)
    o.partners[i].assign(columns.begin() + std::ptrdiff_t(i) + 1, columns.end());
  o.columns = std::move(columns);
  return o;
}

inline ColumnOrder identity_order(const Lattice& l) { return make_column_order(l.free_components()); }

inline void validate_order(const Lattice& l, const ColumnOrder& o) {
  std::vector<ComponentId> free = l.free_components();
  std::vector<ComponentId> cols = o.columns;
  std::sort(cols.begin(), cols.end());
  if (cols != free) throw std::invalid_argument("column order is not a permutation of the free components");
  if (o.partners.size() != o.columns.size())
    throw std::invalid_argument("column order carries wrong partner list count");
  for (std::size_t i = 0; i < o.columns.size(); ++i) {
    std::vector<ComponentId> tail(o.columns.begin() + std::ptrdiff_t(i) + 1, o.columns.end());
    std::vector<ComponentId> part = o.partners[i];
    std::sort(tail.begin(), tail.end());
    std::sort(part.begin(), part.end());
    if (tail != part) throw std::invalid_argument("partner order is not a permutation of the column tail");
  }
}

// a_i: the i-th relative 1-level state (1-based; a_0 is the lower bound).
inline SystemState conjugate_a(const Lattice& l, const ColumnOrder& o, std::uint32_t i) {
  if (i > o.columns.size()) throw std::invalid_argument("conjugate index out of range");
  SystemState s = l.lower;
  if (i >= 1) s.set(o.columns[i - 1]);
  return s;
}

// t_i: join of a_i..a_n (i in 1..n+1; t_{n+1} is the lower bound by convention).
inline SystemState conjugate_t(const Lattice& l, const ColumnOrder& o, std::uint32_t i) {
  std::uint32_t n = std::uint32_t(o.columns.size());
  if (i < 1 || i > n + 1) throw std::invalid_argument("conjugate index out of range");
  SystemState s = l.lower;
  for (std::uint32_t k = i; k <= n; ++k) s.set(o.columns[k - 1]);
  return s;
}

// t_ij: join of a_ik for k = j..n within column i, under column i's partner order
// (j in i+1..n+1; t_{i,n+1} is a_i by convention).
inline SystemState conjugate_t2(const Lattice& l, const ColumnOrder& o, std::uint32_t i, std::uint32_t j) {
  std::uint32_t n = std::uint32_t(o.columns.size());
  if (i < 1 || i > n || j <= i || j > n + 1) throw std::invalid_argument("conjugate pair index out of range");
  SystemState s = conjugate_a(l, o, i);
  const std::vector<ComponentId>& part = o.partners[i - 1];
  for (std::uint32_t k = j; k <= n; ++k) s.set(part[k - i - 1]);
  return s;
}

struct PartitionResult {
  std::vector<Lattice> failure_lattices;
  std::vector<Lattice> one_normal_lattices;
  std::vector<Lattice> normal_lattices;

  std::size_t cell_count() const {
    return failure_lattices.size() + one_normal_lattices.size() + normal_lattices.size();
  }
};

// Partition around 1-level states: cells [a_i, t_i] for i = 1..m plus the
// remainder [lower, t_{m+1}]. When the caller orders failed 1-level states first
// and sets m to their count, the leading cells are failure lattices and the
// remainder is 1-normal.
inline PartitionResult partition_by_level1(const Lattice& l, const ColumnOrder& o, std::uint32_t m) {
  validate_order(l, o);
  std::uint32_t n = std::uint32_t(o.columns.size());
  if (m < 1 || m > n) throw std::invalid_argument("partition depth m outside 1..dimension");
  PartitionResult res;
  for (std::uint32_t i = 1; i <= m; ++i)
    res.failure_lattices.emplace_back(conjugate_a(l, o, i), conjugate_t(l, o, i));
  res.one_normal_lattices.emplace_back(l.lower, conjugate_t(l, o, m + 1));
  return res;
}

// Column index (0-based) owning a 2-level state, plus its partner component.
namespace detail {
struct PairSlot {
  std::uint32_t column;
  ComponentId partner;
};

inline PairSlot pair_slot(const Lattice& l, const ColumnOrder& o, const SystemState& pair) {
  if (!l.contains(pair) || level(pair) != level(l.lower) + 2)
    throw std::invalid_argument("failure pair " + to_string(pair) + " is not a relative 2-level state of the lattice");
  std::uint32_t first = std::uint32_t(o.columns.size());
  ComponentId other = 0;
  for (std::uint32_t i = 0; i < o.columns.size(); ++i) {
    ComponentId c = o.columns[i];
    if (!pair.test(c) || l.lower.test(c)) continue;
    if (first == o.columns.size())
      first = i;
    else
      other = c;
  }
  return {first, other};
}
}  // namespace detail

// Partition of a 1-normal lattice around its 2-level states (failure_pairs among
// them). Emits, per failure-bearing column, one failure lattice per failure pair
// and the column remainder as a 1-normal cell; trailing columns past the last
// failure-bearing one collapse into [lower, t_{m+1}], certified normal when its
// top is a relative <=2-level state (already evaluated by the caller).
// With no failure pairs at all, a dimension-2 lattice is returned unchanged as
// normal; larger lattices split into their columns so every cell is strictly
// smaller than the input.
inline PartitionResult partition_by_level2(const Lattice& l, const ColumnOrder& o,
                                           const std::vector<SystemState>& failure_pairs) {
  validate_order(l, o);
  std::uint32_t n = std::uint32_t(o.columns.size());
  if (n < 2) throw std::invalid_argument("level-2 partition requires dimension >= 2");

  // Assign each pair to the column of its earlier free component.
  std::vector<std::vector<ComponentId>> fail_partners(n);
  for (const SystemState& pair : failure_pairs) {
    detail::PairSlot slot = detail::pair_slot(l, o, pair);
    fail_partners[slot.column].push_back(slot.partner);
  }

  // Failure pairs must occupy a prefix of each column's partner order.
  std::vector<std::uint32_t> fail_count(n, 0);
  std::uint32_t m = 0;  // last failure-bearing column, 1-based
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint32_t f = std::uint32_t(fail_partners[i].size());
    fail_count[i] = f;
    if (f == 0) continue;
    m = i + 1;
    const std::vector<ComponentId>& part = o.partners[i];
    std::vector<ComponentId> prefix(part.begin(), part.begin() + f);
    std::vector<ComponentId> want = fail_partners[i];
    std::sort(prefix.begin(), prefix.end());
    std::sort(want.begin(), want.end());
    if (std::adjacent_find(want.begin(), want.end()) != want.end())
      throw std::invalid_argument("duplicate failure pair supplied");
    if (prefix != want)
      throw std::invalid_argument("failure pairs are not contiguous under the supplied column order");
  }

  PartitionResult res;
  if (m == 0) {
    if (n <= 2) {
      res.normal_lattices.push_back(l);
    } else {
      for (std::uint32_t i = 1; i <= n - 1; ++i)
        res.one_normal_lattices.emplace_back(conjugate_a(l, o, i), conjugate_t(l, o, i));
      res.normal_lattices.emplace_back(l.lower, conjugate_a(l, o, n));
    }
    return res;
  }

  for (std::uint32_t i = 1; i <= m; ++i) {
    SystemState a_i = conjugate_a(l, o, i);
    std::uint32_t f = fail_count[i - 1];
    for (std::uint32_t k = 0; k < f; ++k) {
      // cell [a_ij, t_ij] for j = i+1+k
      std::uint32_t j = i + 1 + k;
      SystemState a_ij = a_i;
      a_ij.set(o.partners[i - 1][k]);
      res.failure_lattices.emplace_back(a_ij, conjugate_t2(l, o, i, j));
    }
    // column remainder [a_i, t_{i,f+i+1}]; the whole column when f = 0
    res.one_normal_lattices.emplace_back(a_i, conjugate_t2(l, o, i, i + 1 + f));
  }

  Lattice tail(l.lower, conjugate_t(l, o, m + 1));
  if (tail.dimension() <= 2)
    res.normal_lattices.push_back(std::move(tail));
  else
    res.one_normal_lattices.push_back(std::move(tail));
  return res;
}

// Deterministic order choice: components incident to a failure pair first in
// ascending id, failure-free components after; within a column, failure partners
// first (ascending), remaining partners after (ascending). This reproduces the
// worked partitions and keeps failure pairs contiguous per column.
inline ColumnOrder choose_order(const Lattice& l, const std::vector<SystemState>& failure_pairs) {
  std::vector<ComponentId> free = l.free_components();
  std::vector<std::vector<ComponentId>> mates;  // per free component, its failure partners
  mates.resize(free.size());
  std::vector<std::uint32_t> slot(l.lower.n + 1, std::uint32_t(-1));
  for (std::size_t i = 0; i < free.size(); ++i) slot[free[i]] = std::uint32_t(i);

  for (const SystemState& pair : failure_pairs) {
    std::vector<ComponentId> two;
    for (ComponentId c : pair.components())
      if (!l.lower.test(c)) two.push_back(c);
    if (two.size() != 2 || !l.contains(pair))
      throw std::invalid_argument("failure pair " + to_string(pair) + " is not a relative 2-level state of the lattice");
    mates[slot[two[0]]].push_back(two[1]);
    mates[slot[two[1]]].push_back(two[0]);
  }

  ColumnOrder o;
  for (ComponentId c : free)
    if (!mates[slot[c]].empty()) o.columns.push_back(c);
  for (ComponentId c : free)
    if (mates[slot[c]].empty()) o.columns.push_back(c);

  o.partners.resize(o.columns.size());
  std::vector<char> placed(l.lower.n + 1, 0);
  for (std::size_t i = 0; i < o.columns.size(); ++i) {
    ComponentId c = o.columns[i];
    placed[c] = 1;
    std::vector<ComponentId>& out = o.partners[i];
    std::vector<ComponentId> fail = mates[slot[c]];
    std::sort(fail.begin(), fail.end());
    fail.erase(std::unique(fail.begin(), fail.end()), fail.end());
    for (ComponentId d : fail)
      if (!placed[d]) out.push_back(d);
    for (std::size_t k = i + 1; k < o.columns.size(); ++k) {
      ComponentId d = o.columns[k];
      if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
    }
  }
  return o;
}

}  // namespace csilp
