#pragma once

#include <algorithm>
#include <mutex>
#include <tuple>
#include <utility>
#include <vector>

#include "wishmom/bigint.hpp"
#include "wishmom/errors.hpp"
#include "wishmom/nu_polynomial.hpp"

namespace wishmom {

// Enumeration grows factorially; anything above the cap is refused rather
// than allowed to hang.
inline constexpr int kDefaultEnumerationCap = 8;

/**
 * A partition of the vertex set {1,...,2n} into unordered pairs and
 * singletons, stored canonically: each pair (i,j) with i < j, the pair list
 * sorted lexicographically, singletons ascending.
 */
struct PairPartition {
  int n = 0;  // vertices are 1..2n
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> singletons;

  bool operator==(const PairPartition&) const = default;
};

/**
 * An injection from a subset of {1,...,n} into {1,...,n}, stored as
 * (source, target) entries sorted by source.  Sources and targets are each
 * distinct; the map need not be a bijection.
 */
struct PartialInjection {
  int n = 0;  // vertices are 1..n
  std::vector<std::pair<int, int>> mapping;

  bool operator==(const PartialInjection&) const = default;
};

/**
 * Result of decomposing the pairing graph into connected components.
 * Every component is either a cycle or a chain; chain_terminals holds one
 * entry per chain.  In the undirected case the terminal pair is unordered
 * (stored min-first); in the directed case it is (end, start), where end has
 * no outgoing edge and start has no incoming edge.
 */
struct ComponentSummary {
  int added_edges = 0;  // m
  int cycles = 0;       // len(G)
  std::vector<std::pair<int, int>> chain_terminals;

  int chains() const { return static_cast<int>(chain_terminals.size()); }

  bool operator==(const ComponentSummary&) const = default;
};

inline void validate(const PairPartition& p) {
  if (p.n < 1) throw DomainError("PairPartition: n must be >= 1");
  std::vector<int> seen(static_cast<std::size_t>(2 * p.n) + 1, 0);
  for (const auto& [i, j] : p.pairs) {
    if (i < 1 || j < 1 || i > 2 * p.n || j > 2 * p.n)
      throw DomainError("PairPartition: vertex out of range");
    if (i >= j) throw DomainError("PairPartition: pair not stored min-first");
    ++seen[static_cast<std::size_t>(i)];
    ++seen[static_cast<std::size_t>(j)];
  }
  for (int v : p.singletons) {
    if (v < 1 || v > 2 * p.n) throw DomainError("PairPartition: vertex out of range");
    ++seen[static_cast<std::size_t>(v)];
  }
  for (int v = 1; v <= 2 * p.n; ++v)
    if (seen[static_cast<std::size_t>(v)] != 1)
      throw DomainError("PairPartition: vertices not covered exactly once");
  if (!std::is_sorted(p.pairs.begin(), p.pairs.end()))
    throw DomainError("PairPartition: pair list not sorted");
  if (!std::is_sorted(p.singletons.begin(), p.singletons.end()))
    throw DomainError("PairPartition: singletons not sorted");
}

inline void validate(const PartialInjection& q) {
  if (q.n < 1) throw DomainError("PartialInjection: n must be >= 1");
  std::vector<int> src(static_cast<std::size_t>(q.n) + 1, 0),
      tgt(static_cast<std::size_t>(q.n) + 1, 0);
  for (const auto& [i, j] : q.mapping) {
    if (i < 1 || i > q.n || j < 1 || j > q.n)
      throw DomainError("PartialInjection: vertex out of range");
    ++src[static_cast<std::size_t>(i)];
    ++tgt[static_cast<std::size_t>(j)];
  }
  for (int v = 1; v <= q.n; ++v)
    if (src[static_cast<std::size_t>(v)] > 1 || tgt[static_cast<std::size_t>(v)] > 1)
      throw DomainError("PartialInjection: sources/targets not distinct");
  if (!std::is_sorted(q.mapping.begin(), q.mapping.end()))
    throw DomainError("PartialInjection: mapping not sorted by source");
}

namespace detail {

template <typename Visitor>
void pair_partitions_rec(int two_n, int from, std::vector<bool>& used,
                         PairPartition& part, Visitor& visit) {
  int v = from;
  while (v <= two_n && used[static_cast<std::size_t>(v)]) ++v;
  if (v > two_n) {
    visit(const_cast<const PairPartition&>(part));
    return;
  }
  used[static_cast<std::size_t>(v)] = true;
  part.singletons.push_back(v);
  pair_partitions_rec(two_n, v + 1, used, part, visit);
  part.singletons.pop_back();
  for (int w = v + 1; w <= two_n; ++w) {
    if (used[static_cast<std::size_t>(w)]) continue;
    used[static_cast<std::size_t>(w)] = true;
    part.pairs.emplace_back(v, w);
    pair_partitions_rec(two_n, v + 1, used, part, visit);
    part.pairs.pop_back();
    used[static_cast<std::size_t>(w)] = false;
  }
  used[static_cast<std::size_t>(v)] = false;
}

template <typename Visitor>
void partial_injections_rec(int n, int source, std::vector<bool>& taken,
                            PartialInjection& inj, Visitor& visit) {
  if (source > n) {
    visit(const_cast<const PartialInjection&>(inj));
    return;
  }
  partial_injections_rec(n, source + 1, taken, inj, visit);  // source unmapped
  for (int target = 1; target <= n; ++target) {
    if (taken[static_cast<std::size_t>(target)]) continue;
    taken[static_cast<std::size_t>(target)] = true;
    inj.mapping.emplace_back(source, target);
    partial_injections_rec(n, source + 1, taken, inj, visit);
    inj.mapping.pop_back();
    taken[static_cast<std::size_t>(target)] = false;
  }
}

}  // namespace detail

/**
 * Visits every partition of {1,...,2n} into pairs and singletons exactly
 * once.  Deterministic order: recursing on the smallest unplaced vertex, the
 * singleton branch comes first, then pairing with each larger unplaced vertex
 * in increasing order.  The visited object is reused between calls; copy it
 * if it must outlive the visit.
 */
template <typename Visitor>
void enumerate_pair_partitions(int n, Visitor&& visit,
                               int cap = kDefaultEnumerationCap) {
  if (n < 1) throw DomainError("enumerate_pair_partitions: n must be >= 1");
  if (n > cap)
    throw LimitExceeded("enumerate_pair_partitions: n=" + std::to_string(n) +
                        " exceeds cap " + std::to_string(cap));
  PairPartition part;
  part.n = n;
  std::vector<bool> used(static_cast<std::size_t>(2 * n) + 1, false);
  detail::pair_partitions_rec(2 * n, 1, used, part, visit);
}

/**
 * Visits every (subset, injection) pair on {1,...,n} exactly once, smallest
 * source first, the unmapped branch before each target in increasing order.
 */
template <typename Visitor>
void enumerate_partial_injections(int n, Visitor&& visit,
                                  int cap = kDefaultEnumerationCap) {
  if (n < 1) throw DomainError("enumerate_partial_injections: n must be >= 1");
  if (n > cap)
    throw LimitExceeded("enumerate_partial_injections: n=" + std::to_string(n) +
                        " exceeds cap " + std::to_string(cap));
  PartialInjection inj;
  inj.n = n;
  std::vector<bool> taken(static_cast<std::size_t>(n) + 1, false);
  detail::partial_injections_rec(n, 1, taken, inj, visit);
}

inline std::vector<PairPartition> all_pair_partitions(
    int n, int cap = kDefaultEnumerationCap) {
  std::vector<PairPartition> out;
  enumerate_pair_partitions(n, [&](const PairPartition& p) { out.push_back(p); }, cap);
  return out;
}

inline std::vector<PartialInjection> all_partial_injections(
    int n, int cap = kDefaultEnumerationCap) {
  std::vector<PartialInjection> out;
  enumerate_partial_injections(
      n, [&](const PartialInjection& q) { out.push_back(q); }, cap);
  return out;
}

/**
 * Builds G = (V, E0 u E) where E0 = {(1,2),...,(2n-1,2n)} are the solid
 * edges and E the partition's pairs, then classifies components.  Chain
 * terminals are exactly the partition's singletons, paired up by walking
 * each chain; the remaining components are cycles.
 */
inline ComponentSummary analyze_real_graph(const PairPartition& p) {
  const int two_n = 2 * p.n;
  // partner[v] over dashed edges, 0 when v is a singleton
  std::vector<int> dashed(static_cast<std::size_t>(two_n) + 1, 0);
  for (const auto& [i, j] : p.pairs) {
    dashed[static_cast<std::size_t>(i)] = j;
    dashed[static_cast<std::size_t>(j)] = i;
  }
  auto solid = [](int v) { return (v % 2 == 1) ? v + 1 : v - 1; };

  ComponentSummary out;
  out.added_edges = static_cast<int>(p.pairs.size());
  std::vector<bool> visited(static_cast<std::size_t>(two_n) + 1, false);

  // walk chains from each singleton: alternate solid, dashed, solid, ...
  for (int s : p.singletons) {
    if (visited[static_cast<std::size_t>(s)]) continue;
    int v = s;
    visited[static_cast<std::size_t>(v)] = true;
    for (;;) {
      int w = solid(v);
      visited[static_cast<std::size_t>(w)] = true;
      int next = dashed[static_cast<std::size_t>(w)];
      if (next == 0) {  // other terminal reached
        out.chain_terminals.emplace_back(std::min(s, w), std::max(s, w));
        break;
      }
      v = next;
      visited[static_cast<std::size_t>(v)] = true;
    }
  }
  std::sort(out.chain_terminals.begin(), out.chain_terminals.end());

  // everything not on a chain lies on a cycle
  for (int v = 1; v <= two_n; ++v) {
    if (visited[static_cast<std::size_t>(v)]) continue;
    ++out.cycles;
    int u = v;
    while (!visited[static_cast<std::size_t>(u)]) {
      visited[static_cast<std::size_t>(u)] = true;
      int w = solid(u);
      visited[static_cast<std::size_t>(w)] = true;
      u = dashed[static_cast<std::size_t>(w)];
    }
  }
  return out;
}

/**
 * Classifies the functional digraph of a partial injection.  Chains report
 * (end, start) ordered; an isolated vertex v reports (v, v).
 */
inline ComponentSummary analyze_directed_graph(const PartialInjection& q) {
  std::vector<int> next(static_cast<std::size_t>(q.n) + 1, 0);
  std::vector<bool> has_in(static_cast<std::size_t>(q.n) + 1, false);
  for (const auto& [i, j] : q.mapping) {
    next[static_cast<std::size_t>(i)] = j;
    has_in[static_cast<std::size_t>(j)] = true;
  }

  ComponentSummary out;
  out.added_edges = static_cast<int>(q.mapping.size());
  std::vector<bool> visited(static_cast<std::size_t>(q.n) + 1, false);

  for (int s = 1; s <= q.n; ++s) {
    if (has_in[static_cast<std::size_t>(s)]) continue;  // not a chain start
    int v = s;
    visited[static_cast<std::size_t>(v)] = true;
    while (next[static_cast<std::size_t>(v)] != 0) {
      v = next[static_cast<std::size_t>(v)];
      visited[static_cast<std::size_t>(v)] = true;
    }
    out.chain_terminals.emplace_back(v, s);  // (end, start)
  }
  std::sort(out.chain_terminals.begin(), out.chain_terminals.end());

  for (int v = 1; v <= q.n; ++v) {
    if (visited[static_cast<std::size_t>(v)]) continue;
    ++out.cycles;
    int u = v;
    while (!visited[static_cast<std::size_t>(u)]) {
      visited[static_cast<std::size_t>(u)] = true;
      u = next[static_cast<std::size_t>(u)];
    }
  }
  return out;
}

namespace detail {

// Lazily grown table for the cycle-count coefficients.  Layer n is computed
// from layer n-1; once written, layers are immutable.  `weight` is 2 for the
// undirected recurrence and 1 for the directed one.
class CycleCountTable {
 public:
  explicit CycleCountTable(int weight) : weight_(weight) {
    layers_.push_back({});             // n = 0 unused
    layers_.push_back({{1}, {0, 1}});  // n = 1: m=0 -> [1], m=1 -> [0,1]
  }

  BigInt get(int l, int m, int n) {
    if (l < 0 || m < 0 || n < 1 || m > n || l > m) return 0;
    std::lock_guard<std::mutex> lock(mutex_);
    while (static_cast<int>(layers_.size()) <= n) extend();
    const auto& row = layers_[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
    return l < static_cast<int>(row.size()) ? row[static_cast<std::size_t>(l)] : BigInt(0);
  }

 private:
  void extend() {
    const int n = static_cast<int>(layers_.size());
    const auto& prev = layers_.back();
    std::vector<std::vector<BigInt>> layer(static_cast<std::size_t>(n) + 1);
    layer[0] = {1};
    for (int m = 1; m <= n; ++m) {
      auto& row = layer[static_cast<std::size_t>(m)];
      row.assign(static_cast<std::size_t>(m) + 1, BigInt(0));
      const auto get_prev = [&](int mm, int ll) -> BigInt {
        if (mm < 0 || mm >= n || ll < 0 || ll > mm) return 0;
        const auto& r = prev[static_cast<std::size_t>(mm)];
        return ll < static_cast<int>(r.size()) ? r[static_cast<std::size_t>(ll)]
                                               : BigInt(0);
      };
      for (int l = 0; l <= m; ++l) {
        row[static_cast<std::size_t>(l)] =
            BigInt(weight_) * (2 * n - m - 1) * get_prev(m - 1, l) +
            get_prev(m - 1, l - 1) + get_prev(m, l);
      }
    }
    layers_.push_back(std::move(layer));
  }

  int weight_;
  std::mutex mutex_;
  std::vector<std::vector<std::vector<BigInt>>> layers_;  // [n][m][l]
};

inline CycleCountTable& f_table() {
  static CycleCountTable table(2);
  return table;
}

inline CycleCountTable& g_table() {
  static CycleCountTable table(1);
  return table;
}

}  // namespace detail

// Number of undirected pairing graphs on 2n vertices with m dashed edges and
// l cycles.  Out-of-support queries (m > n, l > m, negatives) return 0.
inline BigInt coeff_f(int l, int m, int n) { return detail::f_table().get(l, m, n); }

// Directed analogue over partial injections.
inline BigInt coeff_g(int l, int m, int n) { return detail::g_table().get(l, m, n); }

// Generating polynomial of coeff_f in the cycle count:
// binom(n,m) * prod_{i=1..m} (nu + 2(n-i)).
inline NuPolynomial phi(int m, int n) {
  if (n < 1) throw DomainError("phi: n must be >= 1");
  if (m < 0 || m > n) throw DomainError("phi: m out of range [0, n]");
  NuPolynomial p = NuPolynomial::constant(binomial(n, m));
  for (int i = 1; i <= m; ++i) p *= NuPolynomial{BigInt(2 * (n - i)), BigInt(1)};
  return p;
}

// Generating polynomial of coeff_g: binom(n,m) * prod_{i=1..m} (nu + n - i).
inline NuPolynomial psi(int m, int n) {
  if (n < 1) throw DomainError("psi: n must be >= 1");
  if (m < 0 || m > n) throw DomainError("psi: m out of range [0, n]");
  NuPolynomial p = NuPolynomial::constant(binomial(n, m));
  for (int i = 1; i <= m; ++i) p *= NuPolynomial{BigInt(n - i), BigInt(1)};
  return p;
}

// Noncentral Stirling number of the first kind: the coefficient of nu^l in
// prod_{i=1..m} (nu + n - i).
inline BigInt noncentral_stirling(int n, int m, int l) {
  if (l < 0 || m < l || n < m)
    throw DomainError("noncentral_stirling: need 0 <= l <= m <= n");
  NuPolynomial p = NuPolynomial::constant(1);
  for (int i = 1; i <= m; ++i) p *= NuPolynomial{BigInt(n - i), BigInt(1)};
  return p.coeff(l);
}

}  // namespace wishmom
