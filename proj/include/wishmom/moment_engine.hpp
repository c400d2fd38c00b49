#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "wishmom/bigint.hpp"
#include "wishmom/combinatorics.hpp"
#include "wishmom/errors.hpp"
#include "wishmom/moment_spec.hpp"
#include "wishmom/wishart_params.hpp"

namespace wishmom {

/**
 * One collected term nu^k * prod sigma_(i,j) * prod delta_(i,j).  Factor
 * lists are sorted multisets; real-flavor pairs are stored min-first.
 */
struct MomentMonomial {
  int nu_exp = 0;
  std::vector<std::pair<int, int>> sigma;
  std::vector<std::pair<int, int>> delta;

  auto operator<=>(const MomentMonomial&) const = default;
};

/**
 * Exact expansion of a moment: a map from canonical monomials to integer
 * multiplicities.  Immutable after construction.
 */
class MomentPolynomial {
 public:
  using TermMap = std::map<MomentMonomial, BigInt>;

  MomentPolynomial(MomentSpec spec, TermMap terms)
      : spec_(std::move(spec)), terms_(std::move(terms)) {
    std::erase_if(terms_, [](const auto& kv) { return kv.second == 0; });
  }

  const MomentSpec& spec() const { return spec_; }
  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  BigInt total_mass() const {
    BigInt s = 0;
    for (const auto& [mono, coeff] : terms_) s += coeff;
    return s;
  }

  bool operator==(const MomentPolynomial&) const = default;

 private:
  MomentSpec spec_;
  TermMap terms_;
};

namespace detail {

inline std::pair<int, int> canonical_pair(int i, int j, Flavor flavor) {
  if (flavor == Flavor::Real && i > j) std::swap(i, j);
  return {i, j};
}

struct KahanAccumulator {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace detail

/**
 * Expands E[w_{a_1 b_1} ... w_{a_n b_n}] for a real Wishart matrix by
 * summing nu^cycles * sigma^E * delta^Echeck over all pair partitions of the
 * 2n half-indices.  Vertex 2k-1 carries label a_k and vertex 2k label b_k;
 * the general-index case is the degenerate relabeling of the all-distinct
 * one, so no inflated matrices are ever formed.
 */
inline MomentPolynomial expand_real_moment(const MomentSpec& spec,
                                           int cap = kDefaultEnumerationCap) {
  if (spec.flavor != Flavor::Real)
    throw FlavorMismatch("expand_real_moment: spec is not real");
  const int n = spec.order();
  MomentPolynomial::TermMap terms;
  if (n == 0) {  // empty product has moment 1
    terms[MomentMonomial{}] = 1;
    return MomentPolynomial(spec, std::move(terms));
  }
  std::vector<int> label(static_cast<std::size_t>(2 * n) + 1, 0);
  for (int k = 1; k <= n; ++k) {
    label[static_cast<std::size_t>(2 * k - 1)] = spec.factors[static_cast<std::size_t>(k - 1)].first;
    label[static_cast<std::size_t>(2 * k)] = spec.factors[static_cast<std::size_t>(k - 1)].second;
  }
  enumerate_pair_partitions(
      n,
      [&](const PairPartition& part) {
        ComponentSummary s = analyze_real_graph(part);
        MomentMonomial mono;
        mono.nu_exp = s.cycles;
        mono.sigma.reserve(part.pairs.size());
        for (const auto& [i, j] : part.pairs)
          mono.sigma.push_back(detail::canonical_pair(
              label[static_cast<std::size_t>(i)], label[static_cast<std::size_t>(j)],
              Flavor::Real));
        mono.delta.reserve(s.chain_terminals.size());
        for (const auto& [i, j] : s.chain_terminals)
          mono.delta.push_back(detail::canonical_pair(
              label[static_cast<std::size_t>(i)], label[static_cast<std::size_t>(j)],
              Flavor::Real));
        std::sort(mono.sigma.begin(), mono.sigma.end());
        std::sort(mono.delta.begin(), mono.delta.end());
        terms[std::move(mono)] += 1;
      },
      cap);
  return MomentPolynomial(spec, std::move(terms));
}

/**
 * Complex analogue over partial injections: vertex k carries row label a_k
 * and column label b_k; an edge (i, pi(i)) contributes sigma_(a_i, b_pi(i)),
 * a chain with end e and start s contributes delta_(a_e, b_s).  Ordered
 * pairs are kept ordered (w is Hermitian, not symmetric).
 */
inline MomentPolynomial expand_complex_moment(const MomentSpec& spec,
                                              int cap = kDefaultEnumerationCap) {
  if (spec.flavor != Flavor::Complex)
    throw FlavorMismatch("expand_complex_moment: spec is not complex");
  const int n = spec.order();
  MomentPolynomial::TermMap terms;
  if (n == 0) {
    terms[MomentMonomial{}] = 1;
    return MomentPolynomial(spec, std::move(terms));
  }
  const auto row = [&](int k) { return spec.factors[static_cast<std::size_t>(k - 1)].first; };
  const auto col = [&](int k) { return spec.factors[static_cast<std::size_t>(k - 1)].second; };
  enumerate_partial_injections(
      n,
      [&](const PartialInjection& inj) {
        ComponentSummary s = analyze_directed_graph(inj);
        MomentMonomial mono;
        mono.nu_exp = s.cycles;
        mono.sigma.reserve(inj.mapping.size());
        for (const auto& [i, pi] : inj.mapping) mono.sigma.emplace_back(row(i), col(pi));
        mono.delta.reserve(s.chain_terminals.size());
        for (const auto& [end, start] : s.chain_terminals)
          mono.delta.emplace_back(row(end), col(start));
        std::sort(mono.sigma.begin(), mono.sigma.end());
        std::sort(mono.delta.begin(), mono.delta.end());
        terms[std::move(mono)] += 1;
      },
      cap);
  return MomentPolynomial(spec, std::move(terms));
}

inline MomentPolynomial expand_moment(const MomentSpec& spec,
                                      int cap = kDefaultEnumerationCap) {
  return spec.flavor == Flavor::Real ? expand_real_moment(spec, cap)
                                     : expand_complex_moment(spec, cap);
}

/**
 * Substitutes numeric parameters into the polynomial.  Terms can cancel, so
 * the accumulation is compensated.  Complex flavor may return a genuinely
 * complex number; conjugate-closed specs leave only rounding in the
 * imaginary part.
 */
inline std::complex<double> evaluate(const MomentPolynomial& poly,
                                     const WishartParams& params) {
  const MomentSpec& spec = poly.spec();
  if (params.flavor != spec.flavor)
    throw FlavorMismatch("evaluate: params flavor does not match spec");
  if (params.p() != spec.p)
    throw DimensionMismatch("evaluate: params dimension does not match spec");
  detail::KahanAccumulator re, im;
  for (const auto& [mono, coeff] : poly.terms()) {
    std::complex<double> v(to_double(coeff), 0.0);
    for (int k = 0; k < mono.nu_exp; ++k) v *= params.nu;
    for (const auto& [i, j] : mono.sigma) v *= params.sigma(i - 1, j - 1);
    for (const auto& [i, j] : mono.delta) v *= params.delta(i - 1, j - 1);
    re.add(v.real());
    im.add(v.imag());
  }
  return {re.sum, im.sum};
}

inline double evaluate_real(const MomentPolynomial& poly, const WishartParams& params) {
  return evaluate(poly, params).real();
}

struct ShapeGroup {
  MomentMonomial representative;
  BigInt count;
};

namespace detail {

// Applies a relabeling permutation (1-based) to a monomial and restores
// canonical form.
inline MomentMonomial apply_permutation(const MomentMonomial& mono,
                                        const std::vector<int>& perm, Flavor flavor) {
  MomentMonomial out;
  out.nu_exp = mono.nu_exp;
  out.sigma.reserve(mono.sigma.size());
  out.delta.reserve(mono.delta.size());
  for (const auto& [i, j] : mono.sigma)
    out.sigma.push_back(canonical_pair(perm[static_cast<std::size_t>(i)],
                                       perm[static_cast<std::size_t>(j)], flavor));
  for (const auto& [i, j] : mono.delta)
    out.delta.push_back(canonical_pair(perm[static_cast<std::size_t>(i)],
                                       perm[static_cast<std::size_t>(j)], flavor));
  std::sort(out.sigma.begin(), out.sigma.end());
  std::sort(out.delta.begin(), out.delta.end());
  return out;
}

// All permutations of {1..p} that map the spec's factor multiset to itself.
inline std::vector<std::vector<int>> spec_automorphisms(const MomentSpec& spec) {
  if (spec.p > 8)
    throw LimitExceeded("group_by_shape: dimension too large for orbit search");
  std::vector<std::pair<int, int>> canon = spec.factors;
  std::sort(canon.begin(), canon.end());
  std::vector<int> ids(static_cast<std::size_t>(spec.p));
  std::iota(ids.begin(), ids.end(), 1);
  std::vector<std::vector<int>> autos;
  std::vector<int> perm(static_cast<std::size_t>(spec.p) + 1, 0);
  do {
    for (int i = 1; i <= spec.p; ++i)
      perm[static_cast<std::size_t>(i)] = ids[static_cast<std::size_t>(i - 1)];
    std::vector<std::pair<int, int>> image;
    image.reserve(canon.size());
    for (const auto& [a, b] : spec.factors)
      image.push_back(canonical_pair(perm[static_cast<std::size_t>(a)],
                                     perm[static_cast<std::size_t>(b)], spec.flavor));
    std::sort(image.begin(), image.end());
    if (image == canon) autos.push_back(perm);
  } while (std::next_permutation(ids.begin(), ids.end()));
  return autos;
}

}  // namespace detail

/**
 * Groups monomials into orbits under index relabelings that fix the spec,
 * reproducing the bracketed term counts of hand-collected expansions.  Each
 * group reports its lexicographically smallest member and the total
 * coefficient mass of the orbit; the counts sum to the polynomial's mass.
 */
inline std::vector<ShapeGroup> group_by_shape(const MomentPolynomial& poly) {
  if (poly.empty()) throw DomainError("group_by_shape: empty polynomial");
  const auto autos = detail::spec_automorphisms(poly.spec());
  std::vector<ShapeGroup> groups;
  std::map<MomentMonomial, bool> consumed;
  for (const auto& [mono, coeff] : poly.terms()) consumed[mono] = false;
  for (const auto& [mono, coeff] : poly.terms()) {
    if (consumed[mono]) continue;
    std::map<MomentMonomial, BigInt> orbit;
    for (const auto& perm : autos) {
      MomentMonomial image = detail::apply_permutation(mono, perm, poly.spec().flavor);
      orbit[image] = poly.terms().at(image);  // orbit stays inside the polynomial
    }
    ShapeGroup g;
    g.representative = orbit.begin()->first;
    for (const auto& [member, c] : orbit) {
      g.count += c;
      consumed[member] = true;
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace wishmom
