#pragma once

#include <Eigen/Core>
#include <Eigen/LU>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "wishmom/errors.hpp"
#include "wishmom/moment_engine.hpp"
#include "wishmom/sampling.hpp"

namespace wishmom {

struct EstimateReport {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  double reference = 0.0;
  double z_score = 0.0;
  // imaginary-part diagnostics; identically zero for the real flavor
  double imag_mean = 0.0;
  double imag_std_error = 0.0;
  double imag_reference = 0.0;
  std::string rng_name;
  std::uint64_t seed = 0;
};

namespace detail {

struct StreamAccumulator {
  KahanAccumulator sum_re, sumsq_re, sum_im, sumsq_im;
  std::uint64_t count = 0;

  void add(double re, double im) {
    sum_re.add(re);
    sumsq_re.add(re * re);
    sum_im.add(im);
    sumsq_im.add(im * im);
    ++count;
  }
};

inline double z_of(double estimate, double reference, double se) {
  if (se > 0.0) return (estimate - reference) / se;
  return estimate == reference ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/**
 * Monte Carlo estimate of E[prod_k w_{a_k b_k}] against the symbolic value.
 * Samples are split into `streams` contiguous index ranges; each stream
 * accumulates (sum, sum of squares, count) with compensated summation and
 * the streams merge in index order, so a fixed (seed, streams, N) is
 * bit-reproducible no matter how many threads run the streams.
 */
inline EstimateReport estimate_moment_mc(const MomentSpec& spec,
                                         const SimulationConfig& cfg) {
  if (spec.flavor != cfg.params.flavor)
    throw FlavorMismatch("estimate_moment_mc: spec/params flavor mismatch");
  if (spec.p != cfg.params.p())
    throw DimensionMismatch("estimate_moment_mc: spec/params dimension mismatch");

  const std::complex<double> reference = evaluate(expand_moment(spec), cfg.params);
  const std::uint64_t n = cfg.samples;
  const unsigned s = cfg.streams;

  std::vector<detail::StreamAccumulator> accs(s);
  auto run_stream = [&](unsigned stream) {
    const std::uint64_t begin = n * stream / s;
    const std::uint64_t end = n * (stream + 1) / s;
    auto& acc = accs[stream];
    if (spec.flavor == Flavor::Real) {
      for (std::uint64_t idx = begin; idx < end; ++idx) {
        Eigen::MatrixXd w = detail::sample_real_raw(cfg, idx);
        double prod = 1.0;
        for (const auto& [a, b] : spec.factors) prod *= w(a - 1, b - 1);
        acc.add(prod, 0.0);
      }
    } else {
      for (std::uint64_t idx = begin; idx < end; ++idx) {
        Eigen::MatrixXcd w = detail::sample_complex_raw(cfg, idx);
        std::complex<double> prod = 1.0;
        for (const auto& [a, b] : spec.factors) prod *= w(a - 1, b - 1);
        acc.add(prod.real(), prod.imag());
      }
    }
  };

  const unsigned workers = std::min<unsigned>(static_cast<unsigned>(cfg.threads), s);
  if (workers <= 1) {
    for (unsigned stream = 0; stream < s; ++stream) run_stream(stream);
  } else {
    std::vector<std::thread> pool;
    for (unsigned worker = 0; worker < workers; ++worker)
      pool.emplace_back([&, worker] {
        for (unsigned stream = worker; stream < s; stream += workers)
          run_stream(stream);
      });
    for (auto& t : pool) t.join();
  }

  // merge in stream order
  detail::KahanAccumulator sum_re, sumsq_re, sum_im, sumsq_im;
  std::uint64_t count = 0;
  for (const auto& acc : accs) {
    sum_re.add(acc.sum_re.sum);
    sumsq_re.add(acc.sumsq_re.sum);
    sum_im.add(acc.sum_im.sum);
    sumsq_im.add(acc.sumsq_im.sum);
    count += acc.count;
  }

  EstimateReport report;
  report.n_samples = count;
  report.rng_name = CounterRng::kName;
  report.seed = cfg.seed;
  report.reference = reference.real();
  report.imag_reference = reference.imag();
  const double dn = static_cast<double>(count);
  report.estimate = sum_re.sum / dn;
  report.imag_mean = sum_im.sum / dn;
  if (count > 1) {
    const double var_re =
        std::max(0.0, (sumsq_re.sum - dn * report.estimate * report.estimate) / (dn - 1));
    const double var_im =
        std::max(0.0, (sumsq_im.sum - dn * report.imag_mean * report.imag_mean) / (dn - 1));
    report.std_error = std::sqrt(var_re / dn);
    report.imag_std_error = std::sqrt(var_im / dn);
  }
  report.z_score = detail::z_of(report.estimate, report.reference, report.std_error);
  return report;
}

/**
 * Moment generating function, evaluated exactly as written:
 * real    det(I - 2 Theta Sigma)^(-nu/2) exp tr((I - 2 Theta Sigma)^-1 Theta Delta)
 * complex det(I - Theta Sigma)^(-nu)     exp tr((I - Theta Sigma)^-1 Theta Delta)
 * Theta need not be Hermitian: finite differencing steps the entries
 * independently, which analytically continues the identity off the
 * symmetric/Hermitian slice.
 */
inline std::complex<double> mgf_eval(const WishartParams& params,
                                     const Eigen::MatrixXcd& theta) {
  const int p = params.p();
  if (theta.rows() != p || theta.cols() != p)
    throw DimensionMismatch("mgf_eval: theta dimension mismatch");
  const double factor = params.flavor == Flavor::Real ? 2.0 : 1.0;
  const double exponent = params.flavor == Flavor::Real ? params.nu / 2.0 : params.nu;
  const bool integer_exponent = exponent == std::floor(exponent);

  Eigen::MatrixXcd resolvent =
      Eigen::MatrixXcd::Identity(p, p) - factor * theta * params.sigma;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(resolvent);
  const std::complex<double> det = lu.determinant();
  if (std::abs(det) < 1e-300) throw SingularMatrix("mgf_eval: I - c*Theta*Sigma singular");
  if (!integer_exponent && det.imag() == 0.0 && det.real() < 0.0)
    throw BranchUndefined("mgf_eval: negative determinant with fractional exponent");

  // principal branch; exact for integer exponents
  const std::complex<double> det_power = std::exp(-exponent * std::log(det));
  const std::complex<double> trace = (lu.solve(theta * params.delta)).trace();
  return det_power * std::exp(trace);
}

namespace detail {

struct StencilPoint {
  int offset;
  double weight;
};

inline const std::vector<StencilPoint>& central_stencil(int order) {
  static const std::vector<StencilPoint> first{{-1, -0.5}, {1, 0.5}};
  static const std::vector<StencilPoint> second{{-1, 1.0}, {0, -2.0}, {1, 1.0}};
  static const std::vector<StencilPoint> third{
      {-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}};
  switch (order) {
    case 1: return first;
    case 2: return second;
    default: return third;
  }
}

// Maps the independent entry variables t_(a,b) onto the Theta matrix that
// mgf_eval expects.  Real flavor: Theta symmetric with off-diagonal entries
// t/2, so d/dt_(a,b) tr(Theta W) = w_(a,b).  Complex flavor: Theta = t
// transposed, making tr(Theta W) = sum t_(a,b) w_(a,b).
inline Eigen::MatrixXcd theta_from_entries(
    const std::map<std::pair<int, int>, double>& entries, Flavor flavor, int p) {
  Eigen::MatrixXcd theta = Eigen::MatrixXcd::Zero(p, p);
  for (const auto& [pair, value] : entries) {
    const auto [a, b] = pair;
    if (flavor == Flavor::Real) {
      if (a == b) {
        theta(a - 1, a - 1) = value;
      } else {
        theta(a - 1, b - 1) += value / 2.0;
        theta(b - 1, a - 1) += value / 2.0;
      }
    } else {
      theta(b - 1, a - 1) += value;
    }
  }
  return theta;
}

}  // namespace detail

inline double default_fd_step(int order) { return order <= 1 ? 1e-5 : 1e-4; }

/**
 * Approximates the moment as the mixed partial derivative of the MGF at
 * Theta = 0 with central differences, one derivative order per distinct
 * entry of the spec.  Total order is capped at 3.
 */
inline std::complex<double> mgf_moment_fd(const MomentSpec& spec,
                                          const WishartParams& params, double h = 0.0) {
  if (spec.flavor != params.flavor)
    throw FlavorMismatch("mgf_moment_fd: spec/params flavor mismatch");
  if (spec.p != params.p())
    throw DimensionMismatch("mgf_moment_fd: spec/params dimension mismatch");
  const int order = spec.order();
  if (order > 3) throw OrderTooHigh("mgf_moment_fd: derivative order exceeds 3");
  if (order == 0) return 1.0;
  if (h <= 0.0) h = default_fd_step(order);

  // distinct variables with their derivative orders
  std::map<std::pair<int, int>, int> variables;
  for (const auto& factor : spec.factors) ++variables[factor];

  std::vector<std::pair<int, int>> names;
  std::vector<int> orders;
  for (const auto& [pair, k] : variables) {
    names.push_back(pair);
    orders.push_back(k);
  }

  std::complex<double> acc = 0.0;
  std::vector<std::size_t> choice(names.size(), 0);
  for (;;) {
    double weight = 1.0;
    std::map<std::pair<int, int>, double> entries;
    for (std::size_t v = 0; v < names.size(); ++v) {
      const auto& point = detail::central_stencil(orders[v])[choice[v]];
      weight *= point.weight;
      entries[names[v]] = point.offset * h;
    }
    if (weight != 0.0)
      acc += weight *
             mgf_eval(params, detail::theta_from_entries(entries, spec.flavor, spec.p));
    // advance the mixed-radix counter over stencil points
    std::size_t v = 0;
    while (v < names.size()) {
      if (++choice[v] < detail::central_stencil(orders[v]).size()) break;
      choice[v] = 0;
      ++v;
    }
    if (v == names.size()) break;
  }
  return acc / std::pow(h, order);
}

struct CrossCheckTolerances {
  double z_max = 5.0;
  double fd_rel_tol = 1e-4;
};

struct CrossCheckReport {
  double symbolic = 0.0;
  double symbolic_imag = 0.0;
  EstimateReport mc;
  bool has_fd = false;
  double fd_value = 0.0;
  double fd_rel_err = 0.0;
  bool pass = false;
};

/**
 * Runs the symbolic evaluation, the Monte Carlo estimate, and (for total
 * order <= 3) the finite-difference MGF route, and reports agreement.  The
 * relative error switches to absolute when the reference vanishes.
 */
inline CrossCheckReport cross_check(const MomentSpec& spec, const SimulationConfig& cfg,
                                    CrossCheckTolerances tol = {}, double fd_step = 0.0,
                                    bool include_fd = true) {
  CrossCheckReport report;
  const std::complex<double> symbolic = evaluate(expand_moment(spec), cfg.params);
  report.symbolic = symbolic.real();
  report.symbolic_imag = symbolic.imag();
  report.mc = estimate_moment_mc(spec, cfg);

  bool ok = std::abs(report.mc.z_score) < tol.z_max;
  if (spec.flavor == Flavor::Complex) {
    // identically-real products have zero imaginary SE; allow the 1e-12
    // relative accumulation tolerance of the symbolic evaluation
    const double imag_err = std::abs(report.mc.imag_mean - report.mc.imag_reference);
    const double imag_tol = tol.z_max * report.mc.imag_std_error +
                            1e-12 * (1.0 + std::abs(symbolic));
    ok = ok && imag_err < imag_tol;
  }

  if (include_fd && spec.order() <= 3) {
    const std::complex<double> fd = mgf_moment_fd(spec, cfg.params, fd_step);
    report.has_fd = true;
    report.fd_value = fd.real();
    const double denom = std::abs(symbolic) > 1e-9 ? std::abs(symbolic) : 1.0;
    report.fd_rel_err = std::abs(fd - symbolic) / denom;
    ok = ok && report.fd_rel_err < tol.fd_rel_tol;
  }
  report.pass = ok;
  return report;
}

}  // namespace wishmom
