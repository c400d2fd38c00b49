#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "wishmom/errors.hpp"
#include "wishmom/rng.hpp"
#include "wishmom/wishart_params.hpp"

namespace wishmom {

/**
 * Validated sampling setup.  Construction resolves the mean vectors (given
 * directly or synthesized from an eigendecomposition of Delta), checks that
 * Sigma is positive definite, and precomputes the Cholesky factor, so the
 * per-sample path does no validation work.
 */
struct SimulationConfig {
  WishartParams params;
  std::vector<Eigen::VectorXcd> mean_vectors;  // exactly nu entries
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  unsigned streams = 1;
  int threads = 1;

  // cached factor with L L^adj = Sigma, plus real views for the real flavor
  Eigen::MatrixXcd chol;
  Eigen::MatrixXd chol_real;
  std::vector<Eigen::VectorXd> mean_vectors_real;

  int nu_int() const { return static_cast<int>(params.nu); }
};

namespace detail {

inline double max_abs(const Eigen::MatrixXcd& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace detail

inline SimulationConfig make_simulation_config(
    WishartParams params,
    std::optional<std::vector<Eigen::VectorXcd>> mean_vectors, std::uint64_t samples,
    std::uint64_t seed, unsigned streams = 1, int threads = 1) {
  if (params.nu <= 0 || params.nu != std::floor(params.nu))
    throw DomainError("sampling requires a positive integer nu");
  if (samples < 1) throw DomainError("sample count must be >= 1");
  if (streams < 1) throw DomainError("stream count must be >= 1");
  if (threads < 1) throw DomainError("thread count must be >= 1");
  const int p = params.p();
  const int nu = static_cast<int>(params.nu);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sigma_eig(params.sigma);
  const double max_eig = sigma_eig.eigenvalues().maxCoeff();
  if (max_eig <= 0.0 || sigma_eig.eigenvalues().minCoeff() <= 1e-10 * max_eig)
    throw NotPositiveDefinite("sampling requires positive definite sigma");

  SimulationConfig cfg;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.streams = streams;
  cfg.threads = threads;

  if (mean_vectors.has_value()) {
    auto& mus = *mean_vectors;
    if (static_cast<int>(mus.size()) > nu)
      throw MeanMismatch("more mean vectors than degrees of freedom");
    for (const auto& mu : mus)
      if (mu.size() != p) throw DimensionMismatch("mean vector has wrong dimension");
    Eigen::MatrixXcd outer = Eigen::MatrixXcd::Zero(p, p);
    for (const auto& mu : mus) outer += mu * mu.adjoint();
    const double scale = std::max(1.0, detail::max_abs(params.delta));
    if (detail::max_abs(outer - params.delta) > 1e-12 * scale)
      throw MeanMismatch("mean vectors do not reproduce delta");
    if (params.flavor == Flavor::Real)
      for (const auto& mu : mus)
        if (mu.imag().cwiseAbs().maxCoeff() != 0.0)
          throw MeanMismatch("real flavor requires real mean vectors");
    cfg.mean_vectors = std::move(mus);
    cfg.mean_vectors.resize(static_cast<std::size_t>(nu), Eigen::VectorXcd::Zero(p));
  } else if (detail::max_abs(params.delta) == 0.0) {
    cfg.mean_vectors.assign(static_cast<std::size_t>(nu), Eigen::VectorXcd::Zero(p));
  } else {
    // synthesize mu_t = sqrt(lambda_t) e_t from Delta = sum lambda e e^adj;
    // any factorization gives the same Wishart law
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> delta_eig(params.delta);
    const double dmax = delta_eig.eigenvalues().cwiseAbs().maxCoeff();
    const double tol = 1e-12 * std::max(1.0, dmax);
    int rank = 0;
    for (int k = 0; k < p; ++k) {
      const double lambda = delta_eig.eigenvalues()(k);
      if (lambda < -tol)
        throw NotPositiveDefinite("delta must be positive semidefinite");
      if (lambda > tol) ++rank;
    }
    if (rank > nu)
      throw MeanMismatch("rank of delta exceeds nu; no mean-vector factorization");
    cfg.mean_vectors.assign(static_cast<std::size_t>(nu), Eigen::VectorXcd::Zero(p));
    std::size_t slot = 0;
    for (int k = p - 1; k >= 0; --k) {  // largest eigenvalues first
      const double lambda = delta_eig.eigenvalues()(k);
      if (lambda <= tol) continue;
      cfg.mean_vectors[slot++] = std::sqrt(lambda) * delta_eig.eigenvectors().col(k);
    }
  }

  cfg.chol = Eigen::LLT<Eigen::MatrixXcd>(params.sigma).matrixL();
  if (params.flavor == Flavor::Real) {
    cfg.chol_real = cfg.chol.real();
    cfg.mean_vectors_real.reserve(cfg.mean_vectors.size());
    for (const auto& mu : cfg.mean_vectors) cfg.mean_vectors_real.push_back(mu.real());
  }
  cfg.params = std::move(params);
  return cfg;
}

namespace detail {

// Real-arithmetic fast path used by the Monte Carlo loop.
inline Eigen::MatrixXd sample_real_raw(const SimulationConfig& cfg, std::uint64_t t) {
  const int p = cfg.params.p();
  CounterRng rng(cfg.seed, t);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd u(p), x(p);
  for (int k = 0; k < cfg.nu_int(); ++k) {
    for (int i = 0; i < p; ++i) u(i) = rng.next_normal();
    x.noalias() = cfg.chol_real * u;
    x += cfg.mean_vectors_real[static_cast<std::size_t>(k)];
    w.noalias() += x * x.transpose();
  }
  return w;
}

inline Eigen::MatrixXcd sample_complex_raw(const SimulationConfig& cfg, std::uint64_t t) {
  const int p = cfg.params.p();
  CounterRng rng(cfg.seed, t);
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(p, p);
  Eigen::VectorXcd g(p), z(p);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < cfg.nu_int(); ++k) {
    // circular complex normal: (u + iv)/sqrt(2) with u, v iid standard
    for (int i = 0; i < p; ++i) {
      double re = rng.next_normal();
      double im = rng.next_normal();
      g(i) = std::complex<double>(re * inv_sqrt2, im * inv_sqrt2);
    }
    z.noalias() = cfg.chol * g;
    z += cfg.mean_vectors[static_cast<std::size_t>(k)];
    w.noalias() += z * z.adjoint();
  }
  return w;
}

}  // namespace detail

// The t-th Wishart draw; deterministic given (seed, t).
inline Eigen::MatrixXcd sample_real_wishart(const SimulationConfig& cfg, std::uint64_t t) {
  if (cfg.params.flavor != Flavor::Real)
    throw FlavorMismatch("sample_real_wishart: config is not real");
  return detail::sample_real_raw(cfg, t).cast<std::complex<double>>();
}

inline Eigen::MatrixXcd sample_complex_wishart(const SimulationConfig& cfg,
                                               std::uint64_t t) {
  if (cfg.params.flavor != Flavor::Complex)
    throw FlavorMismatch("sample_complex_wishart: config is not complex");
  return detail::sample_complex_raw(cfg, t);
}

inline Eigen::MatrixXcd sample_wishart(const SimulationConfig& cfg, std::uint64_t t) {
  return cfg.params.flavor == Flavor::Real ? sample_real_wishart(cfg, t)
                                           : sample_complex_wishart(cfg, t);
}

// The nu component vectors making up sample t, drawn in the same order as
// the samplers; summing their outer products reconstructs the sample.
inline std::vector<Eigen::VectorXcd> sample_component_vectors(
    const SimulationConfig& cfg, std::uint64_t t) {
  const int p = cfg.params.p();
  CounterRng rng(cfg.seed, t);
  std::vector<Eigen::VectorXcd> out;
  out.reserve(static_cast<std::size_t>(cfg.nu_int()));
  if (cfg.params.flavor == Flavor::Real) {
    Eigen::VectorXd u(p), x(p);
    for (int k = 0; k < cfg.nu_int(); ++k) {
      for (int i = 0; i < p; ++i) u(i) = rng.next_normal();
      x.noalias() = cfg.chol_real * u;
      x += cfg.mean_vectors_real[static_cast<std::size_t>(k)];
      out.push_back(x.cast<std::complex<double>>());
    }
  } else {
    Eigen::VectorXcd g(p), z(p);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < cfg.nu_int(); ++k) {
      for (int i = 0; i < p; ++i) {
        double re = rng.next_normal();
        double im = rng.next_normal();
        g(i) = std::complex<double>(re * inv_sqrt2, im * inv_sqrt2);
      }
      z.noalias() = cfg.chol * g;
      z += cfg.mean_vectors[static_cast<std::size_t>(k)];
      out.push_back(z);
    }
  }
  return out;
}

}  // namespace wishmom
