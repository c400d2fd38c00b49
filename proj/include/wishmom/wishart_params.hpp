#pragma once

#include <Eigen/Core>
#include <complex>
#include <utility>

#include "wishmom/errors.hpp"
#include "wishmom/moment_spec.hpp"

namespace wishmom {

/**
 * Numeric parameter triple (nu, Sigma, Delta).  Matrices are stored complex
 * in both flavors; real-flavor entries must have exactly zero imaginary
 * part.  Symmetry / Hermitianity is required exactly as given (no
 * tolerance): parameter files are the source of truth, not approximations.
 */
struct WishartParams {
  Flavor flavor = Flavor::Real;
  double nu = 0.0;
  Eigen::MatrixXcd sigma;
  Eigen::MatrixXcd delta;

  int p() const { return static_cast<int>(sigma.rows()); }
};

inline WishartParams make_wishart_params(Flavor flavor, double nu,
                                         Eigen::MatrixXcd sigma,
                                         Eigen::MatrixXcd delta) {
  if (sigma.rows() != sigma.cols() || delta.rows() != delta.cols())
    throw DimensionMismatch("WishartParams: matrices must be square");
  if (sigma.rows() != delta.rows())
    throw DimensionMismatch("WishartParams: sigma and delta dimensions differ");
  if (sigma.rows() < 1) throw DimensionMismatch("WishartParams: empty matrices");
  const auto n = sigma.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (flavor == Flavor::Real) {
        if (sigma(i, j).imag() != 0.0 || delta(i, j).imag() != 0.0)
          throw NotSymmetric("WishartParams: real flavor requires real entries");
        if (sigma(i, j) != sigma(j, i))
          throw NotSymmetric("WishartParams: sigma is not symmetric");
        if (delta(i, j) != delta(j, i))
          throw NotSymmetric("WishartParams: delta is not symmetric");
      } else {
        if (sigma(i, j) != std::conj(sigma(j, i)))
          throw NotHermitian("WishartParams: sigma is not Hermitian");
        if (delta(i, j) != std::conj(delta(j, i)))
          throw NotHermitian("WishartParams: delta is not Hermitian");
      }
    }
  return WishartParams{flavor, nu, std::move(sigma), std::move(delta)};
}

inline WishartParams make_real_params(double nu, const Eigen::MatrixXd& sigma,
                                      const Eigen::MatrixXd& delta) {
  return make_wishart_params(Flavor::Real, nu, sigma.cast<std::complex<double>>(),
                             delta.cast<std::complex<double>>());
}

inline WishartParams make_central_real_params(double nu,
                                              const Eigen::MatrixXd& sigma) {
  return make_real_params(nu, sigma, Eigen::MatrixXd::Zero(sigma.rows(), sigma.cols()));
}

}  // namespace wishmom
