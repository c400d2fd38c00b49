#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "support/test_helpers.hpp"
#include "wishmom/validation.hpp"

using namespace wishmom;

namespace {

constexpr std::uint64_t kUnitSamples = 150000;

SimulationConfig config_for(WishartParams params, std::uint64_t samples = kUnitSamples,
                            std::uint64_t seed = 42, unsigned streams = 1,
                            int threads = 1) {
  return make_simulation_config(std::move(params), std::nullopt, samples, seed,
                                streams, threads);
}

Eigen::MatrixXd kibble_sigma(double rho) {
  Eigen::MatrixXd s(2, 2);
  s << 1.0, rho, rho, 1.0;
  return s;
}

}  // namespace

TEST_CASE("real samples are symmetric with nonnegative diagonal") {
  auto cfg = config_for(make_central_real_params(3, Eigen::MatrixXd::Identity(2, 2)));
  for (std::uint64_t t = 0; t < 50; ++t) {
    Eigen::MatrixXcd w = sample_real_wishart(cfg, t);
    CHECK((w - w.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(w(0, 0).real() >= 0.0);
    CHECK(w(1, 1).real() >= 0.0);
    CHECK(w.imag().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("complex samples are Hermitian with real nonnegative diagonal") {
  Eigen::MatrixXcd sigma = 2.0 * Eigen::MatrixXcd::Identity(2, 2);
  auto cfg = config_for(make_wishart_params(Flavor::Complex, 3, sigma,
                                            Eigen::MatrixXcd::Zero(2, 2)));
  for (std::uint64_t t = 0; t < 50; ++t) {
    Eigen::MatrixXcd w = sample_complex_wishart(cfg, t);
    CHECK((w - w.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(w(0, 0).imag() == Catch::Approx(0.0).margin(1e-12));
    CHECK(w(0, 0).real() >= 0.0);
  }
}

TEST_CASE("component vectors reconstruct the sample exactly") {
  Eigen::MatrixXcd sigma(2, 2);
  sigma << std::complex<double>(2, 0), std::complex<double>(0.4, 0.3),
      std::complex<double>(0.4, -0.3), std::complex<double>(1.5, 0);
  auto cfg = config_for(make_wishart_params(Flavor::Complex, 4, sigma,
                                            Eigen::MatrixXcd::Zero(2, 2)));
  for (std::uint64_t t = 0; t < 10; ++t) {
    auto vectors = sample_component_vectors(cfg, t);
    REQUIRE(vectors.size() == 4);
    Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(2, 2);
    for (const auto& z : vectors) rebuilt += z * z.adjoint();
    CHECK((rebuilt - sample_complex_wishart(cfg, t)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("complex construction is circular: pseudo-covariance vanishes") {
  Eigen::MatrixXcd sigma(2, 2);
  sigma << std::complex<double>(2, 0), std::complex<double>(0.5, 0.2),
      std::complex<double>(0.5, -0.2), std::complex<double>(1, 0);
  auto cfg = config_for(make_wishart_params(Flavor::Complex, 1, sigma,
                                            Eigen::MatrixXcd::Zero(2, 2)),
                        40000);
  Eigen::MatrixXcd pseudo = Eigen::MatrixXcd::Zero(2, 2);
  Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(2, 2);
  const std::uint64_t n = 40000;
  for (std::uint64_t t = 0; t < n; ++t) {
    auto z = sample_component_vectors(cfg, t)[0];
    pseudo += z * z.transpose();
    cov += z * z.adjoint();
  }
  pseudo /= static_cast<double>(n);
  cov /= static_cast<double>(n);
  // per-entry sd is O(1); 5 sigma of the mean over n draws
  const double bound = 5.0 * 2.0 / std::sqrt(static_cast<double>(n));
  CHECK(pseudo.cwiseAbs().maxCoeff() < bound);
  CHECK((cov - sigma).cwiseAbs().maxCoeff() < bound);
}

TEST_CASE("MC estimate: chi-square mean with noncentrality") {
  Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  auto cfg = config_for(make_real_params(5, one, 2.0 * one));
  auto spec = make_moment_spec(Flavor::Real, 1, {{1, 1}});
  auto report = estimate_moment_mc(spec, cfg);
  CHECK(report.reference == Catch::Approx(7.0).epsilon(1e-12));
  CHECK(std::abs(report.z_score) < 5.0);
  CHECK(report.n_samples == kUnitSamples);
  CHECK(report.rng_name == CounterRng::kName);
}

TEST_CASE("MC estimate: off-diagonal real mean") {
  auto cfg = config_for(make_central_real_params(4, kibble_sigma(0.3)));
  auto report = estimate_moment_mc(make_moment_spec(Flavor::Real, 2, {{1, 2}}), cfg);
  CHECK(report.reference == Catch::Approx(1.2).epsilon(1e-12));
  CHECK(std::abs(report.z_score) < 5.0);
}

TEST_CASE("MC estimate: Kibble product and 2x2 third moment") {
  auto kibble_cfg = config_for(make_central_real_params(4, kibble_sigma(0.5)));
  auto kibble_report = estimate_moment_mc(
      make_moment_spec(Flavor::Real, 2, {{1, 1}, {2, 2}}), kibble_cfg);
  CHECK(kibble_report.reference == Catch::Approx(18.0).epsilon(1e-12));
  CHECK(std::abs(kibble_report.z_score) < 5.0);

  auto eye_cfg = config_for(make_central_real_params(3, Eigen::MatrixXd::Identity(2, 2)));
  auto report = estimate_moment_mc(
      make_moment_spec(Flavor::Real, 2, {{1, 2}, {1, 2}, {1, 1}}), eye_cfg);
  CHECK(report.reference == Catch::Approx(15.0).epsilon(1e-12));
  CHECK(std::abs(report.z_score) < 5.0);
}

TEST_CASE("MC estimate: complex mean with scaled identity") {
  Eigen::MatrixXcd sigma = 2.0 * Eigen::MatrixXcd::Identity(1, 1);
  auto cfg = config_for(make_wishart_params(Flavor::Complex, 3, sigma,
                                            Eigen::MatrixXcd::Zero(1, 1)));
  auto report = estimate_moment_mc(make_moment_spec(Flavor::Complex, 1, {{1, 1}}), cfg);
  CHECK(report.reference == Catch::Approx(6.0).epsilon(1e-12));
  CHECK(std::abs(report.z_score) < 5.0);
  CHECK(std::abs(report.imag_mean) < 5.0 * report.imag_std_error + 1e-15);
}

TEST_CASE("determinism: identical config gives bit-identical estimates") {
  auto cfg = config_for(make_central_real_params(4, kibble_sigma(0.4)), 20000, 7, 4, 2);
  auto spec = make_moment_spec(Flavor::Real, 2, {{1, 1}, {2, 2}});
  auto a = estimate_moment_mc(spec, cfg);
  auto b = estimate_moment_mc(spec, cfg);
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);

  // thread count must not change the result for fixed (seed, streams, N)
  auto cfg_serial = config_for(make_central_real_params(4, kibble_sigma(0.4)), 20000, 7, 4, 1);
  auto c = estimate_moment_mc(spec, cfg_serial);
  CHECK(a.estimate == c.estimate);
  CHECK(a.std_error == c.std_error);
}

TEST_CASE("stream splitting only regroups the same sample values") {
  auto params = make_central_real_params(3, kibble_sigma(0.2));
  auto cfg1 = config_for(params, 10000, 99, 1);
  auto cfg4 = config_for(params, 10000, 99, 4);
  // the t-th sample does not depend on the stream layout
  for (std::uint64_t t : {0ULL, 17ULL, 9999ULL}) {
    CHECK((detail::sample_real_raw(cfg1, t) - detail::sample_real_raw(cfg4, t))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  auto spec = make_moment_spec(Flavor::Real, 2, {{1, 2}});
  auto r1 = estimate_moment_mc(spec, cfg1);
  auto r4 = estimate_moment_mc(spec, cfg4);
  CHECK(r1.estimate == Catch::Approx(r4.estimate).epsilon(1e-12));
}

TEST_CASE("config validation") {
  auto identity = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(config_for(make_real_params(2.5, identity, 0.0 * identity)),
                  DomainError);

  Eigen::MatrixXd singular(2, 2);
  singular << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(config_for(make_central_real_params(3, singular)),
                  NotPositiveDefinite);

  // delta of rank 2 cannot come from a single mean vector
  Eigen::MatrixXd delta2 = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(config_for(make_real_params(1, identity, delta2)), MeanMismatch);

  // mean vectors must reproduce delta
  Eigen::VectorXcd mu(2);
  mu << 1.0, 0.0;
  CHECK_THROWS_AS(
      make_simulation_config(make_real_params(3, identity, delta2),
                             std::vector<Eigen::VectorXcd>{mu}, 100, 1),
      MeanMismatch);
}

TEST_CASE("mean vectors: explicit and synthesized paths agree with delta") {
  Eigen::VectorXcd mu(2);
  mu << 2.0, 1.0;
  Eigen::MatrixXcd delta = mu * mu.adjoint();
  auto params = make_wishart_params(Flavor::Real, 4,
                                    Eigen::MatrixXcd::Identity(2, 2), delta);

  auto explicit_cfg = make_simulation_config(
      params, std::vector<Eigen::VectorXcd>{mu}, 100, 1);
  REQUIRE(explicit_cfg.mean_vectors.size() == 4);  // padded with zeros

  auto synthesized_cfg = make_simulation_config(params, std::nullopt, 100, 1);
  Eigen::MatrixXcd rebuilt = Eigen::MatrixXcd::Zero(2, 2);
  for (const auto& v : synthesized_cfg.mean_vectors) rebuilt += v * v.adjoint();
  CHECK((rebuilt - delta).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("noncentral sampling matches the symbolic mean") {
  Eigen::VectorXcd mu(2);
  mu << 1.0, -0.5;
  Eigen::MatrixXcd delta = mu * mu.adjoint();
  auto params = make_wishart_params(Flavor::Real, 3,
                                    kibble_sigma(0.3).cast<std::complex<double>>(), delta);
  auto cfg = config_for(params, 100000);
  auto report = estimate_moment_mc(make_moment_spec(Flavor::Real, 2, {{1, 1}}), cfg);
  CHECK(report.reference == Catch::Approx(4.0).epsilon(1e-12));  // nu*1 + delta11
  CHECK(std::abs(report.z_score) < 5.0);
}

TEST_CASE("mgf_eval basics") {
  Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  auto params = make_real_params(5, one, 1.5 * one);
  CHECK(mgf_eval(params, Eigen::MatrixXcd::Zero(1, 1)).real() == 1.0);

  // (1-2t)^(-nu/2) exp(delta t/(1-2t))
  const double t = 0.11, nu = 5, delta = 1.5;
  Eigen::MatrixXcd theta = t * Eigen::MatrixXcd::Identity(1, 1);
  double expected = std::pow(1 - 2 * t, -nu / 2) * std::exp(delta * t / (1 - 2 * t));
  CHECK(mgf_eval(params, theta).real() == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("mgf_eval matches the Kibble determinant form") {
  const double rho = 0.6, nu = 4;
  auto params = make_central_real_params(nu, kibble_sigma(rho));
  for (double t11 : {0.02, -0.04, 0.1})
    for (double t22 : {0.03, -0.05}) {
      Eigen::MatrixXcd theta = Eigen::MatrixXcd::Zero(2, 2);
      theta(0, 0) = t11;
      theta(1, 1) = t22;
      double expected = std::pow(
          1 - 2 * t11 - 2 * t22 + 4 * t11 * t22 - 4 * rho * rho * t11 * t22, -nu / 2);
      CHECK(mgf_eval(params, theta).real() == Catch::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("mgf_eval matches the 2x2 closed forms on a grid") {
  const double nu = 3.0;
  auto real_params = make_central_real_params(nu, Eigen::MatrixXd::Identity(2, 2));
  auto complex_params = make_wishart_params(Flavor::Complex, nu,
                                            Eigen::MatrixXcd::Identity(2, 2),
                                            Eigen::MatrixXcd::Zero(2, 2));
  for (double t11 : {0.01, 0.05})
    for (double t22 : {0.02, -0.03})
      for (double t12 : {0.015, -0.04}) {
        Eigen::MatrixXcd theta_real(2, 2);
        theta_real << t11, t12 / 2, t12 / 2, t22;
        double expected_real =
            std::pow(1 - 2 * t11 - 2 * t22 + 4 * t11 * t22 - t12 * t12, -nu / 2);
        CHECK(mgf_eval(real_params, theta_real).real() ==
              Catch::Approx(expected_real).epsilon(1e-12));

        const double t21 = 0.02;
        Eigen::MatrixXcd theta_cplx(2, 2);
        theta_cplx << t11, t21, t12, t22;  // transposed entry layout
        double expected_cplx =
            std::pow(1 - t11 - t22 + t11 * t22 - t12 * t21, -nu);
        CHECK(mgf_eval(complex_params, theta_cplx).real() ==
              Catch::Approx(expected_cplx).epsilon(1e-12));
      }
}

TEST_CASE("complex and real 2x2 MGFs agree through matched arguments") {
  // phi_nu(u,v,w) both ways: complex at (t11,t22,t12 t21)=(u,v,w) with nu;
  // real at nu' = 2 nu, t'_ii = u/2, v/2 and t'_12 = sqrt(w)
  const double nu = 2.5;
  auto complex_params = make_wishart_params(Flavor::Complex, nu,
                                            Eigen::MatrixXcd::Identity(2, 2),
                                            Eigen::MatrixXcd::Zero(2, 2));
  auto real_params = make_central_real_params(2 * nu, Eigen::MatrixXd::Identity(2, 2));
  for (double u : {0.02, 0.08})
    for (double v : {0.01, -0.06})
      for (double w : {0.001, 0.0025}) {
        Eigen::MatrixXcd theta_cplx(2, 2);
        theta_cplx << u, 1.0, w, v;  // t12 = w, t21 = 1 -> product w
        Eigen::MatrixXcd theta_real(2, 2);
        const double t12 = std::sqrt(w);
        theta_real << u / 2, t12 / 2, t12 / 2, v / 2;
        double lhs = mgf_eval(complex_params, theta_cplx).real();
        double rhs = mgf_eval(real_params, theta_real).real();
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-12));
      }
}

TEST_CASE("mgf_eval error paths") {
  Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  auto odd = make_central_real_params(5, one);
  Eigen::MatrixXcd half = 0.5 * Eigen::MatrixXcd::Identity(1, 1);
  CHECK_THROWS_AS(mgf_eval(odd, half), SingularMatrix);
  Eigen::MatrixXcd beyond = 1.0 * Eigen::MatrixXcd::Identity(1, 1);
  CHECK_THROWS_AS(mgf_eval(odd, beyond), BranchUndefined);
  auto even = make_central_real_params(6, one);  // integer exponent: defined
  CHECK_NOTHROW(mgf_eval(even, beyond));
  CHECK_THROWS_AS(mgf_eval(odd, Eigen::MatrixXcd::Zero(2, 2)), DimensionMismatch);
}

TEST_CASE("finite differences recover low-order moments") {
  Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  auto chisq = make_central_real_params(5, one);
  auto w11 = make_moment_spec(Flavor::Real, 1, {{1, 1}});
  CHECK(std::abs(mgf_moment_fd(w11, chisq, 1e-5).real() - 5.0) / 5.0 < 1e-6);

  auto kibble = make_central_real_params(4, kibble_sigma(0.5));
  auto w11w22 = make_moment_spec(Flavor::Real, 2, {{1, 1}, {2, 2}});
  CHECK(std::abs(mgf_moment_fd(w11w22, kibble, 1e-4).real() - 18.0) / 18.0 < 1e-4);

  auto cplx = make_wishart_params(Flavor::Complex, 4, Eigen::MatrixXcd::Identity(2, 2),
                                  Eigen::MatrixXcd::Zero(2, 2));
  auto w12w21 = make_moment_spec(Flavor::Complex, 2, {{1, 2}, {2, 1}});
  CHECK(std::abs(mgf_moment_fd(w12w21, cplx, 1e-4).real() - 4.0) / 4.0 < 1e-4);
}

TEST_CASE("finite differences on repeated entries and order cap") {
  Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  auto params = make_real_params(5, one, 1.0 * one);
  auto w11sq = make_moment_spec(Flavor::Real, 1, {{1, 1}, {1, 1}});
  // nu(nu+2) + 2(nu+2) delta + delta^2 = 35 + 14 + 1
  CHECK(std::abs(mgf_moment_fd(w11sq, params).real() - 50.0) / 50.0 < 1e-4);

  auto too_high = make_moment_spec(Flavor::Real, 1, {{1, 1}, {1, 1}, {1, 1}, {1, 1}});
  CHECK_THROWS_AS(mgf_moment_fd(too_high, params), OrderTooHigh);
}

TEST_CASE("central difference error scales as h^2") {
  Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  auto params = make_central_real_params(5, one);
  auto spec = make_moment_spec(Flavor::Real, 1, {{1, 1}});
  const double h = 2e-3;
  double err_h = std::abs(mgf_moment_fd(spec, params, h).real() - 5.0);
  double err_half = std::abs(mgf_moment_fd(spec, params, h / 2).real() - 5.0);
  double ratio = err_h / err_half;
  CHECK(ratio > 3.2);
  CHECK(ratio < 4.8);
}

TEST_CASE("cross_check: chi-square squared") {
  Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  auto cfg = config_for(make_real_params(5, one, 1.0 * one));
  auto spec = make_moment_spec(Flavor::Real, 1, {{1, 1}, {1, 1}});
  auto report = cross_check(spec, cfg);
  CHECK(report.symbolic == Catch::Approx(50.0).epsilon(1e-12));
  CHECK(report.has_fd);
  CHECK(report.fd_rel_err < 1e-4);
  CHECK(std::abs(report.mc.z_score) < 5.0);
  CHECK(report.pass);
}

TEST_CASE("cross_check: independent zero-mean entries give zero") {
  auto cfg = config_for(make_central_real_params(4, Eigen::MatrixXd::Identity(4, 4)),
                        50000);
  auto spec = make_moment_spec(Flavor::Real, 4, {{1, 2}, {3, 4}});
  auto report = cross_check(spec, cfg);
  CHECK(report.symbolic == 0.0);
  CHECK(std::abs(report.mc.estimate) < 5.0 * report.mc.std_error);
  CHECK(report.has_fd);
  CHECK(report.fd_rel_err < 1e-4);  // absolute error against a zero reference
  CHECK(report.pass);
}

TEST_CASE("cross_check: order-3 spec with random positive definite sigma") {
  std::mt19937 rng(5);
  Eigen::MatrixXd sigma = wishmom::testing::random_hpd(rng, 2, true).real();
  auto cfg = config_for(make_central_real_params(6, sigma), 120000);
  auto spec = make_moment_spec(Flavor::Real, 2, {{1, 1}, {2, 2}, {1, 2}});
  auto report = cross_check(spec, cfg);
  CHECK(std::abs(report.mc.z_score) < 5.0);
  CHECK(report.has_fd);
  CHECK(report.pass);
}
