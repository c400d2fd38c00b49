#pragma once

#include <algorithm>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wishmom/closed_forms.hpp"
#include "wishmom/combinatorics.hpp"
#include "wishmom/errors.hpp"
#include "wishmom/expr_parser.hpp"
#include "wishmom/json_io.hpp"
#include "wishmom/moment_engine.hpp"
#include "wishmom/validation.hpp"

namespace wishmom::cli {

namespace detail {

inline std::string monomial_text(const MomentMonomial& mono) {
  std::ostringstream os;
  if (mono.nu_exp == 1) os << "nu";
  else if (mono.nu_exp > 1) os << "nu^" << mono.nu_exp;
  for (const auto& [i, j] : mono.sigma)
    os << (os.tellp() > 0 ? " " : "") << "s[" << i << "," << j << "]";
  for (const auto& [i, j] : mono.delta)
    os << (os.tellp() > 0 ? " " : "") << "d[" << i << "," << j << "]";
  if (os.tellp() == 0) os << "1";
  return os.str();
}

inline std::string term_text(const MomentMonomial& mono, const BigInt& coeff) {
  return coeff.str() + " " + monomial_text(mono);
}

inline nlohmann::json term_json(const MomentMonomial& mono) {
  nlohmann::json out;
  out["nu_exp"] = mono.nu_exp;
  out["sigma"] = nlohmann::json::array();
  for (const auto& [i, j] : mono.sigma) out["sigma"].push_back({i, j});
  out["delta"] = nlohmann::json::array();
  for (const auto& [i, j] : mono.delta) out["delta"].push_back({i, j});
  return out;
}

inline std::string scalar_text(std::complex<double> value, Flavor flavor) {
  if (flavor == Flavor::Real) return nlohmann::json(value.real()).dump();
  std::ostringstream os;
  os << nlohmann::json(value.real()).dump();
  os << (value.imag() < 0 ? " - " : " + ")
     << nlohmann::json(std::abs(value.imag())).dump() << "i";
  return os.str();
}

inline std::string bivariate_text(const BivariateMomentPoly& poly, bool rho) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [key, coeff] : poly.terms()) {
    if (!first) os << " + ";
    first = false;
    os << coeff.str();
    if (key.nu_exp == 1) os << " nu";
    else if (key.nu_exp > 1) os << " nu^" << key.nu_exp;
    if (rho && key.rho2_exp > 0) os << " rho2^" << key.rho2_exp;
    if (!rho && key.delta_exp > 0) {
      os << " delta";
      if (key.delta_exp > 1) os << "^" << key.delta_exp;
    }
  }
  return first ? "0" : os.str();
}

inline int default_threads() {
  if (const char* env = std::getenv("WISHMOM_THREADS")) {
    int value = std::atoi(env);
    if (value >= 1) return value;
  }
  return 1;
}

}  // namespace detail

/**
 * Parses argv (without the program name) and executes one subcommand.
 * Results go to `out` only after the command fully succeeds, so usage
 * errors never leave partial output on the primary stream.  Exit status:
 * 0 success, 1 validation failure, 2 usage error.
 */
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact moments of real and complex noncentral Wishart matrices"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may appear after the subcommand

  std::string format = "json";
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"text", "json"}));
  int threads = detail::default_threads();
  app.add_option("--threads", threads,
                 "worker threads for Monte Carlo (default: WISHMOM_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  int max_n = kDefaultEnumerationCap;
  app.add_option("--max-n", max_n, "enumeration cap on the moment order")
      ->check(CLI::PositiveNumber);

  auto* moment = app.add_subcommand("moment", "expand or evaluate a moment expression");
  std::string flavor_name, expr, params_path;
  int p = 0;
  bool symbolic = false, shapes = false;
  moment->add_option("--flavor", flavor_name, "real or complex")
      ->required()
      ->check(CLI::IsMember({"real", "complex"}));
  moment->add_option("--p", p, "matrix dimension")->required()->check(CLI::PositiveNumber);
  moment->add_option("--expr", expr, "moment expression, e.g. \"w[1,1]*w[1,2]^2\"")
      ->required();
  moment->add_option("--params", params_path, "parameter file for numeric evaluation");
  moment->add_flag("--symbolic", symbolic, "emit the exact polynomial as JSON");
  moment->add_flag("--shapes", shapes, "group terms by index-relabeling shape");

  auto* count = app.add_subcommand("count", "exact coefficient lookup (f, g, stirling)");
  std::string table;
  int count_l = 0, count_m = 0, count_n = 0;
  count->add_option("table", table, "which table: f, g, or stirling")
      ->required()
      ->check(CLI::IsMember({"f", "g", "stirling"}));
  count->add_option("--l", count_l)->required();
  count->add_option("--m", count_m)->required();
  count->add_option("--n", count_n)->required();

  auto* poly = app.add_subcommand("poly", "generating polynomial phi or psi");
  std::string poly_kind;
  int poly_m = 0, poly_n = 0;
  poly->add_option("kind", poly_kind, "phi or psi")
      ->required()
      ->check(CLI::IsMember({"phi", "psi"}));
  poly->add_option("--m", poly_m)->required();
  poly->add_option("--n", poly_n)->required();

  auto* closed = app.add_subcommand("closed", "closed-form moment formulas");
  std::string formula;
  int closed_n = -1, closed_a = 0, closed_b = 0, closed_c = 0;
  closed->add_option("formula", formula,
                     "chisq, laguerre, hermite, kibble, real2x2, or complex2x2")
      ->required()
      ->check(CLI::IsMember(
          {"chisq", "laguerre", "hermite", "kibble", "real2x2", "complex2x2"}));
  closed->add_option("--n", closed_n, "moment order (chisq, laguerre, hermite)");
  closed->add_option("--a", closed_a, "half w12-power (real2x2) / w12 w21 power (complex2x2)");
  closed->add_option("--b", closed_b, "w11 power");
  closed->add_option("--c", closed_c, "w22 power");

  auto* validate = app.add_subcommand("validate", "cross-check symbolic vs Monte Carlo");
  std::string v_expr, v_params;
  std::uint64_t samples = 1000000, seed = 1;
  unsigned streams = 1;
  bool with_fd = false;
  double fd_step = 0.0;
  validate->add_option("--expr", v_expr)->required();
  validate->add_option("--params", v_params, "parameter file (flavor, nu, sigma, delta)")
      ->required();
  validate->add_option("--samples", samples, "Monte Carlo sample count");
  validate->add_option("--seed", seed, "RNG seed");
  validate->add_option("--streams", streams, "independent accumulation streams")
      ->check(CLI::PositiveNumber);
  validate->add_flag("--fd", with_fd, "also run the MGF finite-difference check");
  validate->add_option("--fd-step", fd_step, "finite-difference step size");

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    auto active = app.get_subcommands();
    out << (active.empty() ? app.help() : active.front()->help());
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::ostringstream buffer;
  int status = 0;
  try {
    if (*moment) {
      const Flavor flavor = flavor_name == "real" ? Flavor::Real : Flavor::Complex;
      MomentSpec spec = parse_moment_expression(expr, flavor, p);
      MomentPolynomial polynomial = expand_moment(spec, max_n);
      if (shapes) {
        auto groups = group_by_shape(polynomial);
        if (format == "json") {
          nlohmann::json shape_list = nlohmann::json::array();
          for (const auto& g : groups) {
            nlohmann::json entry = detail::term_json(g.representative);
            entry["count"] = g.count.str();
            shape_list.push_back(std::move(entry));
          }
          buffer << nlohmann::json{{"total_mass", polynomial.total_mass().str()},
                                   {"shapes", std::move(shape_list)}}
                        .dump()
                 << "\n";
        } else {
          buffer << "total mass " << polynomial.total_mass().str() << "\n";
          for (const auto& g : groups)
            buffer << g.count.str() << " x "
                   << detail::monomial_text(g.representative) << "\n";
        }
      } else if (symbolic) {
        if (format == "json") {
          buffer << polynomial_to_json(polynomial).dump() << "\n";
        } else {
          for (const auto& [mono, coeff] : polynomial.terms())
            buffer << detail::term_text(mono, coeff) << "\n";
        }
      } else {
        if (params_path.empty())
          throw DomainError("moment: supply --params for evaluation or use --symbolic");
        WishartParams params = load_params(params_path);
        if (params.flavor != flavor)
          throw FlavorMismatch("moment: parameter file flavor does not match --flavor");
        if (params.p() != p)
          throw DimensionMismatch("moment: parameter file dimension does not match --p");
        std::complex<double> value = evaluate(polynomial, params);
        if (format == "json") {
          if (flavor == Flavor::Real) buffer << nlohmann::json(value.real()).dump() << "\n";
          else
            buffer << nlohmann::json{{"re", value.real()}, {"im", value.imag()}}.dump()
                   << "\n";
        } else {
          buffer << detail::scalar_text(value, flavor) << "\n";
        }
      }
    } else if (*count) {
      BigInt value;
      if (table == "f") value = coeff_f(count_l, count_m, count_n);
      else if (table == "g") value = coeff_g(count_l, count_m, count_n);
      else value = noncentral_stirling(count_n, count_m, count_l);
      buffer << value.str() << "\n";
    } else if (*poly) {
      NuPolynomial value = poly_kind == "phi" ? phi(poly_m, poly_n) : psi(poly_m, poly_n);
      if (format == "json") buffer << nu_polynomial_to_json(value).dump() << "\n";
      else buffer << value.str() << "\n";
    } else if (*closed) {
      if (formula == "chisq") {
        if (closed_n < 1) throw DomainError("closed chisq requires --n >= 1");
        auto value = noncentral_chisq_moment(closed_n);
        if (format == "json") buffer << bivariate_to_json(value, "delta_exp").dump() << "\n";
        else buffer << detail::bivariate_text(value, false) << "\n";
      } else if (formula == "laguerre") {
        if (closed_n < 0) throw DomainError("closed laguerre requires --n >= 0");
        auto coeffs = laguerre_coeffs(closed_n);
        if (format == "json") {
          nlohmann::json powers = nlohmann::json::array();
          for (const auto& c : coeffs) {
            nlohmann::json inner = nlohmann::json::array();
            for (const auto& v : c.coefficients()) inner.push_back(v.str());
            powers.push_back(std::move(inner));
          }
          buffer << nlohmann::json{{"n", closed_n}, {"coefficients_by_x_power", powers}}
                        .dump()
                 << "\n";
        } else {
          for (int k = closed_n; k >= 0; --k)
            buffer << "x^" << k << ": " << coeffs[static_cast<std::size_t>(k)].str()
                   << "\n";
        }
      } else if (formula == "hermite") {
        if (closed_n < 0) throw DomainError("closed hermite requires --n >= 0");
        auto coeffs = hermite_coeffs(closed_n);
        if (format == "json") {
          nlohmann::json list = nlohmann::json::array();
          for (const auto& c : coeffs) list.push_back(c.str());
          buffer << nlohmann::json{{"n", closed_n}, {"coefficients", list}}.dump() << "\n";
        } else {
          for (int k = closed_n; k >= 0; --k)
            if (coeffs[static_cast<std::size_t>(k)] != 0)
              buffer << "x^" << k << ": " << coeffs[static_cast<std::size_t>(k)].str()
                     << "\n";
        }
      } else if (formula == "kibble") {
        auto value = kibble_moment(closed_b, closed_c);
        if (format == "json") buffer << bivariate_to_json(value, "rho2_exp").dump() << "\n";
        else buffer << detail::bivariate_text(value, true) << "\n";
      } else if (formula == "real2x2") {
        auto value = real_2x2_moment(closed_a, closed_b, closed_c);
        if (format == "json") buffer << nu_polynomial_to_json(value).dump() << "\n";
        else buffer << value.str() << "\n";
      } else {
        auto value = complex_2x2_moment(closed_a, closed_b, closed_c);
        if (format == "json") buffer << nu_polynomial_to_json(value).dump() << "\n";
        else buffer << value.str() << "\n";
      }
    } else if (*validate) {
      std::ifstream in(v_params);
      if (!in) throw IoError("cannot open parameter file: " + v_params);
      nlohmann::json params_json;
      try {
        in >> params_json;
      } catch (const nlohmann::json::exception& e) {
        throw SchemaError("invalid JSON in " + v_params + ": " + e.what());
      }
      WishartParams params = params_from_json(params_json);
      MomentSpec spec = parse_moment_expression(v_expr, params.flavor, params.p());
      SimulationConfig cfg =
          make_simulation_config(params, mean_vectors_from_json(params_json), samples,
                                 seed, streams, threads);
      CrossCheckReport report = cross_check(spec, cfg, {}, fd_step, with_fd);
      if (format == "json") {
        buffer << report_to_json(report, params.flavor).dump() << "\n";
      } else {
        buffer << "symbolic: " << report.symbolic << "\n";
        buffer << "mc:       " << report.mc.estimate << " +/- " << report.mc.std_error
               << " (n=" << report.mc.n_samples << ", z=" << report.mc.z_score << ") ["
               << report.mc.rng_name << ", seed " << report.mc.seed << "]\n";
        if (report.has_fd)
          buffer << "fd:       " << report.fd_value << " (rel err " << report.fd_rel_err
                 << ")\n";
        buffer << "pass:     " << (report.pass ? "true" : "false") << "\n";
      }
      status = report.pass ? 0 : 1;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
  out << buffer.str();
  return status;
}

inline int run_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args), std::cout, std::cerr);
}

}  // namespace wishmom::cli
