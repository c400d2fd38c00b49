#pragma once

#include <complex>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wishmom/closed_forms.hpp"
#include "wishmom/errors.hpp"
#include "wishmom/moment_engine.hpp"
#include "wishmom/validation.hpp"
#include "wishmom/wishart_params.hpp"

namespace wishmom {

// Coefficients travel as decimal strings so arbitrary precision survives
// any JSON parser.

inline nlohmann::json polynomial_to_json(const MomentPolynomial& poly) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [mono, coeff] : poly.terms()) {
    nlohmann::json term;
    term["nu_exp"] = mono.nu_exp;
    term["sigma"] = nlohmann::json::array();
    for (const auto& [i, j] : mono.sigma) term["sigma"].push_back({i, j});
    term["delta"] = nlohmann::json::array();
    for (const auto& [i, j] : mono.delta) term["delta"].push_back({i, j});
    term["coeff"] = coeff.str();
    out.push_back(std::move(term));
  }
  return out;
}

namespace detail {

inline std::vector<std::pair<int, int>> pairs_from_json(const nlohmann::json& arr,
                                                        const char* what) {
  if (!arr.is_array()) throw SchemaError(std::string(what) + " must be an array");
  std::vector<std::pair<int, int>> out;
  for (const auto& pair : arr) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number_integer())
      throw SchemaError(std::string(what) + " entries must be [i, j] integer pairs");
    out.emplace_back(pair[0].get<int>(), pair[1].get<int>());
  }
  return out;
}

}  // namespace detail

inline MomentPolynomial polynomial_from_json(const nlohmann::json& json,
                                             const MomentSpec& spec) {
  if (!json.is_array()) throw SchemaError("polynomial JSON must be an array of terms");
  MomentPolynomial::TermMap terms;
  for (const auto& term : json) {
    if (!term.is_object() || !term.contains("nu_exp") || !term.contains("coeff") ||
        !term.contains("sigma") || !term.contains("delta"))
      throw SchemaError("polynomial term must have nu_exp, sigma, delta, coeff");
    if (!term["nu_exp"].is_number_integer() || term["nu_exp"].get<int>() < 0)
      throw SchemaError("nu_exp must be a nonnegative integer");
    if (!term["coeff"].is_string())
      throw SchemaError("coeff must be a decimal string");
    MomentMonomial mono;
    mono.nu_exp = term["nu_exp"].get<int>();
    mono.sigma = detail::pairs_from_json(term["sigma"], "sigma");
    mono.delta = detail::pairs_from_json(term["delta"], "delta");
    for (auto& [i, j] : mono.sigma)
      if (spec.flavor == Flavor::Real && i > j) std::swap(i, j);
    for (auto& [i, j] : mono.delta)
      if (spec.flavor == Flavor::Real && i > j) std::swap(i, j);
    std::sort(mono.sigma.begin(), mono.sigma.end());
    std::sort(mono.delta.begin(), mono.delta.end());
    BigInt coeff;
    try {
      coeff = BigInt(term["coeff"].get<std::string>());
    } catch (const std::exception&) {
      throw SchemaError("coeff is not a decimal integer: " +
                        term["coeff"].get<std::string>());
    }
    terms[std::move(mono)] += coeff;
  }
  return MomentPolynomial(spec, std::move(terms));
}

inline nlohmann::json nu_polynomial_to_json(const NuPolynomial& poly) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : poly.coefficients()) coeffs.push_back(c.str());
  return nlohmann::json{{"coefficients", std::move(coeffs)}};
}

// Bivariate closed forms: `second` names the non-nu variable exponent key
// ("delta_exp" or "rho2_exp").
inline nlohmann::json bivariate_to_json(const BivariateMomentPoly& poly,
                                        const std::string& second) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [key, coeff] : poly.terms()) {
    nlohmann::json term;
    term["nu_exp"] = key.nu_exp;
    term[second] = second == "rho2_exp" ? key.rho2_exp : key.delta_exp;
    term["coeff"] = coeff.str();
    terms.push_back(std::move(term));
  }
  return nlohmann::json{{"variables", {"nu", second == "rho2_exp" ? "rho2" : "delta"}},
                        {"terms", std::move(terms)}};
}

namespace detail {

inline std::complex<double> entry_from_json(const nlohmann::json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw SchemaError("matrix entry must be a number or a [re, im] pair");
}

inline Eigen::MatrixXcd matrix_from_json(const nlohmann::json& rows, const char* what) {
  if (!rows.is_array() || rows.empty())
    throw SchemaError(std::string(what) + " must be a nonempty array of rows");
  const auto p = rows.size();
  Eigen::MatrixXcd m(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    if (!rows[i].is_array() || rows[i].size() != p)
      throw SchemaError(std::string(what) + " must be square");
    for (std::size_t j = 0; j < p; ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          entry_from_json(rows[i][j]);
  }
  return m;
}

}  // namespace detail

inline WishartParams params_from_json(const nlohmann::json& json) {
  if (!json.is_object()) throw SchemaError("params must be a JSON object");
  if (!json.contains("flavor") || !json["flavor"].is_string())
    throw SchemaError("params require a \"flavor\" of \"real\" or \"complex\"");
  const std::string flavor_name = json["flavor"].get<std::string>();
  Flavor flavor;
  if (flavor_name == "real") flavor = Flavor::Real;
  else if (flavor_name == "complex") flavor = Flavor::Complex;
  else throw SchemaError("unknown flavor: " + flavor_name);
  if (!json.contains("nu") || !json["nu"].is_number())
    throw SchemaError("params require a numeric \"nu\"");
  if (!json.contains("sigma")) throw SchemaError("params require \"sigma\"");
  Eigen::MatrixXcd sigma = detail::matrix_from_json(json["sigma"], "sigma");
  Eigen::MatrixXcd delta;
  if (json.contains("delta")) {
    delta = detail::matrix_from_json(json["delta"], "delta");
  } else {
    delta = Eigen::MatrixXcd::Zero(sigma.rows(), sigma.cols());  // central case
  }
  return make_wishart_params(flavor, json["nu"].get<double>(), std::move(sigma),
                             std::move(delta));
}

// Optional "mean_vectors" key: a list of vectors whose outer-product sum
// must reproduce delta (checked by make_simulation_config).
inline std::optional<std::vector<Eigen::VectorXcd>> mean_vectors_from_json(
    const nlohmann::json& json) {
  if (!json.contains("mean_vectors")) return std::nullopt;
  const auto& rows = json["mean_vectors"];
  if (!rows.is_array()) throw SchemaError("mean_vectors must be an array of vectors");
  std::vector<Eigen::VectorXcd> out;
  for (const auto& row : rows) {
    if (!row.is_array()) throw SchemaError("each mean vector must be an array");
    Eigen::VectorXcd v(row.size());
    for (std::size_t i = 0; i < row.size(); ++i)
      v(static_cast<Eigen::Index>(i)) = detail::entry_from_json(row[i]);
    out.push_back(std::move(v));
  }
  return out;
}

inline WishartParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open parameter file: " + path);
  nlohmann::json json;
  try {
    in >> json;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("invalid JSON in " + path + ": " + e.what());
  }
  return params_from_json(json);
}

inline nlohmann::json params_to_json(const WishartParams& params) {
  const auto matrix = [&](const Eigen::MatrixXcd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (params.flavor == Flavor::Real) row.push_back(m(i, j).real());
        else row.push_back({m(i, j).real(), m(i, j).imag()});
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };
  return nlohmann::json{{"flavor", to_string(params.flavor)},
                        {"nu", params.nu},
                        {"sigma", matrix(params.sigma)},
                        {"delta", matrix(params.delta)}};
}

inline nlohmann::json report_to_json(const CrossCheckReport& report, Flavor flavor) {
  nlohmann::json mc{{"estimate", report.mc.estimate},
                    {"se", report.mc.std_error},
                    {"n", report.mc.n_samples},
                    {"z", report.mc.z_score},
                    {"rng", report.mc.rng_name},
                    {"seed", report.mc.seed}};
  if (flavor == Flavor::Complex) {
    mc["imag_mean"] = report.mc.imag_mean;
    mc["imag_se"] = report.mc.imag_std_error;
  }
  nlohmann::json out{{"symbolic", report.symbolic},
                     {"mc", std::move(mc)},
                     {"fd", nullptr},
                     {"pass", report.pass}};
  if (report.has_fd)
    out["fd"] = nlohmann::json{{"value", report.fd_value}, {"rel_err", report.fd_rel_err}};
  return out;
}

}  // namespace wishmom
