#pragma once

#include <json.hpp>

#include "sepdemix/lifted_operator.hpp"
#include "sepdemix/metrics.hpp"
#include "sepdemix/model.hpp"

// JSON schema notes:
//  - complex numbers are [re, im] pairs
//  - matrices are arrays of rows; vectors are flat arrays
//  - ConstraintMode is "one_sided" / "two_sided"

namespace sepdemix {

using json = nlohmann::json;

inline json to_json_complex(const cxd& z) { return json::array({z.real(), z.imag()}); }

inline cxd complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("expected [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const Eigen::VectorXcd& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(to_json_complex(v(i)));
  return arr;
}

inline Eigen::VectorXcd vector_from_json(const json& j) {
  Eigen::VectorXcd v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = complex_from_json(j[static_cast<std::size_t>(i)]);
  return v;
}

inline json to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(to_json_complex(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXcd matrix_from_json(const json& j) {
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return {};
  const Index cols = static_cast<Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != cols)
      throw ValidationError("ragged matrix in JSON");
    for (Index c = 0; c < cols; ++c) m(i, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

inline json to_json(const ProblemConfig& cfg) {
  return json{{"L", cfg.L},     {"K", cfg.K},
              {"N", cfg.N},     {"S", cfg.S},
              {"R", cfg.R},     {"tau", cfg.tau},
              {"mode", to_string(cfg.mode)},
              {"seed", cfg.seed},
              {"random_kernel_basis", cfg.random_kernel_basis}};
}

inline ProblemConfig problem_config_from_json(const json& j) {
  ProblemConfig cfg;
  cfg.L = j.at("L").get<Index>();
  cfg.K = j.at("K").get<Index>();
  cfg.N = j.at("N").get<Index>();
  cfg.S = j.at("S").get<Index>();
  cfg.R = j.at("R").get<Index>();
  cfg.tau = j.value("tau", 0.0);
  cfg.mode = constraint_mode_from_string(j.value("mode", std::string("two_sided")));
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.random_kernel_basis = j.value("random_kernel_basis", false);
  return cfg;
}

/// Full problem instance: configuration, coding matrices, coefficients and
/// measurements, round-trippable through JSON.
inline json instance_to_json(const ProblemConfig& cfg, const CodingMatrices& coding,
                             const GroundTruth& truth, const MeasurementSet& measurements) {
  json j;
  j["config"] = to_json(cfg);
  j["coding"] = {{"B", to_json(coding.B)}, {"C", to_json(coding.C)}};
  json H = json::array();
  for (const auto& h : truth.H) H.push_back(to_json(h));
  j["truth"] = {{"M", to_json(truth.M)}, {"H", std::move(H)}};
  json y_hat = json::array();
  for (const auto& y : measurements.y_hat) y_hat.push_back(to_json(y));
  j["measurements"]["y_hat"] = std::move(y_hat);
  if (measurements.y_time) {
    json y_time = json::array();
    for (const auto& y : *measurements.y_time) y_time.push_back(to_json(y));
    j["measurements"]["y_time"] = std::move(y_time);
  }
  json noise = json::array();
  for (Index r = 0; r < measurements.noise_norm.size(); ++r)
    noise.push_back(measurements.noise_norm(r));
  j["measurements"]["noise_norm"] = std::move(noise);
  return j;
}

inline void instance_from_json(const json& j, ProblemConfig& cfg, CodingMatrices& coding,
                               GroundTruth& truth, MeasurementSet& measurements) {
  cfg = problem_config_from_json(j.at("config"));
  coding.B = matrix_from_json(j.at("coding").at("B"));
  coding.C = matrix_from_json(j.at("coding").at("C"));
  truth.M = matrix_from_json(j.at("truth").at("M"));
  truth.H.clear();
  for (const auto& h : j.at("truth").at("H")) truth.H.push_back(matrix_from_json(h));
  measurements.y_hat.clear();
  for (const auto& y : j.at("measurements").at("y_hat"))
    measurements.y_hat.push_back(vector_from_json(y));
  measurements.y_time.reset();
  if (j.at("measurements").contains("y_time")) {
    measurements.y_time.emplace();
    for (const auto& y : j.at("measurements").at("y_time"))
      measurements.y_time->push_back(vector_from_json(y));
  }
  const auto& noise = j.at("measurements").at("noise_norm");
  measurements.noise_norm.resize(static_cast<Index>(noise.size()));
  for (Index r = 0; r < measurements.noise_norm.size(); ++r)
    measurements.noise_norm(r) = noise[static_cast<std::size_t>(r)].get<double>();
}

inline json to_json(const LiftedOperator& op) {
  return json{{"b_rows", to_json(op.b_rows)},
              {"c_rows", to_json(op.c_rows)},
              {"convention_constant", to_json_complex(op.convention_constant)}};
}

inline json to_json(const ErrorReport& report) {
  json j;
  j["permutation"] = report.permutation;
  json phases = json::array();
  for (const auto& p : report.phases) phases.push_back(to_json_complex(p));
  j["phases"] = std::move(phases);
  json sig = json::array();
  for (Index s = 0; s < report.signal_errors.size(); ++s) sig.push_back(report.signal_errors(s));
  j["signal_errors"] = std::move(sig);
  json ker = json::array();
  for (Index r = 0; r < report.kernel_errors.rows(); ++r) {
    json row = json::array();
    for (Index s = 0; s < report.kernel_errors.cols(); ++s)
      row.push_back(report.kernel_errors(r, s));
    ker.push_back(std::move(row));
  }
  j["kernel_errors"] = std::move(ker);
  j["max_error"] = report.max_error;
  j["avg_error"] = report.avg_error;
  j["success"] = report.success;
  j["threshold"] = report.threshold;
  return j;
}

}  // namespace sepdemix
