// Command-line front end: single trials, Monte-Carlo sweeps, self tests and
// CSV reporting.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "sepdemix/harness.hpp"
#include "sepdemix/lifted_operator.hpp"
#include "sepdemix/serialize.hpp"
#include "sepdemix/synthesis.hpp"

namespace {

using namespace sepdemix;

int cmd_simulate(const ProblemConfig& cfg, const std::string& dump_instance, int transform_restarts) {
  HarnessOptions opts;
  opts.keep_report = true;
  if (transform_restarts > 0) opts.transform.max_restarts = transform_restarts;
  for (const std::string& warning : cfg.validate())
    std::cerr << "warning: " << warning << "\n";

  if (!dump_instance.empty()) {
    const RngStream root(cfg.seed);
    const CodingMatrices coding = generate_coding(cfg, root);
    const GroundTruth truth = generate_ground_truth(cfg, root);
    const MeasurementSet meas = synthesize_measurements(coding, truth, cfg, root);
    std::ofstream out(dump_instance);
    if (!out) {
      std::cerr << "error: cannot write " << dump_instance << "\n";
      return 1;
    }
    out << instance_to_json(cfg, coding, truth, meas).dump(2) << "\n";
  }

  const TrialRecord rec = run_trial(cfg, cfg.seed, opts);
  std::cout << to_json(rec).dump(2) << std::endl;
  return rec.success ? 0 : 2;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path, int jobs, bool resume,
              bool timing) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open config " << config_path << "\n";
    return 1;
  }
  json j;
  in >> j;
  const SweepConfig sweep = SweepConfig::from_json(j);
  const SweepResult result = run_sweep(sweep, out_path, jobs, resume, timing);
  std::cout << "cells: " << result.cells.size() << ", trials: " << result.records.size() << "\n";
  for (const CellSummary& cell : result.cells) {
    std::printf("  S=%ld R=%ld K=%ld N=%ld L=%ld  success %d/%d\n", long(cell.cfg.S),
                long(cell.cfg.R), long(cell.cfg.K), long(cell.cfg.N), long(cell.cfg.L),
                cell.successes, cell.trials);
  }
  return 0;
}

struct CheckScope {
  int failures = 0;
  void expect(const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("%-58s %s%s%s\n", name.c_str(), ok ? "PASS" : "FAIL",
                detail.empty() ? "" : "  ", detail.c_str());
    if (!ok) ++failures;
  }
};

int cmd_check() {
  CheckScope scope;
  const RngStream root(20240513);

  // adjoint identity and forward/time-domain agreement on a dimension grid
  const std::vector<std::array<Index, 3>> grid = {{8, 3, 2}, {64, 5, 6}, {257, 7, 9}};
  for (const auto& [L, K, N] : grid) {
    ProblemConfig cfg;
    cfg.L = L;
    cfg.K = K;
    cfg.N = N;
    cfg.S = std::min(K, N);
    cfg.R = cfg.S;
    const RngStream r = root.derive("dims", static_cast<std::uint64_t>(L));
    const CodingMatrices coding = generate_coding(cfg, r);
    const LiftedOperator op = build_lifted_operator(coding);

    double worst_adjoint = 0.0, worst_forward = 0.0;
    RngStream draws = r.derive("draws");
    for (int it = 0; it < 25; ++it) {
      const Eigen::MatrixXcd Z = detail::complex_gaussian(K, N, draws);
      Eigen::VectorXcd y(L);
      for (Index l = 0; l < L; ++l) y(l) = draws.cnormal();
      const cxd lhs = (forward(op, Z).array() * y.array().conjugate()).sum();
      const cxd rhs = (Z.array() * adjoint(op, y).array().conjugate()).sum();
      worst_adjoint = std::max(worst_adjoint, std::abs(lhs - rhs) / (Z.norm() * y.norm()));

      const Eigen::VectorXcd m = detail::complex_gaussian(N, 1, draws);
      const Eigen::VectorXcd h = detail::complex_gaussian(K, 1, draws);
      const Eigen::VectorXcd via_op = forward(op, lift(m, h));
      const Eigen::VectorXcd via_time =
          dft_unitary(circular_convolve((coding.C * m).eval(), (coding.B * h).eval()));
      worst_forward = std::max(worst_forward, (via_op - via_time).norm() / via_time.norm());
    }
    scope.expect("adjoint identity (L=" + std::to_string(L) + ")", worst_adjoint < 1e-10,
                 "max " + std::to_string(worst_adjoint));
    scope.expect("forward vs time-domain oracle (L=" + std::to_string(L) + ")",
                 worst_forward < 1e-9, "max " + std::to_string(worst_forward));
  }

  // Parseval under the unitary transform
  {
    RngStream r = root.derive("parseval");
    Eigen::VectorXcd x(100);
    for (Index i = 0; i < x.size(); ++i) x(i) = r.cnormal();
    const double defect = std::abs(dft_unitary(x).norm() - x.norm());
    scope.expect("unitary transform preserves norms", defect < 1e-12);
  }

  // finite-difference gradient check
  {
    ProblemConfig cfg;
    cfg.L = 32;
    cfg.K = 4;
    cfg.N = 5;
    cfg.S = 2;
    cfg.R = 2;
    RngStream r = root.derive("grad");
    const CodingMatrices coding = generate_coding(cfg, r);
    const LiftedOperator op = build_lifted_operator(coding);
    Eigen::VectorXcd y(cfg.L);
    for (Index l = 0; l < cfg.L; ++l) y(l) = r.cnormal();
    Eigen::MatrixXcd U = detail::complex_gaussian(cfg.K, cfg.S, r);
    Eigen::MatrixXcd V = detail::complex_gaussian(cfg.N, cfg.S, r);
    const double lambda = 1e-3;
    const ObjectiveValue base = objective_and_gradient(op, U, V, y, lambda);
    double worst = 0.0;
    const double step = 1e-6;
    for (int t = 0; t < 10; ++t) {
      const Index i = static_cast<Index>(r.next_u64() % static_cast<std::uint64_t>(cfg.K));
      const Index j = static_cast<Index>(r.next_u64() % static_cast<std::uint64_t>(cfg.S));
      const bool imag = (r.next_u64() & 1) != 0;
      Eigen::MatrixXcd Up = U, Um = U;
      const cxd delta = imag ? cxd(0, step) : cxd(step, 0);
      Up(i, j) += delta;
      Um(i, j) -= delta;
      const double fd = (objective_and_gradient(op, Up, V, y, lambda).value -
                         objective_and_gradient(op, Um, V, y, lambda).value) /
                        (2 * step);
      const double an = imag ? base.gradU(i, j).imag() : base.gradU(i, j).real();
      worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
    }
    scope.expect("objective gradient matches finite differences", worst < 1e-5,
                 "max rel " + std::to_string(worst));
  }

  // transform residual systems vanish at the ground-truth transform
  for (Index S : {1, 2, 3}) {
    ProblemConfig cfg;
    cfg.L = 64;
    cfg.K = 5;
    cfg.N = 6;
    cfg.S = S;
    cfg.R = S + 1;
    cfg.mode = ConstraintMode::two_sided;
    RngStream r = root.derive("oracle", static_cast<std::uint64_t>(S));
    const GroundTruth truth = generate_ground_truth(cfg, r);
    std::vector<FactoredReceiver> factored;
    for (Index rr = 0; rr < cfg.R; ++rr)
      factored.push_back(factorize_rank_s(lift_pairs(truth.M, truth.H[rr]), S));
    const auto [T_cross, G] = cross_transforms(factored, 0);
    const Eigen::MatrixXcd T_true =
        factored[0].M_tilde.completeOrthogonalDecomposition().solve(truth.M);
    const double one = residuals_one_sided(T_true, G).cwiseAbs().maxCoeff();
    const double two =
        residuals_two_sided(T_true, factored[0].M_tilde, G).cwiseAbs().maxCoeff();
    scope.expect("transform residuals vanish at truth (S=" + std::to_string(S) + ")",
                 one < 1e-8 && two < 1e-8);
  }

  std::printf("%d check(s) failed\n", scope.failures);
  return scope.failures == 0 ? 0 : 1;
}

int cmd_report(const std::string& in_path, const std::string& axis, double level) {
  const SweepResult result = summarize(read_csv(in_path));
  if (result.cells.empty()) {
    std::cerr << "no rows in " << in_path << "\n";
    return 1;
  }

  std::printf("%-12s %-10s %4s %4s %4s %3s %3s  %9s %12s\n", "experiment", "mode", "L", "K",
              "N", "S", "R", "success", "mean_max_err");
  for (const CellSummary& cell : result.cells) {
    std::printf("%-12s %-10s %4ld %4ld %4ld %3ld %3ld  %4d/%-4d %12.3e\n",
                result.records.empty() ? "-" : result.records.front().experiment_id.c_str(),
                to_string(cell.cfg.mode).c_str(), long(cell.cfg.L), long(cell.cfg.K),
                long(cell.cfg.N), long(cell.cfg.S), long(cell.cfg.R), cell.successes,
                cell.trials, cell.mean_max_err);
  }

  // ASCII heatmap: one row per slice, one column per swept axis value
  std::set<long> axis_values;
  std::map<std::string, std::map<long, double>> rows;
  for (const CellSummary& cell : result.cells) {
    long v = 0;
    if (axis == "L") v = cell.cfg.L;
    else if (axis == "K") v = cell.cfg.K;
    else if (axis == "N") v = cell.cfg.N;
    else if (axis == "S") v = cell.cfg.S;
    else if (axis == "R") v = cell.cfg.R;
    axis_values.insert(v);
    char label[64];
    std::snprintf(label, sizeof(label), "S=%ld R=%ld K=%ld N=%ld", long(cell.cfg.S),
                  long(cell.cfg.R), long(cell.cfg.K), long(cell.cfg.N));
    std::string key = label;
    if (axis == "S") key = "R=" + std::to_string(cell.cfg.R);
    rows[key][v] = cell.success_fraction;
  }
  std::printf("\nsuccess fraction by %s (0-9, * = all trials):\n", axis.c_str());
  for (const auto& [label, by_axis] : rows) {
    std::printf("  %-28s ", label.c_str());
    for (long v : axis_values) {
      auto it = by_axis.find(v);
      if (it == by_axis.end()) {
        std::putchar(' ');
      } else {
        const int decile = static_cast<int>(std::floor(it->second * 10.0 + 0.5));
        std::putchar(decile >= 10 ? '*' : static_cast<char>('0' + decile));
      }
    }
    std::putchar('\n');
  }
  std::printf("  %s values:", axis.c_str());
  for (long v : axis_values) std::printf(" %ld", v);
  std::printf("\n");

  const ThresholdSummary thresholds = detect_threshold(result, axis, level);
  std::printf("\nthresholds (%s at sustained success >= %.2f):\n", axis.c_str(), level);
  for (const SliceThreshold& st : thresholds.slices) {
    std::printf("  ");
    for (const auto& [name, value] : st.slice) std::printf("%s=%ld ", name.c_str(), value);
    if (st.threshold)
      std::printf("-> %s* = %ld\n", axis.c_str(), *st.threshold);
    else
      std::printf("-> none\n");
  }
  if (thresholds.slope)
    std::printf("linear fit vs %s: slope %.3f, intercept %.3f, R^2 %.4f\n",
                thresholds.fit_parameter.c_str(), *thresholds.slope, *thresholds.intercept,
                *thresholds.r2);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"separable blind deconvolution and demixing toolkit"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run one trial and print its record as JSON");
  ProblemConfig cfg;
  cfg.L = 64;
  cfg.K = 5;
  cfg.N = 6;
  cfg.S = 1;
  cfg.R = 1;
  std::string mode_str = "two_sided";
  std::string dump_instance;
  int transform_restarts = 0;
  simulate->add_option("--L", cfg.L, "signal length");
  simulate->add_option("--K", cfg.K, "kernel subspace dimension");
  simulate->add_option("--N", cfg.N, "signal subspace dimension");
  simulate->add_option("--S", cfg.S, "number of sources");
  simulate->add_option("--R", cfg.R, "number of receivers");
  simulate->add_option("--tau", cfg.tau, "noise bound");
  simulate->add_option("--mode", mode_str, "one_sided or two_sided");
  simulate->add_option("--seed", cfg.seed, "RNG seed");
  simulate->add_flag("--random-kernel-basis", cfg.random_kernel_basis,
                     "Haar-random orthonormal kernel basis instead of the standard basis");
  simulate->add_option("--dump-instance", dump_instance, "write the full instance as JSON");
  simulate->add_option("--transform-restarts", transform_restarts,
                       "override transform solver restarts");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a Monte-Carlo sweep from a JSON config");
  std::string config_path, out_path = "sweep.csv";
  int jobs = 0;
  bool resume = false, timing = false;
  sweep->add_option("--config", config_path, "sweep config JSON")->required();
  sweep->add_option("--out", out_path, "output CSV path");
  sweep->add_option("--jobs", jobs, "worker threads (default: all cores)");
  sweep->add_flag("--resume", resume, "skip (cell, trial) rows already in the CSV");
  sweep->add_flag("--timing", timing,
                  "write measured wall_ms (breaks byte-for-byte reproducibility)");

  // check
  auto* check = app.add_subcommand("check", "run the oracle/self-test battery");

  // report
  auto* report = app.add_subcommand("report", "summarize a sweep CSV");
  std::string in_path, axis = "L";
  double level = 0.9;
  report->add_option("--in", in_path, "input CSV")->required();
  report->add_option("--axis", axis, "threshold axis (default L)");
  report->add_option("--level", level, "success level for thresholds");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      cfg.mode = sepdemix::constraint_mode_from_string(mode_str);
      return cmd_simulate(cfg, dump_instance, transform_restarts);
    }
    if (sweep->parsed()) return cmd_sweep(config_path, out_path, jobs, resume, timing);
    if (check->parsed()) return cmd_check();
    if (report->parsed()) return cmd_report(in_path, axis, level);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
