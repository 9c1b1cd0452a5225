#include "sepdemix/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "sepdemix/lifted_operator.hpp"
#include "sepdemix/synthesis.hpp"

namespace sepdemix {

std::string to_string(FailureCategory category) {
  switch (category) {
    case FailureCategory::none: return "none";
    case FailureCategory::matrix_recovery: return "matrix_recovery";
    case FailureCategory::transform_nonconverged: return "transform_nonconverged";
    case FailureCategory::transform_spurious: return "transform_spurious";
  }
  return "none";
}

FailureCategory failure_category_from_string(const std::string& s) {
  if (s == "none") return FailureCategory::none;
  if (s == "matrix_recovery") return FailureCategory::matrix_recovery;
  if (s == "transform_nonconverged") return FailureCategory::transform_nonconverged;
  if (s == "transform_spurious") return FailureCategory::transform_spurious;
  throw ValidationError("unknown failure category: " + s);
}

namespace {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

json json_number(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

}  // namespace

TrialRecord run_trial(const ProblemConfig& cfg, std::uint64_t seed, const HarnessOptions& opts) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();

  TrialRecord rec;
  rec.cfg = cfg;
  rec.cfg.seed = seed;
  rec.seed = seed;

  const RngStream root(seed);
  const CodingMatrices coding = generate_coding(cfg, root);
  const GroundTruth truth = generate_ground_truth(cfg, root);
  const MeasurementSet meas = synthesize_measurements(coding, truth, cfg, root);
  const LiftedOperator op = build_lifted_operator(coding);

  const auto finish = [&](FailureCategory category) {
    rec.failure = rec.success ? FailureCategory::none : category;
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                            t_start)
                      .count();
    return rec;
  };

  // Stage 1: per-receiver matrix recovery.
  SolverOptions sopts = opts.solver;
  sopts.rank = cfg.S + opts.rank_slack;
  sopts.tau = cfg.tau;
  rec.matrix_resids.resize(cfg.R);
  rec.matrix_errors.resize(cfg.R);
  std::vector<Eigen::MatrixXcd> Z_hats(cfg.R);
  try {
    for (Index r = 0; r < cfg.R; ++r) {
      const RecoveredMatrix rm =
          recover_matrix(op, meas.y_hat[r], sopts, root.derive("matrix", static_cast<std::uint64_t>(r)));
      Z_hats[r] = rm.Z_hat;
      rec.matrix_resids(r) = rm.resid;
      rec.matrix_errors(r) = relative_error(rm.Z_hat, lift_pairs(truth.M, truth.H[r]));
    }
  } catch (const SolverDivergedError&) {
    rec.matrix_resids.setConstant(std::numeric_limits<double>::infinity());
    rec.matrix_errors.setConstant(std::numeric_limits<double>::infinity());
    rec.matrix_resid_max = rec.matrix_err_max = std::numeric_limits<double>::infinity();
    return finish(FailureCategory::matrix_recovery);
  }
  rec.matrix_resid_max = rec.matrix_resids.maxCoeff();
  rec.matrix_err_max = rec.matrix_errors.maxCoeff();
  if (!(rec.matrix_err_max <= opts.success_threshold))
    return finish(FailureCategory::matrix_recovery);

  // Stage 2: factor, align across receivers, solve for the basis transform.
  std::vector<FactoredReceiver> factored;
  std::vector<Eigen::MatrixXcd> G;
  FactoredReceiver* f_r0 = nullptr;
  try {
    factored.reserve(cfg.R);
    for (Index r = 0; r < cfg.R; ++r) factored.push_back(factorize_rank_s(Z_hats[r], cfg.S));
    G = cross_transforms(factored, opts.r0).second;
    f_r0 = &factored[opts.r0];
  } catch (const Error&) {
    // a deficient or degenerate factorization means the recovered matrices
    // were not good enough
    return finish(FailureCategory::matrix_recovery);
  }

  TransformResidualFn residual_fn;
  if (cfg.mode == ConstraintMode::two_sided) {
    const Eigen::MatrixXcd M0 = f_r0->M_tilde;
    residual_fn = [M0, &G](const Eigen::MatrixXcd& T) {
      return residuals_two_sided(T, M0, G);
    };
  } else {
    residual_fn = [&G](const Eigen::MatrixXcd& T) { return residuals_one_sided(T, G); };
  }

  TransformSolverOptions topts = opts.transform;
  std::optional<ErrorReport> accepted_report;
  topts.accept = [&](const TransformSolution& sol) {
    try {
      auto [M_hat, H_hat] = reconstruct_vectors(*f_r0, G, sol.T);
      const auto perm = match_pairs(truth.M, M_hat);
      ErrorReport rep = aligned_errors(truth, M_hat, H_hat, perm, opts.success_threshold);
      if (rep.success) {
        accepted_report = std::move(rep);
        return true;
      }
    } catch (const Error&) {
    }
    return false;
  };

  const TransformSolution sol = solve_transform(residual_fn, cfg.S, topts, root.derive("transform"));
  rec.transform_converged = sol.converged;
  rec.transform_resid = sol.resid_norm;

  std::optional<ErrorReport> report = std::move(accepted_report);
  if (!report && sol.T.size() > 0) {
    try {
      auto [M_hat, H_hat] = reconstruct_vectors(*f_r0, G, sol.T);
      const auto perm = match_pairs(truth.M, M_hat);
      report = aligned_errors(truth, M_hat, H_hat, perm, opts.success_threshold);
    } catch (const Error&) {
    }
  }
  if (report) {
    rec.max_vec_err = report->max_error;
    rec.avg_vec_err = report->avg_error;
    rec.success = report->success;
    if (opts.keep_report) rec.report = std::move(report);
  }

  if (rec.success) return finish(FailureCategory::none);
  return finish(sol.converged ? FailureCategory::transform_spurious
                              : FailureCategory::transform_nonconverged);
}

// --- sweep configuration ----------------------------------------------------

namespace {

long coordinate(const ProblemConfig& cfg, const std::string& name) {
  if (name == "L") return cfg.L;
  if (name == "K") return cfg.K;
  if (name == "N") return cfg.N;
  if (name == "S") return cfg.S;
  if (name == "R") return cfg.R;
  throw ConfigError("unknown parameter name: " + name);
}

long apply_r_rule(const std::string& rule, long S) {
  if (rule == "S") return S;
  if (rule == "S+1") return S + 1;
  if (rule == "S+2") return S + 2;
  if (rule == "2S") return 2 * S;
  throw ConfigError("unknown R rule: " + rule + " (expected S, S+1, S+2 or 2S)");
}

}  // namespace

SweepConfig SweepConfig::from_json(const json& j) {
  SweepConfig sweep;
  sweep.experiment_id = j.value("experiment_id", std::string("sweep"));
  if (sweep.experiment_id.find_first_of(",\n") != std::string::npos)
    throw ConfigError("experiment_id must not contain commas or newlines");
  sweep.mode = constraint_mode_from_string(j.value("mode", std::string("two_sided")));
  sweep.tau = j.value("tau", 0.0);
  if (j.contains("fixed"))
    for (const auto& [key, value] : j.at("fixed").items()) sweep.fixed[key] = value.get<long>();
  if (j.contains("axes"))
    for (const auto& [key, value] : j.at("axes").items())
      sweep.axes[key] = value.get<std::vector<long>>();
  if (j.contains("L_by_S"))
    for (const auto& [key, value] : j.at("L_by_S").items())
      sweep.L_by_S[std::stol(key)] = value.get<std::vector<long>>();
  sweep.R_rule = j.value("R_rule", std::string());
  sweep.trials = j.value("trials", 10);
  sweep.base_seed = j.value("base_seed", std::uint64_t{0});
  sweep.success_threshold = j.value("success_threshold", 1e-3);
  sweep.harness.success_threshold = sweep.success_threshold;
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    SolverOptions& so = sweep.harness.solver;
    so.max_iters = s.value("max_iters", so.max_iters);
    so.max_restarts = s.value("max_restarts", so.max_restarts);
    so.resid_tol = s.value("resid_tol", so.resid_tol);
    so.grad_tol = s.value("grad_tol", so.grad_tol);
    if (s.contains("lambda")) so.lambda = s.at("lambda").get<double>();
    sweep.harness.rank_slack = s.value("rank_slack", long{0});
  }
  if (j.contains("transform")) {
    const json& t = j.at("transform");
    TransformSolverOptions& to = sweep.harness.transform;
    to.max_restarts = t.value("max_restarts", to.max_restarts);
    to.max_iters = t.value("max_iters", to.max_iters);
    to.resid_tol = t.value("resid_tol", to.resid_tol);
  }
  sweep.harness.r0 = j.value("r0", long{0});
  if (sweep.trials < 1) throw ConfigError("trials must be >= 1");
  return sweep;
}

std::vector<ProblemConfig> SweepConfig::cells() const {
  const auto values_of = [&](const std::string& name) -> std::vector<long> {
    if (auto it = axes.find(name); it != axes.end()) {
      if (it->second.empty()) throw ConfigError("axis " + name + " is empty");
      return it->second;
    }
    if (auto it = fixed.find(name); it != fixed.end()) return {it->second};
    throw ConfigError("parameter " + name + " is neither fixed nor an axis");
  };

  const std::vector<long> s_values = values_of("S");
  const std::vector<long> k_values = values_of("K");
  const std::vector<long> n_values = values_of("N");

  std::vector<ProblemConfig> out;
  for (long S : s_values) {
    std::vector<long> r_values;
    if (axes.count("R") || fixed.count("R")) {
      r_values = values_of("R");
    } else if (!R_rule.empty()) {
      r_values = {apply_r_rule(R_rule, S)};
    } else {
      throw ConfigError("parameter R is neither fixed, an axis, nor derived by R_rule");
    }
    std::vector<long> l_values;
    if (auto it = L_by_S.find(S); it != L_by_S.end()) {
      l_values = it->second;
    } else {
      l_values = values_of("L");
    }
    for (long R : r_values)
      for (long K : k_values)
        for (long N : n_values)
          for (long L : l_values) {
            ProblemConfig cfg;
            cfg.L = L;
            cfg.K = K;
            cfg.N = N;
            cfg.S = S;
            cfg.R = R;
            cfg.tau = tau;
            cfg.mode = mode;
            cfg.validate();
            out.push_back(cfg);
          }
  }
  if (out.empty()) throw ConfigError("sweep has no cells");
  return out;
}

std::uint64_t trial_seed(std::uint64_t base_seed, const ProblemConfig& cfg, int trial) {
  std::uint64_t h = base_seed;
  const auto mix = [&h](std::uint64_t v) { h = splitmix64(h ^ splitmix64(v)); };
  mix(static_cast<std::uint64_t>(cfg.L));
  mix(static_cast<std::uint64_t>(cfg.K));
  mix(static_cast<std::uint64_t>(cfg.N));
  mix(static_cast<std::uint64_t>(cfg.S));
  mix(static_cast<std::uint64_t>(cfg.R));
  mix(cfg.mode == ConstraintMode::two_sided ? 2u : 1u);
  mix(std::bit_cast<std::uint64_t>(cfg.tau));
  mix(static_cast<std::uint64_t>(trial));
  return h;
}

// --- CSV ----------------------------------------------------------------

const char* const kCsvHeader =
    "experiment_id,mode,L,K,N,S,R,tau,trial,seed,matrix_resid_max,matrix_err_max,"
    "transform_converged,transform_resid,max_vec_err,avg_vec_err,success,failure_category,"
    "wall_ms";

std::string csv_row(const TrialRecord& rec, bool write_timing) {
  std::ostringstream os;
  os << rec.experiment_id << ',' << to_string(rec.cfg.mode) << ',' << rec.cfg.L << ','
     << rec.cfg.K << ',' << rec.cfg.N << ',' << rec.cfg.S << ',' << rec.cfg.R << ','
     << fmt_double(rec.cfg.tau) << ',' << rec.trial << ',' << rec.seed << ','
     << fmt_double(rec.matrix_resid_max) << ',' << fmt_double(rec.matrix_err_max) << ','
     << (rec.transform_converged ? 1 : 0) << ',' << fmt_double(rec.transform_resid) << ','
     << fmt_double(rec.max_vec_err) << ',' << fmt_double(rec.avg_vec_err) << ','
     << (rec.success ? 1 : 0) << ',' << to_string(rec.failure) << ','
     << (write_timing ? fmt_double(rec.wall_ms) : std::string("0"));
  return os.str();
}

namespace {

std::optional<TrialRecord> parse_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (fields.size() != 19) return std::nullopt;
  try {
    TrialRecord rec;
    rec.experiment_id = fields[0];
    rec.cfg.mode = constraint_mode_from_string(fields[1]);
    rec.cfg.L = std::stol(fields[2]);
    rec.cfg.K = std::stol(fields[3]);
    rec.cfg.N = std::stol(fields[4]);
    rec.cfg.S = std::stol(fields[5]);
    rec.cfg.R = std::stol(fields[6]);
    rec.cfg.tau = std::stod(fields[7]);
    rec.trial = std::stoi(fields[8]);
    rec.seed = std::stoull(fields[9]);
    rec.cfg.seed = rec.seed;
    rec.matrix_resid_max = std::stod(fields[10]);
    rec.matrix_err_max = std::stod(fields[11]);
    rec.transform_converged = fields[12] == "1";
    rec.transform_resid = std::stod(fields[13]);
    rec.max_vec_err = std::stod(fields[14]);
    rec.avg_vec_err = std::stod(fields[15]);
    rec.success = fields[16] == "1";
    rec.failure = failure_category_from_string(fields[17]);
    rec.wall_ms = std::stod(fields[18]);
    return rec;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string job_key(const std::string& experiment_id, const ProblemConfig& cfg, int trial) {
  std::ostringstream os;
  os << experiment_id << ',' << to_string(cfg.mode) << ',' << cfg.L << ',' << cfg.K << ','
     << cfg.N << ',' << cfg.S << ',' << cfg.R << ',' << fmt_double(cfg.tau) << ',' << trial;
  return os.str();
}

}  // namespace

std::vector<TrialRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open CSV file: " + path);
  std::vector<TrialRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("experiment_id,", 0) == 0) continue;
    if (auto rec = parse_csv_row(line)) records.push_back(std::move(*rec));
  }
  return records;
}

SweepResult summarize(std::vector<TrialRecord> records) {
  SweepResult result;
  std::map<std::string, std::size_t> cell_index;
  std::vector<std::pair<double, int>> err_acc;  // parallel to result.cells
  for (const auto& rec : records) {
    const std::string key = job_key(rec.experiment_id, rec.cfg, /*trial=*/-1);
    auto [it, inserted] = cell_index.try_emplace(key, result.cells.size());
    if (inserted) {
      CellSummary cell;
      cell.cfg = rec.cfg;
      result.cells.push_back(cell);
      err_acc.push_back({0.0, 0});
    }
    CellSummary& cell = result.cells[it->second];
    cell.trials += 1;
    if (rec.success)
      cell.successes += 1;
    else
      cell.failures[rec.failure] += 1;
    cell.mean_wall_ms += rec.wall_ms;
    if (std::isfinite(rec.max_vec_err)) {
      err_acc[it->second].first += rec.max_vec_err;
      err_acc[it->second].second += 1;
    }
  }
  for (std::size_t i = 0; i < result.cells.size(); ++i) {
    CellSummary& cell = result.cells[i];
    cell.success_fraction = cell.trials ? static_cast<double>(cell.successes) / cell.trials : 0.0;
    cell.mean_wall_ms = cell.trials ? cell.mean_wall_ms / cell.trials : 0.0;
    if (err_acc[i].second > 0) cell.mean_max_err = err_acc[i].first / err_acc[i].second;
  }
  std::sort(result.cells.begin(), result.cells.end(),
            [](const CellSummary& a, const CellSummary& b) {
              return std::tuple(a.cfg.S, a.cfg.R, a.cfg.K, a.cfg.N, a.cfg.L) <
                     std::tuple(b.cfg.S, b.cfg.R, b.cfg.K, b.cfg.N, b.cfg.L);
            });
  result.records = std::move(records);
  return result;
}

SweepResult run_sweep(const SweepConfig& sweep, const std::string& csv_path, int jobs,
                      bool resume, bool write_timing) {
  const std::vector<ProblemConfig> cell_list = sweep.cells();

  struct Job {
    ProblemConfig cfg;
    int trial;
    std::uint64_t seed;
  };
  std::vector<Job> job_list;
  job_list.reserve(cell_list.size() * static_cast<std::size_t>(sweep.trials));
  for (const ProblemConfig& cfg : cell_list)
    for (int t = 0; t < sweep.trials; ++t)
      job_list.push_back({cfg, t, trial_seed(sweep.base_seed, cfg, t)});

  std::vector<std::optional<TrialRecord>> slots(job_list.size());
  std::vector<char> prewritten(job_list.size(), 0);

  namespace fs = std::filesystem;
  std::vector<std::string> kept_lines;
  if (resume && fs::exists(csv_path)) {
    std::map<std::string, TrialRecord> existing;
    std::ifstream in(csv_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line.rfind("experiment_id,", 0) == 0) continue;
      if (auto rec = parse_csv_row(line)) {
        existing[job_key(rec->experiment_id, rec->cfg, rec->trial)] = *rec;
        kept_lines.push_back(line);
      }
    }
    for (std::size_t i = 0; i < job_list.size(); ++i) {
      auto it = existing.find(job_key(sweep.experiment_id, job_list[i].cfg, job_list[i].trial));
      if (it != existing.end()) {
        slots[i] = it->second;
        prewritten[i] = 1;
      }
    }
  }

  std::ofstream out(csv_path, std::ios::trunc);
  if (!out) throw Error("cannot open output CSV: " + csv_path);
  out << kCsvHeader << '\n';
  for (const std::string& line : kept_lines) out << line << '\n';
  out.flush();

  std::mutex mu;
  std::size_t cursor = 0;
  const auto flush_ready = [&]() {  // callers hold mu
    while (cursor < slots.size() && slots[cursor].has_value()) {
      if (!prewritten[cursor]) out << csv_row(*slots[cursor], write_timing) << '\n';
      ++cursor;
    }
    out.flush();
  };
  {
    std::lock_guard<std::mutex> lock(mu);
    flush_ready();
  }

  int worker_count = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
  if (worker_count < 1) worker_count = 1;
  worker_count = std::min<std::size_t>(worker_count, job_list.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  const auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= job_list.size()) return;
      if (prewritten[i]) continue;
      try {
        TrialRecord rec = run_trial(job_list[i].cfg, job_list[i].seed, sweep.harness);
        rec.experiment_id = sweep.experiment_id;
        rec.trial = job_list[i].trial;
        std::lock_guard<std::mutex> lock(mu);
        slots[i] = std::move(rec);
        flush_ready();
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(worker_count));
  for (int w = 0; w < worker_count; ++w) workers.emplace_back(work);
  for (auto& th : workers) th.join();
  if (first_error) std::rethrow_exception(first_error);
  {
    std::lock_guard<std::mutex> lock(mu);
    flush_ready();
  }
  out.close();

  std::vector<TrialRecord> records;
  records.reserve(slots.size());
  for (auto& slot : slots)
    if (slot) records.push_back(std::move(*slot));
  return summarize(std::move(records));
}

// --- threshold detection ---------------------------------------------------

ThresholdSummary detect_threshold(const SweepResult& result, const std::string& axis,
                                  double level) {
  static const std::vector<std::string> kNames = {"S", "R", "K", "N", "L"};
  if (std::find(kNames.begin(), kNames.end(), axis) == kNames.end())
    throw ConfigError("detect_threshold: unknown axis " + axis);

  ThresholdSummary summary;
  summary.axis = axis;
  summary.level = level;

  std::map<std::map<std::string, long>, std::vector<std::pair<long, double>>> slices;
  for (const CellSummary& cell : result.cells) {
    std::map<std::string, long> key;
    for (const std::string& name : kNames)
      if (name != axis) key[name] = coordinate(cell.cfg, name);
    slices[key].push_back({coordinate(cell.cfg, axis), cell.success_fraction});
  }

  for (auto& [key, points] : slices) {
    std::sort(points.begin(), points.end());
    SliceThreshold st;
    st.slice = key;
    // smallest axis value from which success stays at or above the level
    std::optional<long> threshold;
    for (auto it = points.rbegin(); it != points.rend(); ++it) {
      if (it->second >= level)
        threshold = it->first;
      else
        break;
    }
    st.threshold = threshold;
    summary.slices.push_back(std::move(st));
  }

  // fit thresholds against the slice parameter: S when it varies, otherwise
  // the unique varying coordinate
  std::vector<std::string> varying;
  for (const std::string& name : kNames) {
    if (name == axis) continue;
    std::set<long> seen;
    for (const auto& st : summary.slices) seen.insert(st.slice.at(name));
    if (seen.size() > 1) varying.push_back(name);
  }
  std::string param;
  if (std::find(varying.begin(), varying.end(), "S") != varying.end())
    param = "S";
  else if (varying.size() == 1)
    param = varying[0];
  if (!param.empty()) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& st : summary.slices)
      if (st.threshold) pts.push_back({static_cast<double>(st.slice.at(param)),
                                       static_cast<double>(*st.threshold)});
    if (pts.size() >= 2) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double n = static_cast<double>(pts.size());
      const double denom = n * sxx - sx * sx;
      if (denom > 0) {
        const double slope = (n * sxy - sx * sy) / denom;
        const double intercept = (sy - slope * sx) / n;
        double ss_res = 0, ss_tot = 0;
        const double mean_y = sy / n;
        for (auto [x, y] : pts) {
          ss_res += (y - (slope * x + intercept)) * (y - (slope * x + intercept));
          ss_tot += (y - mean_y) * (y - mean_y);
        }
        summary.fit_parameter = param;
        summary.slope = slope;
        summary.intercept = intercept;
        summary.r2 = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
      }
    }
  }
  return summary;
}

json to_json(const TrialRecord& rec) {
  json j;
  j["experiment_id"] = rec.experiment_id;
  j["config"] = to_json(rec.cfg);
  j["trial"] = rec.trial;
  j["seed"] = rec.seed;
  json resids = json::array(), errors = json::array();
  for (Index r = 0; r < rec.matrix_resids.size(); ++r) {
    resids.push_back(json_number(rec.matrix_resids(r)));
    errors.push_back(json_number(rec.matrix_errors(r)));
  }
  j["matrix_resids"] = std::move(resids);
  j["matrix_errors"] = std::move(errors);
  j["matrix_resid_max"] = json_number(rec.matrix_resid_max);
  j["matrix_err_max"] = json_number(rec.matrix_err_max);
  j["transform_converged"] = rec.transform_converged;
  j["transform_resid"] = json_number(rec.transform_resid);
  j["max_vec_err"] = json_number(rec.max_vec_err);
  j["avg_vec_err"] = json_number(rec.avg_vec_err);
  j["success"] = rec.success;
  j["failure_category"] = to_string(rec.failure);
  j["wall_ms"] = rec.wall_ms;
  if (rec.report) j["error_report"] = to_json(*rec.report);
  return j;
}

}  // namespace sepdemix
