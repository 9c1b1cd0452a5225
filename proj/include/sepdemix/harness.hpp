#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sepdemix/matrix_recovery.hpp"
#include "sepdemix/metrics.hpp"
#include "sepdemix/model.hpp"
#include "sepdemix/serialize.hpp"
#include "sepdemix/vector_recovery.hpp"

namespace sepdemix {

enum class FailureCategory { none, matrix_recovery, transform_nonconverged, transform_spurious };

std::string to_string(FailureCategory category);
FailureCategory failure_category_from_string(const std::string& s);

struct HarnessOptions {
  double success_threshold = 1e-3;  // strict per-vector success criterion
  Index r0 = 0;                     // reference receiver for the transform stage
  Index rank_slack = 0;             // factorization rank = S + rank_slack
  SolverOptions solver;             // rank and tau are filled per trial
  TransformSolverOptions transform;
  bool keep_report = false;         // retain the full ErrorReport in the record
};

/// One end-to-end trial: everything needed to score and to attribute failures.
struct TrialRecord {
  std::string experiment_id = "adhoc";
  ProblemConfig cfg;
  int trial = 0;
  std::uint64_t seed = 0;
  Eigen::VectorXd matrix_resids;  // per receiver, ||forward(Z_hat) - y_hat||
  Eigen::VectorXd matrix_errors;  // per receiver, relative to the true lifted matrix
  double matrix_resid_max = std::numeric_limits<double>::infinity();
  double matrix_err_max = std::numeric_limits<double>::infinity();
  bool transform_converged = false;
  double transform_resid = std::numeric_limits<double>::infinity();
  double max_vec_err = std::numeric_limits<double>::infinity();
  double avg_vec_err = std::numeric_limits<double>::infinity();
  bool success = false;
  FailureCategory failure = FailureCategory::none;
  double wall_ms = 0.0;
  std::optional<ErrorReport> report;
};

/// Generate -> synthesize -> recover each receiver's matrix -> factorize ->
/// align bases -> solve the transform -> reconstruct -> score. Stage failures
/// are recorded, never thrown. Deterministic per (cfg, seed).
TrialRecord run_trial(const ProblemConfig& cfg, std::uint64_t seed,
                      const HarnessOptions& opts = {});

/// Monte-Carlo sweep over a parameter grid.
struct SweepConfig {
  std::string experiment_id = "sweep";
  ConstraintMode mode = ConstraintMode::two_sided;
  double tau = 0.0;
  std::map<std::string, long> fixed;               // keys among L,K,N,S,R
  std::map<std::string, std::vector<long>> axes;   // keys among L,K,N,S,R
  std::map<long, std::vector<long>> L_by_S;        // optional per-S L grid
  std::string R_rule;                              // "S", "S+1", "S+2", "2S" when R is derived
  int trials = 10;
  std::uint64_t base_seed = 0;
  double success_threshold = 1e-3;
  HarnessOptions harness;

  static SweepConfig from_json(const json& j);
  /// Cells in canonical order (S, R, K, N, L ascending); validates each.
  std::vector<ProblemConfig> cells() const;
};

struct CellSummary {
  ProblemConfig cfg;
  int trials = 0;
  int successes = 0;
  double success_fraction = 0.0;
  double mean_max_err = 0.0;  // over trials with a finite vector error
  double mean_wall_ms = 0.0;  // live trials only; zero for resumed rows
  std::map<FailureCategory, int> failures;
};

struct SweepResult {
  std::vector<CellSummary> cells;
  std::vector<TrialRecord> records;
};

/// Runs every (cell, trial) with seed = hash(base seed, cell content, trial),
/// distributing trials over `jobs` workers (0 = hardware concurrency). Rows
/// are appended to the CSV in canonical order regardless of completion order,
/// so the output is byte-identical at any parallelism. With resume = true,
/// rows already present in the file are kept and skipped. wall_ms is written
/// as 0 unless write_timing is set (measured time breaks reproducibility).
SweepResult run_sweep(const SweepConfig& sweep, const std::string& csv_path, int jobs = 0,
                      bool resume = false, bool write_timing = false);

/// Deterministic per-trial seed from the cell content.
std::uint64_t trial_seed(std::uint64_t base_seed, const ProblemConfig& cfg, int trial);

// --- threshold detection -------------------------------------------------

struct SliceThreshold {
  std::map<std::string, long> slice;  // coordinates of the slice (axis excluded)
  std::optional<long> threshold;      // smallest axis value with sustained success
};

struct ThresholdSummary {
  std::string axis;
  double level = 0.9;
  std::vector<SliceThreshold> slices;
  std::string fit_parameter;  // slice parameter the fit runs over, if unique
  std::optional<double> slope, intercept, r2;
};

/// Per slice, the smallest swept value of `axis` whose success fraction and
/// all larger sampled values stay at or above `level`; plus a least-squares
/// line through the detected thresholds when exactly one slice parameter
/// varies.
ThresholdSummary detect_threshold(const SweepResult& result, const std::string& axis = "L",
                                  double level = 0.9);

// --- CSV ------------------------------------------------------------------

extern const char* const kCsvHeader;
std::string csv_row(const TrialRecord& rec, bool write_timing);
std::vector<TrialRecord> read_csv(const std::string& path);
SweepResult summarize(std::vector<TrialRecord> records);

json to_json(const TrialRecord& rec);

}  // namespace sepdemix
