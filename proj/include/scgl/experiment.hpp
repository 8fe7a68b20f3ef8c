#pragma once

#include "scgl/datagen.hpp"
#include "scgl/metrics.hpp"
#include "scgl/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace scgl {

nlohmann::json hyperparams_to_json(const Hyperparams& hp);
/// Fields missing from `j` keep their value in `base`.
Hyperparams hyperparams_from_json(const nlohmann::json& j, Hyperparams base = {});

/// {"graph", "bases", "provenance", "seed"}; the Laplacian is rebuilt on load.
nlohmann::json ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const nlohmann::json& j);

/// Scalars, hyperparameters, objective trace, weights and node bases.
nlohmann::json fit_result_to_json(const FitResult& r, const Hyperparams& hp, Method method);

struct ExperimentConfig {
  std::string family = "er";  ///< "er" or "sphere"
  Index nodes = 30;           ///< v (ER) or lattice size (sphere)
  Index stalk_dim = 2;
  Index knn = 4;
  double p_scale = 1.1;  ///< ER edge probability p_scale * log(v) / v
  double w_lo = 0.2;
  double w_hi = 3.0;
  std::vector<double> ratios{1.5, 5.0, 15.0};
  /// Explicit sample counts; when non-empty they replace `ratios`.
  std::vector<Index> sample_sizes;
  Index test_samples = 2000;
  int trials = 20;
  std::vector<Method> methods{Method::kScgl, Method::kKron};
  /// (alpha, beta) pairs. With cv_folds == 0 only the first pair is used.
  std::vector<std::pair<double, double>> grid{{0.0, 1.25}};
  int cv_folds = 0;
  Hyperparams solver = recovery_hyperparams();
  double eps_edge = kDefaultEdgeEps;
  std::uint64_t seed = 1;

  /// Throws ConfigError on an unknown family, trials < 1, nonpositive
  /// ratios or sample sizes, an empty grid or empty method list.
  void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& c);
/// Missing fields take their defaults; unknown fields are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Independent seed for (trial, purpose), stable across platforms.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial, std::uint64_t purpose);

enum class SeedPurpose : std::uint64_t { kGraph = 1, kTrain = 2, kTest = 3, kFolds = 4 };

/// (M, r) pairs swept by the experiment, r = M / (n v).
std::vector<std::pair<Index, double>> sample_plan(const ExperimentConfig& c);

GroundTruth make_ground_truth(const ExperimentConfig& c, int trial);

/// Ground truth for a trial, its per-sample-size training signals and the
/// held-out test signals.
struct TrialData {
  GroundTruth truth;
  std::vector<SignalMatrix> train;  ///< one per sample_plan entry
  SignalMatrix test;
};
TrialData make_trial_data(const ExperimentConfig& c, int trial);

/// Fits `method` on `train` (with cross-validation when configured) and
/// evaluates against the truth. Failures are reported with failed = true
/// rather than thrown.
EvalReport run_trial(const ExperimentConfig& c, const TrialData& data, std::size_t plan_index,
                     int trial, Method method);

struct AggregateRow {
  std::string method;
  std::string family;
  double ratio = 0.0;
  Index samples = 0;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;  ///< sample standard deviation, 0 for a single trial
  int count = 0;        ///< successful trials
  int failed = 0;
};

/// Mean and standard deviation of every metric per (method, family, M) over
/// non-failed rows. Output order is sorted, independent of row order.
std::vector<AggregateRow> aggregate(const std::vector<EvalReport>& rows);

struct ExperimentResult {
  std::vector<EvalReport> rows;  ///< ordered by (M, trial, method)
  std::vector<AggregateRow> summary;
};

/// Runs the full sweep; trials execute concurrently on up to `threads`
/// OpenMP threads (0 = runtime default).
ExperimentResult run_experiment(const ExperimentConfig& c, int threads = 0);

void write_results_csv(const std::filesystem::path& path, const std::vector<EvalReport>& rows);
void write_aggregate_csv(const std::filesystem::path& path, const std::vector<AggregateRow>& rows);
nlohmann::json summary_to_json(const ExperimentConfig& c, const ExperimentResult& r);

}  // namespace scgl
