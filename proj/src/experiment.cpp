#include "scgl/experiment.hpp"

#include "scgl/errors.hpp"
#include "scgl/matrix_io.hpp"
#include "scgl/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <tuple>

namespace scgl {

using nlohmann::json;

json hyperparams_to_json(const Hyperparams& hp) {
  return {{"alpha", hp.alpha},
          {"beta", hp.beta},
          {"c1", hp.c1},
          {"c2", hp.c2},
          {"max_outer_iters", hp.max_outer_iters},
          {"rel_tol", hp.rel_tol},
          {"zero_tol", hp.zero_tol},
          {"init", basis_init_name(hp.init)},
          {"schedule", schedule_name(hp.schedule)},
          {"o_step",
           {{"initial_step", hp.o_step.initial_step},
            {"contraction", hp.o_step.contraction},
            {"sufficient_decrease", hp.o_step.sufficient_decrease},
            {"max_backtracks", hp.o_step.max_backtracks},
            {"max_inner_iters", hp.o_step.max_inner_iters},
            {"grad_tol", hp.o_step.grad_tol}}}};
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ConfigError(std::string("unknown field '") + key + "' in " + where);
  }
}

}  // namespace

Hyperparams hyperparams_from_json(const json& j, Hyperparams hp) {
  reject_unknown(j, {"alpha", "beta", "c1", "c2", "max_outer_iters", "rel_tol", "zero_tol", "init",
                     "schedule", "o_step"},
                 "hyperparameters");
  read_field(j, "alpha", hp.alpha);
  read_field(j, "beta", hp.beta);
  read_field(j, "c1", hp.c1);
  read_field(j, "c2", hp.c2);
  read_field(j, "max_outer_iters", hp.max_outer_iters);
  read_field(j, "rel_tol", hp.rel_tol);
  read_field(j, "zero_tol", hp.zero_tol);
  if (j.contains("init")) {
    std::string name;
    read_field(j, "init", name);
    hp.init = parse_basis_init(name);
  }
  if (j.contains("schedule")) {
    std::string name;
    read_field(j, "schedule", name);
    hp.schedule = parse_schedule(name);
  }
  if (j.contains("o_step")) {
    const json& o = j.at("o_step");
    reject_unknown(o, {"initial_step", "contraction", "sufficient_decrease", "max_backtracks",
                       "max_inner_iters", "grad_tol"},
                   "o_step");
    read_field(o, "initial_step", hp.o_step.initial_step);
    read_field(o, "contraction", hp.o_step.contraction);
    read_field(o, "sufficient_decrease", hp.o_step.sufficient_decrease);
    read_field(o, "max_backtracks", hp.o_step.max_backtracks);
    read_field(o, "max_inner_iters", hp.o_step.max_inner_iters);
    read_field(o, "grad_tol", hp.o_step.grad_tol);
  }
  return hp;
}

json ground_truth_to_json(const GroundTruth& gt) {
  return {{"graph", io::graph_to_json(gt.cg)},
          {"bases", io::bases_to_json(gt.bases)},
          {"provenance", gt.provenance},
          {"seed", gt.seed}};
}

GroundTruth ground_truth_from_json(const json& j) {
  try {
    GroundTruth gt;
    gt.cg = io::graph_from_json(j.at("graph"));
    gt.bases = io::bases_from_json(j.at("bases"), gt.cg.stalk_dim());
    gt.laplacian = build_connection_laplacian(gt.cg);
    gt.provenance = j.value("provenance", json::object());
    gt.seed = j.value("seed", std::uint64_t{0});
    return gt;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed ground truth: ") + e.what());
  }
}

json fit_result_to_json(const FitResult& r, const Hyperparams& hp, Method method) {
  std::vector<double> w(r.state.weights.data(), r.state.weights.data() + r.state.weights.size());
  return {{"method", method_name(method)},
          {"v", r.state.nodes},
          {"n", r.state.stalk_dim},
          {"hyperparameters", hyperparams_to_json(hp)},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"stall_count", r.stall_count},
          {"stage_switch", r.stage_switch},
          {"kernel_excess", r.kernel_excess},
          {"wall_time_s", r.wall_time_s},
          {"objective", r.objective_trace.empty() ? 0.0 : r.objective_trace.back()},
          {"objective_trace", r.objective_trace},
          {"weights", w},
          {"bases", io::bases_to_json(r.state.bases)},
          {"graph", io::graph_to_json(ConnectionGraph(r.state.nodes, r.state.stalk_dim, r.edges))}};
}

void ExperimentConfig::validate() const {
  if (family != "er" && family != "sphere") {
    throw ConfigError("family must be 'er' or 'sphere', got '" + family + "'");
  }
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (nodes < 2 || stalk_dim < 1) throw ConfigError("need v >= 2 and n >= 1");
  if (family == "sphere" && stalk_dim != 2) throw ConfigError("sphere family requires n = 2");
  if (sample_sizes.empty() && ratios.empty()) throw ConfigError("no ratios or sample sizes given");
  for (double r : ratios)
    if (!(r > 0.0)) throw ConfigError("ratios must be positive");
  for (Index m : sample_sizes)
    if (m < 2) throw ConfigError("sample sizes must be >= 2");
  if (test_samples < 1) throw ConfigError("test_samples must be >= 1");
  if (methods.empty()) throw ConfigError("method list is empty");
  if (grid.empty()) throw ConfigError("hyperparameter grid is empty");
  if (cv_folds == 1 || cv_folds < 0) throw ConfigError("cv_folds must be 0 (off) or >= 2");
  if (!(eps_edge >= 0.0)) throw ConfigError("eps_edge must be >= 0");
  for (const auto& [a, b] : grid) {
    Hyperparams hp = solver;
    hp.alpha = a;
    hp.beta = b;
    hp.validate();
  }
}

json config_to_json(const ExperimentConfig& c) {
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.emplace_back(method_name(m));
  json grid = json::array();
  for (const auto& [a, b] : c.grid) grid.push_back({{"alpha", a}, {"beta", b}});
  return {{"family", c.family},        {"v", c.nodes},
          {"n", c.stalk_dim},          {"k", c.knn},
          {"p_scale", c.p_scale},      {"w_lo", c.w_lo},
          {"w_hi", c.w_hi},            {"ratios", c.ratios},
          {"sample_sizes", c.sample_sizes}, {"test_samples", c.test_samples},
          {"trials", c.trials},        {"methods", methods},
          {"grid", grid},              {"cv_folds", c.cv_folds},
          {"solver", hyperparams_to_json(c.solver)}, {"eps_edge", c.eps_edge},
          {"seed", c.seed}};
}

ExperimentConfig config_from_json(const json& j) {
  reject_unknown(j,
                 {"family", "v", "n", "k", "p_scale", "w_lo", "w_hi", "ratios", "sample_sizes",
                  "test_samples", "trials", "methods", "grid", "cv_folds", "solver", "eps_edge", "seed"},
                 "experiment config");
  ExperimentConfig c;
  read_field(j, "family", c.family);
  read_field(j, "v", c.nodes);
  read_field(j, "n", c.stalk_dim);
  read_field(j, "k", c.knn);
  read_field(j, "p_scale", c.p_scale);
  read_field(j, "w_lo", c.w_lo);
  read_field(j, "w_hi", c.w_hi);
  read_field(j, "ratios", c.ratios);
  read_field(j, "sample_sizes", c.sample_sizes);
  read_field(j, "test_samples", c.test_samples);
  read_field(j, "trials", c.trials);
  read_field(j, "cv_folds", c.cv_folds);
  read_field(j, "eps_edge", c.eps_edge);
  read_field(j, "seed", c.seed);
  if (j.contains("methods")) {
    std::vector<std::string> names;
    read_field(j, "methods", names);
    c.methods.clear();
    for (const auto& n : names) c.methods.push_back(parse_method(n));
  }
  if (j.contains("grid")) {
    c.grid.clear();
    for (const auto& g : j.at("grid")) {
      reject_unknown(g, {"alpha", "beta"}, "grid entry");
      c.grid.emplace_back(g.value("alpha", 0.0), g.value("beta", 1.0));
    }
  }
  if (j.contains("solver")) c.solver = hyperparams_from_json(j.at("solver"), c.solver);
  c.validate();
  return c;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t trial, std::uint64_t purpose) {
  return splitmix64(splitmix64(base) ^ splitmix64(trial * 0x100 + purpose));
}

std::vector<std::pair<Index, double>> sample_plan(const ExperimentConfig& c) {
  std::vector<std::pair<Index, double>> plan;
  const double dim = static_cast<double>(c.nodes * c.stalk_dim);
  if (!c.sample_sizes.empty()) {
    for (Index m : c.sample_sizes) plan.emplace_back(m, static_cast<double>(m) / dim);
  } else {
    for (double r : c.ratios) plan.emplace_back(samples_for_ratio(r, c.nodes, c.stalk_dim), r);
  }
  return plan;
}

GroundTruth make_ground_truth(const ExperimentConfig& c, int trial) {
  const auto seed = derive_seed(c.seed, static_cast<std::uint64_t>(trial),
                                static_cast<std::uint64_t>(SeedPurpose::kGraph));
  if (c.family == "sphere") return spherical_cg(c.nodes, c.knn, seed);
  return sample_er_cg(c.nodes, c.stalk_dim, default_er_probability(c.nodes, c.p_scale), c.w_lo,
                      c.w_hi, seed);
}

TrialData make_trial_data(const ExperimentConfig& c, int trial) {
  TrialData d;
  d.truth = make_ground_truth(c, trial);
  const auto t = static_cast<std::uint64_t>(trial);
  const auto plan = sample_plan(c);
  for (std::size_t p = 0; p < plan.size(); ++p) {
    const auto seed = derive_seed(c.seed, t, static_cast<std::uint64_t>(SeedPurpose::kTrain) + 0x10 * p);
    d.train.push_back(sample_signals(d.truth, plan[p].first, seed));
  }
  d.test = sample_signals(d.truth, c.test_samples,
                          derive_seed(c.seed, t, static_cast<std::uint64_t>(SeedPurpose::kTest)));
  return d;
}

EvalReport run_trial(const ExperimentConfig& c, const TrialData& data, std::size_t plan_index,
                     int trial, Method method) {
  const auto plan = sample_plan(c);
  EvalReport report;
  report.seed = data.truth.seed;
  report.method = method_name(method);
  report.family = c.family;
  report.nodes = data.truth.laplacian.nodes();
  report.stalk_dim = data.truth.laplacian.stalk_dim();
  report.samples = plan.at(plan_index).first;
  report.ratio = plan.at(plan_index).second;
  Hyperparams hp = c.solver;
  hp.alpha = c.grid.front().first;
  hp.beta = c.grid.front().second;
  report.alpha = hp.alpha;
  report.beta = hp.beta;
  try {
    const SignalMatrix& train = data.train.at(plan_index);
    if (c.cv_folds >= 2 && c.grid.size() > 1) {
      const auto seed = derive_seed(c.seed, static_cast<std::uint64_t>(trial),
                                    static_cast<std::uint64_t>(SeedPurpose::kFolds));
      hp = cross_validate(train.x, report.nodes, report.stalk_dim, c.grid, c.cv_folds, c.solver,
                          method, seed)
               .best;
      report.alpha = hp.alpha;
      report.beta = hp.beta;
    }
    const FitResult fr =
        fit(empirical_covariance(train.x), report.nodes, report.stalk_dim, hp, method);
    const EvalReport m = evaluate(fr.state.weights, fr.laplacian.matrix(), data.truth.cg.weights(),
                                  data.truth.laplacian.matrix(), data.test.x, c.eps_edge, hp.zero_tol);
    report.f1 = m.f1;
    report.weight_mse = m.weight_mse;
    report.empirical_tv = m.empirical_tv;
    report.spectral_distance = m.spectral_distance;
    report.heat_distance = m.heat_distance;
    report.kernel_dim_est = m.kernel_dim_est;
    report.kernel_dim_true = m.kernel_dim_true;
    report.wall_time_s = fr.wall_time_s;
  } catch (const std::exception&) {
    report.failed = true;
  }
  return report;
}

namespace {

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"f1",        "weight_mse",     "empirical_tv",
                                              "spectral_dist", "heat_dist",  "kernel_dim_est",
                                              "wall_time_s"};
  return names;
}

double metric_value(const EvalReport& r, std::size_t k) {
  switch (k) {
    case 0: return r.f1;
    case 1: return r.weight_mse;
    case 2: return r.empirical_tv;
    case 3: return r.spectral_distance;
    case 4: return r.heat_distance;
    case 5: return static_cast<double>(r.kernel_dim_est);
    default: return r.wall_time_s;
  }
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<EvalReport>& rows) {
  using Key = std::tuple<std::string, std::string, Index>;
  std::map<Key, std::vector<const EvalReport*>> groups;
  std::map<Key, double> ratio;
  for (const auto& r : rows) {
    const Key key{r.family, r.method, r.samples};
    groups[key].push_back(&r);
    ratio[key] = r.ratio;
  }
  std::vector<AggregateRow> out;
  for (const auto& [key, members] : groups) {
    std::vector<const EvalReport*> ok;
    for (const auto* r : members)
      if (!r->failed) ok.push_back(r);
    // Summation order must not depend on how trials were scheduled.
    std::sort(ok.begin(), ok.end(), [](const EvalReport* a, const EvalReport* b) { return a->seed < b->seed; });
    for (std::size_t k = 0; k < metric_names().size(); ++k) {
      AggregateRow a;
      std::tie(a.family, a.method, a.samples) = key;
      a.ratio = ratio[key];
      a.metric = metric_names()[k];
      a.count = static_cast<int>(ok.size());
      a.failed = static_cast<int>(members.size() - ok.size());
      if (!ok.empty()) {
        double sum = 0.0;
        for (const auto* r : ok) sum += metric_value(*r, k);
        a.mean = sum / static_cast<double>(ok.size());
        double ss = 0.0;
        for (const auto* r : ok) ss += std::pow(metric_value(*r, k) - a.mean, 2);
        a.stddev = ok.size() > 1 ? std::sqrt(ss / static_cast<double>(ok.size() - 1)) : 0.0;
      } else {
        a.mean = a.stddev = std::numeric_limits<double>::quiet_NaN();
      }
      out.push_back(a);
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& c, int threads) {
  c.validate();
  const auto plan = sample_plan(c);
  const int trials = c.trials;
  const auto methods = static_cast<int>(c.methods.size());
  const auto cells = static_cast<int>(plan.size()) * methods;

  std::vector<EvalReport> by_trial(static_cast<std::size_t>(trials * cells));
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
  for (int t = 0; t < trials; ++t) {
    TrialData data;
    bool generated = true;
    try {
      data = make_trial_data(c, t);
    } catch (const std::exception&) {
      generated = false;
    }
    for (std::size_t p = 0; p < plan.size(); ++p) {
      for (int m = 0; m < methods; ++m) {
        EvalReport r;
        if (generated) {
          r = run_trial(c, data, p, t, c.methods[static_cast<std::size_t>(m)]);
        } else {
          r.method = method_name(c.methods[static_cast<std::size_t>(m)]);
          r.family = c.family;
          r.nodes = c.nodes;
          r.stalk_dim = c.stalk_dim;
          r.samples = plan[p].first;
          r.ratio = plan[p].second;
          r.seed = derive_seed(c.seed, static_cast<std::uint64_t>(t),
                               static_cast<std::uint64_t>(SeedPurpose::kGraph));
          r.failed = true;
        }
        by_trial[static_cast<std::size_t>(t * cells) + p * static_cast<std::size_t>(methods) +
                 static_cast<std::size_t>(m)] = std::move(r);
      }
    }
  }

  ExperimentResult result;
  for (std::size_t p = 0; p < plan.size(); ++p)
    for (int t = 0; t < trials; ++t)
      for (int m = 0; m < methods; ++m)
        result.rows.push_back(by_trial[static_cast<std::size_t>(t * cells) +
                                       p * static_cast<std::size_t>(methods) + static_cast<std::size_t>(m)]);
  result.summary = aggregate(result.rows);
  return result;
}

void write_results_csv(const std::filesystem::path& path, const std::vector<EvalReport>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << results_csv_header() << '\n';
  for (const auto& r : rows) write_csv_row(out, r);
  if (!out) throw Error("write failed: " + path.string());
}

void write_aggregate_csv(const std::filesystem::path& path, const std::vector<AggregateRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "family,method,M,r,metric,mean,std,count,failed\n";
  for (const auto& a : rows) {
    out << a.family << ',' << a.method << ',' << a.samples << ',' << a.ratio << ',' << a.metric << ','
        << a.mean << ',' << a.stddev << ',' << a.count << ',' << a.failed << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

json summary_to_json(const ExperimentConfig& c, const ExperimentResult& r) {
  json groups = json::array();
  for (const auto& a : r.summary) {
    groups.push_back({{"family", a.family},
                      {"method", a.method},
                      {"M", a.samples},
                      {"r", a.ratio},
                      {"metric", a.metric},
                      {"mean", std::isfinite(a.mean) ? json(a.mean) : json(nullptr)},
                      {"std", std::isfinite(a.stddev) ? json(a.stddev) : json(nullptr)},
                      {"count", a.count},
                      {"failed", a.failed}});
  }
  std::size_t failed = 0;
  for (const auto& row : r.rows) failed += row.failed;
  return {{"config", config_to_json(c)},
          {"rows", r.rows.size()},
          {"failed_rows", failed},
          {"aggregate", groups}};
}

}  // namespace scgl
