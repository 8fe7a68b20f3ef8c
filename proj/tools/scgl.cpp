// scgl command-line front end: generate, fit, eval, experiment, crossval.
#include "scgl/datagen.hpp"
#include "scgl/errors.hpp"
#include "scgl/experiment.hpp"
#include "scgl/matrix_io.hpp"
#include "scgl/metrics.hpp"
#include "scgl/solver.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

struct SolverFlags {
  std::optional<double> alpha, beta, c1, c2, rel_tol;
  std::optional<int> max_iters;
  std::optional<std::string> init, schedule;

  void add(CLI::App* app) {
    app->add_option("--alpha", alpha, "l1 weight (>= 0)");
    app->add_option("--beta", beta, "consistency penalty (> 0)");
    app->add_option("--c1", c1, "lower spectral bound");
    app->add_option("--c2", c2, "upper spectral bound");
    app->add_option("--max-iters", max_iters, "maximum outer iterations");
    app->add_option("--rel-tol", rel_tol, "relative objective-change stopping threshold");
    app->add_option("--init", init, "starting node bases")->check(CLI::IsMember({"identity", "spectral"}));
    app->add_option("--schedule", schedule, "when the basis update starts")
        ->check(CLI::IsMember({"joint", "staged"}));
  }
  void apply(scgl::Hyperparams& hp) const {
    if (alpha) hp.alpha = *alpha;
    if (beta) hp.beta = *beta;
    if (c1) hp.c1 = *c1;
    if (c2) hp.c2 = *c2;
    if (max_iters) hp.max_outer_iters = *max_iters;
    if (rel_tol) hp.rel_tol = *rel_tol;
    if (init) hp.init = scgl::parse_basis_init(*init);
    if (schedule) hp.schedule = scgl::parse_schedule(*schedule);
  }
};

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) throw scgl::InputError(std::string(what) + " not found: " + path);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw scgl::Error("cannot create directory " + dir.string() + ": " + ec.message());
}

scgl::ExperimentConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  require_file(path, "config file");
  return scgl::config_from_json(scgl::io::read_json(path));
}

scgl::io::BlockMatrix load_signals(const std::string& path) {
  require_file(path, "signal file");
  auto m = scgl::io::load_matrix(path);
  if (m.matrix.rows() != m.nodes * m.stalk_dim) {
    throw scgl::InputError(path + ": " + std::to_string(m.matrix.rows()) + " rows but header says v=" +
                           std::to_string(m.nodes) + ", n=" + std::to_string(m.stalk_dim));
  }
  return m;
}

std::string fmt_ratio(double r) {
  std::ostringstream s;
  s << r;
  return s.str();
}

int cmd_generate(const scgl::ExperimentConfig& c, const fs::path& out) {
  // Build everything in memory first so a failure leaves no partial output.
  std::vector<scgl::TrialData> trials;
  for (int t = 0; t < c.trials; ++t) trials.push_back(scgl::make_trial_data(c, t));
  const auto plan = scgl::sample_plan(c);

  ensure_dir(out);
  json manifest = {{"config", scgl::config_to_json(c)}, {"trials", json::array()}};
  for (int t = 0; t < c.trials; ++t) {
    const auto& d = trials[static_cast<std::size_t>(t)];
    char name[32];
    std::snprintf(name, sizeof name, "trial_%03d", t);
    const fs::path dir = out / name;
    ensure_dir(dir);
    const auto v = d.truth.laplacian.nodes();
    const auto n = d.truth.laplacian.stalk_dim();
    scgl::io::write_json(dir / "ground_truth.json", scgl::ground_truth_to_json(d.truth));
    scgl::io::save_matrix(dir / "laplacian.mtx", {d.truth.laplacian.matrix(), v, n});
    json entry = {{"trial", t},
                  {"seed", d.truth.seed},
                  {"ground_truth", (fs::path(name) / "ground_truth.json").string()},
                  {"laplacian", (fs::path(name) / "laplacian.mtx").string()},
                  {"test_signals", (fs::path(name) / "test_signals.csv").string()},
                  {"signals", json::array()}};
    for (std::size_t p = 0; p < plan.size(); ++p) {
      const std::string file = "signals_M" + std::to_string(plan[p].first) + ".csv";
      scgl::io::save_matrix(dir / file, {d.train[p].x, v, n});
      entry["signals"].push_back({{"M", plan[p].first},
                                  {"r", plan[p].second},
                                  {"seed", d.train[p].seed},
                                  {"path", (fs::path(name) / file).string()}});
    }
    scgl::io::save_matrix(dir / "test_signals.csv", {d.test.x, v, n});
    manifest["trials"].push_back(entry);
  }
  scgl::io::write_json(out / "config.json", scgl::config_to_json(c));
  scgl::io::write_json(out / "manifest.json", manifest);
  std::cout << "generated " << c.trials << " " << c.family << " ground truths x " << plan.size()
            << " sample sizes in " << out.string() << '\n';
  return 0;
}

int cmd_fit(const std::string& signals_path, const scgl::Hyperparams& hp, scgl::Method method,
            const fs::path& out, bool verbose) {
  const auto signals = load_signals(signals_path);
  hp.validate();
  scgl::FitOptions opts;
  if (verbose) {
    std::cerr << "iter,objective,rel_change,w_step_norm,o_grad_norm\n";
    opts.trace = &std::cerr;
  }
  const auto result = scgl::fit(scgl::empirical_covariance(signals.matrix), signals.nodes,
                                signals.stalk_dim, hp, method, opts);
  json j = scgl::fit_result_to_json(result, hp, method);
  j["samples"] = signals.matrix.cols();
  j["signals"] = signals_path;

  ensure_dir(out);
  scgl::io::write_json(out / "fit.json", j);
  scgl::io::save_matrix(out / "laplacian.mtx", {result.laplacian.matrix(), signals.nodes, signals.stalk_dim});
  scgl::io::save_matrix(out / "weights.csv", {result.state.weights, signals.nodes, 1});
  scgl::io::write_json(out / "bases.json", scgl::io::bases_to_json(result.state.bases));
  std::cout << scgl::method_name(method) << ": " << result.iterations << " iterations"
            << (result.converged ? " (converged)" : " (iteration limit)") << ", objective "
            << result.objective_trace.back() << ", " << result.edges.size() << " edges, "
            << result.wall_time_s << " s\n";
  return 0;
}

int cmd_eval(const std::string& fit_path, const std::string& truth_path, const std::string& test_path,
             const fs::path& results, double eps, std::optional<std::uint64_t> seed) {
  require_file(fit_path, "fit result");
  require_file(truth_path, "ground truth");
  const json fj = scgl::io::read_json(fit_path);
  const auto truth = scgl::ground_truth_from_json(scgl::io::read_json(truth_path));
  const auto test = load_signals(test_path);

  scgl::Index v = 0, n = 0;
  Eigen::VectorXd w;
  scgl::NodeBases bases;
  scgl::Hyperparams hp;
  try {
    v = fj.at("v").get<scgl::Index>();
    n = fj.at("n").get<scgl::Index>();
    const auto wv = fj.at("weights").get<std::vector<double>>();
    w = Eigen::Map<const Eigen::VectorXd>(wv.data(), static_cast<scgl::Index>(wv.size()));
    bases = scgl::io::bases_from_json(fj.at("bases"), n);
    hp = scgl::hyperparams_from_json(fj.at("hyperparameters"));
  } catch (const json::exception& e) {
    throw scgl::InputError(fit_path + ": " + e.what());
  }
  auto mismatch = [&](const std::string& what, scgl::Index a, scgl::Index b, const std::string& other) {
    if (a != b) {
      throw scgl::InputError(what + " mismatch: " + fit_path + " has " + std::to_string(a) + ", " +
                             other + " has " + std::to_string(b));
    }
  };
  mismatch("v", v, truth.laplacian.nodes(), truth_path);
  mismatch("n", n, truth.laplacian.stalk_dim(), truth_path);
  mismatch("signal dimension", v * n, test.matrix.rows(), test_path);

  const auto lap = scgl::assemble_from_bases(w, bases);
  scgl::EvalReport r = scgl::evaluate(w, lap.matrix(), truth.cg.weights(), truth.laplacian.matrix(),
                                      test.matrix, eps, hp.zero_tol);
  r.seed = seed.value_or(truth.seed);
  r.method = fj.value("method", "");
  r.family = truth.provenance.value("family", "custom");
  r.nodes = v;
  r.stalk_dim = n;
  r.samples = fj.value("samples", scgl::Index{0});
  r.ratio = static_cast<double>(r.samples) / static_cast<double>(v * n);
  r.alpha = hp.alpha;
  r.beta = hp.beta;
  r.wall_time_s = fj.value("wall_time_s", 0.0);

  const bool fresh = !fs::exists(results) || fs::file_size(results) == 0;
  if (results.has_parent_path()) ensure_dir(results.parent_path());
  std::ofstream out(results, std::ios::app);
  if (!out) throw scgl::Error("cannot append to " + results.string());
  if (fresh) out << scgl::results_csv_header() << '\n';
  scgl::write_csv_row(out, r);
  std::cout << scgl::to_json(r).dump() << '\n';
  return 0;
}

int cmd_experiment(const scgl::ExperimentConfig& c, const fs::path& out, int threads) {
  const auto result = scgl::run_experiment(c, threads);
  ensure_dir(out);
  scgl::io::write_json(out / "config.json", scgl::config_to_json(c));
  scgl::write_results_csv(out / "results.csv", result.rows);
  scgl::write_aggregate_csv(out / "aggregate.csv", result.summary);
  scgl::io::write_json(out / "summary.json", scgl::summary_to_json(c, result));
  std::size_t failed = 0;
  for (const auto& r : result.rows) failed += r.failed;
  std::cout << result.rows.size() << " runs (" << failed << " failed); results in " << out.string() << '\n';
  for (const auto& a : result.summary) {
    if (a.metric != "f1" && a.metric != "empirical_tv") continue;
    std::cout << "  " << a.method << " r=" << fmt_ratio(a.ratio) << " " << a.metric << " = " << a.mean
              << " +- " << a.stddev << '\n';
  }
  return 0;
}

int cmd_crossval(const std::string& signals_path, const scgl::ExperimentConfig& c, scgl::Method method,
                 int folds, const fs::path& out) {
  const auto signals = load_signals(signals_path);
  const auto cv = scgl::cross_validate(signals.matrix, signals.nodes, signals.stalk_dim, c.grid, folds,
                                       c.solver, method, c.seed);
  json scores = json::array();
  for (std::size_t g = 0; g < c.grid.size(); ++g) {
    scores.push_back({{"alpha", c.grid[g].first}, {"beta", c.grid[g].second}, {"score", cv.scores[g]}});
  }
  const json j = {{"method", scgl::method_name(method)},
                  {"folds", folds},
                  {"seed", c.seed},
                  {"best", scgl::hyperparams_to_json(cv.best)},
                  {"scores", scores}};
  if (!out.empty()) {
    if (out.has_parent_path()) ensure_dir(out.parent_path());
    scgl::io::write_json(out, j);
  }
  std::cout << "best alpha=" << cv.best.alpha << " beta=" << cv.best.beta << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consistent connection graph learning"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);

  // Shared flags. Each subcommand registers the ones it accepts.
  std::string config_path, out_dir, method_name = "scgl";
  std::optional<std::uint64_t> seed;
  std::optional<double> eps_edge;
  SolverFlags solver;

  auto* gen = app.add_subcommand("generate", "sample ground truths and signals");
  gen->add_option("--config", config_path, "experiment config JSON");
  gen->add_option("--seed", seed, "base seed");
  gen->add_option("--out", out_dir, "output directory")->required();
  std::optional<int> trials;
  std::optional<std::string> family;
  std::vector<double> ratios;
  gen->add_option("--trials", trials);
  gen->add_option("--family", family)->check(CLI::IsMember({"er", "sphere"}));
  gen->add_option("--ratios", ratios, "sampling ratios r = M / (n v)");

  auto* fit = app.add_subcommand("fit", "learn a connection graph from signals");
  std::string signals_path;
  bool verbose = false;
  fit->add_option("--signals", signals_path, "signal matrix (CSV or .mtx, columns are samples)")->required();
  fit->add_option("--method", method_name)->check(CLI::IsMember({"scgl", "kron"}));
  fit->add_option("--config", config_path, "take solver settings from an experiment config");
  fit->add_option("--seed", seed, "accepted for symmetry; the solver is deterministic");
  fit->add_option("--out", out_dir, "output directory")->required();
  fit->add_flag("--verbose,-v", verbose, "trace one line per outer iteration to stderr");
  solver.add(fit);

  auto* eval = app.add_subcommand("eval", "evaluate a fit against ground truth");
  std::string fit_path, truth_path, test_path, results_path;
  eval->add_option("--fit", fit_path, "fit.json written by 'fit'")->required();
  eval->add_option("--truth", truth_path, "ground_truth.json")->required();
  eval->add_option("--test", test_path, "held-out signals")->required();
  eval->add_option("--out", results_path, "results CSV to append to")->required();
  eval->add_option("--eps-edge", eps_edge, "edge detection threshold");
  eval->add_option("--seed", seed, "seed recorded in the row (default: ground truth seed)");

  auto* exp = app.add_subcommand("experiment", "run a full sweep");
  exp->add_option("--config", config_path, "experiment config JSON");
  exp->add_option("--out", out_dir, "output directory")->required();
  exp->add_option("--seed", seed);
  exp->add_option("--method", method_name)->check(CLI::IsMember({"scgl", "kron"}));
  exp->add_option("--eps-edge", eps_edge);
  exp->add_option("--trials", trials);
  solver.add(exp);

  auto* cv = app.add_subcommand("crossval", "choose (alpha, beta) by k-fold likelihood");
  int folds = 5;
  std::vector<double> alphas, betas;
  cv->add_option("--signals", signals_path)->required();
  cv->add_option("--config", config_path, "experiment config JSON (grid and solver settings)");
  cv->add_option("--method", method_name)->check(CLI::IsMember({"scgl", "kron"}));
  cv->add_option("--alphas", alphas, "alpha values (grid is alphas x betas)");
  cv->add_option("--betas", betas, "beta values");
  cv->add_option("--folds", folds)->check(CLI::Range(2, 100));
  cv->add_option("--seed", seed);
  cv->add_option("--out", out_dir, "write scores JSON here");
  solver.add(cv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (threads > 0) omp_set_num_threads(threads);
    const auto* method_opt = app.get_subcommand()->get_option_no_throw("--method");
    const bool method_given = method_opt != nullptr && method_opt->count() > 0;

    if (*gen) {
      auto c = load_config(config_path);
      if (seed) c.seed = *seed;
      if (trials) c.trials = *trials;
      if (family) c.family = *family;
      if (!ratios.empty()) {
        c.ratios = ratios;
        c.sample_sizes.clear();
      }
      c.validate();
      return cmd_generate(c, out_dir);
    }
    if (*fit) {
      auto c = load_config(config_path);
      scgl::Hyperparams hp = c.solver;
      hp.alpha = c.grid.front().first;
      hp.beta = c.grid.front().second;
      solver.apply(hp);
      return cmd_fit(signals_path, hp, scgl::parse_method(method_name), out_dir, verbose);
    }
    if (*eval) {
      return cmd_eval(fit_path, truth_path, test_path, results_path, eps_edge.value_or(scgl::kDefaultEdgeEps),
                      seed);
    }
    if (*exp) {
      auto c = load_config(config_path);
      if (seed) c.seed = *seed;
      if (trials) c.trials = *trials;
      if (eps_edge) c.eps_edge = *eps_edge;
      if (method_given) c.methods = {scgl::parse_method(method_name)};
      if (solver.alpha || solver.beta) {
        c.grid = {{solver.alpha.value_or(c.grid.front().first), solver.beta.value_or(c.grid.front().second)}};
      }
      SolverFlags rest = solver;
      rest.alpha.reset();
      rest.beta.reset();
      rest.apply(c.solver);
      c.validate();
      return cmd_experiment(c, out_dir, threads);
    }
    if (*cv) {
      auto c = load_config(config_path);
      if (seed) c.seed = *seed;
      if (!alphas.empty() || !betas.empty()) {
        if (alphas.empty()) alphas = {c.grid.front().first};
        if (betas.empty()) betas = {c.grid.front().second};
        c.grid.clear();
        for (double a : alphas)
          for (double b : betas) c.grid.emplace_back(a, b);
      }
      SolverFlags rest = solver;
      rest.alpha.reset();
      rest.beta.reset();
      rest.apply(c.solver);
      c.validate();
      return cmd_crossval(signals_path, c, scgl::parse_method(method_name), folds, out_dir);
    }
  } catch (const scgl::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}
