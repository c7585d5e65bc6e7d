// Copyright 2026 The kmstep Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kmstep/csv.hpp"
#include "kmstep/dataset.hpp"
#include "kmstep/errors.hpp"
#include "kmstep/experiments.hpp"
#include "kmstep/kmeans.hpp"
#include "kmstep/quantum_emulator.hpp"
#include "kmstep/samplers.hpp"
#include "kmstep/serialization.hpp"

namespace kmstep::cli {
namespace {

struct Options {
  std::string data;
  std::string centers;
  std::string out;
  std::string preset = "planar";
  std::string b_list;
  std::string alpha_list;
  std::string scheme = "row-norm-squared";
  std::string dp_policy;
  std::string garbage_policy;
  std::string constants;
  std::string config;
  std::string which = "thm_main";
  std::string metric = "euclidean";
  std::string algorithms = "uniform,dlt_row_norm_squared,dlt_row_norm";
  std::size_t k = 4;
  std::size_t a = 0;
  std::size_t d = 2;
  std::optional<std::size_t> n;
  std::size_t trials = 100;
  std::size_t steps = 1;
  std::size_t threads = 0;
  std::size_t repeats = 9;
  double eps = 0.1;
  double delta = 0.2;
  double std = 0.5;
  double spread = 5.0;
  double shift = 1.0;
  std::optional<double> failure_blowup;
  Seed seed = 0;
  bool header = false;
  bool exact_fallback = false;
  bool full_batch = false;
  bool noiseless = false;
};

// What a subcommand produces: the main artifact, side files keyed by suffix,
// and a one-line summary.
struct Output {
  std::string primary;
  std::vector<std::pair<std::string, std::string>> extras;
  std::string summary;
};

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParameterError(std::string("invalid number for ") + what + ": '" + s + "'");
  }
}

std::vector<std::size_t> parse_sizes(const std::string& text, const char* what) {
  std::vector<std::size_t> out;
  for (const auto& part : split(text)) {
    const double v = parse_double(part, what);
    if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw ParameterError(std::string(what) + " entries must be positive integers");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ParameterError(std::string(what) + " is required");
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& part : split(text)) out.push_back(parse_double(part, what));
  return out;
}

std::string derived_path(const std::string& out, const std::string& suffix) {
  std::filesystem::path p(out);
  p.replace_extension();
  return p.string() + suffix;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
}

std::string centers_csv(const Centers& c) {
  std::ostringstream s;
  write_csv(s, c.matrix());
  return s.str();
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string fmt(double v) { return format_double(v); }

DataSet load_data(const Options& o) {
  if (o.data.empty()) throw ParameterError("--data is required");
  return load_csv(o.data, o.header);
}

Centers load_centers(const Options& o, const DataSet& data) {
  if (o.centers.empty()) throw ParameterError("--centers is required");
  auto c = load_centers_csv(o.centers, o.header);
  if (c.d() != data.d()) {
    throw DimensionError("centers have dimension " + std::to_string(c.d()) + " but data has " +
                         std::to_string(data.d()));
  }
  return c;
}

std::size_t single_b(const Options& o) {
  const auto bs = parse_sizes(o.b_list, "--b");
  if (bs.size() != 1) throw ParameterError("--b takes a single value for this subcommand");
  return bs[0];
}

std::vector<Algorithm> parse_algorithms(const std::string& text) {
  std::vector<Algorithm> out;
  for (const auto& part : split(text)) out.push_back(parse_algorithm(part));
  if (out.empty()) throw ParameterError("--algorithms is empty");
  return out;
}

DampedSpec parse_damping(const Options& o, std::size_t k) {
  const auto alphas = parse_doubles(o.alpha_list.empty() ? "0.5" : o.alpha_list, "--alpha");
  DampedSpec spec = alphas.size() == 1 ? DampedSpec{std::vector<double>(k, alphas[0])} : DampedSpec{alphas};
  spec.validate(k);
  return spec;
}

EmulationConfig build_config(const Options& o) {
  EmulationConfig cfg = o.noiseless ? EmulationConfig::noiseless() : EmulationConfig{};
  if (!o.config.empty()) {
    std::ifstream f(o.config);
    if (!f) throw IoError("cannot open config '" + o.config + "'");
    Json j;
    try {
      j = Json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw ParameterError("config '" + o.config + "' is not valid JSON: " + e.what());
    }
    cfg = emulation_config_from_json(j, cfg);
  }
  if (!o.dp_policy.empty()) cfg.delta_prime_policy = parse_delta_prime_policy(o.dp_policy);
  if (!o.garbage_policy.empty()) cfg.garbage_policy = parse_garbage_policy(o.garbage_policy);
  if (o.failure_blowup) cfg.failure_blowup = *o.failure_blowup;
  for (const auto& part : split(o.constants)) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw ParameterError("--constants expects name=value pairs");
    const auto name = part.substr(0, eq);
    const double v = parse_double(part.substr(eq + 1), "--constants");
    if (name == "mean_est") {
      cfg.constants.mean_est = v;
    } else if (name == "boost") {
      cfg.constants.boost = v;
    } else {
      throw ParameterError("unknown constant '" + name + "' (expected mean_est or boost)");
    }
  }
  cfg.validate();
  return cfg;
}

Output cmd_generate(const Options& o) {
  Output res;
  std::ostringstream data_csv;
  if (o.preset == "planar") {
    const auto p = planar_mixture_preset(o.std, o.n.value_or(10000), o.seed);
    write_csv(data_csv, p.data.points());
    res.extras = {{".centers.csv", centers_csv(p.initial_centers)}, {".truth.csv", centers_csv(p.true_means)}};
    res.summary = "generate: planar n=" + std::to_string(p.data.n()) + " d=2 k=4";
  } else if (o.preset == "hard") {
    const auto alphas = parse_doubles(o.alpha_list.empty() ? "100" : o.alpha_list, "--alpha");
    if (alphas.size() != 1) throw ParameterError("--alpha takes a single value for the hard preset");
    const auto [data, c0] = hard_instance(o.n.value_or(1000), alphas[0]);
    write_csv(data_csv, data.points());
    res.extras = {{".centers.csv", centers_csv(c0)}};
    res.summary = "generate: hard n=" + std::to_string(data.n()) + " alpha=" + fmt(alphas[0]);
  } else if (o.preset == "mixture") {
    if (o.k == 0 || o.d == 0) throw ParameterError("--k and --d must be >= 1");
    Rng rng(derive_seed(o.seed, 0));
    MixtureSpec spec;
    for (std::size_t j = 0; j < o.k; ++j) {
      Vector m(static_cast<Eigen::Index>(o.d));
      for (Eigen::Index c = 0; c < m.size(); ++c) m(c) = o.spread * rng.normal();
      spec.means.push_back(m);
    }
    spec.stds.assign(o.k, o.std);
    spec.points_per_cluster = o.n.value_or(1000);
    const auto [data, means] = generate_gaussian_mixture(spec, derive_seed(o.seed, 1));
    write_csv(data_csv, data.points());
    res.extras = {{".centers.csv", centers_csv(kmeanspp_seed(data, o.k, derive_seed(o.seed, 2)))},
                  {".truth.csv", centers_csv(means)}};
    res.summary = "generate: mixture n=" + std::to_string(data.n()) + " d=" + std::to_string(o.d) +
                  " k=" + std::to_string(o.k);
  } else if (o.preset == "digits") {
    const auto data = digits_like_preset(o.seed, o.d == 2 ? 64 : o.d, o.n.value_or(7000));
    write_csv(data_csv, data.points());
    res.extras = {{".centers.csv", centers_csv(kmeanspp_seed(data, 10, derive_seed(o.seed, 2)))}};
    res.summary = "generate: digits n=" + std::to_string(data.n()) + " d=" + std::to_string(data.d()) + " k=10";
  } else {
    throw ParameterError("unknown preset '" + o.preset + "' (planar, hard, mixture, digits)");
  }
  res.primary = data_csv.str();
  return res;
}

Output cmd_diagnostics(const Options& o) {
  const auto data = load_data(o);
  const auto c0 = load_centers(o, data);
  const auto diag = diagnostics(data, c0);
  return {dump(to_json(diag)), {},
          "diagnostics: phi=" + fmt(diag.phi) + " k_C=" + fmt(diag.k_C) + " eta_bar=" + fmt(diag.eta_bar)};
}

Output cmd_lloyd(const Options& o) {
  const auto data = load_data(o);
  auto centers = load_centers(o, data);
  const double before = cost(data, centers);
  Json steps = Json::array();
  for (std::size_t t = 0; t < o.steps; ++t) {
    auto step = lloyd_step(data, centers);
    centers = std::move(step.centers);
    steps.push_back({{"t", t + 1}, {"empty_clusters", step.empty_clusters}, {"cost", cost(data, centers)}});
  }
  const double after = cost(data, centers);
  Json report{{"initial_cost", before}, {"steps", steps}};
  return {centers_csv(centers), {{".report.json", dump(report)}},
          "lloyd: steps=" + std::to_string(o.steps) + " cost " + fmt(before) + " -> " + fmt(after)};
}

Output step_output(const char* name, const DataSet& data, const StepResult& step) {
  Json report = to_json(step.report);
  const double c = cost(data, step.centers);
  report["cost"] = c;
  return {centers_csv(step.centers), {{".report.json", dump(report)}},
          std::string(name) + ": k=" + std::to_string(step.centers.k()) + " empty=" +
              std::to_string(step.report.empty_clusters.size()) + " cost=" + fmt(c)};
}

Output cmd_minibatch(const Options& o) {
  const auto data = load_data(o);
  const auto c0 = load_centers(o, data);
  const auto full = assign(data, c0);
  MinibatchOptions opts{&full, o.exact_fallback};
  return step_output("minibatch", data, minibatch_step(data, c0, single_b(o), o.seed, opts));
}

Output cmd_damped(const Options& o) {
  const auto data = load_data(o);
  const auto c0 = load_centers(o, data);
  const auto full = assign(data, c0);
  MinibatchOptions opts{&full, o.exact_fallback};
  return step_output("damped", data,
                     damped_minibatch_step(data, c0, single_b(o), parse_damping(o, c0.k()), o.seed, opts));
}

Output cmd_dlt(const Options& o) {
  const auto data = load_data(o);
  const auto c0 = load_centers(o, data);
  const auto b = single_b(o);
  return step_output("dlt", data,
                     dlt_step(data, c0, o.a == 0 ? b : o.a, b, parse_sampling_scheme(o.scheme), o.seed));
}

Output cmd_quantum(const Options& o) {
  const auto data = load_data(o);
  const auto c0 = load_centers(o, data);
  const auto cfg = build_config(o);
  const auto step = quantum_kmeans_step(data, c0, o.eps, o.delta, cfg, o.seed);
  const auto diag = diagnostics(data, c0);
  const double predicted = predicted_query_bound(diag, o.eps, data.d(), c0.k());
  Json report = to_json(step);
  report["config"] = to_json(cfg);
  report["predicted_queries"] = predicted;
  report["ledger_to_bound_ratio"] = static_cast<double>(step.ledger.total()) / predicted;
  return {centers_csv(step.centers), {{".ledger.json", dump(report)}},
          "quantum-sim: qram_queries=" + std::to_string(step.ledger.total()) + " predicted=" + fmt(predicted)};
}

Output cmd_sweep(const Options& o) {
  const auto data = load_data(o);
  const auto c0 = load_centers(o, data);
  const auto algs = parse_algorithms(o.algorithms);
  const auto bs = parse_sizes(o.b_list, "--b");
  const auto res = batch_sweep(data, c0, bs, algs, o.trials, o.seed, o.threads);
  std::ostringstream csv;
  write_sweep_csv(csv, res);
  std::string slope = "n/a";
  if (bs.size() >= 2) {
    try {
      slope = fmt(res.median_slope(algs.front()));
    } catch (const ParameterError&) {
    }
  }
  return {csv.str(), {{".summary.json", dump(to_json(res))}},
          "sweep: rows=" + std::to_string(res.rows.size()) + " " + std::string(to_string(algs.front())) +
              "_slope=" + slope};
}

Output cmd_multistep(const Options& o) {
  const auto data = load_data(o);
  const auto c0 = load_centers(o, data);
  MultiStepOptions opts{o.full_batch, o.threads};
  const auto res = multistep_run(data, c0, o.steps, single_b(o), parse_algorithms(o.algorithms), o.trials,
                                 o.seed, opts);
  std::ostringstream csv;
  write_multistep_csv(csv, res);
  return {csv.str(), {{".summary.json", dump(to_json(res))}},
          "multistep: rows=" + std::to_string(res.rows.size()) + " steps=" + std::to_string(o.steps)};
}

Output cmd_invariance(const Options& o) {
  const auto alphas = parse_doubles(o.alpha_list.empty() ? "100" : o.alpha_list, "--alpha");
  if (alphas.size() != 1) throw ParameterError("--alpha takes a single value for invariance");
  const auto rep =
      invariance_demo(alphas[0], o.n.value_or(1000), o.shift, parse_sizes(o.b_list, "--b"), o.trials, o.seed, o.threads);
  std::ostringstream csv;
  write_invariance_csv(csv, rep);
  return {csv.str(), {{".summary.json", dump(to_json(rep))}},
          "invariance: rows=" + std::to_string(rep.rows.size()) + " alpha=" + fmt(alphas[0])};
}

Output cmd_bound_check(const Options& o) {
  const auto data = load_data(o);
  const auto c0 = load_centers(o, data);
  BoundCheckOptions opts;
  const auto which = parse_bound_kind(o.which);
  if (which == BoundKind::cor_damped) opts.damping = parse_damping(o, c0.k());
  if (which == BoundKind::quantum_main) opts.quantum = build_config(o);
  opts.threads = o.threads;
  const auto rep = bound_check(data, c0, o.eps, o.delta, o.trials, o.seed, which, opts);
  std::ostringstream csv;
  write_bound_check_csv(csv, rep);
  return {csv.str(), {{".summary.json", dump(to_json(rep))}},
          "bound-check: " + std::string(to_string(which)) + " b=" + std::to_string(rep.b) + " failure_rate=" +
              fmt(rep.failure_rate) + " threshold=" + fmt(rep.threshold) + (rep.pass ? " PASS" : " FAIL")};
}

Output cmd_median_boost(const Options& o) {
  const auto data = load_data(o);
  const auto c0 = load_centers(o, data);
  MedianDistance dist;
  dist.metric = parse_median_metric(o.metric);
  if (dist.metric == MedianMetric::weighted) {
    const auto full = assign(data, c0);
    for (const auto s : full.sizes) dist.weights.push_back(static_cast<double>(s) / static_cast<double>(data.n()));
    dist.block_dim = data.d();
  }
  const auto res = median_boosted_minibatch(data, c0, single_b(o), o.repeats, o.seed, dist);
  Json report{{"chosen", res.chosen}, {"repeats", o.repeats}, {"metric", std::string(to_string(dist.metric))}};
  Json costs = Json::array();
  for (const auto& c : res.candidates) costs.push_back(cost(data, c));
  report["candidate_costs"] = costs;
  return {centers_csv(res.centers), {{".report.json", dump(report)}},
          "median-boost: chosen=" + std::to_string(res.chosen) + " of " + std::to_string(o.repeats)};
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("kmstep", sink);
  logger->set_pattern("[%l] %v");
  const char* env = std::getenv("KMS_LOG");
  const std::string level = env == nullptr ? "error" : env;
  if (level == "debug") {
    logger->set_level(spdlog::level::debug);
  } else if (level == "info") {
    logger->set_level(spdlog::level::info);
  } else {
    logger->set_level(spdlog::level::err);
    if (level != "error") logger->error("ignoring unknown KMS_LOG value '{}'", level);
  }
  return logger;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  const auto log = make_logger(err);
  Options o;
  CLI::App app{"Mini-batch and emulated quantum k-means steps", "kmstep"};
  app.require_subcommand(1);

  using Handler = std::function<Output(const Options&)>;
  std::vector<std::pair<CLI::App*, Handler>> commands;

  auto io = [&](CLI::App* sub, bool centers) {
    sub->add_option("--data", o.data, "Data CSV (one point per row)")->required();
    if (centers) sub->add_option("--centers", o.centers, "Initial centers CSV (k rows)")->required();
    sub->add_flag("--header", o.header, "Input CSV files have a header row");
  };
  auto out_opt = [&](CLI::App* sub) { sub->add_option("--out", o.out, "Output path (stdout when omitted)"); };
  auto seed_opt = [&](CLI::App* sub) { sub->add_option("--seed", o.seed, "64-bit RNG seed")->required(); };
  auto quantum_opts = [&](CLI::App* sub) {
    sub->add_option("--dp-policy", o.dp_policy, "worst_case | uniform_random");
    sub->add_option("--garbage-policy", o.garbage_policy, "off_cluster_uniform | global_uniform");
    sub->add_option("--constants", o.constants, "Query constants, e.g. mean_est=1,boost=1");
    sub->add_option("--failure-blowup", o.failure_blowup, "Noise radius multiplier on injected failure");
    sub->add_option("--config", o.config, "Emulator config JSON file");
    sub->add_flag("--noiseless", o.noiseless, "No perturbation and no noise");
  };

  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset and initial centers");
  gen->add_option("--preset", o.preset, "planar | hard | mixture | digits");
  gen->add_option("--n", o.n, "Points per component (total points for hard)");
  gen->add_option("--k", o.k, "Components (mixture)");
  gen->add_option("--d", o.d, "Dimension (mixture) or ambient dimension (digits)");
  gen->add_option("--std", o.std, "Component standard deviation");
  gen->add_option("--spread", o.spread, "Scale of the random means (mixture)");
  gen->add_option("--alpha", o.alpha_list, "Far-cluster position (hard)");
  gen->add_option("--out", o.out, "Data CSV path; centers go to <out>.centers.csv")->required();
  seed_opt(gen);
  commands.emplace_back(gen, cmd_generate);

  auto* diag = app.add_subcommand("diagnostics", "Print phi, k_C, eta and related quantities as JSON");
  io(diag, true);
  out_opt(diag);
  commands.emplace_back(diag, cmd_diagnostics);

  auto* lloyd = app.add_subcommand("lloyd", "Exact k-means steps");
  io(lloyd, true);
  out_opt(lloyd);
  lloyd->add_option("--steps", o.steps, "Number of iterations");
  commands.emplace_back(lloyd, cmd_lloyd);

  auto* mb = app.add_subcommand("minibatch", "One uniform mini-batch step");
  io(mb, true);
  out_opt(mb);
  seed_opt(mb);
  mb->add_option("--b", o.b_list, "Batch size")->required();
  mb->add_flag("--exact-fallback", o.exact_fallback, "Use the exact mean for clusters the batch misses");
  commands.emplace_back(mb, cmd_minibatch);

  auto* damped = app.add_subcommand("damped", "One damped mini-batch step");
  io(damped, true);
  out_opt(damped);
  seed_opt(damped);
  damped->add_option("--b", o.b_list, "Batch size")->required();
  damped->add_option("--alpha", o.alpha_list, "Damping: one value or one per cluster (comma list)");
  damped->add_flag("--exact-fallback", o.exact_fallback, "Use the exact mean for clusters the batch misses");
  commands.emplace_back(damped, cmd_damped);

  auto* dlt = app.add_subcommand("dlt", "One two-batch importance-sampled step");
  io(dlt, true);
  out_opt(dlt);
  seed_opt(dlt);
  dlt->add_option("--b", o.b_list, "Weighted batch size")->required();
  dlt->add_option("--a", o.a, "Uniform size-batch size (defaults to b)");
  dlt->add_option("--scheme", o.scheme, "row-norm | row-norm-squared");
  commands.emplace_back(dlt, cmd_dlt);

  auto* qs = app.add_subcommand("quantum-sim", "One emulated quantum k-means step");
  io(qs, true);
  out_opt(qs);
  seed_opt(qs);
  qs->add_option("--eps", o.eps, "Target center accuracy");
  qs->add_option("--delta", o.delta, "Failure probability");
  quantum_opts(qs);
  commands.emplace_back(qs, cmd_quantum);

  auto* sweep = app.add_subcommand("sweep", "Error against batch size for several algorithms");
  io(sweep, true);
  out_opt(sweep);
  seed_opt(sweep);
  sweep->add_option("--b", o.b_list, "Batch sizes (comma list)")->required();
  sweep->add_option("--algorithms", o.algorithms, "uniform, dlt_row_norm_squared, dlt_row_norm");
  sweep->add_option("--trials", o.trials, "Trials per (b, algorithm)");
  sweep->add_option("--threads", o.threads, "Worker cap (0 = all cores)");
  commands.emplace_back(sweep, cmd_sweep);

  auto* ms = app.add_subcommand("multistep", "Approximate tracks against the exact k-means track");
  io(ms, true);
  out_opt(ms);
  seed_opt(ms);
  ms->add_option("--b", o.b_list, "Batch size")->required();
  ms->add_option("--steps", o.steps, "Iterations");
  ms->add_option("--algorithms", o.algorithms, "uniform, dlt_row_norm_squared, dlt_row_norm");
  ms->add_option("--trials", o.trials, "Trials per algorithm");
  ms->add_option("--threads", o.threads, "Worker cap (0 = all cores)");
  ms->add_flag("--full-batch", o.full_batch, "Uniform steps use every point once");
  commands.emplace_back(ms, cmd_multistep);

  auto* inv = app.add_subcommand("invariance", "Recovery on the two-point hard instance and a shifted copy");
  out_opt(inv);
  seed_opt(inv);
  inv->add_option("--alpha", o.alpha_list, "Far-cluster position");
  inv->add_option("--n", o.n, "Number of points (even)");
  inv->add_option("--shift", o.shift, "Translation applied to the copy");
  inv->add_option("--b", o.b_list, "Batch sizes (comma list)")->required();
  inv->add_option("--trials", o.trials, "Trials per (b, instance, algorithm)");
  inv->add_option("--threads", o.threads, "Worker cap (0 = all cores)");
  commands.emplace_back(inv, cmd_invariance);

  auto* bc = app.add_subcommand("bound-check", "Empirical failure rate at the prescribed batch size");
  io(bc, true);
  out_opt(bc);
  seed_opt(bc);
  bc->add_option("--which", o.which, "thm_main | cor_monotone | cor_damped | quantum_main");
  bc->add_option("--eps", o.eps, "Accuracy parameter");
  bc->add_option("--delta", o.delta, "Failure probability");
  bc->add_option("--trials", o.trials, "Trials");
  bc->add_option("--alpha", o.alpha_list, "Damping for cor_damped");
  bc->add_option("--threads", o.threads, "Worker cap (0 = all cores)");
  quantum_opts(bc);
  commands.emplace_back(bc, cmd_bound_check);

  auto* mbst = app.add_subcommand("median-boost", "Median-trick choice among repeated mini-batch steps");
  io(mbst, true);
  out_opt(mbst);
  seed_opt(mbst);
  mbst->add_option("--b", o.b_list, "Batch size")->required();
  mbst->add_option("--repeats", o.repeats, "Independent steps");
  mbst->add_option("--metric", o.metric, "euclidean | weighted");
  commands.emplace_back(mbst, cmd_median_boost);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (const auto& [sub, handler] : commands) {
      if (!sub->parsed()) continue;
      log->info("running {}", sub->get_name());
      const auto result = handler(o);
      if (o.out.empty()) {
        out << result.primary;
        err << result.summary << '\n';
      } else {
        write_file(o.out, result.primary);
        for (const auto& [suffix, content] : result.extras) {
          const auto path = derived_path(o.out, suffix);
          write_file(path, content);
          log->debug("wrote {}", path);
        }
        out << result.summary << '\n';
      }
      return kExitOk;
    }
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace kmstep::cli
