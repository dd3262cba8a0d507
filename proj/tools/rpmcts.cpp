// rpmcts: benchmark harness for root-parallel MCTS aggregation strategies.
//
//   rpmcts run          --env narrow_corridor --strategy gpr2p,similarity_merge --trials 15,30 --seeds 30 --out results.csv
//   rpmcts rank         --in results.csv --out ranks.json
//   rpmcts plot         --in results.csv --out plots/
//   rpmcts time-compare --env narrow_corridor --trials 15 --seeds 30 --out equalized.csv
//   rpmcts sweep        --env narrow_corridor --strategy gpr2p --param length-scale --values 1,2.61,4 --out sweep/
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rpmcts/config.hpp"
#include "rpmcts/experiment.hpp"
#include "rpmcts/metrics.hpp"
#include "rpmcts/plot.hpp"

namespace fs = std::filesystem;
using namespace rpmcts;

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

// "30" -> 0..29, "3,7,9" -> those seeds, "10..19" -> inclusive range.
std::vector<long long> parse_seeds(const std::string& text) {
  try {
    if (text.empty()) return {};
    if (auto dots = text.find(".."); dots != std::string::npos) {
      const long long lo = std::stoll(text.substr(0, dots));
      const long long hi = std::stoll(text.substr(dots + 2));
      if (hi < lo) throw ConfigError("empty seed range " + text);
      std::vector<long long> out;
      for (long long s = lo; s <= hi; ++s) out.push_back(s);
      return out;
    }
    if (text.find(',') != std::string::npos) {
      std::vector<long long> out;
      for (const auto& part : split_list({text})) out.push_back(std::stoll(part));
      return out;
    }
    const long long count = std::stoll(text);
    if (count < 1) throw ConfigError("--seeds count must be positive");
    std::vector<long long> out;
    for (long long s = 0; s < count; ++s) out.push_back(s);
    return out;
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse --seeds '" + text + "'");
  }
}

std::vector<int> parse_ints(const std::vector<std::string>& items, const char* flag) {
  std::vector<int> out;
  for (const auto& s : split_list(items)) {
    try {
      out.push_back(std::stoi(s));
    } catch (const std::logic_error&) {
      throw ConfigError(std::string("cannot parse ") + flag + " value '" + s + "'");
    }
  }
  return out;
}

std::vector<StrategyKind> parse_strategies(const std::vector<std::string>& items) {
  std::vector<StrategyKind> out;
  for (const auto& s : split_list(items)) {
    if (s == "all") {
      out.assign(std::begin(kAllStrategies), std::end(kAllStrategies));
      continue;
    }
    auto kind = parse_strategy(s);
    if (!kind) throw ConfigError("unknown strategy '" + s + "'");
    out.push_back(*kind);
  }
  if (out.empty()) throw ConfigError("no strategies given");
  return out;
}

std::vector<std::string> parse_envs(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& s : split_list(items)) {
    if (s == "all") {
      for (EnvKind k : kAllEnvs) out.emplace_back(env_name(k));
      continue;
    }
    out.push_back(s);
  }
  if (out.empty()) throw ConfigError("no environments given");
  return out;
}

// --config is either a preset directory or a single preset file.
PresetLoader make_loader(const std::string& config) {
  const fs::path path = config.empty() ? default_preset_dir() : fs::path(config);
  if (!config.empty() && fs::is_regular_file(path)) {
    Preset single = load_preset(path);
    return [single](const std::string& env) {
      if (env != single.env_name) {
        throw ConfigError("preset " + single.env_name + " does not describe environment '" + env + "'");
      }
      return single;
    };
  }
  return [path](const std::string& env) {
    if (!fs::exists(path / (env + ".cfg"))) throw ConfigError("unknown environment '" + env + "'");
    return load_preset(path, env);
  };
}

struct OverrideFlags {
  double phi = 0, sigma_f2 = 0, length_scale = 0, sigma_n2 = 0;
  int tau = 0, candidates = 0;
  CLI::Option *o_phi = nullptr, *o_sf = nullptr, *o_ls = nullptr, *o_sn = nullptr, *o_tau = nullptr,
              *o_cand = nullptr;

  void add(CLI::App* app) {
    o_phi = app->add_option("--phi", phi, "Similarity scale for vote and merge");
    o_sf = app->add_option("--sigma-f2", sigma_f2, "GPR2P signal variance");
    o_ls = app->add_option("--length-scale", length_scale, "GPR2P RBF length scale");
    o_sn = app->add_option("--sigma-n2", sigma_n2, "GPR2P noise variance");
    o_tau = app->add_option("--tau", tau, "GPR2P visit threshold (all budgets)");
    o_cand = app->add_option("--candidates", candidates, "GPR2P quasi-uniform candidate count");
  }

  StrategyOverrides get() const {
    StrategyOverrides o;
    if (*o_phi) o.phi = phi;
    if (*o_sf) o.sigma_f2 = sigma_f2;
    if (*o_ls) o.length_scale = length_scale;
    if (*o_sn) o.sigma_n2 = sigma_n2;
    if (*o_tau) o.tau = tau;
    if (*o_cand) o.candidates = candidates;
    return o;
  }
};

// Opens --out, "-" meaning stdout.
struct Output {
  std::ofstream file;
  std::ostream* stream = &std::cout;

  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    file.open(path);
    if (!file) throw std::runtime_error("cannot write " + path);
    stream = &file;
  }
};

std::vector<EpisodeRecord> read_inputs(const std::vector<std::string>& paths) {
  std::vector<EpisodeRecord> all;
  for (const auto& p : paths) {
    auto rows = read_csv_file(p);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  return all;
}

void print_summary(const std::vector<EpisodeRecord>& records) {
  std::fprintf(stderr, "%-18s %-17s %6s %9s %7s %8s %11s %10s\n", "env", "strategy", "trials", "steps",
               "se", "success", "infer[s]", "total[s]");
  for (const auto& c : summarize(records)) {
    std::fprintf(stderr, "%-18s %-17s %6d %9.3f %7.3f %8.3f %11.5f %10.4f\n", c.env.c_str(),
                 c.strategy.c_str(), c.trial_budget, c.steps.mean, c.steps.std_error, c.success_rate,
                 c.mean_inference_seconds, c.mean_total_seconds);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Root-parallel MCTS aggregation benchmark"};
  app.require_subcommand(1);

  std::vector<std::string> envs{"all"}, strategies{"all"}, trials, inputs;
  std::string seeds, config, out, param;
  std::vector<std::string> values;
  int workers = 0;
  std::uint64_t master_seed = 0;
  OverrideFlags run_over, tc_over, sweep_over;

  auto* run = app.add_subcommand("run", "Run an (env x strategy x trials x seed) grid, write CSV");
  run->add_option("--env", envs, "Environments (comma list or 'all')");
  run->add_option("--strategy", strategies, "Strategies (comma list or 'all')");
  run->add_option("--trials", trials, "Trials per worker (comma list; default: preset schedule)");
  run->add_option("--seeds", seeds, "Seed count N (0..N-1), list a,b,c, or range a..b");
  run->add_option("--workers", workers, "Parallel trees per step (default: preset)");
  run->add_option("--config", config, "Preset directory or single preset file");
  run->add_option("--out", out, "Results CSV ('-' for stdout)");
  run->add_option("--master-seed", master_seed, "Master seed");
  run_over.add(run);

  auto* rank = app.add_subcommand("rank", "Mean reciprocal rank table from results, as JSON");
  rank->add_option("--in", inputs, "Results CSV files")->required();
  rank->add_option("--config", config, "Preset directory (for each env's primary metric)");
  rank->add_option("--out", out, "Output JSON ('-' for stdout)");

  auto* plot = app.add_subcommand("plot", "One SVG per environment from results");
  plot->add_option("--in", inputs, "Results CSV files")->required();
  plot->add_option("--config", config, "Preset directory (plot constant and metric)");
  plot->add_option("--out", out, "Output directory")->required();

  auto* tc = app.add_subcommand("time-compare", "GPR2P vs similarity merge with time-equalized trials");
  std::string tc_env = "narrow_corridor";
  tc->add_option("--env", tc_env, "Environment");
  tc->add_option("--trials", trials, "Trials per worker (comma list; default: preset schedule)");
  tc->add_option("--seeds", seeds, "Seed count, list or range");
  tc->add_option("--workers", workers, "Parallel trees per step (default: preset)");
  tc->add_option("--config", config, "Preset directory or single preset file");
  tc->add_option("--out", out, "Results CSV ('-' for stdout)");
  tc->add_option("--master-seed", master_seed, "Master seed");
  tc_over.add(tc);

  auto* sweep = app.add_subcommand("sweep", "Run one strategy for several values of one hyperparameter");
  std::string sweep_env = "narrow_corridor";
  std::string sweep_strategy = "gpr2p";
  sweep->add_option("--env", sweep_env, "Environment");
  sweep->add_option("--strategy", sweep_strategy, "Strategy");
  sweep->add_option("--param", param, "phi, sigma-f2, length-scale, sigma-n2, tau or candidates")->required();
  sweep->add_option("--values", values, "Comma list of values")->required();
  sweep->add_option("--trials", trials, "Trials per worker (comma list)");
  sweep->add_option("--seeds", seeds, "Seed count, list or range");
  sweep->add_option("--workers", workers, "Parallel trees per step");
  sweep->add_option("--config", config, "Preset directory or single preset file");
  sweep->add_option("--out", out, "Output directory, one CSV per value")->required();
  sweep->add_option("--master-seed", master_seed, "Master seed");
  sweep_over.add(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (run->parsed()) {
      ExperimentGrid grid;
      grid.envs = parse_envs(envs);
      grid.strategies = parse_strategies(strategies);
      grid.trial_budgets = parse_ints(trials, "--trials");
      grid.seeds = parse_seeds(seeds);
      if (workers != 0) grid.workers = workers;
      grid.master_seed = master_seed;
      Output o(out);
      const auto records = run_grid(grid, make_loader(config), run_over.get(), *o.stream, &std::cerr);
      print_summary(records);
    } else if (rank->parsed()) {
      const auto records = read_inputs(inputs);
      const auto loader = make_loader(config);
      auto metric_for = [&](const std::string& env) {
        try {
          return loader(env).metric;
        } catch (const ConfigError&) {
          return PrimaryMetric::kSteps;
        }
      };
      const RankTable table = mrr(rank_cells(summarize(records), metric_for));
      Output o(out);
      *o.stream << table.to_json() << '\n';
    } else if (plot->parsed()) {
      const auto records = read_inputs(inputs);
      const auto loader = make_loader(config);
      auto axis_for = [&](const std::string& env) {
        PlotAxis axis;
        try {
          const Preset p = loader(env);
          axis.metric = p.metric;
          axis.plot_constant = p.mdp.max_episode_steps;
        } catch (const ConfigError&) {
          int worst = 0;
          for (const auto& r : records) {
            if (r.env == env) worst = std::max(worst, r.steps);
          }
          axis.plot_constant = worst;
          std::cerr << "warning: no preset for " << env << "; plot constant = " << worst << '\n';
        }
        return axis;
      };
      const PlotOutput result = emit_plots(records, axis_for, out);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      for (const auto& f : result.files) std::cerr << "wrote " << f.string() << '\n';
    } else if (tc->parsed()) {
      Preset preset = make_loader(config)(tc_env);
      tc_over.get().apply(preset);
      TimeCompareOptions opt;
      opt.trial_budgets = parse_ints(trials, "--trials");
      if (opt.trial_budgets.empty()) opt.trial_budgets = preset.trial_budgets;
      opt.seeds = parse_seeds(seeds);
      if (opt.seeds.empty()) opt.seeds = parse_seeds(std::to_string(preset.seeds));
      opt.workers = workers != 0 ? workers : preset.workers;
      opt.master_seed = master_seed;
      Output o(out);
      const auto records = time_equalized_compare(preset, opt, *o.stream, &std::cerr);
      print_summary(records);
    } else if (sweep->parsed()) {
      const auto kind = parse_strategy(sweep_strategy);
      if (!kind) throw ConfigError("unknown strategy '" + sweep_strategy + "'");
      const auto value_list = split_list(values);
      if (value_list.empty()) throw ConfigError("--values is empty");
      fs::create_directories(out);
      for (const auto& v : value_list) {
        StrategyOverrides o = sweep_over.get();
        try {
          if (param == "phi") o.phi = std::stod(v);
          else if (param == "sigma-f2") o.sigma_f2 = std::stod(v);
          else if (param == "length-scale") o.length_scale = std::stod(v);
          else if (param == "sigma-n2") o.sigma_n2 = std::stod(v);
          else if (param == "tau") o.tau = std::stoi(v);
          else if (param == "candidates") o.candidates = std::stoi(v);
          else throw ConfigError("unknown sweep parameter '" + param + "'");
        } catch (const std::logic_error&) {
          throw ConfigError("cannot parse sweep value '" + v + "'");
        }
        ExperimentGrid grid;
        grid.envs = {sweep_env};
        grid.strategies = {*kind};
        grid.trial_budgets = parse_ints(trials, "--trials");
        grid.seeds = parse_seeds(seeds);
        if (workers != 0) grid.workers = workers;
        grid.master_seed = master_seed;
        Output file((fs::path(out) / (param + "=" + v + ".csv")).string());
        std::cerr << "== " << param << " = " << v << '\n';
        print_summary(run_grid(grid, make_loader(config), o, *file.stream, nullptr));
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
