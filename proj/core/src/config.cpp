#include "rpmcts/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#ifndef RPMCTS_PRESET_DIR
#define RPMCTS_PRESET_DIR "presets"
#endif

namespace rpmcts {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

class Entries {
 public:
  Entries(std::map<std::string, std::pair<std::string, int>> values, std::string source)
      : values_(std::move(values)), source_(std::move(source)) {}

  std::optional<std::string> take(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    current_line_ = it->second.second;
    std::string v = it->second.first;
    values_.erase(it);
    return v;
  }

  void number(const std::string& key, double& out) {
    if (auto v = take(key)) out = to_double(key, *v);
  }

  void integer(const std::string& key, int& out) {
    if (auto v = take(key)) out = to_int(key, *v);
  }

  void integer(const std::string& key, std::optional<int>& out) {
    if (auto v = take(key)) out = to_int(key, *v);
  }

  void int_list(const std::string& key, std::vector<int>& out) {
    auto v = take(key);
    if (!v) return;
    out.clear();
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_int(key, trim(item)));
    if (out.empty()) fail(key, "empty list");
  }

  // Remaining env.* keys, prefix stripped.
  EnvParams drain_env_params() {
    EnvParams out;
    for (auto it = values_.begin(); it != values_.end();) {
      if (it->first.rfind("env.", 0) == 0) {
        current_line_ = it->second.second;
        out[it->first.substr(4)] = to_double(it->first, it->second.first);
        it = values_.erase(it);
      } else {
        ++it;
      }
    }
    return out;
  }

  void reject_leftovers() const {
    if (values_.empty()) return;
    const auto& [key, entry] = *values_.begin();
    throw ConfigError(source_ + ":" + std::to_string(entry.second) + ": unknown key '" + key + "'");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(source_ + ":" + std::to_string(current_line_) + ": " + key + ": " + what);
  }

 private:
  double to_double(const std::string& key, const std::string& text) const {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size()) fail(key, "expected a number, got '" + text + "'");
    return v;
  }

  int to_int(const std::string& key, const std::string& text) const {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      fail(key, "expected an integer, got '" + text + "'");
    }
    return v;
  }

  std::map<std::string, std::pair<std::string, int>> values_;
  std::string source_;
  int current_line_ = 0;
};

}  // namespace

std::string_view metric_name(PrimaryMetric metric) {
  return metric == PrimaryMetric::kSteps ? "steps" : "success_rate";
}

int Preset::tau_for(int trial_budget) const {
  if (tau.empty()) return 1;
  int chosen = tau.front();
  for (std::size_t i = 0; i < trial_budgets.size() && i < tau.size(); ++i) {
    if (trial_budgets[i] <= trial_budget) chosen = tau[i];
  }
  return chosen;
}

AggregationChoice Preset::choice_for(StrategyKind kind, int trial_budget) const {
  AggregationChoice c;
  c.kind = kind;
  c.phi = kind == StrategyKind::kSimilarityVote ? vote_phi : merge_phi;
  c.vote_offset_epsilon = vote_offset_epsilon;
  c.kernel = kernel;
  c.tau = tau_for(trial_budget);
  c.candidate_budget = candidates;
  return c;
}

std::unique_ptr<Environment> Preset::make_env() const {
  if (!env_kind) {
    throw ConfigError("environment '" + env_name +
                      "' has no built-in simulator; bind one through the Environment interface");
  }
  try {
    return make_environment(*env_kind, env_params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Preset parse_preset(const std::string& text, const std::string& source) {
  std::map<std::string, std::pair<std::string, int>> raw;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string content = trim(line);
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key or value");
    }
    if (!raw.emplace(key, std::make_pair(value, line_no)).second) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }

  Entries e(std::move(raw), source);
  Preset p;
  auto name = e.take("env.name");
  if (!name) throw ConfigError(source + ": missing env.name");
  p.env_name = *name;
  p.env_kind = parse_env(p.env_name);

  e.number("mdp.gamma", p.mdp.gamma);
  e.integer("mdp.max_episode_steps", p.mdp.max_episode_steps);
  e.integer("mdp.rollout_depth", p.mdp.rollout_depth);

  e.number("mcts.uct_weight", p.search.uct_weight);
  e.number("mcts.pw_c", p.search.pw_c);
  e.number("mcts.pw_alpha", p.search.pw_alpha);
  double dpw_d = std::numeric_limits<double>::quiet_NaN();
  double dpw_beta = std::numeric_limits<double>::quiet_NaN();
  e.number("mcts.dpw_d", dpw_d);
  e.number("mcts.dpw_beta", dpw_beta);
  if (std::isnan(dpw_d) != std::isnan(dpw_beta)) {
    throw ConfigError(source + ": mcts.dpw_d and mcts.dpw_beta must be given together");
  }
  if (!std::isnan(dpw_d)) p.search.dpw = DpwParams{dpw_d, dpw_beta};

  e.number("vote.phi", p.vote_phi);
  e.number("vote.offset_epsilon", p.vote_offset_epsilon);
  e.number("merge.phi", p.merge_phi);
  e.number("gpr2p.sigma_f2", p.kernel.signal_variance);
  e.number("gpr2p.length_scale", p.kernel.length_scale);
  e.number("gpr2p.sigma_n2", p.kernel.noise_variance);
  e.int_list("gpr2p.tau", p.tau);
  e.integer("gpr2p.candidates", p.candidates);

  e.int_list("bench.trial_budgets", p.trial_budgets);
  e.int_list("bench.trial_budgets_alt", p.trial_budgets_alt);
  e.integer("bench.seeds", p.seeds);
  e.integer("bench.workers", p.workers);
  if (auto v = e.take("bench.metric")) {
    if (*v == "steps") {
      p.metric = PrimaryMetric::kSteps;
    } else if (*v == "success_rate") {
      p.metric = PrimaryMetric::kSuccessRate;
    } else {
      e.fail("bench.metric", "expected 'steps' or 'success_rate'");
    }
  }

  p.env_params = e.drain_env_params();
  e.reject_leftovers();

  try {
    p.mdp.validate();
    SearchParams check = p.search;
    check.validate();
    p.kernel.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(source + ": " + ex.what());
  }
  if (p.seeds < 1 || p.workers < 1 || (p.candidates && *p.candidates < 1)) {
    throw ConfigError(source + ": bench.seeds, bench.workers and gpr2p.candidates must be positive");
  }
  if (std::any_of(p.tau.begin(), p.tau.end(), [](int t) { return t < 1; })) {
    throw ConfigError(source + ": gpr2p.tau entries must be >= 1");
  }
  if (std::any_of(p.trial_budgets.begin(), p.trial_budgets.end(), [](int t) { return t < 1; })) {
    throw ConfigError(source + ": trial budgets must be positive");
  }
  if (p.env_kind) {
    // Surface bad environment keys at load time rather than at first run.
    (void)p.make_env();
  }
  return p;
}

Preset load_preset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open preset file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_preset(buf.str(), path.string());
}

Preset load_preset(const std::filesystem::path& dir, std::string_view env_name) {
  return load_preset(dir / (std::string(env_name) + ".cfg"));
}

std::filesystem::path default_preset_dir() {
  if (const char* env = std::getenv("RPMCTS_PRESET_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return RPMCTS_PRESET_DIR;
}

void StrategyOverrides::apply(Preset& preset) const {
  if (phi) {
    preset.vote_phi = *phi;
    preset.merge_phi = *phi;
  }
  if (sigma_f2) preset.kernel.signal_variance = *sigma_f2;
  if (length_scale) preset.kernel.length_scale = *length_scale;
  if (sigma_n2) preset.kernel.noise_variance = *sigma_n2;
  if (tau) preset.tau.assign(std::max<std::size_t>(preset.tau.size(), 1), *tau);
  if (candidates) preset.candidates = *candidates;
  try {
    preset.kernel.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if ((phi && !(*phi > 0.0)) || (tau && *tau < 1) || (candidates && *candidates < 1)) {
    throw ConfigError("overrides: phi must be > 0, tau and candidates >= 1");
  }
}

}  // namespace rpmcts
