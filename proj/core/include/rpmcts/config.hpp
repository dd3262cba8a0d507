#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpmcts/aggregation.hpp"
#include "rpmcts/environments.hpp"
#include "rpmcts/mcts.hpp"

namespace rpmcts {

/// Bad preset file, unknown environment/strategy, or invalid override.
/// The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PrimaryMetric { kSteps, kSuccessRate };

/// One environment preset: dynamics constants, planner parameters and the
/// default experiment schedule.
///
/// File grammar, one entry per line:
///
///     # comment (also allowed after a value)
///     section.key = value
///
/// A value is a number, a bare word, or a comma-separated list of numbers.
/// Sections: env (name plus any environment constant), mdp, mcts, vote,
/// merge, gpr2p, bench. Unknown keys are errors.
struct Preset {
  std::string env_name;
  std::optional<EnvKind> env_kind;  // empty for environments not built in
  EnvParams env_params;

  MdpConfig mdp;
  SearchParams search;

  double vote_phi = 25.0;
  double vote_offset_epsilon = 1.0;
  double merge_phi = 1.0;
  gpr::KernelParams kernel;
  std::vector<int> tau{1};  // aligned with trial_budgets
  std::optional<int> candidates;  // unset: chosen from the action dimension

  std::vector<int> trial_budgets{15, 30, 60, 120};
  std::vector<int> trial_budgets_alt;
  int seeds = 30;
  int workers = 8;
  PrimaryMetric metric = PrimaryMetric::kSteps;

  /// Visit threshold for a budget: the tau paired with the largest scheduled
  /// budget not exceeding it (the first tau below the schedule).
  int tau_for(int trial_budget) const;

  AggregationChoice choice_for(StrategyKind kind, int trial_budget) const;

  std::unique_ptr<Environment> make_env() const;
};

Preset parse_preset(const std::string& text, const std::string& source = "<string>");
Preset load_preset(const std::filesystem::path& path);

/// <dir>/<env_name>.cfg
Preset load_preset(const std::filesystem::path& dir, std::string_view env_name);

/// Directory of the presets shipped with the project: $RPMCTS_PRESET_DIR if
/// set, otherwise the location configured at build time.
std::filesystem::path default_preset_dir();

/// Hyperparameter overrides from the command line; unset fields keep the
/// preset value.
struct StrategyOverrides {
  std::optional<double> phi;
  std::optional<double> sigma_f2;
  std::optional<double> length_scale;
  std::optional<double> sigma_n2;
  std::optional<int> tau;
  std::optional<int> candidates;

  void apply(Preset& preset) const;
};

std::string_view metric_name(PrimaryMetric metric);

}  // namespace rpmcts
