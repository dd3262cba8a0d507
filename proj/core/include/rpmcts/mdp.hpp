#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rpmcts {

/// Random stream used everywhere in the library. Each worker owns one.
using Rng = std::mt19937_64;

using StateVec = std::vector<double>;
using Action = std::vector<double>;

/// Raised when a caller breaks a documented precondition (e.g. an action
/// outside the action box).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Axis-aligned box of admissible actions.
class ActionBox {
 public:
  ActionBox(std::vector<double> low, std::vector<double> high);

  std::size_t dim() const { return low_.size(); }
  const std::vector<double>& low() const { return low_; }
  const std::vector<double>& high() const { return high_; }

  bool contains(std::span<const double> action, double tol = 1e-12) const;
  Action clamp(std::span<const double> action) const;
  Action sample_uniform(Rng& rng) const;

 private:
  std::vector<double> low_;
  std::vector<double> high_;
};

struct TransitionOutcome {
  StateVec next_state;
  double reward = 0.0;
  bool terminal = false;
};

struct MdpConfig {
  double gamma = 1.0;
  int max_episode_steps = 100;
  int rollout_depth = 10;

  void validate() const;
};

/// Generative model of an MDP: sample-based access to transitions and
/// rewards. Implementations are immutable value objects; all randomness comes
/// through the explicit stream argument, so one instance may be stepped from
/// several threads, and clone() hands each worker a private copy.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string_view name() const = 0;
  virtual const ActionBox& action_box() const = 0;
  virtual std::size_t state_dim() const = 0;
  virtual bool stochastic() const = 0;

  virtual StateVec initial_state(Rng& rng) const = 0;

  /// Samples a successor. Throws ContractViolation for actions outside the
  /// box or states of the wrong dimension.
  TransitionOutcome step(const StateVec& state, std::span<const double> action, Rng& rng) const;

  /// Estimated value of a non-terminal state where a rollout is cut off.
  /// Zero means plain depth-limited rollouts.
  virtual double leaf_value(const StateVec& /*state*/) const { return 0.0; }

  virtual std::unique_ptr<Environment> clone() const = 0;

 protected:
  virtual TransitionOutcome do_step(const StateVec& state, std::span<const double> action,
                                    Rng& rng) const = 0;
};

/// Sum of gamma^t * r_t.
double discounted_return(std::span<const double> rewards, double gamma);

bool all_finite(std::span<const double> values);

/// SplitMix64 finalizer; the mixing step behind every derived seed.
std::uint64_t mix64(std::uint64_t x);

/// Seed for a sub-stream, e.g. worker `index` under `master`. Streams for
/// distinct indices are independent of how many siblings exist.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

}  // namespace rpmcts
