#include "rpmcts/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rpmcts {

ActionBox::ActionBox(std::vector<double> low, std::vector<double> high)
    : low_(std::move(low)), high_(std::move(high)) {
  if (low_.empty() || low_.size() != high_.size()) {
    throw std::invalid_argument("action box: low/high must be nonempty and of equal length");
  }
  for (std::size_t i = 0; i < low_.size(); ++i) {
    if (!(low_[i] < high_[i]) || !std::isfinite(low_[i]) || !std::isfinite(high_[i])) {
      std::ostringstream msg;
      msg << "action box: dimension " << i << " has low=" << low_[i] << " >= high=" << high_[i];
      throw std::invalid_argument(msg.str());
    }
  }
}

bool ActionBox::contains(std::span<const double> action, double tol) const {
  if (action.size() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (!std::isfinite(action[i])) return false;
    if (action[i] < low_[i] - tol || action[i] > high_[i] + tol) return false;
  }
  return true;
}

Action ActionBox::clamp(std::span<const double> action) const {
  Action out(action.begin(), action.end());
  for (std::size_t i = 0; i < dim(); ++i) out[i] = std::clamp(out[i], low_[i], high_[i]);
  return out;
}

Action ActionBox::sample_uniform(Rng& rng) const {
  Action out(dim());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < dim(); ++i) out[i] = low_[i] + unit(rng) * (high_[i] - low_[i]);
  return out;
}

void MdpConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (max_episode_steps <= 0) throw std::invalid_argument("max_episode_steps must be positive");
  if (rollout_depth <= 0) throw std::invalid_argument("rollout_depth must be positive");
}

TransitionOutcome Environment::step(const StateVec& state, std::span<const double> action,
                                     Rng& rng) const {
  if (!action_box().contains(action)) {
    std::ostringstream msg;
    msg << name() << ": action [";
    for (std::size_t i = 0; i < action.size(); ++i) msg << (i ? ", " : "") << action[i];
    msg << "] outside the action box";
    throw ContractViolation(msg.str());
  }
  if (state.size() != state_dim()) {
    throw ContractViolation(std::string(name()) + ": state has wrong dimension");
  }
  return do_step(state, action, rng);
}

double discounted_return(std::span<const double> rewards, double gamma) {
  double total = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    total += discount * r;
    discount *= gamma;
  }
  return total;
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  // FNV-1a over the label, then mixed with the master seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive_seed(master, h);
}

}  // namespace rpmcts
