#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rpmcts/mdp.hpp"

namespace rpmcts {

enum class EnvKind { kMountainCar, kPendulum, kRandomTeleporter, kWideCorridor, kNarrowCorridor };

inline constexpr EnvKind kAllEnvs[] = {EnvKind::kMountainCar, EnvKind::kPendulum,
                                       EnvKind::kRandomTeleporter, EnvKind::kWideCorridor,
                                       EnvKind::kNarrowCorridor};

std::string_view env_name(EnvKind kind);
std::optional<EnvKind> parse_env(std::string_view name);
bool is_stochastic(EnvKind kind);

using EnvParams = std::map<std::string, double, std::less<>>;

/// Reference constants for each environment. Keys not listed here are
/// rejected by make_environment.
EnvParams default_env_params(EnvKind kind);

/// Builds an environment from defaults overlaid with `overrides`.
/// Throws std::invalid_argument for unknown keys or invalid values.
std::unique_ptr<Environment> make_environment(EnvKind kind, const EnvParams& overrides = {});

/// Wraps an angle to [-pi, pi).
double angle_normalize(double theta);

/// Continuous mountain car. State (position, velocity); action: force in [-1, 1].
class MountainCar final : public Environment {
 public:
  struct Params {
    double min_position = -1.2;
    double max_position = 0.6;
    double max_speed = 0.07;
    double goal_position = 0.45;
    double power = 0.0015;
    double gravity = 0.0025;
    double ctrl_cost = 0.1;
    double goal_bonus = 100.0;
    double start_low = -0.6;
    double start_high = -0.4;
    double leaf_weight = 100.0;  // leaf value = weight * normalised energy
  };

  explicit MountainCar(Params params);

  std::string_view name() const override { return "mountain_car"; }
  const ActionBox& action_box() const override { return box_; }
  std::size_t state_dim() const override { return 2; }
  bool stochastic() const override { return false; }
  StateVec initial_state(Rng& rng) const override;
  double leaf_value(const StateVec& state) const override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<MountainCar>(*this); }

  /// Mechanical energy per unit mass: v^2/2 + gravity * sin(3x) / 3.
  double energy(const StateVec& state) const;
  const Params& params() const { return params_; }

 protected:
  TransitionOutcome do_step(const StateVec& state, std::span<const double> action,
                            Rng& rng) const override;

 private:
  Params params_;
  ActionBox box_;
};

/// Torque-controlled pendulum, theta = 0 upright. State (theta, theta_dot,
/// hold) where hold counts consecutive steps inside the upright band; the
/// episode terminates (successfully) once hold reaches hold_steps.
class Pendulum final : public Environment {
 public:
  struct Params {
    double max_speed = 8.0;
    double max_torque = 2.0;
    double dt = 0.05;
    double g = 10.0;
    double mass = 1.0;
    double length = 1.0;
    double theta_tol = 0.2;
    double omega_tol = 1.0;
    double hold_steps = 10;
    double leaf_weight = 0.0;
  };

  explicit Pendulum(Params params);

  std::string_view name() const override { return "pendulum"; }
  const ActionBox& action_box() const override { return box_; }
  std::size_t state_dim() const override { return 3; }
  bool stochastic() const override { return false; }
  StateVec initial_state(Rng& rng) const override;
  double leaf_value(const StateVec& state) const override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<Pendulum>(*this); }

  /// Angular acceleration for torque u.
  double angular_acceleration(double theta, double torque) const;
  const Params& params() const { return params_; }

 protected:
  TransitionOutcome do_step(const StateVec& state, std::span<const double> action,
                            Rng& rng) const override;

 private:
  Params params_;
  ActionBox box_;
};

/// Position-dependent drift: inside a straight corridor from start to goal the
/// agent is pushed toward the goal, outside it is pushed back.
struct ForceField {
  std::vector<double> corridor_axis;    // unit vector, start -> goal
  std::vector<double> corridor_center;  // a point on the centerline
  double corridor_half_width = 1.0;
  std::vector<double> inside_force;
  std::vector<double> outside_force;

  double distance_to_centerline(std::span<const double> position) const;
  const std::vector<double>& force_at(std::span<const double> position) const;
};

/// 2-D navigation with noisy displacement. State (x, y); action is the
/// intended displacement, norm-limited to max_step. Magnitude is scaled by
/// (1 + e_m), direction rotated by e_d, both uniform noise. With a ForceField
/// this is the corridor task.
class Teleporter final : public Environment {
 public:
  struct Params {
    double arena_low = 0.0;
    double arena_high = 10.0;
    double start_x = 1.0;
    double start_y = 1.0;
    double goal_x = 9.0;
    double goal_y = 9.0;
    double goal_radius = 0.5;
    double max_step = 1.0;
    double sigma_m = 0.2;
    double sigma_d_deg = 15.0;
    double leaf_weight = 1.0;  // leaf value = -weight * remaining distance / max_step
  };

  Teleporter(std::string name, Params params, std::optional<ForceField> field);

  std::string_view name() const override { return name_; }
  const ActionBox& action_box() const override { return box_; }
  std::size_t state_dim() const override { return 2; }
  bool stochastic() const override { return true; }
  StateVec initial_state(Rng& rng) const override;
  double leaf_value(const StateVec& state) const override;
  std::unique_ptr<Environment> clone() const override { return std::make_unique<Teleporter>(*this); }

  double distance_to_goal(std::span<const double> position) const;
  const Params& params() const { return params_; }
  const std::optional<ForceField>& field() const { return field_; }

 protected:
  TransitionOutcome do_step(const StateVec& state, std::span<const double> action,
                            Rng& rng) const override;

 private:
  std::string name_;
  Params params_;
  std::optional<ForceField> field_;
  ActionBox box_;
};

}  // namespace rpmcts
