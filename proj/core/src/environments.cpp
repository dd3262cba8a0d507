#include "rpmcts/environments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rpmcts {

namespace {

struct NamedEnv {
  EnvKind kind;
  std::string_view name;
};

constexpr std::array<NamedEnv, 5> kEnvNames{{
    {EnvKind::kMountainCar, "mountain_car"},
    {EnvKind::kPendulum, "pendulum"},
    {EnvKind::kRandomTeleporter, "random_teleporter"},
    {EnvKind::kWideCorridor, "wide_corridor"},
    {EnvKind::kNarrowCorridor, "narrow_corridor"},
}};

template <typename P>
struct Field {
  std::string_view key;
  double P::*member;
};

constexpr std::array<Field<MountainCar::Params>, 11> kMountainCarFields{{
    {"min_position", &MountainCar::Params::min_position},
    {"max_position", &MountainCar::Params::max_position},
    {"max_speed", &MountainCar::Params::max_speed},
    {"goal_position", &MountainCar::Params::goal_position},
    {"power", &MountainCar::Params::power},
    {"gravity", &MountainCar::Params::gravity},
    {"ctrl_cost", &MountainCar::Params::ctrl_cost},
    {"goal_bonus", &MountainCar::Params::goal_bonus},
    {"start_low", &MountainCar::Params::start_low},
    {"start_high", &MountainCar::Params::start_high},
    {"leaf_weight", &MountainCar::Params::leaf_weight},
}};

constexpr std::array<Field<Pendulum::Params>, 10> kPendulumFields{{
    {"max_speed", &Pendulum::Params::max_speed},
    {"max_torque", &Pendulum::Params::max_torque},
    {"dt", &Pendulum::Params::dt},
    {"g", &Pendulum::Params::g},
    {"mass", &Pendulum::Params::mass},
    {"length", &Pendulum::Params::length},
    {"theta_tol", &Pendulum::Params::theta_tol},
    {"omega_tol", &Pendulum::Params::omega_tol},
    {"hold_steps", &Pendulum::Params::hold_steps},
    {"leaf_weight", &Pendulum::Params::leaf_weight},
}};

constexpr std::array<Field<Teleporter::Params>, 11> kTeleporterFields{{
    {"arena_low", &Teleporter::Params::arena_low},
    {"arena_high", &Teleporter::Params::arena_high},
    {"start_x", &Teleporter::Params::start_x},
    {"start_y", &Teleporter::Params::start_y},
    {"goal_x", &Teleporter::Params::goal_x},
    {"goal_y", &Teleporter::Params::goal_y},
    {"goal_radius", &Teleporter::Params::goal_radius},
    {"max_step", &Teleporter::Params::max_step},
    {"sigma_m", &Teleporter::Params::sigma_m},
    {"sigma_d_deg", &Teleporter::Params::sigma_d_deg},
    {"leaf_weight", &Teleporter::Params::leaf_weight},
}};

struct CorridorParams {
  double corridor_half_width = 1.0;
  double inside_force = 0.5;
  double outside_force = 0.25;
};

constexpr std::array<Field<CorridorParams>, 3> kCorridorFields{{
    {"corridor_half_width", &CorridorParams::corridor_half_width},
    {"inside_force", &CorridorParams::inside_force},
    {"outside_force", &CorridorParams::outside_force},
}};

template <typename P, std::size_t N>
void export_fields(const P& params, const std::array<Field<P>, N>& fields, EnvParams& out) {
  for (const auto& f : fields) out[std::string(f.key)] = params.*(f.member);
}

// Consumes every key it recognises from `remaining`.
template <typename P, std::size_t N>
P import_fields(const std::array<Field<P>, N>& fields, EnvParams& remaining) {
  P params;
  for (const auto& f : fields) {
    auto it = remaining.find(f.key);
    if (it == remaining.end()) continue;
    if (!std::isfinite(it->second)) {
      throw std::invalid_argument("environment parameter '" + std::string(f.key) + "' is not finite");
    }
    params.*(f.member) = it->second;
    remaining.erase(it);
  }
  return params;
}

double corridor_default_half_width(EnvKind kind) {
  return kind == EnvKind::kNarrowCorridor ? 0.5 : 1.5;
}

}  // namespace

std::string_view env_name(EnvKind kind) {
  for (const auto& e : kEnvNames) {
    if (e.kind == kind) return e.name;
  }
  return "unknown";
}

std::optional<EnvKind> parse_env(std::string_view name) {
  for (const auto& e : kEnvNames) {
    if (e.name == name) return e.kind;
  }
  return std::nullopt;
}

bool is_stochastic(EnvKind kind) {
  return kind == EnvKind::kRandomTeleporter || kind == EnvKind::kWideCorridor ||
         kind == EnvKind::kNarrowCorridor;
}

EnvParams default_env_params(EnvKind kind) {
  EnvParams out;
  switch (kind) {
    case EnvKind::kMountainCar:
      export_fields(MountainCar::Params{}, kMountainCarFields, out);
      break;
    case EnvKind::kPendulum:
      export_fields(Pendulum::Params{}, kPendulumFields, out);
      break;
    case EnvKind::kRandomTeleporter:
      export_fields(Teleporter::Params{}, kTeleporterFields, out);
      break;
    case EnvKind::kWideCorridor:
    case EnvKind::kNarrowCorridor: {
      export_fields(Teleporter::Params{}, kTeleporterFields, out);
      CorridorParams corridor;
      corridor.corridor_half_width = corridor_default_half_width(kind);
      export_fields(corridor, kCorridorFields, out);
      break;
    }
  }
  return out;
}

std::unique_ptr<Environment> make_environment(EnvKind kind, const EnvParams& overrides) {
  EnvParams remaining = default_env_params(kind);
  for (const auto& [key, value] : overrides) {
    if (!remaining.contains(key)) {
      throw std::invalid_argument("unknown parameter '" + key + "' for environment " +
                                  std::string(env_name(kind)));
    }
    remaining[key] = value;
  }

  std::unique_ptr<Environment> env;
  switch (kind) {
    case EnvKind::kMountainCar:
      env = std::make_unique<MountainCar>(import_fields(kMountainCarFields, remaining));
      break;
    case EnvKind::kPendulum:
      env = std::make_unique<Pendulum>(import_fields(kPendulumFields, remaining));
      break;
    case EnvKind::kRandomTeleporter:
      env = std::make_unique<Teleporter>("random_teleporter",
                                         import_fields(kTeleporterFields, remaining), std::nullopt);
      break;
    case EnvKind::kWideCorridor:
    case EnvKind::kNarrowCorridor: {
      const auto base = import_fields(kTeleporterFields, remaining);
      const auto corridor = import_fields(kCorridorFields, remaining);
      if (!(corridor.corridor_half_width > 0.0)) {
        throw std::invalid_argument("corridor_half_width must be > 0");
      }
      const double dx = base.goal_x - base.start_x;
      const double dy = base.goal_y - base.start_y;
      const double len = std::hypot(dx, dy);
      if (!(len > 0.0)) throw std::invalid_argument("corridor needs distinct start and goal");
      ForceField field;
      field.corridor_axis = {dx / len, dy / len};
      field.corridor_center = {base.start_x, base.start_y};
      field.corridor_half_width = corridor.corridor_half_width;
      field.inside_force = {corridor.inside_force * dx / len, corridor.inside_force * dy / len};
      field.outside_force = {-corridor.outside_force * dx / len, -corridor.outside_force * dy / len};
      env = std::make_unique<Teleporter>(std::string(env_name(kind)), base, std::move(field));
      break;
    }
  }
  return env;
}

double angle_normalize(double theta) {
  constexpr double pi = std::numbers::pi;
  double x = std::fmod(theta + pi, 2.0 * pi);
  if (x < 0.0) x += 2.0 * pi;
  return x - pi;
}

// ---------------------------------------------------------------------------
// Mountain car

MountainCar::MountainCar(Params params) : params_(params), box_({-1.0}, {1.0}) {
  if (!(params_.min_position < params_.goal_position && params_.goal_position <= params_.max_position)) {
    throw std::invalid_argument("mountain car: need min_position < goal_position <= max_position");
  }
  if (!(params_.start_low <= params_.start_high)) {
    throw std::invalid_argument("mountain car: start_low > start_high");
  }
}

StateVec MountainCar::initial_state(Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return {params_.start_low + unit(rng) * (params_.start_high - params_.start_low), 0.0};
}

double MountainCar::energy(const StateVec& state) const {
  return 0.5 * state[1] * state[1] + params_.gravity * std::sin(3.0 * state[0]) / 3.0;
}

double MountainCar::leaf_value(const StateVec& state) const {
  const double lowest = -params_.gravity / 3.0;
  const double goal = params_.gravity * std::sin(3.0 * params_.goal_position) / 3.0;
  const double progress = std::clamp((energy(state) - lowest) / (goal - lowest), 0.0, 1.0);
  return params_.leaf_weight * progress;
}

TransitionOutcome MountainCar::do_step(const StateVec& state, std::span<const double> action,
                                       Rng& /*rng*/) const {
  const double force = action[0];
  double position = state[0];
  double velocity = state[1];
  velocity += force * params_.power - params_.gravity * std::cos(3.0 * position);
  velocity = std::clamp(velocity, -params_.max_speed, params_.max_speed);
  position += velocity;
  position = std::clamp(position, params_.min_position, params_.max_position);
  if (position == params_.min_position && velocity < 0.0) velocity = 0.0;

  TransitionOutcome out;
  out.terminal = position >= params_.goal_position;
  out.reward = -force * force * params_.ctrl_cost + (out.terminal ? params_.goal_bonus : 0.0);
  out.next_state = {position, velocity};
  return out;
}

// ---------------------------------------------------------------------------
// Pendulum

Pendulum::Pendulum(Params params) : params_(params), box_({-params.max_torque}, {params.max_torque}) {
  if (!(params_.dt > 0.0 && params_.mass > 0.0 && params_.length > 0.0)) {
    throw std::invalid_argument("pendulum: dt, mass and length must be > 0");
  }
  if (!(params_.hold_steps >= 1.0)) throw std::invalid_argument("pendulum: hold_steps must be >= 1");
}

StateVec Pendulum::initial_state(Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double theta = std::numbers::pi * (2.0 * unit(rng) - 1.0);
  const double omega = 2.0 * unit(rng) - 1.0;
  return {theta, omega, 0.0};
}

double Pendulum::angular_acceleration(double theta, double torque) const {
  const double l = params_.length;
  return 3.0 * params_.g / (2.0 * l) * std::sin(theta) + 3.0 / (params_.mass * l * l) * torque;
}

double Pendulum::leaf_value(const StateVec& state) const {
  if (params_.leaf_weight == 0.0) return 0.0;
  const double th = angle_normalize(state[0]);
  return -params_.leaf_weight * (th * th + 0.1 * state[1] * state[1]);
}

TransitionOutcome Pendulum::do_step(const StateVec& state, std::span<const double> action,
                                    Rng& /*rng*/) const {
  const double u = action[0];
  const double theta = state[0];
  const double omega = state[1];
  const double th = angle_normalize(theta);

  double new_omega = omega + angular_acceleration(theta, u) * params_.dt;
  new_omega = std::clamp(new_omega, -params_.max_speed, params_.max_speed);
  const double new_theta = theta + new_omega * params_.dt;

  const bool upright = std::abs(angle_normalize(new_theta)) < params_.theta_tol &&
                       std::abs(new_omega) < params_.omega_tol;
  const double hold = upright ? state[2] + 1.0 : 0.0;

  TransitionOutcome out;
  out.reward = -(th * th + 0.1 * omega * omega + 0.001 * u * u);
  out.next_state = {new_theta, new_omega, hold};
  out.terminal = hold >= params_.hold_steps;
  return out;
}

// ---------------------------------------------------------------------------
// Teleporter and corridors

double ForceField::distance_to_centerline(std::span<const double> position) const {
  const double rx = position[0] - corridor_center[0];
  const double ry = position[1] - corridor_center[1];
  // |r x axis| for a unit axis.
  return std::abs(rx * corridor_axis[1] - ry * corridor_axis[0]);
}

const std::vector<double>& ForceField::force_at(std::span<const double> position) const {
  return distance_to_centerline(position) <= corridor_half_width ? inside_force : outside_force;
}

Teleporter::Teleporter(std::string name, Params params, std::optional<ForceField> field)
    : name_(std::move(name)),
      params_(params),
      field_(std::move(field)),
      box_({-params.max_step, -params.max_step}, {params.max_step, params.max_step}) {
  if (!(params_.arena_low < params_.arena_high)) throw std::invalid_argument("teleporter: empty arena");
  if (!(params_.goal_radius > 0.0 && params_.max_step > 0.0)) {
    throw std::invalid_argument("teleporter: goal_radius and max_step must be > 0");
  }
  if (!(params_.sigma_m >= 0.0 && params_.sigma_d_deg >= 0.0)) {
    throw std::invalid_argument("teleporter: noise scales must be >= 0");
  }
}

StateVec Teleporter::initial_state(Rng& /*rng*/) const { return {params_.start_x, params_.start_y}; }

double Teleporter::distance_to_goal(std::span<const double> position) const {
  return std::hypot(position[0] - params_.goal_x, position[1] - params_.goal_y);
}

double Teleporter::leaf_value(const StateVec& state) const {
  const double remaining = std::max(0.0, distance_to_goal(state) - params_.goal_radius);
  return -params_.leaf_weight * remaining / params_.max_step;
}

TransitionOutcome Teleporter::do_step(const StateVec& state, std::span<const double> action,
                                      Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double eps_m = params_.sigma_m * (2.0 * unit(rng) - 1.0);
  const double eps_d = params_.sigma_d_deg * std::numbers::pi / 180.0 * (2.0 * unit(rng) - 1.0);

  double dx = action[0];
  double dy = action[1];
  const double norm = std::hypot(dx, dy);
  if (norm > params_.max_step) {
    dx *= params_.max_step / norm;
    dy *= params_.max_step / norm;
  }
  const double scale = 1.0 + eps_m;
  const double c = std::cos(eps_d);
  const double s = std::sin(eps_d);
  double mx = scale * (c * dx - s * dy);
  double my = scale * (s * dx + c * dy);
  if (field_) {
    const auto& f = field_->force_at(state);
    mx += f[0];
    my += f[1];
  }

  TransitionOutcome out;
  out.next_state = {std::clamp(state[0] + mx, params_.arena_low, params_.arena_high),
                    std::clamp(state[1] + my, params_.arena_low, params_.arena_high)};
  out.reward = -1.0;
  out.terminal = distance_to_goal(out.next_state) <= params_.goal_radius;
  return out;
}

}  // namespace rpmcts
