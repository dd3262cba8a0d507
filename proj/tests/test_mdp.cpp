#include <array>
#include <cmath>

#include "doctest.h"
#include "rpmcts/environments.hpp"
#include "rpmcts/mdp.hpp"

using namespace rpmcts;

TEST_CASE("discounted return") {
  const std::array<double, 3> ones{1, 1, 1};
  CHECK(discounted_return(ones, 0.0) == 1.0);
  CHECK(discounted_return(ones, 1.0) == 3.0);
  const std::array<double, 2> r{2, 4};
  CHECK(discounted_return(r, 0.5) == 4.0);
  CHECK(discounted_return(std::span<const double>{}, 0.9) == 0.0);
}

TEST_CASE("action box validation and membership") {
  CHECK_THROWS_AS(ActionBox({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(ActionBox({0.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ActionBox({0.0, 1.0}, {1.0}), std::invalid_argument);
  const ActionBox box({-1.0, 0.0}, {1.0, 2.0});
  CHECK(box.dim() == 2);
  CHECK(box.contains(std::vector<double>{0.0, 2.0}));
  CHECK_FALSE(box.contains(std::vector<double>{0.0, 2.1}));
  CHECK_FALSE(box.contains(std::vector<double>{0.0}));
  CHECK_FALSE(box.contains(std::vector<double>{NAN, 1.0}));
  CHECK(box.clamp(std::vector<double>{-3.0, 5.0}) == Action{-1.0, 2.0});
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) CHECK(box.contains(box.sample_uniform(rng)));
}

TEST_CASE("mdp config validation") {
  MdpConfig c;
  CHECK_NOTHROW(c.validate());
  c.gamma = 1.5;
  CHECK_THROWS(c.validate());
  c = MdpConfig{};
  c.rollout_depth = 0;
  CHECK_THROWS(c.validate());
}

TEST_CASE("step rejects out-of-box actions and malformed states") {
  auto env = make_environment(EnvKind::kMountainCar);
  Rng rng(1);
  const StateVec s{-0.5, 0.0};
  CHECK_THROWS_AS(env->step(s, std::vector<double>{1.5}, rng), ContractViolation);
  CHECK_THROWS_AS(env->step(s, std::vector<double>{0.1, 0.2}, rng), ContractViolation);
  CHECK_THROWS_AS(env->step(StateVec{0.0}, std::vector<double>{0.1}, rng), ContractViolation);
}

TEST_CASE("same state, action and stream give the same outcome") {
  for (EnvKind kind : kAllEnvs) {
    auto env = make_environment(kind);
    Rng init(3);
    const StateVec s = env->initial_state(init);
    const Action a(env->action_box().dim(), 0.3);
    Rng r1(99), r2(99);
    const auto o1 = env->step(s, a, r1);
    const auto o2 = env->step(s, a, r2);
    CHECK(o1.next_state == o2.next_state);
    CHECK(o1.reward == o2.reward);
    CHECK(o1.terminal == o2.terminal);
    CHECK(std::isfinite(o1.reward));
  }
}

TEST_CASE("stochastic environment differs across streams") {
  auto env = make_environment(EnvKind::kRandomTeleporter);
  const StateVec s{5.0, 5.0};
  const Action a{0.5, 0.5};
  int distinct = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng r1(seed), r2(seed + 1000);
    if (env->step(s, a, r1).next_state != env->step(s, a, r2).next_state) ++distinct;
  }
  CHECK(distinct >= 19);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, std::uint64_t{0}) == derive_seed(1, std::uint64_t{0}));
  CHECK(derive_seed(1, std::uint64_t{0}) != derive_seed(1, std::uint64_t{1}));
  CHECK(derive_seed(1, std::uint64_t{0}) != derive_seed(2, std::uint64_t{0}));
  CHECK(derive_seed(5, "gpr2p") != derive_seed(5, "max"));
  CHECK(derive_seed(5, "gpr2p") == derive_seed(5, "gpr2p"));
}
