#pragma once

#include "gymkit/envs/cartpole.hpp"
#include "gymkit/envs/frozen_lake.hpp"
#include "gymkit/envs/pendulum.hpp"
#include "gymkit/registry.hpp"

namespace gymkit::envs {

inline constexpr const char* kCartPoleEntryPoint = "gymkit.classic_control:CartPoleEnv";
inline constexpr const char* kPendulumEntryPoint = "gymkit.classic_control:PendulumEnv";
inline constexpr const char* kFrozenLakeEntryPoint = "gymkit.toy_text:FrozenLakeEnv";

/// Registration table for the built-in environments.
///
///   CartPole-v0        200 steps
///   CartPole-v1        500 steps
///   Pendulum-v1        200 steps
///   FrozenLake-v1      4x4 map, slippery, 100 steps
///   FrozenLake8x8-v1   8x8 map, slippery, 200 steps
inline void register_builtins(Registry& registry) {
  registry.add_entry_point(kCartPoleEntryPoint, make_cartpole);
  registry.add_entry_point(kPendulumEntryPoint, make_pendulum);
  registry.add_entry_point(kFrozenLakeEntryPoint, make_frozen_lake);

  auto spec = [](const char* id, const char* entry_point, std::int64_t max_steps, Kwargs kwargs = Kwargs::object()) {
    EnvSpec s;
    s.id = parse_env_id(id);
    s.entry_point = entry_point;
    s.max_episode_steps = max_steps;
    s.kwargs = std::move(kwargs);
    return s;
  };
  registry.register_env(spec("CartPole-v0", kCartPoleEntryPoint, 200));
  registry.register_env(spec("CartPole-v1", kCartPoleEntryPoint, 500));
  registry.register_env(spec("Pendulum-v1", kPendulumEntryPoint, 200, {{"g", 10.0}}));
  registry.register_env(spec("FrozenLake-v1", kFrozenLakeEntryPoint, 100, {{"map_name", "4x4"}, {"is_slippery", true}}));
  registry.register_env(spec("FrozenLake8x8-v1", kFrozenLakeEntryPoint, 200, {{"map_name", "8x8"}, {"is_slippery", true}}));
}

}  // namespace gymkit::envs
