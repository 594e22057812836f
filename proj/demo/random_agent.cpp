// Random agent on CartPole: reset, act, reset again whenever an episode ends.

#include <iostream>

#include "gymkit/gymkit.hpp"

int main() {
  auto env = gymkit::make("CartPole-v1");
  gymkit::Rng policy(7);

  auto [observation, info] = env->reset(42);
  int episodes = 0;
  double episode_return = 0.0;
  for (int t = 0; t < 1000; ++t) {
    auto action = gymkit::sample(env->action_space(), policy);  // insert your policy here
    auto step = env->step(action);
    observation = step.observation;
    episode_return += step.reward;
    if (step.terminated || step.truncated) {
      std::cout << "episode " << ++episodes << " return " << episode_return << '\n';
      episode_return = 0.0;
      observation = env->reset().observation;
    }
  }
  env->close();
}
