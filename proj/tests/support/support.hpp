#pragma once

#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gymkit/gymkit.hpp"

namespace gymkit::fixtures {

/// Counter environment. Observation is the step count since reset, reward is
/// 1.0. Terminates at `terminate_at` if set, otherwise never.
class StubEnv : public EnvBase {
 public:
  explicit StubEnv(std::optional<std::int64_t> terminate_at = std::nullopt,
                   std::optional<RenderMode> render_mode = std::nullopt)
      : EnvBase(Space::discrete(1'000'000), Space::discrete(2),
                Metadata{{RenderMode::human, RenderMode::ansi, RenderMode::rgb_array}, 200, {}}, render_mode),
        terminate_at_(terminate_at) {}

  std::int64_t count() const { return count_; }
  const std::vector<Value>& received() const { return received_; }
  int closes() const { return closes_; }

 protected:
  ResetResult reset_episode(const Options& options) override {
    count_ = options.value("start", std::int64_t{0});
    return {count_, Info{{"draw", rng().next_below(1000)}}};
  }
  StepResult advance(const Value& action) override {
    received_.push_back(action);
    ++count_;
    const bool done = terminate_at_ && count_ >= *terminate_at_;
    return {count_, 1.0, done, false, Info{{"count", count_}}};
  }
  std::string render_text() override { return "count=" + std::to_string(count_); }
  Frame render_frame() override { return Frame(2, 3); }
  void on_close() override { ++closes_; }

 private:
  std::optional<std::int64_t> terminate_at_;
  std::int64_t count_ = 0;
  std::vector<Value> received_;
  int closes_ = 0;
};

/// Continuous-action variant of StubEnv recording what it receives.
class BoxActionStub : public EnvBase {
 public:
  BoxActionStub(std::vector<double> low, std::vector<double> high)
      : EnvBase(Space::discrete(1), Space::box(std::move(low), std::move(high)), Metadata{}, std::nullopt) {}

  const std::vector<Value>& received() const { return received_; }

 protected:
  ResetResult reset_episode(const Options&) override { return {0, Info::object()}; }
  StepResult advance(const Value& action) override {
    received_.push_back(action);
    return {0, 5.0, false, false, Info::object()};
  }

 private:
  std::vector<Value> received_;
};

/// Environment with an arbitrary observation space that emits samples from it.
class SpaceEnv : public EnvBase {
 public:
  explicit SpaceEnv(Space obs) : EnvBase(std::move(obs), Space::discrete(2), Metadata{}, std::nullopt) {}

 protected:
  ResetResult reset_episode(const Options&) override { return {sample(observation_space(), rng()), Info::object()}; }
  StepResult advance(const Value&) override {
    return {sample(observation_space(), rng()), 0.0, false, false, Info::object()};
  }
};

struct Transition {
  Value observation;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  std::string info;
  bool is_reset = false;

  friend bool operator==(const Transition&, const Transition&) = default;
};

using Trajectory = std::vector<Transition>;

/// Listing-style loop: reset(seed), `steps` actions from `actions`, reset on episode end.
inline Trajectory record(Env& env, std::uint64_t seed, std::int64_t steps, std::uint64_t action_seed) {
  Trajectory out;
  Rng actions(action_seed);
  auto first = env.reset(seed);
  out.push_back({first.observation, 0.0, false, false, first.info.dump(), true});
  for (std::int64_t t = 0; t < steps; ++t) {
    auto r = env.step(sample(env.action_space(), actions));
    out.push_back({r.observation, r.reward, r.terminated, r.truncated, r.info.dump(), false});
    if (r.done()) {
      auto again = env.reset();
      out.push_back({again.observation, 0.0, false, false, again.info.dump(), true});
    }
  }
  return out;
}

/// Reference trajectories produced by tests/oracles/reference_values.py.
inline const Json& dynamics_fixture() {
  static const Json doc = [] {
    std::ifstream in(GYMKIT_ORACLE_DIR "/dynamics_trajectories.json");
    if (!in) throw std::runtime_error("cannot open " GYMKIT_ORACLE_DIR "/dynamics_trajectories.json");
    return Json::parse(in);
  }();
  return doc;
}

struct FixtureComparison {
  double max_error = 0.0;
  bool structure_matches = true;
  std::string first_problem;
};

/// Replays the fixture's actions through `env` and compares observations,
/// rewards and flags. Resets happen where the fixture has them.
inline FixtureComparison compare_with_fixture(Env& env, const Json& rows, std::uint64_t seed) {
  FixtureComparison cmp;
  auto note = [&](const std::string& what) {
    if (cmp.structure_matches) cmp.first_problem = what;
    cmp.structure_matches = false;
  };
  auto check_obs = [&](const Value& got, const Json& want, std::size_t row) {
    const auto& data = got.as_real().data;
    if (data.size() != want.size()) return note("observation size at row " + std::to_string(row));
    for (std::size_t i = 0; i < data.size(); ++i)
      cmp.max_error = std::max(cmp.max_error, std::abs(data[i] - want[i].get<double>()));
  };
  bool first = true;
  for (std::size_t row = 0; row < rows.size(); ++row) {
    const auto& r = rows[row];
    if (!r.contains("action")) {
      check_obs(first ? env.reset(seed).observation : env.reset().observation, r["obs"], row);
      first = false;
      continue;
    }
    const Value action = r["action"].is_number_integer()
                             ? Value(r["action"].get<std::int64_t>())
                             : Value(RealArray(std::vector<double>{r["action"].get<double>()}));
    StepResult result;
    try {
      result = env.step(action);
    } catch (const Error& e) {
      note(std::string("step failed at row ") + std::to_string(row) + ": " + e.what());
      return cmp;
    }
    check_obs(result.observation, r["obs"], row);
    cmp.max_error = std::max(cmp.max_error, std::abs(result.reward - r["reward"].get<double>()));
    if (result.terminated != r["terminated"].get<bool>() || result.truncated != r["truncated"].get<bool>())
      note("flags differ at row " + std::to_string(row));
  }
  return cmp;
}

/// N standalone environments driven the way the vector contract describes:
/// child seeds on reset, and a sub-env whose episode ended is reset one call
/// later with reward 0 and both flags false, ignoring its action.
class IndependentEnvsOracle {
 public:
  IndependentEnvsOracle(const Registry& registry, const std::string& id, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) envs_.push_back(registry.make(id));
    ended_.assign(n, false);
  }

  VectorResetResult reset(std::uint64_t seed) {
    const auto seeds = derive_child_seeds(seed, envs_.size());
    VectorResetResult out;
    std::vector<Value> obs;
    for (std::size_t i = 0; i < envs_.size(); ++i) {
      auto r = envs_[i]->reset(seeds[i]);
      obs.push_back(r.observation);
      out.infos.push_back(r.info);
      ended_[i] = false;
    }
    out.observations = concatenate(envs_.front()->observation_space(), obs);
    return out;
  }

  VectorStepResult step(const std::vector<Value>& actions) {
    VectorStepResult out;
    std::vector<Value> obs;
    for (std::size_t i = 0; i < envs_.size(); ++i) {
      if (ended_[i]) {
        auto r = envs_[i]->reset();
        obs.push_back(r.observation);
        out.rewards.push_back(0.0);
        out.terminateds.push_back(false);
        out.truncateds.push_back(false);
        out.infos.push_back(r.info);
        ended_[i] = false;
        continue;
      }
      auto r = envs_[i]->step(actions[i]);
      obs.push_back(r.observation);
      out.rewards.push_back(r.reward);
      out.terminateds.push_back(r.terminated);
      out.truncateds.push_back(r.truncated);
      out.infos.push_back(r.info);
      ended_[i] = r.terminated || r.truncated;
    }
    out.observations = concatenate(envs_.front()->observation_space(), obs);
    return out;
  }

  const Space& single_action_space() const { return envs_.front()->action_space(); }

 private:
  std::vector<std::unique_ptr<Env>> envs_;
  std::vector<bool> ended_;
};

/// Pre-sampled per-sub-env action script shared by every backend under test.
inline std::vector<std::vector<Value>> action_script(const Space& single, std::size_t n, std::int64_t steps,
                                                     std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<Value>> out(static_cast<std::size_t>(steps));
  for (auto& row : out)
    for (std::size_t i = 0; i < n; ++i) row.push_back(sample(single, rng));
  return out;
}

}  // namespace gymkit::fixtures
