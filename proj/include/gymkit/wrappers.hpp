#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "gymkit/env.hpp"
#include "gymkit/error.hpp"
#include "gymkit/flatten.hpp"
#include "gymkit/space.hpp"

namespace gymkit {

/// Encloses an environment and forwards every call to it. Subclasses override
/// only the surfaces they change.
class Wrapper : public Env {
 public:
  explicit Wrapper(std::unique_ptr<Env> inner) : inner_(std::move(inner)) {
    if (!inner_) throw Error(ErrorKind::InvalidArgument, "cannot wrap a null environment");
  }

  const Space& observation_space() const override { return inner_->observation_space(); }
  const Space& action_space() const override { return inner_->action_space(); }
  const Metadata& metadata() const override { return inner_->metadata(); }
  std::optional<RenderMode> render_mode() const override { return inner_->render_mode(); }
  bool closed() const override { return inner_->closed(); }
  const std::optional<EnvSpec>& spec() const override { return spec_ ? spec_ : inner_->spec(); }
  Env& unwrapped() override { return inner_->unwrapped(); }

  Env& inner() { return *inner_; }
  const Env& inner() const { return *inner_; }

 protected:
  ResetResult do_reset(std::optional<std::uint64_t> seed, const Options& options) override {
    return inner_->reset(seed, options);
  }
  StepResult do_step(const Value& action) override { return inner_->step(action); }
  RenderOutput do_render() override { return inner_->render(); }
  void do_close() override { inner_->close(); }

  std::unique_ptr<Env> inner_;
};

/// First wrapper of type W in the chain starting at env, or nullptr.
template <typename W>
W* find_wrapper(Env& env) {
  for (Env* current = &env;;) {
    if (auto* w = dynamic_cast<W*>(current)) return w;
    auto* wrapper = dynamic_cast<Wrapper*>(current);
    if (!wrapper) return nullptr;
    current = &wrapper->inner();
  }
}

/// Forces truncated=true on the max_episode_steps-th step after a reset.
class TimeLimit : public Wrapper {
 public:
  TimeLimit(std::unique_ptr<Env> inner, std::int64_t max_episode_steps)
      : Wrapper(std::move(inner)), max_episode_steps_(max_episode_steps) {
    if (max_episode_steps_ < 1) throw Error(ErrorKind::InvalidArgument, "max_episode_steps must be >= 1");
  }

  std::int64_t max_episode_steps() const { return max_episode_steps_; }
  std::int64_t elapsed_steps() const { return elapsed_; }

 protected:
  ResetResult do_reset(std::optional<std::uint64_t> seed, const Options& options) override {
    auto result = inner_->reset(seed, options);
    elapsed_ = 0;
    return result;
  }

  StepResult do_step(const Value& action) override {
    auto result = inner_->step(action);
    if (++elapsed_ >= max_episode_steps_) result.truncated = true;
    return result;
  }

 private:
  std::int64_t max_episode_steps_;
  std::int64_t elapsed_ = 0;
};

/// Rejects step before the first reset and step after an episode ended.
class OrderEnforcing : public Wrapper {
 public:
  explicit OrderEnforcing(std::unique_ptr<Env> inner, bool allow_render_before_reset = false)
      : Wrapper(std::move(inner)), allow_render_before_reset_(allow_render_before_reset) {}

  bool has_reset() const { return has_reset_; }

 protected:
  ResetResult do_reset(std::optional<std::uint64_t> seed, const Options& options) override {
    auto result = inner_->reset(seed, options);
    has_reset_ = true;
    episode_over_ = false;
    return result;
  }

  StepResult do_step(const Value& action) override {
    if (!has_reset_) throw Error(ErrorKind::ResetNeeded, "call reset before step");
    if (episode_over_) throw Error(ErrorKind::ResetNeeded, "the episode has ended; call reset before stepping again");
    auto result = inner_->step(action);
    episode_over_ = result.done();
    return result;
  }

  RenderOutput do_render() override {
    if (!has_reset_ && !allow_render_before_reset_) throw Error(ErrorKind::ResetNeeded, "call reset before render");
    return inner_->render();
  }

 private:
  bool allow_render_before_reset_;
  bool has_reset_ = false;
  bool episode_over_ = false;
};

using ObservationFn = std::function<Value(const Value&)>;
using ActionFn = std::function<Value(const Value&)>;
using RewardFn = std::function<double(double)>;

/// Passes every observation through fn and reports new_space. Outputs are
/// checked against new_space on every call.
class TransformObservation : public Wrapper {
 public:
  static constexpr int kSpotCheckSamples = 100;

  TransformObservation(std::unique_ptr<Env> inner, ObservationFn fn, Space new_space)
      : Wrapper(std::move(inner)), fn_(std::move(fn)), space_(std::move(new_space)) {
    Rng rng(0);
    for (int i = 0; i < kSpotCheckSamples; ++i) (void)apply(sample(inner_->observation_space(), rng));
  }

  const Space& observation_space() const override { return space_; }

 protected:
  ResetResult do_reset(std::optional<std::uint64_t> seed, const Options& options) override {
    auto result = inner_->reset(seed, options);
    result.observation = apply(result.observation);
    return result;
  }

  StepResult do_step(const Value& action) override {
    auto result = inner_->step(action);
    result.observation = apply(result.observation);
    return result;
  }

 private:
  Value apply(const Value& observation) const {
    auto out = fn_(observation);
    if (!contains(space_, out))
      throw Error(ErrorKind::TransformedValueNotInSpace, "transformed observation is not in " + to_string(space_));
    return out;
  }

  ObservationFn fn_;
  Space space_;
};

/// Callers act in outer_space; the inner environment receives fn(action).
class TransformAction : public Wrapper {
 public:
  TransformAction(std::unique_ptr<Env> inner, ActionFn fn, Space outer_space)
      : Wrapper(std::move(inner)), fn_(std::move(fn)), space_(std::move(outer_space)) {}

  const Space& action_space() const override { return space_; }

 protected:
  StepResult do_step(const Value& action) override {
    if (!contains(space_, action)) throw Error(ErrorKind::InvalidAction, "action is not in " + to_string(space_));
    return inner_->step(fn_(action));
  }

 private:
  ActionFn fn_;
  Space space_;
};

class TransformReward : public Wrapper {
 public:
  TransformReward(std::unique_ptr<Env> inner, RewardFn fn) : Wrapper(std::move(inner)), fn_(std::move(fn)) {}

 protected:
  StepResult do_step(const Value& action) override {
    auto result = inner_->step(action);
    result.reward = fn_(result.reward);
    return result;
  }

 private:
  RewardFn fn_;
};

/// Adds info["episode"] = {"r": return, "l": length, "t": seconds} on the step
/// that ends each episode.
class RecordEpisodeStatistics : public Wrapper {
 public:
  using Wrapper::Wrapper;

  double episode_return() const { return return_; }
  std::int64_t episode_length() const { return length_; }

 protected:
  ResetResult do_reset(std::optional<std::uint64_t> seed, const Options& options) override {
    auto result = inner_->reset(seed, options);
    return_ = 0.0;
    length_ = 0;
    emitted_ = false;
    start_ = std::chrono::steady_clock::now();
    return result;
  }

  StepResult do_step(const Value& action) override {
    auto result = inner_->step(action);
    if (emitted_) return result;
    return_ += result.reward;
    ++length_;
    if (result.done()) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
      result.info["episode"] = {{"r", return_}, {"l", length_}, {"t", elapsed.count()}};
      emitted_ = true;
    }
    return result;
  }

 private:
  double return_ = 0.0;
  std::int64_t length_ = 0;
  bool emitted_ = false;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------------------
// Factories

inline std::unique_ptr<Env> time_limit(std::unique_ptr<Env> env, std::int64_t max_episode_steps) {
  return std::make_unique<TimeLimit>(std::move(env), max_episode_steps);
}

inline std::unique_ptr<Env> order_enforcing(std::unique_ptr<Env> env) {
  return std::make_unique<OrderEnforcing>(std::move(env));
}

inline std::unique_ptr<Env> transform_observation(std::unique_ptr<Env> env, ObservationFn fn, Space new_space) {
  return std::make_unique<TransformObservation>(std::move(env), std::move(fn), std::move(new_space));
}

/// Observations become flat real vectors of length flatdim(observation_space).
inline std::unique_ptr<Env> flatten_observation(std::unique_ptr<Env> env) {
  Space inner_space = env->observation_space();
  Space flat_space = flatten_space(inner_space);
  auto fn = [inner_space](const Value& v) -> Value { return Value::real(flatten(inner_space, v)); };
  return transform_observation(std::move(env), fn, std::move(flat_space));
}

inline std::unique_ptr<Env> transform_action(std::unique_ptr<Env> env, ActionFn fn, Space outer_space) {
  return std::make_unique<TransformAction>(std::move(env), std::move(fn), std::move(outer_space));
}

namespace detail {

inline const BoxSpace& real_box_action(const Env& env, const char* wrapper) {
  const auto* box = env.action_space().get_if<BoxSpace>();
  if (!box || box->dtype != DType::real64)
    throw Error(ErrorKind::InvalidArgument, std::string(wrapper) + " requires a real-valued Box action space");
  return *box;
}

}  // namespace detail

/// Accepts any real action of the right shape and clips it into the inner bounds.
inline std::unique_ptr<Env> clip_action(std::unique_ptr<Env> env) {
  const BoxSpace inner = detail::real_box_action(*env, "clip_action");
  Space outer = Space::box(-HUGE_VAL, HUGE_VAL, inner.shape);
  auto fn = [inner](const Value& v) -> Value {
    RealArray a = v.as_real();
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] = std::clamp(a.data[i], inner.low[i], inner.high[i]);
    return a;
  };
  return transform_action(std::move(env), fn, std::move(outer));
}

/// Affinely maps actions in [min_action, max_action] onto the inner bounds.
inline std::unique_ptr<Env> rescale_action(std::unique_ptr<Env> env, double min_action, double max_action) {
  const BoxSpace inner = detail::real_box_action(*env, "rescale_action");
  if (!(min_action < max_action)) throw Error(ErrorKind::InvalidArgument, "rescale_action needs min_action < max_action");
  for (std::size_t i = 0; i < inner.low.size(); ++i)
    if (!std::isfinite(inner.low[i]) || !std::isfinite(inner.high[i]))
      throw Error(ErrorKind::InvalidArgument, "rescale_action needs finite inner bounds");
  Space outer = Space::box(min_action, max_action, inner.shape);
  auto fn = [inner, min_action, max_action](const Value& v) -> Value {
    RealArray a = v.as_real();
    for (std::size_t i = 0; i < a.data.size(); ++i) {
      const double fraction = (a.data[i] - min_action) / (max_action - min_action);
      a.data[i] = std::clamp(inner.low[i] + (inner.high[i] - inner.low[i]) * fraction, inner.low[i], inner.high[i]);
    }
    return a;
  };
  return transform_action(std::move(env), fn, std::move(outer));
}

inline std::unique_ptr<Env> transform_reward(std::unique_ptr<Env> env, RewardFn fn) {
  return std::make_unique<TransformReward>(std::move(env), std::move(fn));
}

inline std::unique_ptr<Env> clip_reward(std::unique_ptr<Env> env, double min_reward, double max_reward) {
  if (min_reward > max_reward) throw Error(ErrorKind::InvalidArgument, "clip_reward needs min <= max");
  return transform_reward(std::move(env), [=](double r) { return std::clamp(r, min_reward, max_reward); });
}

inline std::unique_ptr<Env> record_episode_statistics(std::unique_ptr<Env> env) {
  return std::make_unique<RecordEpisodeStatistics>(std::move(env));
}

}  // namespace gymkit
