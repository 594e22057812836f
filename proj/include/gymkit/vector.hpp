#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <system_error>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "gymkit/batch.hpp"
#include "gymkit/env.hpp"
#include "gymkit/error.hpp"
#include "gymkit/registry.hpp"
#include "gymkit/seeding.hpp"

namespace gymkit {

enum class Backend { sequential, parallel };

inline std::string_view backend_name(Backend backend) {
  return backend == Backend::sequential ? "sequential" : "parallel";
}

struct VectorResetResult {
  Value observations;
  std::vector<Info> infos;
};

struct VectorStepResult {
  Value observations;
  std::vector<double> rewards;
  std::vector<bool> terminateds;
  std::vector<bool> truncateds;
  std::vector<Info> infos;

  friend bool operator==(const VectorStepResult&, const VectorStepResult&) = default;
};

/// N copies of one environment behind a batched interface.
///
/// Autoreset is next-step: when sub-env i reports terminated or truncated, the
/// following step ignores its action, resets it, and reports the reset
/// observation with reward 0 and both flags false. The step that ends an
/// episode therefore always carries the true final observation.
class VectorEnv {
 public:
  virtual ~VectorEnv() = default;

  VectorEnv() = default;
  VectorEnv(const VectorEnv&) = delete;
  VectorEnv& operator=(const VectorEnv&) = delete;

  /// With a seed, sub-env i is reset with derive_child_seeds(seed, N)[i].
  VectorResetResult reset(std::optional<std::uint64_t> seed = std::nullopt, const Options& options = Options::object()) {
    return do_reset(seed, options.is_null() ? Options::object() : options);
  }
  VectorStepResult step(const Value& actions) { return do_step(actions); }
  std::vector<RenderOutput> render() { return do_render(); }
  /// Idempotent.
  void close() { do_close(); }

  virtual std::size_t num_envs() const = 0;
  virtual const Space& single_observation_space() const = 0;
  virtual const Space& single_action_space() const = 0;
  virtual const Space& observation_space() const = 0;
  virtual const Space& action_space() const = 0;
  virtual bool closed() const = 0;
  virtual const std::optional<EnvSpec>& spec() const = 0;

 protected:
  virtual VectorResetResult do_reset(std::optional<std::uint64_t> seed, const Options& options) = 0;
  virtual VectorStepResult do_step(const Value& actions) = 0;
  virtual std::vector<RenderOutput> do_render() = 0;
  virtual void do_close() = 0;
};

namespace detail {

/// One sub-environment plus its pending-autoreset flag.
class AutoresetSlot {
 public:
  explicit AutoresetSlot(std::unique_ptr<Env> env) : env_(std::move(env)) {}

  ResetResult reset(std::optional<std::uint64_t> seed, const Options& options) {
    auto result = env_->reset(seed, options);
    needs_reset_ = false;
    return result;
  }

  StepResult step(const Value& action) {
    if (needs_reset_) {
      auto reset_result = reset(std::nullopt, Options::object());
      return {std::move(reset_result.observation), 0.0, false, false, std::move(reset_result.info)};
    }
    auto result = env_->step(action);
    needs_reset_ = result.done();
    return result;
  }

  RenderOutput render() { return env_->render(); }
  void close() { env_->close(); }
  Env& env() { return *env_; }

 private:
  std::unique_ptr<Env> env_;
  bool needs_reset_ = false;
};

}  // namespace detail

/// Shared bookkeeping for the concrete backends: spaces, seed derivation,
/// action splitting and result assembly.
class VectorEnvBase : public VectorEnv {
 public:
  std::size_t num_envs() const override { return num_envs_; }
  const Space& single_observation_space() const override { return single_observation_space_; }
  const Space& single_action_space() const override { return single_action_space_; }
  const Space& observation_space() const override { return observation_space_; }
  const Space& action_space() const override { return action_space_; }
  const std::optional<EnvSpec>& spec() const override { return spec_; }

 protected:
  explicit VectorEnvBase(const std::vector<std::unique_ptr<Env>>& envs)
      : num_envs_(envs.size()),
        single_observation_space_(first(envs).observation_space()),
        single_action_space_(first(envs).action_space()),
        observation_space_(batch_space(single_observation_space_, num_envs_)),
        action_space_(batch_space(single_action_space_, num_envs_)),
        spec_(first(envs).spec()) {
    for (const auto& env : envs) {
      if (!env) throw Error(ErrorKind::InvalidArgument, "vector environment given a null sub-environment");
      if (env->observation_space() != single_observation_space_ || env->action_space() != single_action_space_)
        throw Error(ErrorKind::InvalidArgument, "all sub-environments must share observation and action spaces");
    }
  }

  std::vector<std::optional<std::uint64_t>> sub_seeds(std::optional<std::uint64_t> seed) const {
    std::vector<std::optional<std::uint64_t>> out(num_envs_);
    if (seed) {
      const auto children = derive_child_seeds(*seed, num_envs_);
      for (std::size_t i = 0; i < num_envs_; ++i) out[i] = children[i];
    }
    return out;
  }

  void note_reset() { has_reset_ = true; }
  void require_reset() const {
    if (!has_reset_) throw Error(ErrorKind::ResetNeeded, "call reset before step");
  }

  std::vector<Value> split_actions(const Value& actions) const {
    if (!contains(action_space_, actions)) throw Error(ErrorKind::InvalidAction, "actions are not in " + to_string(action_space_));
    return iterate(single_action_space_, actions);
  }

  VectorResetResult assemble(std::vector<ResetResult>&& results) const {
    VectorResetResult out;
    std::vector<Value> observations;
    for (auto& r : results) {
      observations.push_back(std::move(r.observation));
      out.infos.push_back(std::move(r.info));
    }
    out.observations = concatenate(single_observation_space_, observations);
    return out;
  }

  VectorStepResult assemble(std::vector<StepResult>&& results) const {
    VectorStepResult out;
    std::vector<Value> observations;
    for (auto& r : results) {
      observations.push_back(std::move(r.observation));
      out.rewards.push_back(r.reward);
      out.terminateds.push_back(r.terminated);
      out.truncateds.push_back(r.truncated);
      out.infos.push_back(std::move(r.info));
    }
    out.observations = concatenate(single_observation_space_, observations);
    return out;
  }

 private:
  static const Env& first(const std::vector<std::unique_ptr<Env>>& envs) {
    if (envs.empty()) throw Error(ErrorKind::InvalidArgument, "num_envs must be >= 1");
    if (!envs.front()) throw Error(ErrorKind::InvalidArgument, "vector environment given a null sub-environment");
    return *envs.front();
  }

  std::size_t num_envs_;
  Space single_observation_space_;
  Space single_action_space_;
  Space observation_space_;
  Space action_space_;
  std::optional<EnvSpec> spec_;
  bool has_reset_ = false;
};

/// Steps sub-environments one after another on the calling thread.
class SyncVectorEnv : public VectorEnvBase {
 public:
  explicit SyncVectorEnv(std::vector<std::unique_ptr<Env>> envs) : VectorEnvBase(envs) {
    for (auto& env : envs) slots_.emplace_back(std::move(env));
  }
  ~SyncVectorEnv() override { do_close(); }

  bool closed() const override { return closed_; }
  Env& sub_env(std::size_t i) { return slots_.at(i).env(); }

 protected:
  VectorResetResult do_reset(std::optional<std::uint64_t> seed, const Options& options) override {
    check_open();
    const auto seeds = sub_seeds(seed);
    std::vector<ResetResult> results;
    for (std::size_t i = 0; i < slots_.size(); ++i) results.push_back(slots_[i].reset(seeds[i], options));
    note_reset();
    return assemble(std::move(results));
  }

  VectorStepResult do_step(const Value& actions) override {
    check_open();
    require_reset();
    const auto split = split_actions(actions);
    std::vector<StepResult> results;
    for (std::size_t i = 0; i < slots_.size(); ++i) results.push_back(slots_[i].step(split[i]));
    return assemble(std::move(results));
  }

  std::vector<RenderOutput> do_render() override {
    check_open();
    std::vector<RenderOutput> out;
    for (auto& slot : slots_) out.push_back(slot.render());
    return out;
  }

  void do_close() override {
    if (closed_) return;
    for (auto& slot : slots_) slot.close();
    closed_ = true;
  }

 private:
  void check_open() const {
    if (closed_) throw Error(ErrorKind::EnvClosed, "vector environment is closed");
  }

  std::vector<detail::AutoresetSlot> slots_;
  bool closed_ = false;
};

// ---------------------------------------------------------------------------
// Parallel backend: one worker thread per sub-environment, command/reply
// message passing, replies gathered in sub-env index order.

struct ResetCommand {
  std::optional<std::uint64_t> seed;
  Options options = Options::object();
};
struct StepCommand {
  Value action;
};
struct RenderCommand {};
struct CloseCommand {};
using WorkerCommand = std::variant<ResetCommand, StepCommand, RenderCommand, CloseCommand>;

struct WorkerError {
  std::string message;
};
struct WorkerReply {
  std::size_t index = 0;
  std::variant<ResetResult, StepResult, RenderOutput, std::monostate, WorkerError> payload;
};

namespace detail {

// State shared between the owner and one worker thread. Outlives a detached thread.
struct WorkerChannel {
  std::mutex mutex;
  std::condition_variable cv;
  std::optional<WorkerCommand> command;
  std::optional<WorkerReply> reply;
  std::unique_ptr<AutoresetSlot> slot;
  std::size_t index = 0;
};

inline void worker_loop(const std::shared_ptr<WorkerChannel>& channel) {
  for (;;) {
    WorkerCommand command;
    {
      std::unique_lock lock(channel->mutex);
      channel->cv.wait(lock, [&] { return channel->command.has_value(); });
      command = std::move(*channel->command);
      channel->command.reset();
    }
    WorkerReply reply{channel->index, std::monostate{}};
    bool exit = false;
    try {
      std::visit(
          [&](auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ResetCommand>) {
              reply.payload = channel->slot->reset(c.seed, c.options);
            } else if constexpr (std::is_same_v<T, StepCommand>) {
              reply.payload = channel->slot->step(c.action);
            } else if constexpr (std::is_same_v<T, RenderCommand>) {
              reply.payload = channel->slot->render();
            } else {
              channel->slot->close();
              exit = true;
            }
          },
          command);
    } catch (const std::exception& e) {
      reply.payload = WorkerError{e.what()};
      exit = exit || std::holds_alternative<CloseCommand>(command);
    } catch (...) {
      reply.payload = WorkerError{"unknown exception"};
    }
    {
      std::lock_guard lock(channel->mutex);
      channel->reply = std::move(reply);
    }
    channel->cv.notify_all();
    if (exit) return;
  }
}

}  // namespace detail

class AsyncVectorEnv : public VectorEnvBase {
 public:
  static constexpr std::chrono::seconds kCloseDeadline{5};

  explicit AsyncVectorEnv(std::vector<std::unique_ptr<Env>> envs) : VectorEnvBase(envs) {
    for (std::size_t i = 0; i < envs.size(); ++i) {
      auto channel = std::make_shared<detail::WorkerChannel>();
      channel->slot = std::make_unique<detail::AutoresetSlot>(std::move(envs[i]));
      channel->index = i;
      try {
        threads_.emplace_back(detail::worker_loop, channel);
      } catch (const std::system_error& e) {
        channels_.push_back(std::move(channel));
        shutdown();
        throw Error(ErrorKind::WorkerSpawnFailure, "could not start worker " + std::to_string(i) + ": " + e.what());
      }
      channels_.push_back(std::move(channel));
    }
  }

  ~AsyncVectorEnv() override { shutdown(); }

  bool closed() const override { return closed_; }
  bool poisoned() const { return poisoned_.has_value(); }
  /// Number of worker threads still attached to this object.
  std::size_t live_workers() const {
    std::size_t n = 0;
    for (const auto& t : threads_) n += t.joinable() ? 1 : 0;
    return n;
  }

 protected:
  VectorResetResult do_reset(std::optional<std::uint64_t> seed, const Options& options) override {
    check_usable();
    const auto seeds = sub_seeds(seed);
    for (std::size_t i = 0; i < channels_.size(); ++i) send(i, ResetCommand{seeds[i], options});
    auto results = gather<ResetResult>();
    note_reset();
    return assemble(std::move(results));
  }

  VectorStepResult do_step(const Value& actions) override {
    check_usable();
    require_reset();
    auto split = split_actions(actions);
    for (std::size_t i = 0; i < channels_.size(); ++i) send(i, StepCommand{std::move(split[i])});
    return assemble(gather<StepResult>());
  }

  std::vector<RenderOutput> do_render() override {
    check_usable();
    for (std::size_t i = 0; i < channels_.size(); ++i) send(i, RenderCommand{});
    return gather<RenderOutput>();
  }

  void do_close() override { shutdown(); }

 private:
  void check_usable() const {
    if (closed_) throw Error(ErrorKind::EnvClosed, "vector environment is closed");
    if (poisoned_) throw Error(ErrorKind::WorkerFailure, *poisoned_);
  }

  void send(std::size_t i, WorkerCommand command) {
    auto& channel = *channels_[i];
    {
      std::lock_guard lock(channel.mutex);
      channel.command = std::move(command);
    }
    channel.cv.notify_all();
  }

  WorkerReply receive(std::size_t i) {
    auto& channel = *channels_[i];
    std::unique_lock lock(channel.mutex);
    channel.cv.wait(lock, [&] { return channel.reply.has_value(); });
    WorkerReply reply = std::move(*channel.reply);
    channel.reply.reset();
    return reply;
  }

  // Collects one reply per worker in index order. Any worker error poisons the
  // vector environment, but only after every outstanding reply is drained.
  template <typename T>
  std::vector<T> gather() {
    std::vector<T> out;
    out.reserve(channels_.size());
    std::optional<std::string> failure;
    for (std::size_t i = 0; i < channels_.size(); ++i) {
      auto reply = receive(i);
      if (auto* err = std::get_if<WorkerError>(&reply.payload)) {
        if (!failure) failure = "sub-environment " + std::to_string(reply.index) + " failed: " + err->message;
        continue;
      }
      out.push_back(std::move(std::get<T>(reply.payload)));
    }
    if (failure) {
      poisoned_ = failure;
      throw Error(ErrorKind::WorkerFailure, *failure);
    }
    return out;
  }

  void shutdown() {
    if (closed_) return;
    closed_ = true;
    const auto deadline = std::chrono::steady_clock::now() + kCloseDeadline;
    for (std::size_t i = 0; i < threads_.size(); ++i) {
      if (threads_[i].joinable()) send(i, CloseCommand{});
    }
    for (std::size_t i = 0; i < threads_.size(); ++i) {
      if (!threads_[i].joinable()) continue;
      auto& channel = *channels_[i];
      bool replied = false;
      {
        std::unique_lock lock(channel.mutex);
        replied = channel.cv.wait_until(lock, deadline, [&] { return channel.reply.has_value(); });
        channel.reply.reset();
      }
      if (replied) {
        threads_[i].join();
      } else {
        std::cerr << "gymkit: worker " << i << " did not exit within " << kCloseDeadline.count()
                  << "s; detaching it\n";
        threads_[i].detach();
      }
    }
  }

  std::vector<std::shared_ptr<detail::WorkerChannel>> channels_;
  std::vector<std::thread> threads_;
  std::optional<std::string> poisoned_;
  bool closed_ = false;
};

// ---------------------------------------------------------------------------
// Vector wrappers

class VectorWrapper : public VectorEnv {
 public:
  explicit VectorWrapper(std::unique_ptr<VectorEnv> inner) : inner_(std::move(inner)) {
    if (!inner_) throw Error(ErrorKind::InvalidArgument, "cannot wrap a null vector environment");
  }

  std::size_t num_envs() const override { return inner_->num_envs(); }
  const Space& single_observation_space() const override { return inner_->single_observation_space(); }
  const Space& single_action_space() const override { return inner_->single_action_space(); }
  const Space& observation_space() const override { return inner_->observation_space(); }
  const Space& action_space() const override { return inner_->action_space(); }
  bool closed() const override { return inner_->closed(); }
  const std::optional<EnvSpec>& spec() const override { return inner_->spec(); }

  VectorEnv& inner() { return *inner_; }

 protected:
  VectorResetResult do_reset(std::optional<std::uint64_t> seed, const Options& options) override {
    return inner_->reset(seed, options);
  }
  VectorStepResult do_step(const Value& actions) override { return inner_->step(actions); }
  std::vector<RenderOutput> do_render() override { return inner_->render(); }
  void do_close() override { inner_->close(); }

  std::unique_ptr<VectorEnv> inner_;
};

/// Batched counterpart of RecordEpisodeStatistics: infos[i]["episode"] is set
/// on the step where sub-env i finishes an episode. Autoreset steps start the
/// next episode's counters and contribute nothing.
class VectorRecordEpisodeStatistics : public VectorWrapper {
 public:
  explicit VectorRecordEpisodeStatistics(std::unique_ptr<VectorEnv> inner)
      : VectorWrapper(std::move(inner)),
        returns_(num_envs(), 0.0),
        lengths_(num_envs(), 0),
        starts_(num_envs(), std::chrono::steady_clock::now()),
        ended_(num_envs(), false) {}

 protected:
  VectorResetResult do_reset(std::optional<std::uint64_t> seed, const Options& options) override {
    auto result = inner_->reset(seed, options);
    std::fill(returns_.begin(), returns_.end(), 0.0);
    std::fill(lengths_.begin(), lengths_.end(), 0);
    std::fill(starts_.begin(), starts_.end(), std::chrono::steady_clock::now());
    std::fill(ended_.begin(), ended_.end(), false);
    return result;
  }

  VectorStepResult do_step(const Value& actions) override {
    auto result = inner_->step(actions);
    const auto now = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < num_envs(); ++i) {
      if (ended_[i]) {
        returns_[i] = 0.0;
        lengths_[i] = 0;
        starts_[i] = now;
        ended_[i] = false;
        continue;
      }
      returns_[i] += result.rewards[i];
      ++lengths_[i];
      if (result.terminateds[i] || result.truncateds[i]) {
        const std::chrono::duration<double> elapsed = now - starts_[i];
        result.infos[i]["episode"] = {{"r", returns_[i]}, {"l", lengths_[i]}, {"t", elapsed.count()}};
        ended_[i] = true;
      }
    }
    return result;
  }

 private:
  std::vector<double> returns_;
  std::vector<std::int64_t> lengths_;
  std::vector<std::chrono::steady_clock::time_point> starts_;
  std::vector<bool> ended_;
};

// ---------------------------------------------------------------------------

/// Builds num_envs identically specified sub-environments through the registry.
inline std::unique_ptr<VectorEnv> make_vec(const Registry& registry, const EnvSpec& spec, std::size_t num_envs,
                                           Backend backend = Backend::sequential, const MakeOverrides& overrides = {}) {
  if (num_envs < 1) throw Error(ErrorKind::InvalidArgument, "num_envs must be >= 1");
  std::vector<std::unique_ptr<Env>> envs;
  envs.reserve(num_envs);
  for (std::size_t i = 0; i < num_envs; ++i) envs.push_back(registry.make(spec, overrides));
  if (backend == Backend::parallel) return std::make_unique<AsyncVectorEnv>(std::move(envs));
  return std::make_unique<SyncVectorEnv>(std::move(envs));
}

inline std::unique_ptr<VectorEnv> make_vec(const Registry& registry, const std::string& id, std::size_t num_envs,
                                           Backend backend = Backend::sequential, const MakeOverrides& overrides = {}) {
  if (num_envs < 1) throw Error(ErrorKind::InvalidArgument, "num_envs must be >= 1");
  return make_vec(registry, registry.lookup(id), num_envs, backend, overrides);
}

}  // namespace gymkit
