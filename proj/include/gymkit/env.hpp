#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gymkit/env_spec.hpp"
#include "gymkit/error.hpp"
#include "gymkit/json.hpp"
#include "gymkit/render.hpp"
#include "gymkit/seeding.hpp"
#include "gymkit/space.hpp"
#include "gymkit/value.hpp"

namespace gymkit {

struct Metadata {
  std::vector<RenderMode> render_modes;
  int render_fps = 0;
  std::map<std::string, std::string> extra;

  bool supports(RenderMode mode) const {
    return std::find(render_modes.begin(), render_modes.end(), mode) != render_modes.end();
  }
};

struct ResetResult {
  Value observation;
  Info info = Info::object();
};

struct StepResult {
  Value observation;
  double reward = 0.0;
  bool terminated = false;
  bool truncated = false;
  Info info = Info::object();

  bool done() const { return terminated || truncated; }
};

/// The environment contract: reset and step plus render, close, spaces,
/// metadata and the spec it was made from.
///
/// An instance is single-owner; callers serialize all calls on it. Instances
/// may move between threads.
class Env {
 public:
  virtual ~Env() = default;

  Env() = default;
  Env(const Env&) = delete;
  Env& operator=(const Env&) = delete;

  /// Starts an episode. With a seed, the environment rng is replaced by
  /// rng_from_seed(seed) before the initial state is drawn; without one, the
  /// existing stream continues.
  ResetResult reset(std::optional<std::uint64_t> seed = std::nullopt, const Options& options = Options::object()) {
    return do_reset(seed, options.is_null() ? Options::object() : options);
  }
  StepResult step(const Value& action) { return do_step(action); }
  RenderOutput render() { return do_render(); }
  /// Idempotent.
  void close() { do_close(); }

  virtual const Space& observation_space() const = 0;
  virtual const Space& action_space() const = 0;
  virtual const Metadata& metadata() const = 0;
  virtual std::optional<RenderMode> render_mode() const = 0;
  virtual bool closed() const = 0;

  virtual const std::optional<EnvSpec>& spec() const { return spec_; }
  void set_spec(EnvSpec spec) { spec_ = std::move(spec); }

  /// The innermost, unwrapped environment.
  virtual Env& unwrapped() { return *this; }

 protected:
  virtual ResetResult do_reset(std::optional<std::uint64_t> seed, const Options& options) = 0;
  virtual StepResult do_step(const Value& action) = 0;
  virtual RenderOutput do_render() = 0;
  virtual void do_close() = 0;

  std::optional<EnvSpec> spec_;
};

/// Base for concrete environments. Handles closing, seeding, action
/// validation and render-mode dispatch; subclasses provide the dynamics.
///
/// Raw environments never report truncated=true and do not police stepping
/// past the end of an episode; those are wrapper concerns.
class EnvBase : public Env {
 public:
  EnvBase(Space observation_space, Space action_space, Metadata metadata, std::optional<RenderMode> render_mode)
      : observation_space_(std::move(observation_space)),
        action_space_(std::move(action_space)),
        metadata_(std::move(metadata)),
        render_mode_(render_mode) {
    if (render_mode_ && !metadata_.supports(*render_mode_))
      throw Error(ErrorKind::InvalidKwargs, "render_mode '" + std::string(render_mode_name(*render_mode_)) +
                                                "' is not supported by this environment");
  }

  const Space& observation_space() const override { return observation_space_; }
  const Space& action_space() const override { return action_space_; }
  const Metadata& metadata() const override { return metadata_; }
  std::optional<RenderMode> render_mode() const override { return render_mode_; }
  bool closed() const override { return closed_; }

  /// Replaces the sink used by "human" mode.
  void set_frame_sink(std::shared_ptr<FrameSink> sink) { presenter_.emplace(std::move(sink), metadata_.render_fps); }

  Rng& rng() { return rng_; }

 protected:
  /// Draw the initial state from rng() and return the first observation.
  virtual ResetResult reset_episode(const Options& options) = 0;
  /// Advance one transition. The action is already known to be in action_space().
  virtual StepResult advance(const Value& action) = 0;

  virtual Frame render_frame() { throw Error(ErrorKind::InvalidArgument, "rgb_array rendering is not implemented"); }
  virtual std::string render_text() { throw Error(ErrorKind::InvalidArgument, "ansi rendering is not implemented"); }
  virtual void on_close() {}

  ResetResult do_reset(std::optional<std::uint64_t> seed, const Options& options) override {
    if (closed_) throw Error(ErrorKind::EnvClosed, "reset on a closed environment");
    if (seed) {
      rng_ = rng_from_seed(*seed);
    } else if (!seeded_) {
      rng_ = rng_from_seed(wall_clock_seed());
    }
    seeded_ = true;
    auto result = reset_episode(options);
    has_reset_ = true;
    return result;
  }

  StepResult do_step(const Value& action) override {
    if (closed_) throw Error(ErrorKind::EnvClosed, "step on a closed environment");
    if (!has_reset_) throw Error(ErrorKind::ResetNeeded, "step called before reset");
    if (!contains(action_space_, action)) throw Error(ErrorKind::InvalidAction, "action is not in " + to_string(action_space_));
    return advance(action);
  }

  RenderOutput do_render() override {
    if (!render_mode_) throw Error(ErrorKind::RenderModeUnset, "render_mode was not set at construction");
    switch (*render_mode_) {
      case RenderMode::rgb_array: return render_frame();
      case RenderMode::ansi: return render_text();
      case RenderMode::human: {
        const bool text = metadata_.supports(RenderMode::ansi);
        if (!presenter_) set_frame_sink(default_sink(text));
        if (text) {
          presenter_->present(render_text());
        } else {
          presenter_->present(render_frame());
        }
        return std::monostate{};
      }
    }
    return std::monostate{};
  }

  void do_close() override {
    if (closed_) return;
    on_close();
    closed_ = true;
  }

 private:
  static std::shared_ptr<FrameSink> default_sink(bool text) {
    if (text) return std::make_shared<TerminalSink>();
    return std::make_shared<FrameFileSink>(std::filesystem::temp_directory_path() / "gymkit_frames");
  }

  Space observation_space_;
  Space action_space_;
  Metadata metadata_;
  std::optional<RenderMode> render_mode_;
  Rng rng_{0};
  bool seeded_ = false;
  bool has_reset_ = false;
  bool closed_ = false;
  std::optional<PacedPresenter> presenter_;
};

}  // namespace gymkit
