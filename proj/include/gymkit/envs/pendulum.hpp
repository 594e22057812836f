#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <utility>

#include "gymkit/env.hpp"
#include "gymkit/envs/raster.hpp"
#include "gymkit/registry.hpp"

namespace gymkit::envs {

struct PendulumParams {
  double gravity = 10.0;
  double mass = 1.0;
  double length = 1.0;
  double dt = 0.05;
  double max_speed = 8.0;
  double max_torque = 2.0;
};

struct PendulumState {
  double theta = 0.0;  // wrapped to (-pi, pi]
  double theta_dot = 0.0;

  friend bool operator==(const PendulumState&, const PendulumState&) = default;
};

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double angle) {
  constexpr double pi = std::numbers::pi;
  double r = std::fmod(angle + pi, 2 * pi);
  if (r < 0) r += 2 * pi;
  r -= pi;
  return r == -pi ? pi : r;
}

/// Returns the next state and the reward earned from `s` under torque u.
inline std::pair<PendulumState, double> pendulum_transition(const PendulumState& s, double torque,
                                                            const PendulumParams& p = {}) {
  if (std::isnan(torque)) throw Error(ErrorKind::InvalidAction, "pendulum torque is NaN");
  const double u = std::clamp(torque, -p.max_torque, p.max_torque);
  const double th = wrap_angle(s.theta);
  const double cost = th * th + 0.1 * s.theta_dot * s.theta_dot + 0.001 * u * u;
  double theta_dot =
      s.theta_dot + (3.0 * p.gravity / (2.0 * p.length) * std::sin(s.theta) + 3.0 / (p.mass * p.length * p.length) * u) * p.dt;
  theta_dot = std::clamp(theta_dot, -p.max_speed, p.max_speed);
  const double theta = wrap_angle(s.theta + theta_dot * p.dt);
  return {{theta, theta_dot}, -cost};
}

/// Observation (cos theta, sin theta, theta_dot), Box(1) torque in [-2, 2].
/// Never terminates; episodes end through the time limit.
///
/// Reset options: "x_init" / "y_init" bound the uniform initial angle and velocity.
class PendulumEnv : public EnvBase {
 public:
  static constexpr std::int64_t kScreenSize = 500;

  explicit PendulumEnv(std::optional<RenderMode> render_mode = std::nullopt, PendulumParams params = {})
      : EnvBase(Space::box({-1.0, -1.0, -params.max_speed}, {1.0, 1.0, params.max_speed}),
                Space::box(-params.max_torque, params.max_torque, Shape{1}),
                Metadata{{RenderMode::human, RenderMode::rgb_array}, 30, {}}, render_mode),
        params_(params) {}

  const PendulumParams& params() const { return params_; }
  const PendulumState& state() const { return state_; }
  void set_state(const PendulumState& state) { state_ = state; }

 protected:
  ResetResult reset_episode(const Options& options) override {
    const double x_init = gymkit::detail::kwarg_or(options, "x_init", std::numbers::pi);
    const double y_init = gymkit::detail::kwarg_or(options, "y_init", 1.0);
    auto& r = rng();
    state_.theta = wrap_angle(r.uniform(-x_init, x_init));
    state_.theta_dot = r.uniform(-y_init, y_init);
    last_torque_.reset();
    return {observation(), Info::object()};
  }

  StepResult advance(const Value& action) override {
    const double torque = action.as_real().data.front();
    auto [next, reward] = pendulum_transition(state_, torque, params_);
    state_ = next;
    last_torque_ = torque;
    return {observation(), reward, false, false, Info::object()};
  }

  Frame render_frame() override {
    using raster::Color;
    Frame frame(kScreenSize, kScreenSize, 255);
    const double bound = 2.2;
    const double scale = static_cast<double>(kScreenSize) / (bound * 2);
    const double center = static_cast<double>(kScreenSize) / 2.0;
    const double rod_length = params_.length * scale;
    const double rod_width = 0.2 * scale;
    const auto rod = raster::rotated_rect(0, rod_length, -rod_width / 2, rod_width / 2, state_.theta + std::numbers::pi / 2,
                                          {center, center});
    raster::fill_convex(frame, rod, Color{204, 77, 77});
    const double tip_angle = state_.theta + std::numbers::pi / 2;
    raster::fill_circle(frame, center + rod_length * std::cos(tip_angle), center - rod_length * std::sin(tip_angle),
                        rod_width / 2, Color{204, 77, 77});
    raster::fill_circle(frame, center, center, 0.05 * scale, Color{0, 0, 0});
    return frame;
  }

 private:
  Value observation() const { return Value::real({std::cos(state_.theta), std::sin(state_.theta), state_.theta_dot}); }

  PendulumParams params_;
  PendulumState state_;
  std::optional<double> last_torque_;
};

inline std::unique_ptr<Env> make_pendulum(const Kwargs& kwargs, std::optional<RenderMode> render_mode) {
  gymkit::detail::check_known_kwargs(kwargs, {"g"}, "Pendulum");
  PendulumParams p;
  p.gravity = gymkit::detail::kwarg_or(kwargs, "g", p.gravity);
  return std::make_unique<PendulumEnv>(render_mode, p);
}

}  // namespace gymkit::envs
