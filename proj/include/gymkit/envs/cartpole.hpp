#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>

#include "gymkit/env.hpp"
#include "gymkit/envs/raster.hpp"
#include "gymkit/registry.hpp"

namespace gymkit::envs {

/// Physical constants of the cart-pole task. Registered per version.
struct CartPoleParams {
  double gravity = 9.8;
  double masscart = 1.0;
  double masspole = 0.1;
  double length = 0.5;  // half the pole length
  double force_mag = 10.0;
  double tau = 0.02;
  double theta_threshold = 12 * 2 * std::numbers::pi / 360;
  double x_threshold = 2.4;
  double reset_bound = 0.05;

  double total_mass() const { return masspole + masscart; }
  double polemass_length() const { return masspole * length; }
};

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;

  friend bool operator==(const CartPoleState&, const CartPoleState&) = default;
};

/// One explicit Euler step of the cart-pole equations. Action 1 pushes right, 0 left.
inline CartPoleState cartpole_transition(const CartPoleState& s, std::int64_t action, const CartPoleParams& p = {}) {
  if (action != 0 && action != 1) throw Error(ErrorKind::InvalidAction, "cart-pole action must be 0 or 1");
  const double force = action == 1 ? p.force_mag : -p.force_mag;
  const double costheta = std::cos(s.theta);
  const double sintheta = std::sin(s.theta);
  const double temp = (force + p.polemass_length() * s.theta_dot * s.theta_dot * sintheta) / p.total_mass();
  const double thetaacc = (p.gravity * sintheta - costheta * temp) /
                          (p.length * (4.0 / 3.0 - p.masspole * costheta * costheta / p.total_mass()));
  const double xacc = temp - p.polemass_length() * thetaacc * costheta / p.total_mass();
  return {s.x + p.tau * s.x_dot, s.x_dot + p.tau * xacc, s.theta + p.tau * s.theta_dot, s.theta_dot + p.tau * thetaacc};
}

inline bool cartpole_terminated(const CartPoleState& s, const CartPoleParams& p = {}) {
  return s.x < -p.x_threshold || s.x > p.x_threshold || s.theta < -p.theta_threshold || s.theta > p.theta_threshold;
}

/// Box(4) observation (x, x_dot, theta, theta_dot), Discrete(2) action,
/// reward 1 per step including the terminal one.
///
/// Reset options: "low"/"high" override the uniform initial-state range.
class CartPoleEnv : public EnvBase {
 public:
  static constexpr std::int64_t kScreenWidth = 600;
  static constexpr std::int64_t kScreenHeight = 400;

  explicit CartPoleEnv(std::optional<RenderMode> render_mode = std::nullopt, CartPoleParams params = {})
      : EnvBase(make_observation_space(params), Space::discrete(2),
                Metadata{{RenderMode::human, RenderMode::rgb_array}, 50, {}}, render_mode),
        params_(params) {}

  const CartPoleParams& params() const { return params_; }
  const CartPoleState& state() const { return state_; }
  void set_state(const CartPoleState& state) { state_ = state; }

 protected:
  ResetResult reset_episode(const Options& options) override {
    const double low = gymkit::detail::kwarg_or(options, "low", -params_.reset_bound);
    const double high = gymkit::detail::kwarg_or(options, "high", params_.reset_bound);
    if (!(low <= high)) throw Error(ErrorKind::InvalidArgument, "reset option low must not exceed high");
    auto& r = rng();
    state_.x = r.uniform(low, high);
    state_.x_dot = r.uniform(low, high);
    state_.theta = r.uniform(low, high);
    state_.theta_dot = r.uniform(low, high);
    return {observation(), Info::object()};
  }

  StepResult advance(const Value& action) override {
    state_ = cartpole_transition(state_, action.as_int(), params_);
    return {observation(), 1.0, cartpole_terminated(state_, params_), false, Info::object()};
  }

  Frame render_frame() override {
    using raster::Color;
    Frame frame(kScreenHeight, kScreenWidth, 255);
    const double world_width = params_.x_threshold * 2;
    const double scale = static_cast<double>(kScreenWidth) / world_width;
    const double pole_len = scale * (2 * params_.length);
    const double cart_y = static_cast<double>(kScreenHeight) - 100.0;  // y down
    const double cart_x = state_.x * scale + static_cast<double>(kScreenWidth) / 2.0;

    raster::fill_rect(frame, 0, static_cast<std::int64_t>(cart_y), kScreenWidth, static_cast<std::int64_t>(cart_y) + 1,
                      Color{0, 0, 0});
    const auto cart = raster::rotated_rect(-25, 25, -15, 15, 0.0, {cart_x, cart_y});
    raster::fill_convex(frame, cart, Color{0, 0, 0});
    const raster::Point axle{cart_x, cart_y - 30.0 / 4.0};
    const auto pole = raster::rotated_rect(-5, 5, -5, pole_len - 5, -state_.theta, axle);
    raster::fill_convex(frame, pole, Color{202, 152, 101});
    raster::fill_circle(frame, axle.first, axle.second, 5.0, Color{129, 132, 203});
    return frame;
  }

 private:
  static Space make_observation_space(const CartPoleParams& p) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> high{p.x_threshold * 2, inf, p.theta_threshold * 2, inf};
    std::vector<double> low{-high[0], -inf, -high[2], -inf};
    return Space::box(std::move(low), std::move(high));
  }

  Value observation() const { return Value::real({state_.x, state_.x_dot, state_.theta, state_.theta_dot}); }

  CartPoleParams params_;
  CartPoleState state_;
};

inline std::unique_ptr<Env> make_cartpole(const Kwargs& kwargs, std::optional<RenderMode> render_mode) {
  gymkit::detail::check_known_kwargs(kwargs, {"gravity", "masscart", "masspole", "length", "force_mag", "tau"}, "CartPole");
  CartPoleParams p;
  p.gravity = gymkit::detail::kwarg_or(kwargs, "gravity", p.gravity);
  p.masscart = gymkit::detail::kwarg_or(kwargs, "masscart", p.masscart);
  p.masspole = gymkit::detail::kwarg_or(kwargs, "masspole", p.masspole);
  p.length = gymkit::detail::kwarg_or(kwargs, "length", p.length);
  p.force_mag = gymkit::detail::kwarg_or(kwargs, "force_mag", p.force_mag);
  p.tau = gymkit::detail::kwarg_or(kwargs, "tau", p.tau);
  return std::make_unique<CartPoleEnv>(render_mode, p);
}

}  // namespace gymkit::envs
