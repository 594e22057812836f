#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string_view>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gymkit/env.hpp"
#include "gymkit/envs/raster.hpp"
#include "gymkit/registry.hpp"

namespace gymkit::envs {

enum FrozenLakeAction : std::int64_t { kLeft = 0, kDown = 1, kRight = 2, kUp = 3 };

/// Grid of S (start), F (frozen), H (hole), G (goal). Exactly one start.
class FrozenLakeMap {
 public:
  explicit FrozenLakeMap(std::vector<std::string> rows) : rows_(std::move(rows)) {
    if (rows_.empty() || rows_.front().empty()) throw Error(ErrorKind::InvalidKwargs, "FrozenLake map is empty");
    int starts = 0;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (rows_[r].size() != rows_.front().size()) throw Error(ErrorKind::InvalidKwargs, "FrozenLake map is not rectangular");
      for (std::size_t c = 0; c < rows_[r].size(); ++c) {
        const char cell = rows_[r][c];
        if (std::string_view("SFHG").find(cell) == std::string_view::npos)
          throw Error(ErrorKind::InvalidKwargs, std::string("FrozenLake map has invalid cell '") + cell + "'");
        if (cell == 'S') {
          ++starts;
          start_ = static_cast<std::int64_t>(r * rows_.front().size() + c);
        }
      }
    }
    if (starts != 1) throw Error(ErrorKind::InvalidKwargs, "FrozenLake map needs exactly one start cell");
  }

  static FrozenLakeMap named(const std::string& name) {
    static const std::map<std::string, std::vector<std::string>> maps{
        {"4x4", {"SFFF", "FHFH", "FFFH", "HFFG"}},
        {"8x8", {"SFFFFFFF", "FFFFFFFF", "FFFHFFFF", "FFFFFHFF", "FFFHFFFF", "FHHFFFHF", "FHFFHFHF", "FFFHFFFG"}},
    };
    const auto it = maps.find(name);
    if (it == maps.end()) throw Error(ErrorKind::InvalidKwargs, "unknown FrozenLake map '" + name + "'");
    return FrozenLakeMap(it->second);
  }

  std::int64_t rows() const { return static_cast<std::int64_t>(rows_.size()); }
  std::int64_t cols() const { return static_cast<std::int64_t>(rows_.front().size()); }
  std::int64_t cells() const { return rows() * cols(); }
  std::int64_t start() const { return start_; }
  char at(std::int64_t position) const {
    return rows_[static_cast<std::size_t>(position / cols())][static_cast<std::size_t>(position % cols())];
  }
  bool terminal(std::int64_t position) const { return at(position) == 'H' || at(position) == 'G'; }
  const std::vector<std::string>& layout() const { return rows_; }

 private:
  std::vector<std::string> rows_;
  std::int64_t start_ = 0;
};

struct FrozenLakeOutcome {
  std::int64_t position = 0;
  double reward = 0.0;
  bool terminated = false;

  friend bool operator==(const FrozenLakeOutcome&, const FrozenLakeOutcome&) = default;
};

struct FrozenLakeBranch {
  double probability = 0.0;
  FrozenLakeOutcome outcome;
};

/// Deterministic move; walls keep the agent in place.
inline std::int64_t frozenlake_move(const FrozenLakeMap& map, std::int64_t position, std::int64_t direction) {
  auto row = position / map.cols();
  auto col = position % map.cols();
  switch (direction) {
    case kLeft: col = std::max<std::int64_t>(col - 1, 0); break;
    case kDown: row = std::min(row + 1, map.rows() - 1); break;
    case kRight: col = std::min(col + 1, map.cols() - 1); break;
    case kUp: row = std::max<std::int64_t>(row - 1, 0); break;
    default: throw Error(ErrorKind::InvalidAction, "FrozenLake action must be in {0,1,2,3}");
  }
  return row * map.cols() + col;
}

namespace detail {

inline FrozenLakeOutcome frozenlake_land(const FrozenLakeMap& map, std::int64_t from, std::int64_t direction) {
  // Holes and the goal absorb: no movement, no further reward.
  if (map.terminal(from)) return {from, 0.0, true};
  const auto next = frozenlake_move(map, from, direction);
  const char cell = map.at(next);
  return {next, cell == 'G' ? 1.0 : 0.0, cell == 'G' || cell == 'H'};
}

// Slippery ice executes the intended direction or either perpendicular one.
inline std::array<std::int64_t, 3> slip_directions(std::int64_t action) {
  return {(action + 3) % 4, action, (action + 1) % 4};
}

}  // namespace detail

/// One transition. Slippery moves draw one of three directions uniformly from rng.
inline FrozenLakeOutcome frozenlake_transition(const FrozenLakeMap& map, std::int64_t position, std::int64_t action,
                                               bool slippery, Rng& rng) {
  if (action < 0 || action > 3) throw Error(ErrorKind::InvalidAction, "FrozenLake action must be in {0,1,2,3}");
  std::int64_t direction = action;
  if (slippery) direction = detail::slip_directions(action)[rng.next_below(3)];
  return detail::frozenlake_land(map, position, direction);
}

/// Outcome distribution of one transition, with equal outcomes merged.
inline std::vector<FrozenLakeBranch> frozenlake_distribution(const FrozenLakeMap& map, std::int64_t position,
                                                             std::int64_t action, bool slippery) {
  if (action < 0 || action > 3) throw Error(ErrorKind::InvalidAction, "FrozenLake action must be in {0,1,2,3}");
  std::vector<FrozenLakeBranch> out;
  auto add = [&](const FrozenLakeOutcome& o, double p) {
    for (auto& b : out)
      if (b.outcome == o) {
        b.probability += p;
        return;
      }
    out.push_back({p, o});
  };
  if (!slippery) {
    add(detail::frozenlake_land(map, position, action), 1.0);
  } else {
    for (auto d : detail::slip_directions(action)) add(detail::frozenlake_land(map, position, d), 1.0 / 3.0);
  }
  return out;
}

/// Discrete(rows*cols) observation, Discrete(4) action (left, down, right, up).
///
/// Reset option "start_state" places the agent on a given cell.
class FrozenLakeEnv : public EnvBase {
 public:
  static constexpr std::int64_t kCellPixels = 64;

  FrozenLakeEnv(FrozenLakeMap map, bool slippery, std::optional<RenderMode> render_mode = std::nullopt)
      : EnvBase(Space::discrete(map.cells()), Space::discrete(4),
                Metadata{{RenderMode::human, RenderMode::ansi, RenderMode::rgb_array}, 4, {}}, render_mode),
        map_(std::move(map)),
        slippery_(slippery) {}

  const FrozenLakeMap& map() const { return map_; }
  bool slippery() const { return slippery_; }
  std::int64_t position() const { return position_; }

 protected:
  ResetResult reset_episode(const Options& options) override {
    position_ = map_.start();
    if (const auto it = options.find("start_state"); it != options.end() && !it->is_null()) {
      if (!it->is_number_integer() || it->get<std::int64_t>() < 0 || it->get<std::int64_t>() >= map_.cells())
        throw Error(ErrorKind::InvalidArgument, "start_state must be a cell index in [0, " + std::to_string(map_.cells()) + ")");
      position_ = it->get<std::int64_t>();
    }
    return {Value(position_), Info{{"prob", 1.0}}};
  }

  StepResult advance(const Value& action) override {
    const auto a = action.as_int();
    const auto outcome = frozenlake_transition(map_, position_, a, slippery_, rng());
    position_ = outcome.position;
    return {Value(position_), outcome.reward, outcome.terminated, false, Info{{"prob", slippery_ ? 1.0 / 3.0 : 1.0}}};
  }

  std::string render_text() override {
    std::string out;
    for (std::int64_t r = 0; r < map_.rows(); ++r) {
      for (std::int64_t c = 0; c < map_.cols(); ++c) {
        const auto cell = r * map_.cols() + c;
        if (cell == position_) {
          out += '[';
          out += map_.at(cell);
          out += ']';
        } else {
          out += map_.at(cell);
        }
      }
      out += '\n';
    }
    return out;
  }

  Frame render_frame() override {
    using raster::Color;
    Frame frame(map_.rows() * kCellPixels, map_.cols() * kCellPixels, 255);
    for (std::int64_t cell = 0; cell < map_.cells(); ++cell) {
      const auto x = (cell % map_.cols()) * kCellPixels;
      const auto y = (cell / map_.cols()) * kCellPixels;
      Color color{180, 220, 255};
      switch (map_.at(cell)) {
        case 'H': color = {20, 40, 90}; break;
        case 'G': color = {255, 215, 0}; break;
        case 'S': color = {210, 235, 255}; break;
        default: break;
      }
      raster::fill_rect(frame, x + 1, y + 1, x + kCellPixels - 1, y + kCellPixels - 1, color);
    }
    const auto cx = static_cast<double>((position_ % map_.cols()) * kCellPixels) + kCellPixels / 2.0;
    const auto cy = static_cast<double>((position_ / map_.cols()) * kCellPixels) + kCellPixels / 2.0;
    raster::fill_circle(frame, cx, cy, kCellPixels / 4.0, Color{220, 50, 50});
    return frame;
  }

 private:
  FrozenLakeMap map_;
  bool slippery_;
  std::int64_t position_ = 0;
};

inline std::unique_ptr<Env> make_frozen_lake(const Kwargs& kwargs, std::optional<RenderMode> render_mode) {
  gymkit::detail::check_known_kwargs(kwargs, {"map_name", "is_slippery", "desc"}, "FrozenLake");
  const bool slippery = gymkit::detail::kwarg_or(kwargs, "is_slippery", true);
  if (const auto it = kwargs.find("desc"); it != kwargs.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorKind::InvalidKwargs, "kwarg 'desc' must be a list of strings");
    std::vector<std::string> rows;
    for (const auto& row : *it) {
      if (!row.is_string()) throw Error(ErrorKind::InvalidKwargs, "kwarg 'desc' must be a list of strings");
      rows.push_back(row.get<std::string>());
    }
    return std::make_unique<FrozenLakeEnv>(FrozenLakeMap(std::move(rows)), slippery, render_mode);
  }
  const auto name = gymkit::detail::kwarg_or(kwargs, "map_name", std::string("4x4"));
  return std::make_unique<FrozenLakeEnv>(FrozenLakeMap::named(name), slippery, render_mode);
}

}  // namespace gymkit::envs
