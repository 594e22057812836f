#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <variant>
#include <vector>

#include "gymkit/env.hpp"
#include "gymkit/env_spec.hpp"
#include "gymkit/error.hpp"
#include "gymkit/wrappers.hpp"

namespace gymkit {

/// Builds a raw environment from resolved kwargs. Throws InvalidKwargs on
/// unknown or ill-typed arguments.
using EnvFactory = std::function<std::unique_ptr<Env>(const Kwargs& kwargs, std::optional<RenderMode> render_mode)>;

struct MakeOverrides {
  std::optional<RenderMode> render_mode;
  std::optional<std::int64_t> max_episode_steps;
  Kwargs kwargs = Kwargs::object();
};

/// Versioned environment table. Entry points are string keys into a
/// constructor table, so specs stay portable data.
///
/// Reads (make, lookup, list) may run concurrently; registrations are serialized.
class Registry {
 public:
  void add_entry_point(const std::string& key, EnvFactory factory) {
    std::unique_lock lock(mutex_);
    entry_points_[key] = std::move(factory);
  }

  bool has_entry_point(const std::string& key) const {
    std::shared_lock lock(mutex_);
    return entry_points_.contains(key);
  }

  void register_env(EnvSpec spec) {
    if (!spec.id.version) throw Error(ErrorKind::MissingVersion, "'" + spec.id.str() + "' must carry an explicit -vN version");
    std::unique_lock lock(mutex_);
    if (specs_.contains(spec.id)) throw Error(ErrorKind::DuplicateRegistration, "'" + spec.id.str() + "' is already registered");
    specs_.emplace(spec.id, std::move(spec));
  }

  /// Resolves a textual id to its registered spec. An unversioned id names the
  /// highest registered version.
  EnvSpec lookup(const std::string& text) const {
    const EnvId id = parse_env_id(text);
    std::shared_lock lock(mutex_);
    std::vector<const EnvSpec*> family;
    for (const auto& [key, spec] : specs_)
      if (key.same_family(id)) family.push_back(&spec);
    if (family.empty()) throw Error(ErrorKind::UnknownEnvironment, "unknown environment '" + id.str() + "'");
    if (!id.version) return *family.back();
    for (const auto* spec : family)
      if (spec->id.version == id.version) return *spec;
    std::string available;
    for (const auto* spec : family) available += (available.empty() ? "" : ", ") + ("v" + std::to_string(*spec->id.version));
    throw Error(ErrorKind::VersionNotFound,
                "'" + id.str() + "' is not registered; available versions: " + available);
  }

  std::vector<EnvSpec> list(const std::optional<std::string>& ns = std::nullopt) const {
    std::shared_lock lock(mutex_);
    std::vector<EnvSpec> out;
    for (const auto& [key, spec] : specs_)
      if (!ns || key.ns == ns) out.push_back(spec);
    return out;
  }

  std::unique_ptr<Env> make(const std::string& id, const MakeOverrides& overrides = {}) const {
    return make(lookup(id), overrides);
  }

  /// Builds the raw environment from spec.entry_point, wraps it in the time
  /// limit and then order enforcement (outermost, so it sees truncation), and
  /// attaches the fully resolved spec. make(env.spec()) recreates an identical environment.
  std::unique_ptr<Env> make(const EnvSpec& spec, const MakeOverrides& overrides = {}) const {
    if (!overrides.kwargs.is_object() && !overrides.kwargs.is_null())
      throw Error(ErrorKind::InvalidKwargs, "kwargs must be a JSON object");
    EnvSpec resolved = spec;
    resolved.kwargs = spec.merged_kwargs();
    if (overrides.kwargs.is_object()) resolved.kwargs.update(overrides.kwargs);
    resolved.applied_kwargs = Kwargs::object();
    if (overrides.render_mode) resolved.render_mode = overrides.render_mode;
    if (overrides.max_episode_steps) resolved.max_episode_steps = overrides.max_episode_steps;
    if (resolved.max_episode_steps && *resolved.max_episode_steps < 1)
      throw Error(ErrorKind::InvalidArgument, "max_episode_steps must be >= 1");

    EnvFactory factory;
    {
      std::shared_lock lock(mutex_);
      const auto it = entry_points_.find(resolved.entry_point);
      if (it == entry_points_.end())
        throw Error(ErrorKind::UnknownEnvironment, "no constructor registered under entry point '" + resolved.entry_point + "'");
      factory = it->second;
    }

    auto env = factory(resolved.kwargs, resolved.render_mode);
    if (resolved.max_episode_steps) env = time_limit(std::move(env), *resolved.max_episode_steps);
    if (resolved.order_enforcing) env = order_enforcing(std::move(env));
    env->set_spec(std::move(resolved));
    return env;
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, EnvFactory> entry_points_;
  std::map<EnvId, EnvSpec> specs_;
};

// ---------------------------------------------------------------------------
// kwargs helpers for environment constructors

namespace detail {

inline void check_known_kwargs(const Kwargs& kwargs, std::initializer_list<std::string_view> known, const char* env) {
  if (!kwargs.is_object()) throw Error(ErrorKind::InvalidKwargs, std::string(env) + " kwargs must be an object");
  for (const auto& [key, value] : kwargs.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw Error(ErrorKind::InvalidKwargs, std::string(env) + " does not accept kwarg '" + key + "'");
}

template <typename T>
T kwarg_or(const Kwargs& kwargs, const char* key, T fallback) {
  const auto it = kwargs.find(key);
  if (it == kwargs.end() || it->is_null()) return fallback;
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!it->is_number()) throw Error(ErrorKind::InvalidKwargs, std::string("kwarg '") + key + "' must be a number");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw Error(ErrorKind::InvalidKwargs, std::string("kwarg '") + key + "' must be a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!it->is_string()) throw Error(ErrorKind::InvalidKwargs, std::string("kwarg '") + key + "' must be a string");
    }
    return it->get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidKwargs, std::string("kwarg '") + key + "': " + e.what());
  }
}

}  // namespace detail

}  // namespace gymkit
