#pragma once

// Umbrella header: the full library plus a process-wide registry holding the
// built-in environments.

#include "gymkit/batch.hpp"
#include "gymkit/env.hpp"
#include "gymkit/env_spec.hpp"
#include "gymkit/envs/builtins.hpp"
#include "gymkit/error.hpp"
#include "gymkit/flatten.hpp"
#include "gymkit/json.hpp"
#include "gymkit/registry.hpp"
#include "gymkit/render.hpp"
#include "gymkit/seeding.hpp"
#include "gymkit/space.hpp"
#include "gymkit/value.hpp"
#include "gymkit/vector.hpp"
#include "gymkit/wrappers.hpp"

namespace gymkit {

/// Registry pre-populated with the built-in environments. Further
/// registrations are allowed.
inline Registry& default_registry() {
  static Registry registry;
  static const bool populated = (envs::register_builtins(registry), true);
  (void)populated;
  return registry;
}

inline std::unique_ptr<Env> make(const std::string& id, const MakeOverrides& overrides = {}) {
  return default_registry().make(id, overrides);
}

inline std::unique_ptr<Env> make(const EnvSpec& spec, const MakeOverrides& overrides = {}) {
  return default_registry().make(spec, overrides);
}

inline std::unique_ptr<VectorEnv> make_vec(const std::string& id, std::size_t num_envs,
                                           Backend backend = Backend::sequential, const MakeOverrides& overrides = {}) {
  return make_vec(default_registry(), id, num_envs, backend, overrides);
}

inline std::unique_ptr<VectorEnv> make_vec(const EnvSpec& spec, std::size_t num_envs,
                                           Backend backend = Backend::sequential, const MakeOverrides& overrides = {}) {
  return make_vec(default_registry(), spec, num_envs, backend, overrides);
}

}  // namespace gymkit
