#pragma once

// Command implementations for the gymkit tool. Kept in a header so the test
// suite can drive them in-process.

#include <chrono>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gymkit/gymkit.hpp"

namespace gymkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

enum class Format { table, json };

struct RolloutOptions {
  std::string env_id;
  std::int64_t steps = 1000;
  std::optional<std::uint64_t> seed;
  bool render = false;
  std::string frames_dir = "frames";
};

struct RolloutReport {
  std::string env_id;
  std::uint64_t seed = 0;
  std::int64_t total_steps = 0;
  std::vector<double> episode_returns;
  std::vector<std::int64_t> episode_lengths;
  std::int64_t partial_episode_length = 0;
  std::int64_t contract_violations = 0;
  std::int64_t frames_rendered = 0;
  double wall_time_s = 0.0;

  std::int64_t episodes_completed() const { return static_cast<std::int64_t>(episode_lengths.size()); }
  double steps_per_second() const { return wall_time_s > 0 ? static_cast<double>(total_steps) / wall_time_s : 0.0; }
};

/// Reset with the seed, take random actions, reset whenever an episode ends, close.
/// Actions come from an Rng seeded with the first child seed of `seed`.
inline RolloutReport rollout(const Registry& registry, const RolloutOptions& opts, std::ostream& render_out = std::cerr) {
  if (opts.steps < 0) throw Error(ErrorKind::InvalidArgument, "--steps must be >= 0");
  const EnvSpec spec = registry.lookup(opts.env_id);
  std::optional<RenderMode> mode;
  if (opts.render) {
    auto probe = registry.make(spec);
    mode = probe->metadata().supports(RenderMode::ansi) ? RenderMode::ansi : RenderMode::rgb_array;
    probe->close();
  }
  auto env = registry.make(spec, MakeOverrides{mode, std::nullopt, Kwargs::object()});

  RolloutReport report;
  report.env_id = env->spec()->id.str();
  report.seed = opts.seed.value_or(wall_clock_seed());
  Rng action_rng(derive_child_seeds(report.seed, 1).front());
  FrameFileSink frames(opts.frames_dir);
  auto draw = [&] {
    if (!mode) return;
    auto out = env->render();
    if (auto* text = std::get_if<std::string>(&out)) render_out << *text << '\n';
    if (auto* frame = std::get_if<Frame>(&out)) frames.present(*frame);
    ++report.frames_rendered;
  };

  const auto start = std::chrono::steady_clock::now();
  auto first = env->reset(report.seed);
  if (!contains(env->observation_space(), first.observation)) ++report.contract_violations;
  draw();
  double episode_return = 0.0;
  std::int64_t episode_length = 0;
  for (std::int64_t t = 0; t < opts.steps; ++t) {
    const auto result = env->step(sample(env->action_space(), action_rng));
    ++report.total_steps;
    if (!contains(env->observation_space(), result.observation)) ++report.contract_violations;
    episode_return += result.reward;
    ++episode_length;
    draw();
    if (result.done()) {
      report.episode_returns.push_back(episode_return);
      report.episode_lengths.push_back(episode_length);
      episode_return = 0.0;
      episode_length = 0;
      auto again = env->reset();
      if (!contains(env->observation_space(), again.observation)) ++report.contract_violations;
    }
  }
  env->close();
  report.partial_episode_length = episode_length;
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

inline Json to_json(const RolloutReport& r, bool timing) {
  Json j{{"env_id", r.env_id},
         {"seed", r.seed},
         {"total_steps", r.total_steps},
         {"episodes_completed", r.episodes_completed()},
         {"episode_returns", r.episode_returns},
         {"episode_lengths", r.episode_lengths},
         {"partial_episode_length", r.partial_episode_length},
         {"contract_violations", r.contract_violations}};
  if (r.frames_rendered > 0) j["frames_rendered"] = r.frames_rendered;
  if (timing) {
    j["wall_time_s"] = r.wall_time_s;
    j["steps_per_second"] = r.steps_per_second();
  }
  return j;
}

inline void print_table(std::ostream& out, const RolloutReport& r, bool timing) {
  double total = 0.0;
  for (auto x : r.episode_returns) total += x;
  const double mean = r.episode_returns.empty() ? 0.0 : total / static_cast<double>(r.episode_returns.size());
  out << std::left;
  out << std::setw(22) << "env" << r.env_id << '\n';
  out << std::setw(22) << "seed" << r.seed << '\n';
  out << std::setw(22) << "total steps" << r.total_steps << '\n';
  out << std::setw(22) << "episodes completed" << r.episodes_completed() << '\n';
  out << std::setw(22) << "mean episode return" << mean << '\n';
  out << std::setw(22) << "partial episode" << r.partial_episode_length << '\n';
  out << std::setw(22) << "contract violations" << r.contract_violations << '\n';
  if (timing) {
    out << std::setw(22) << "wall time (s)" << r.wall_time_s << '\n';
    out << std::setw(22) << "steps/second" << r.steps_per_second() << '\n';
  }
}

// ---------------------------------------------------------------------------

struct BenchOptions {
  std::string env_id;
  std::size_t num_envs = 8;
  std::int64_t steps = 10000;
  std::uint64_t seed = 0;
};

struct BackendRun {
  Backend backend = Backend::sequential;
  double wall_time_s = 0.0;
  std::uint64_t digest = 0;
  std::int64_t env_steps = 0;

  double steps_per_second() const { return wall_time_s > 0 ? static_cast<double>(env_steps) / wall_time_s : 0.0; }
};

struct BenchReport {
  std::string env_id;
  BenchOptions options;
  std::vector<BackendRun> runs;

  bool outputs_identical() const {
    for (const auto& r : runs)
      if (r.digest != runs.front().digest) return false;
    return true;
  }
};

namespace detail {

// FNV-1a over the raw bytes of every returned value.
class Digest {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001B3ULL;
    }
  }
  template <typename T>
  void pod(const T& x) {
    bytes(&x, sizeof x);
  }

  void value(const Value& v) {
    pod(v.data.index());
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, std::int64_t>) {
            pod(x);
          } else if constexpr (std::is_same_v<T, RealArray> || std::is_same_v<T, IntArray>) {
            bytes(x.shape.data(), x.shape.size() * sizeof(std::int64_t));
            bytes(x.data.data(), x.data.size() * sizeof(x.data[0]));
          } else if constexpr (std::is_same_v<T, std::string>) {
            bytes(x.data(), x.size());
          } else if constexpr (std::is_same_v<T, ValueList>) {
            for (const auto& c : x) value(c);
          } else if constexpr (std::is_same_v<T, ValueMap>) {
            for (const auto& [k, c] : x) {
              bytes(k.data(), k.size());
              value(c);
            }
          } else if constexpr (std::is_same_v<T, GraphValue>) {
            for (const auto& c : x.nodes) value(c);
            for (const auto& c : x.edges) value(c);
            for (const auto& l : x.edge_links) pod(l);
          } else {
            pod(x.index);
            value(*x.value);
          }
        },
        v.data);
  }

  void step(const VectorStepResult& r) {
    value(r.observations);
    bytes(r.rewards.data(), r.rewards.size() * sizeof(double));
    for (bool b : r.terminateds) pod(b);
    for (bool b : r.truncateds) pod(b);
    for (const auto& info : r.infos) {
      const auto text = info.dump();
      bytes(text.data(), text.size());
    }
  }

  std::uint64_t result() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xCBF29CE484222325ULL;
};

}  // namespace detail

/// Runs the same seeded action script through both vector backends.
inline BenchReport bench(const Registry& registry, const BenchOptions& opts) {
  if (opts.num_envs < 1) throw Error(ErrorKind::InvalidArgument, "--num-envs must be >= 1");
  if (opts.steps < 0) throw Error(ErrorKind::InvalidArgument, "--steps must be >= 0");
  const EnvSpec spec = registry.lookup(opts.env_id);
  BenchReport report;
  report.env_id = spec.id.str();
  report.options = opts;

  std::vector<Value> actions;
  {
    auto probe = make_vec(registry, spec, opts.num_envs, Backend::sequential);
    Rng rng(derive_child_seeds(opts.seed, 1).front());
    actions.reserve(static_cast<std::size_t>(opts.steps));
    for (std::int64_t t = 0; t < opts.steps; ++t) actions.push_back(sample(probe->action_space(), rng));
  }

  for (auto backend : {Backend::sequential, Backend::parallel}) {
    auto venv = make_vec(registry, spec, opts.num_envs, backend);
    detail::Digest digest;
    const auto start = std::chrono::steady_clock::now();
    auto first = venv->reset(opts.seed);
    digest.value(first.observations);
    for (const auto& a : actions) digest.step(venv->step(a));
    const auto stop = std::chrono::steady_clock::now();
    venv->close();
    report.runs.push_back({backend, std::chrono::duration<double>(stop - start).count(), digest.result(),
                           opts.steps * static_cast<std::int64_t>(opts.num_envs)});
  }
  return report;
}

inline Json to_json(const BenchReport& r, bool timing) {
  Json backends = Json::object();
  for (const auto& run : r.runs) {
    Json entry{{"env_steps", run.env_steps}};
    if (timing) {
      entry["wall_time_s"] = run.wall_time_s;
      entry["steps_per_second"] = run.steps_per_second();
    }
    backends[std::string(backend_name(run.backend))] = entry;
  }
  return {{"env_id", r.env_id},     {"num_envs", r.options.num_envs},
          {"steps", r.options.steps}, {"seed", r.options.seed},
          {"backends", backends},   {"outputs_identical", r.outputs_identical()}};
}

inline void print_table(std::ostream& out, const BenchReport& r, bool timing) {
  out << "env " << r.env_id << ", num_envs " << r.options.num_envs << ", steps " << r.options.steps << ", seed "
      << r.options.seed << '\n';
  for (const auto& run : r.runs) {
    out << std::left << std::setw(12) << backend_name(run.backend);
    if (timing) {
      out << std::fixed << std::setprecision(1) << run.steps_per_second() << " steps/second (" << std::setprecision(3)
          << run.wall_time_s << " s)";
      out.unsetf(std::ios::floatfield);
      out << std::setprecision(6);
    } else {
      out << run.env_steps << " env steps";
    }
    out << '\n';
  }
  out << "outputs identical: " << (r.outputs_identical() ? "true" : "false") << '\n';
}

// ---------------------------------------------------------------------------

/// Parses and runs one command line. Returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               Registry& registry = default_registry()) {
  CLI::App app{"gymkit: environment rollouts, registry inspection and vectorization benchmarks", "gymkit"};
  app.require_subcommand(1);

  std::string env_id;
  std::int64_t steps = -1;
  std::optional<std::uint64_t> seed;
  std::size_t num_envs = 8;
  std::string backend = "sequential";
  bool render = false;
  std::string format;
  bool no_timing = false;
  std::string frames_dir = "frames";

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "table"}));
  };

  auto* rollout_cmd = app.add_subcommand("rollout", "Random-policy rollout with automatic resets");
  rollout_cmd->add_option("--env", env_id, "Environment id, e.g. CartPole-v1")->required();
  rollout_cmd->add_option("--steps", steps, "Number of steps")->check(CLI::NonNegativeNumber);
  rollout_cmd->add_option("--seed", seed, "Reset seed");
  rollout_cmd->add_flag("--render", render, "Render every step (ansi to stderr, frames to --frames-dir)");
  rollout_cmd->add_option("--frames-dir", frames_dir, "Directory for rgb_array frames");
  rollout_cmd->add_flag("--no-timing", no_timing, "Omit wall-time fields");
  add_format(rollout_cmd);

  auto* bench_cmd = app.add_subcommand("bench", "Sequential vs parallel vector throughput");
  bench_cmd->add_option("--env", env_id, "Environment id")->required();
  bench_cmd->add_option("--steps", steps, "Vector steps per backend")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--seed", seed, "Reset and action seed");
  bench_cmd->add_option("--num-envs", num_envs, "Sub-environments per vector env")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--backend", backend, "Ignored; bench always runs both backends")
      ->check(CLI::IsMember({"sequential", "parallel"}));
  bench_cmd->add_flag("--no-timing", no_timing, "Omit timing fields");
  add_format(bench_cmd);

  auto* list_cmd = app.add_subcommand("list", "List registered environments");
  add_format(list_cmd);

  auto* inspect_cmd = app.add_subcommand("inspect", "Print the canonical spec of one environment");
  inspect_cmd->add_option("--env", env_id, "Environment id")->required();
  add_format(inspect_cmd);

  std::vector<std::string> argv_storage;
  argv_storage.emplace_back("gymkit");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  }

  const bool timing = !no_timing;
  try {
    if (rollout_cmd->parsed()) {
      RolloutOptions opts{env_id, steps < 0 ? 1000 : steps, seed, render, frames_dir};
      const auto report = rollout(registry, opts, err);
      if (format == "json") {
        out << to_json(report, timing).dump() << '\n';
      } else {
        print_table(out, report, timing);
      }
    } else if (bench_cmd->parsed()) {
      BenchOptions opts{env_id, num_envs, steps < 0 ? 10000 : steps, seed.value_or(0)};
      const auto report = bench(registry, opts);
      if (format == "json") {
        out << to_json(report, timing).dump() << '\n';
      } else {
        print_table(out, report, timing);
      }
      if (!report.outputs_identical()) return kExitRuntime;
    } else if (list_cmd->parsed()) {
      const auto specs = registry.list();
      if (format == "json") {
        Json j = Json::array();
        for (const auto& s : specs) j.push_back(spec_to_json(s));
        out << j.dump() << '\n';
      } else {
        for (const auto& s : specs) {
          out << std::left << std::setw(20) << s.id.str() << std::setw(8)
              << (s.max_episode_steps ? std::to_string(*s.max_episode_steps) : "-") << s.entry_point << '\n';
        }
      }
    } else if (inspect_cmd->parsed()) {
      const auto spec = registry.lookup(env_id);
      if (format == "table") {
        for (const auto& [key, value] : spec_to_json(spec).items())
          out << std::left << std::setw(20) << key << value.dump() << '\n';
      } else {
        out << serialize_spec(spec) << '\n';
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::UnknownEnvironment:
      case ErrorKind::VersionNotFound:
      case ErrorKind::MalformedId:
      case ErrorKind::InvalidArgument:
        return kExitUsage;
      default:
        return kExitRuntime;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace gymkit::cli
