#include <gtest/gtest.h>

#include <chrono>

#include "gymkit/gymkit.hpp"
#include "support/support.hpp"

using namespace gymkit;
using fixtures::StubEnv;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no gymkit::Error thrown";
  return ErrorKind::InvalidArgument;
}

class RecordingSink : public FrameSink {
 public:
  void present(const Frame& frame) override { frames.push_back(frame); }
  void present(const std::string& text) override { texts.push_back(text); }
  std::vector<Frame> frames;
  std::vector<std::string> texts;
};

}  // namespace

TEST(EnvCore, StepBeforeResetNeedsReset) {
  StubEnv env;
  EXPECT_EQ(kind_of([&] { env.step(0); }), ErrorKind::ResetNeeded);
}

TEST(EnvCore, InvalidActionIsRejected) {
  StubEnv env;
  env.reset(1);
  EXPECT_EQ(kind_of([&] { env.step(2); }), ErrorKind::InvalidAction);
  EXPECT_EQ(kind_of([&] { env.step(Value::real({0.0})); }), ErrorKind::InvalidAction);
  EXPECT_TRUE(env.received().empty());
}

TEST(EnvCore, CloseIsIdempotentAndFinal) {
  StubEnv env;
  EnvSpec spec;
  spec.id = parse_env_id("Stub-v0");
  spec.entry_point = "stub";
  env.set_spec(spec);
  env.reset(1);
  env.close();
  env.close();
  EXPECT_EQ(env.closes(), 1);
  EXPECT_TRUE(env.closed());
  EXPECT_EQ(kind_of([&] { env.step(0); }), ErrorKind::EnvClosed);
  EXPECT_EQ(kind_of([&] { env.reset(); }), ErrorKind::EnvClosed);
  ASSERT_TRUE(env.spec().has_value());
  EXPECT_EQ(env.spec()->id.str(), "Stub-v0");
}

TEST(EnvCore, SeededResetReplacesTheStream) {
  StubEnv a, b;
  EXPECT_EQ(a.reset(42).info, b.reset(42).info);
  const auto continued = a.reset().info;
  const auto reseeded = b.reset(42).info;
  EXPECT_EQ(reseeded, StubEnv().reset(42).info);
  EXPECT_NE(continued, reseeded);
}

TEST(EnvCore, UnseededFirstResetStillWorks) {
  StubEnv env;
  EXPECT_NO_THROW(env.reset());
  EXPECT_NO_THROW(env.step(1));
}

TEST(EnvCore, OptionsReachTheEnvironment) {
  StubEnv env;
  EXPECT_EQ(env.reset(0, Options{{"start", 7}}).observation, Value(7));
}

TEST(EnvCore, StepResultDone) {
  StepResult r;
  EXPECT_FALSE(r.done());
  r.truncated = true;
  EXPECT_TRUE(r.done());
}

TEST(Render, UnsetModeFails) {
  StubEnv env;
  env.reset(0);
  EXPECT_EQ(kind_of([&] { env.render(); }), ErrorKind::RenderModeUnset);
}

TEST(Render, UnsupportedModeIsRejectedAtConstruction) {
  EXPECT_EQ(kind_of([] { envs::CartPoleEnv(RenderMode::ansi); }), ErrorKind::InvalidKwargs);
}

TEST(Render, ReturnKindFollowsMode) {
  StubEnv text(std::nullopt, RenderMode::ansi);
  text.reset(0);
  EXPECT_EQ(std::get<std::string>(text.render()), "count=0");
  StubEnv frame(std::nullopt, RenderMode::rgb_array);
  frame.reset(0);
  EXPECT_EQ(std::get<Frame>(frame.render()).shape(), (std::vector<std::int64_t>{2, 3, 3}));
}

TEST(Render, HumanModeGoesToTheSinkAtTheRecommendedPace) {
  StubEnv env(std::nullopt, RenderMode::human);
  auto sink = std::make_shared<RecordingSink>();
  env.set_frame_sink(sink);
  env.reset(0);
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 5; ++i) {
    EXPECT_TRUE(std::holds_alternative<std::monostate>(env.render()));
    env.step(0);
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_EQ(sink->texts, (std::vector<std::string>{"count=0", "count=1", "count=2", "count=3", "count=4"}));
  // Five presentations at 200 fps span at least four intervals of 5 ms.
  EXPECT_GE(elapsed.count(), 4 * 0.005 * 0.9);
}

TEST(Render, FrameFileSinkWritesPpm) {
  const auto dir = std::filesystem::temp_directory_path() / "gymkit_sink_test";
  std::filesystem::remove_all(dir);
  FrameFileSink sink(dir);
  Frame f(2, 3, 0);
  f.pixel(1, 2)[0] = 200;
  sink.present(f);
  sink.present(f);
  EXPECT_EQ(sink.frames_written(), 2u);
  std::ifstream in(dir / "frame_000001.ppm", std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(content.substr(0, 11), "P6\n3 2\n255\n");
  EXPECT_EQ(content.size(), 11u + 18u);
  EXPECT_EQ(static_cast<unsigned char>(content[11 + 15]), 200);
  std::filesystem::remove_all(dir);
}

TEST(Render, ModeNamesRoundTrip) {
  for (auto m : {RenderMode::human, RenderMode::rgb_array, RenderMode::ansi})
    EXPECT_EQ(parse_render_mode(render_mode_name(m)), m);
  EXPECT_FALSE(parse_render_mode("window").has_value());
}

TEST(Errors, MessageCarriesTheKindName) {
  const Error e(ErrorKind::ResetNeeded, "call reset");
  EXPECT_EQ(std::string(e.what()), "ResetNeeded: call reset");
  EXPECT_EQ(error_kind_name(ErrorKind::WorkerFailure), "WorkerFailure");
}
