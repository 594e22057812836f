#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include "gymkit/gymkit.hpp"
#include "support/support.hpp"

using namespace gymkit;

namespace {

class ThrowingEnv : public fixtures::StubEnv {
 public:
  explicit ThrowingEnv(std::int64_t fail_at) : fail_at_(fail_at) {}

 protected:
  StepResult advance(const Value& action) override {
    if (count() + 1 == fail_at_) throw std::runtime_error("boom");
    return StubEnv::advance(action);
  }

 private:
  std::int64_t fail_at_;
};

class SlowCloseEnv : public fixtures::StubEnv {
 protected:
  void on_close() override { std::this_thread::sleep_for(std::chrono::milliseconds(5600)); }
};

std::vector<std::unique_ptr<Env>> stubs(std::size_t n) {
  std::vector<std::unique_ptr<Env>> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::make_unique<fixtures::StubEnv>(3));
  return out;
}

Value batch_of(const Space& single, const std::vector<Value>& row) { return concatenate(single, row); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no gymkit::Error thrown";
  return ErrorKind::InvalidArgument;
}

class BothBackends : public ::testing::TestWithParam<Backend> {};

}  // namespace

namespace gymkit {
void PrintTo(Backend backend, std::ostream* os) { *os << backend_name(backend); }
}  // namespace gymkit

TEST(VectorSpaces, CartPoleBatchedBox) {
  auto envs = make_vec("CartPole-v1", 4);
  const auto& obs = envs->observation_space().as<BoxSpace>();
  EXPECT_EQ(obs.shape, (Shape{4, 4}));
  EXPECT_EQ(envs->action_space(), Space::multi_discrete({2, 2, 2, 2}));
  EXPECT_EQ(envs->single_action_space(), Space::discrete(2));
  EXPECT_EQ(envs->num_envs(), 4u);
}

TEST(VectorSpaces, ZeroEnvsRejected) {
  EXPECT_EQ(kind_of([] { make_vec("CartPole-v1", 0); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { SyncVectorEnv(std::vector<std::unique_ptr<Env>>{}); }), ErrorKind::InvalidArgument);
}

TEST(VectorSpaces, MismatchedSubEnvsRejected) {
  std::vector<std::unique_ptr<Env>> envs;
  envs.push_back(make("CartPole-v1"));
  envs.push_back(make("Pendulum-v1"));
  EXPECT_EQ(kind_of([&] { SyncVectorEnv(std::move(envs)); }), ErrorKind::InvalidArgument);
}

TEST_P(BothBackends, ResetUsesChildSeeds) {
  auto envs = make_vec("CartPole-v1", 3, GetParam());
  const auto got = envs->reset(7);
  const auto children = derive_child_seeds(7, 3);
  std::vector<Value> expected;
  for (std::size_t i = 0; i < 3; ++i) expected.push_back(make("CartPole-v1")->reset(children[i]).observation);
  EXPECT_EQ(got.observations, batch_of(envs->single_observation_space(), expected));
  EXPECT_EQ(got.infos.size(), 3u);
  EXPECT_EQ(envs->reset(7).observations, got.observations);
}

TEST_P(BothBackends, NextStepAutoreset) {
  auto envs = GetParam() == Backend::parallel ? std::unique_ptr<VectorEnv>(new AsyncVectorEnv(stubs(2)))
                                              : std::unique_ptr<VectorEnv>(new SyncVectorEnv(stubs(2)));
  envs->reset(0);
  const Value actions = IntArray({2}, {1, 0});
  for (int t = 1; t <= 3; ++t) {
    auto r = envs->step(actions);
    EXPECT_EQ(r.observations, IntArray({2}, {t, t}));
    EXPECT_EQ(r.rewards, (std::vector<double>{1.0, 1.0}));
    EXPECT_EQ(r.terminateds, (std::vector<bool>{t == 3, t == 3}));
  }
  auto r = envs->step(actions);
  EXPECT_EQ(r.observations, IntArray({2}, {0, 0}));
  EXPECT_EQ(r.rewards, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(r.terminateds, (std::vector<bool>{false, false}));
  EXPECT_EQ(r.truncateds, (std::vector<bool>{false, false}));
  EXPECT_TRUE(r.infos[0].contains("draw"));
  r = envs->step(actions);
  EXPECT_EQ(r.observations, IntArray({2}, {1, 1}));
}

TEST(VectorAutoreset, ActionIgnoredOnResetStep) {
  std::vector<std::unique_ptr<Env>> envs;
  auto stub = std::make_unique<fixtures::StubEnv>(1);
  auto* raw = stub.get();
  envs.push_back(std::move(stub));
  SyncVectorEnv vec(std::move(envs));
  vec.reset(0);
  vec.step(IntArray({1}, {1}));
  vec.step(IntArray({1}, {0}));
  vec.step(IntArray({1}, {1}));
  ASSERT_EQ(raw->received().size(), 2u);
  EXPECT_EQ(raw->received()[0], Value(std::int64_t{1}));
  EXPECT_EQ(raw->received()[1], Value(std::int64_t{1}));
}

TEST_P(BothBackends, StepBeforeResetIsRejected) {
  auto envs = make_vec("CartPole-v1", 2, GetParam());
  EXPECT_EQ(kind_of([&] { envs->step(IntArray({2}, {0, 1})); }), ErrorKind::ResetNeeded);
  envs->reset(0);
  EXPECT_NO_THROW(envs->step(IntArray({2}, {0, 1})));
}

TEST_P(BothBackends, ActionsOutsideBatchedSpace) {
  auto envs = make_vec("CartPole-v1", 2, GetParam());
  envs->reset(0);
  EXPECT_EQ(kind_of([&] { envs->step(IntArray({2}, {0, 2})); }), ErrorKind::InvalidAction);
  EXPECT_EQ(kind_of([&] { envs->step(IntArray({3}, {0, 1, 1})); }), ErrorKind::InvalidAction);
}

TEST_P(BothBackends, MatchesIndependentEnvs) {
  for (const char* id : {"CartPole-v1", "Pendulum-v1", "FrozenLake-v1"}) {
    auto envs = make_vec(id, 3, GetParam());
    fixtures::IndependentEnvsOracle oracle(default_registry(), id, 3);
    const auto script = fixtures::action_script(oracle.single_action_space(), 3, 200, 11);
    const auto a = envs->reset(5);
    const auto b = oracle.reset(5);
    ASSERT_EQ(a.observations, b.observations) << id;
    ASSERT_EQ(a.infos, b.infos) << id;
    for (std::size_t t = 0; t < script.size(); ++t) {
      const auto got = envs->step(batch_of(envs->single_action_space(), script[t]));
      const auto want = oracle.step(script[t]);
      ASSERT_EQ(got, want) << id << " step " << t;
      ASSERT_TRUE(contains(envs->observation_space(), got.observations)) << id;
    }
  }
}

TEST(VectorBackends, ParallelEqualsSequential) {
  for (std::size_t n : {1u, 2u, 5u}) {
    auto seq = make_vec("CartPole-v1", n, Backend::sequential);
    auto par = make_vec("CartPole-v1", n, Backend::parallel);
    const auto script = fixtures::action_script(seq->single_action_space(), n, 300, 3);
    ASSERT_EQ(seq->reset(9).observations, par->reset(9).observations);
    for (const auto& row : script) {
      const auto actions = batch_of(seq->single_action_space(), row);
      ASSERT_EQ(seq->step(actions), par->step(actions));
    }
  }
}

TEST_P(BothBackends, CloseIsIdempotent) {
  auto envs = make_vec("CartPole-v1", 2, GetParam());
  envs->reset(0);
  envs->close();
  envs->close();
  EXPECT_TRUE(envs->closed());
  EXPECT_EQ(kind_of([&] { envs->step(IntArray({2}, {0, 1})); }), ErrorKind::EnvClosed);
  EXPECT_EQ(kind_of([&] { envs->reset(0); }), ErrorKind::EnvClosed);
}

TEST(VectorBackends, CloseClosesSubEnvs) {
  std::vector<std::unique_ptr<Env>> envs;
  std::vector<fixtures::StubEnv*> raw;
  for (int i = 0; i < 3; ++i) {
    auto e = std::make_unique<fixtures::StubEnv>();
    raw.push_back(e.get());
    envs.push_back(std::move(e));
  }
  SyncVectorEnv vec(std::move(envs));
  vec.close();
  vec.close();
  for (auto* e : raw) EXPECT_EQ(e->closes(), 1);
}

TEST(VectorBackends, ParallelCloseJoinsWorkers) {
  AsyncVectorEnv vec(stubs(4));
  EXPECT_EQ(vec.live_workers(), 4u);
  vec.reset(1);
  vec.close();
  EXPECT_EQ(vec.live_workers(), 0u);
}

TEST(VectorBackends, WorkerFailurePoisons) {
  std::vector<std::unique_ptr<Env>> envs;
  envs.push_back(std::make_unique<fixtures::StubEnv>());
  envs.push_back(std::make_unique<fixtures::StubEnv>());
  envs.push_back(std::make_unique<ThrowingEnv>(2));
  AsyncVectorEnv vec(std::move(envs));
  vec.reset(0);
  const Value actions = IntArray({3}, {0, 0, 0});
  vec.step(actions);
  try {
    vec.step(actions);
    FAIL() << "expected WorkerFailure";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::WorkerFailure);
    EXPECT_NE(std::string(e.what()).find("sub-environment 2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos) << e.what();
  }
  EXPECT_TRUE(vec.poisoned());
  EXPECT_EQ(kind_of([&] { vec.step(actions); }), ErrorKind::WorkerFailure);
  EXPECT_EQ(kind_of([&] { vec.reset(0); }), ErrorKind::WorkerFailure);
  vec.close();
  EXPECT_EQ(vec.live_workers(), 0u);
}

TEST(VectorBackends, SequentialFailurePropagates) {
  std::vector<std::unique_ptr<Env>> envs;
  envs.push_back(std::make_unique<fixtures::StubEnv>());
  envs.push_back(std::make_unique<ThrowingEnv>(1));
  SyncVectorEnv vec(std::move(envs));
  vec.reset(0);
  EXPECT_THROW(vec.step(IntArray({2}, {0, 0})), std::runtime_error);
}

TEST(VectorBackends, HungWorkerIsDetachedAfterDeadline) {
  std::vector<std::unique_ptr<Env>> envs;
  envs.push_back(std::make_unique<fixtures::StubEnv>());
  envs.push_back(std::make_unique<SlowCloseEnv>());
  AsyncVectorEnv vec(std::move(envs));
  vec.reset(0);
  const auto start = std::chrono::steady_clock::now();
  vec.close();
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_EQ(vec.live_workers(), 0u);
  EXPECT_GE(elapsed.count(), 4.9);
  EXPECT_LT(elapsed.count(), 5.5);
}

TEST_P(BothBackends, RenderReturnsOnePerSubEnv) {
  auto envs = make_vec("FrozenLake-v1", 3, GetParam(), MakeOverrides{RenderMode::ansi, std::nullopt, Kwargs::object()});
  envs->reset(0);
  const auto frames = envs->render();
  ASSERT_EQ(frames.size(), 3u);
  for (const auto& f : frames) EXPECT_EQ(std::get<std::string>(f), "[S]FFF\nFHFH\nFFFH\nHFFG\n");
}

TEST(VectorStatistics, MatchesSingleEnvStatistics) {
  auto vec = std::make_unique<VectorRecordEpisodeStatistics>(make_vec("CartPole-v1", 2));
  std::vector<std::unique_ptr<Env>> singles;
  for (int i = 0; i < 2; ++i) singles.push_back(record_episode_statistics(make("CartPole-v1")));
  const auto children = derive_child_seeds(4, 2);
  vec->reset(4);
  for (std::size_t i = 0; i < 2; ++i) singles[i]->reset(children[i]);
  std::vector<bool> pending(2, false);
  const auto script = fixtures::action_script(Space::discrete(2), 2, 400, 8);
  int episodes = 0;
  for (const auto& row : script) {
    const auto r = vec->step(batch_of(Space::discrete(2), row));
    for (std::size_t i = 0; i < 2; ++i) {
      if (pending[i]) {
        singles[i]->reset();
        pending[i] = false;
        EXPECT_FALSE(r.infos[i].contains("episode"));
        continue;
      }
      const auto s = singles[i]->step(row[i]);
      ASSERT_EQ(r.infos[i].contains("episode"), s.info.contains("episode"));
      if (s.done()) {
        EXPECT_EQ(r.infos[i]["episode"]["r"], s.info["episode"]["r"]);
        EXPECT_EQ(r.infos[i]["episode"]["l"], s.info["episode"]["l"]);
        pending[i] = true;
        ++episodes;
      }
    }
  }
  EXPECT_GT(episodes, 4);
}

INSTANTIATE_TEST_SUITE_P(Backends, BothBackends, ::testing::Values(Backend::sequential, Backend::parallel),
                         [](const auto& info) { return std::string(backend_name(info.param)); });
