#include <gtest/gtest.h>

#include <cmath>

#include "gymkit/flatten.hpp"
#include "support/space_zoo.hpp"

using namespace gymkit;

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

}  // namespace

TEST(Flatdim, PerKind) {
  EXPECT_EQ(flatdim(Space::box(0.0, 1.0, Shape{2, 3})), 6);
  EXPECT_EQ(flatdim(Space::discrete(5)), 5);
  EXPECT_EQ(flatdim(Space::multi_discrete({2, 3})), 5);
  EXPECT_EQ(flatdim(Space::multi_binary(4)), 4);
  EXPECT_EQ(flatdim(Space::mapping({{"a", Space::box(0.0, 1.0, Shape{2})}, {"b", Space::discrete(3)}})), 5);
  EXPECT_EQ(flatdim(Space::one_of({Space::discrete(3), Space::box(0.0, 1.0, Shape{2})})), 6);
}

TEST(Flatdim, UnflattenableKinds) {
  EXPECT_EQ(kind_of([] { flatdim(Space::text(0, 2)); }), ErrorKind::UnflattenableSpace);
  EXPECT_EQ(kind_of([] { flatdim(Space::sequence(Space::discrete(2))); }), ErrorKind::UnflattenableSpace);
  EXPECT_EQ(kind_of([] { flatdim(Space::graph(Space::discrete(2))); }), ErrorKind::UnflattenableSpace);
  EXPECT_EQ(kind_of([] { flatdim(Space::product({Space::discrete(2), Space::text(0, 1)})); }),
            ErrorKind::UnflattenableSpace);
  EXPECT_FALSE(is_flattenable(Space::text(0, 1)));
  EXPECT_TRUE(is_flattenable(Space::discrete(2)));
}

TEST(Flatdim, AdditiveOverComposites) {
  for (const auto& a : fixtures::flattenable_zoo()) {
    for (const auto& b : fixtures::flattenable_zoo()) {
      ASSERT_EQ(flatdim(Space::product({a.space, b.space})), flatdim(a.space) + flatdim(b.space));
      ASSERT_EQ(flatdim(Space::mapping({{"x", a.space}, {"y", b.space}})), flatdim(a.space) + flatdim(b.space));
    }
  }
}

TEST(Flatten, DiscreteIsOneHot) {
  EXPECT_EQ(flatten(Space::discrete(4), 2), (FlatVector{0, 0, 1, 0}));
  EXPECT_EQ(flatten(Space::discrete(3, 5), 5), (FlatVector{1, 0, 0}));
}

TEST(Flatten, ProductConcatenatesInOrder) {
  const auto s = Space::product({Space::discrete(2), Space::box(0.0, 1.0, Shape{1})});
  const Value v = Value::list({1, Value::real({0.5})});
  EXPECT_EQ(flatten(s, v), (FlatVector{0, 1, 0.5}));
  EXPECT_EQ(unflatten(s, flatten(s, v)), v);
}

TEST(Flatten, MappingUsesDeclaredOrder) {
  const auto s = Space::mapping({{"b", Space::discrete(2)}, {"a", Space::box(0.0, 9.0, Shape{1})}});
  EXPECT_EQ(flatten(s, ValueMap{{"a", Value::real({7.0})}, {"b", 1}}), (FlatVector{0, 1, 7}));
}

TEST(Flatten, MultiKinds) {
  EXPECT_EQ(flatten(Space::multi_discrete({2, 3}), Value::ints({1, 0})), (FlatVector{0, 1, 1, 0, 0}));
  EXPECT_EQ(flatten(Space::multi_binary(3), Value::ints({1, 0, 1})), (FlatVector{1, 0, 1}));
  EXPECT_EQ(flatten(Space::box(-2.0, 2.0, Shape{2}, DType::int64), Value::ints({-2, 1})), (FlatVector{-2, 1}));
}

TEST(Flatten, OneOfTagThenPaddedBlocks) {
  const auto s = Space::one_of({Space::discrete(3), Space::box(-1.0, 1.0, Shape{2})});
  EXPECT_EQ(flatten(s, Value::tagged(0, 1)), (FlatVector{0, 0, 1, 0, 0, 0}));
  EXPECT_EQ(flatten(s, Value::tagged(1, Value::real({0.25, -0.5}))), (FlatVector{1, 0, 0, 0, 0.25, -0.5}));
}

TEST(Flatten, RejectsOutsideValues) {
  EXPECT_EQ(kind_of([] { flatten(Space::discrete(4), 4); }), ErrorKind::ValueNotInSpace);
  EXPECT_EQ(kind_of([] { flatten(Space::text(0, 3), "ab"); }), ErrorKind::UnflattenableSpace);
}

TEST(Unflatten, Examples) {
  EXPECT_EQ(unflatten(Space::discrete(4), FlatVector{0, 0, 1, 0}), Value(2));
  EXPECT_EQ(unflatten(Space::box(0.0, 1.0, Shape{2}), FlatVector{0.1, 0.2}), Value::real({0.1, 0.2}));
  EXPECT_EQ(kind_of([] { unflatten(Space::discrete(4), FlatVector{0, 0, 0}); }), ErrorKind::DimensionMismatch);
  EXPECT_EQ(kind_of([] { unflatten(Space::discrete(4), FlatVector{0, 0, 0, 0}); }), ErrorKind::MalformedEncoding);
}

TEST(Unflatten, ArgmaxWithLowestIndexTies) {
  EXPECT_EQ(unflatten(Space::discrete(4), FlatVector{0.1, 0.7, 0.7, 0.2}), Value(1));
  EXPECT_EQ(unflatten(Space::discrete(3, 10), FlatVector{0.2, 0.1, 0.9}), Value(12));
}

TEST(Unflatten, BadOneOfTag) {
  const auto s = Space::one_of({Space::discrete(1), Space::discrete(1)});
  EXPECT_EQ(kind_of([&] { unflatten(s, FlatVector{5, 1, 0}); }), ErrorKind::MalformedEncoding);
}

class FlattenZoo : public ::testing::TestWithParam<fixtures::NamedSpace> {};

TEST_P(FlattenZoo, UnflattenInvertsFlattenExactly) {
  const auto& space = GetParam().space;
  Rng rng(2024);
  for (int i = 0; i < 500; ++i) {
    const auto v = sample(space, rng);
    const auto flat = flatten(space, v);
    ASSERT_EQ(static_cast<std::int64_t>(flat.size()), flatdim(space));
    ASSERT_EQ(unflatten(space, flat), v) << v;
  }
}

TEST_P(FlattenZoo, FlatVectorsLieInFlattenedSpace) {
  const auto& space = GetParam().space;
  const auto box = flatten_space(space);
  Rng rng(77);
  for (int i = 0; i < 200; ++i) ASSERT_TRUE(contains(box, Value::real(flatten(space, sample(space, rng)))));
}

INSTANTIATE_TEST_SUITE_P(Flattenable, FlattenZoo, ::testing::ValuesIn(fixtures::flattenable_zoo()),
                         [](const auto& info) { return info.param.name; });

TEST(FlattenSpace, BoundsFollowSource) {
  const auto s = Space::product({Space::box({-3.0}, {4.0}), Space::discrete(2)});
  const auto flat = flatten_space(s);
  const auto& b = flat.as<BoxSpace>();
  EXPECT_EQ(b.low, (std::vector<double>{-3.0, 0.0, 0.0}));
  EXPECT_EQ(b.high, (std::vector<double>{4.0, 1.0, 1.0}));
}
