#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gymkit/detail/recursive.hpp"

namespace gymkit {

using Shape = std::vector<std::int64_t>;

inline std::int64_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::int64_t{1}, std::multiplies<>{});
}

/// Dense row-major array.
template <typename T>
struct NdArray {
  Shape shape;
  std::vector<T> data;

  NdArray() = default;
  NdArray(Shape s, std::vector<T> d) : shape(std::move(s)), data(std::move(d)) {}
  /// One-dimensional array.
  NdArray(std::vector<T> d) : shape{static_cast<std::int64_t>(d.size())}, data(std::move(d)) {}  // NOLINT
  NdArray(std::initializer_list<T> d) : NdArray(std::vector<T>(d)) {}

  friend bool operator==(const NdArray&, const NdArray&) = default;
};

using RealArray = NdArray<double>;
using IntArray = NdArray<std::int64_t>;

struct Value;

using ValueList = std::vector<Value>;
using ValueMap = std::vector<std::pair<std::string, Value>>;

struct GraphValue {
  ValueList nodes;
  ValueList edges;
  std::vector<std::array<std::int64_t, 2>> edge_links;

  friend bool operator==(const GraphValue&, const GraphValue&) = default;
};

/// Sample of a OneOf space: which alternative, and the alternative's sample.
struct TaggedValue {
  std::size_t index = 0;
  detail::Recursive<Value> value;

  friend bool operator==(const TaggedValue&, const TaggedValue&) = default;
};

/// A sample tree. Meaningful only relative to the Space it was drawn from:
///   Discrete           -> integer scalar
///   Box(real64)        -> RealArray
///   Box(int64), MultiDiscrete, MultiBinary -> IntArray
///   Text               -> string
///   Product, Sequence  -> ValueList
///   Mapping            -> ValueMap (declared entry order)
///   Graph              -> GraphValue
///   OneOf              -> TaggedValue
struct Value {
  using Storage = std::variant<std::int64_t, RealArray, IntArray, std::string, ValueList, ValueMap,
                               GraphValue, TaggedValue>;
  Storage data;

  Value() : data(std::int64_t{0}) {}
  Value(std::int64_t v) : data(v) {}  // NOLINT(google-explicit-constructor)
  Value(int v) : data(std::int64_t{v}) {}  // NOLINT
  Value(RealArray v) : data(std::move(v)) {}  // NOLINT
  Value(IntArray v) : data(std::move(v)) {}  // NOLINT
  Value(std::string v) : data(std::move(v)) {}  // NOLINT
  Value(const char* v) : data(std::string(v)) {}  // NOLINT
  Value(ValueList v) : data(std::move(v)) {}  // NOLINT
  Value(ValueMap v) : data(std::move(v)) {}  // NOLINT
  Value(GraphValue v) : data(std::move(v)) {}  // NOLINT
  Value(TaggedValue v) : data(std::move(v)) {}  // NOLINT

  static Value real(std::vector<double> v) { return RealArray(std::move(v)); }
  static Value ints(std::vector<std::int64_t> v) { return IntArray(std::move(v)); }
  static Value list(ValueList v) { return Value(std::move(v)); }
  static Value tagged(std::size_t index, Value v) { return TaggedValue{index, std::move(v)}; }

  template <typename T>
  bool is() const noexcept { return std::holds_alternative<T>(data); }
  template <typename T>
  const T* get_if() const noexcept { return std::get_if<T>(&data); }
  template <typename T>
  T* get_if() noexcept { return std::get_if<T>(&data); }

  std::int64_t as_int() const { return std::get<std::int64_t>(data); }
  const RealArray& as_real() const { return std::get<RealArray>(data); }
  const IntArray& as_ints() const { return std::get<IntArray>(data); }
  const std::string& as_text() const { return std::get<std::string>(data); }
  const ValueList& as_list() const { return std::get<ValueList>(data); }
  const ValueMap& as_map() const { return std::get<ValueMap>(data); }
  const GraphValue& as_graph() const { return std::get<GraphValue>(data); }
  const TaggedValue& as_tagged() const { return std::get<TaggedValue>(data); }

  friend bool operator==(const Value&, const Value&) = default;
};

namespace detail {

template <typename T>
void print_array(std::ostream& os, const NdArray<T>& a) {
  os << '[';
  for (std::size_t i = 0; i < a.data.size(); ++i) os << (i ? ", " : "") << a.data[i];
  os << ']';
}

}  // namespace detail

inline std::ostream& operator<<(std::ostream& os, const Value& v) {
  struct Printer {
    std::ostream& os;
    void operator()(std::int64_t x) const { os << x; }
    void operator()(const RealArray& a) const { detail::print_array(os, a); }
    void operator()(const IntArray& a) const { detail::print_array(os, a); }
    void operator()(const std::string& s) const { os << '"' << s << '"'; }
    void operator()(const ValueList& l) const {
      os << '(';
      for (std::size_t i = 0; i < l.size(); ++i) os << (i ? ", " : "") << l[i];
      os << ')';
    }
    void operator()(const ValueMap& m) const {
      os << '{';
      for (std::size_t i = 0; i < m.size(); ++i) os << (i ? ", " : "") << m[i].first << ": " << m[i].second;
      os << '}';
    }
    void operator()(const GraphValue& g) const {
      os << "Graph(nodes=" << Value(g.nodes) << ", edges=" << Value(g.edges) << ", links=[";
      for (std::size_t i = 0; i < g.edge_links.size(); ++i)
        os << (i ? ", " : "") << g.edge_links[i][0] << "->" << g.edge_links[i][1];
      os << "])";
    }
    void operator()(const TaggedValue& t) const { os << "OneOf(" << t.index << ", " << *t.value << ')'; }
  };
  std::visit(Printer{os}, v.data);
  return os;
}

}  // namespace gymkit
