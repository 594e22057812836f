#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "gymkit/error.hpp"
#include "gymkit/space.hpp"
#include "gymkit/value.hpp"

namespace gymkit {

using Json = nlohmann::json;

/// Info maps, constructor kwargs and reset options all share one closed set of
/// kinds (numbers, strings, booleans, nested maps, arrays), which is exactly JSON.
using Info = Json;
using Kwargs = Json;
using Options = Json;

namespace detail {

inline Json bound_to_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline double bound_from_json(const Json& j) {
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::MalformedDocument, "bad bound '" + s + "'");
  }
  if (!j.is_number()) throw Error(ErrorKind::MalformedDocument, "bound must be a number or \"inf\"/\"-inf\"");
  return j.get<double>();
}

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorKind::MalformedDocument, std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace detail

/// {"kind": ..., kind-specific fields}. Infinite Box bounds are written as "inf"/"-inf".
inline Json space_to_json(const Space& space) {
  Json j;
  j["kind"] = std::string(space_kind_name(space.kind()));
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSpace>) {
          Json low = Json::array();
          Json high = Json::array();
          for (auto x : s.low) low.push_back(detail::bound_to_json(x));
          for (auto x : s.high) high.push_back(detail::bound_to_json(x));
          j["low"] = std::move(low);
          j["high"] = std::move(high);
          j["shape"] = s.shape;
          j["dtype"] = s.dtype == DType::real64 ? "float64" : "int64";
        } else if constexpr (std::is_same_v<T, DiscreteSpace>) {
          j["n"] = s.n;
          j["start"] = s.start;
        } else if constexpr (std::is_same_v<T, MultiDiscreteSpace>) {
          j["nvec"] = s.nvec;
        } else if constexpr (std::is_same_v<T, MultiBinarySpace>) {
          j["n"] = s.n;
        } else if constexpr (std::is_same_v<T, TextSpace>) {
          j["min_length"] = s.min_length;
          j["max_length"] = s.max_length;
          j["charset"] = s.charset;
        } else if constexpr (std::is_same_v<T, ProductSpace>) {
          j["spaces"] = Json::array();
          for (const auto& sub : s.subspaces) j["spaces"].push_back(space_to_json(sub));
        } else if constexpr (std::is_same_v<T, MappingSpace>) {
          j["spaces"] = Json::array();
          for (const auto& [key, sub] : s.entries) j["spaces"].push_back({{"key", key}, {"space", space_to_json(sub)}});
        } else if constexpr (std::is_same_v<T, SequenceSpace>) {
          j["space"] = space_to_json(*s.element);
        } else if constexpr (std::is_same_v<T, GraphSpace>) {
          j["node_space"] = space_to_json(*s.node_space);
          j["edge_space"] = s.edge_space ? space_to_json(**s.edge_space) : Json(nullptr);
        } else {
          j["spaces"] = Json::array();
          for (const auto& sub : s.alternatives) j["spaces"].push_back(space_to_json(sub));
        }
      },
      space.node());
  return j;
}

inline Space space_from_json(const Json& j) {
  const auto kind = detail::field(j, "kind").get<std::string>();
  auto children = [&](const char* key) {
    std::vector<Space> out;
    for (const auto& sub : detail::field(j, key)) out.push_back(space_from_json(sub));
    return out;
  };
  try {
    if (kind == "box") {
      BoxSpace box;
      for (const auto& x : detail::field(j, "low")) box.low.push_back(detail::bound_from_json(x));
      for (const auto& x : detail::field(j, "high")) box.high.push_back(detail::bound_from_json(x));
      box.shape = detail::field(j, "shape").get<Shape>();
      const auto dtype = j.value("dtype", std::string("float64"));
      if (dtype != "float64" && dtype != "int64") throw Error(ErrorKind::MalformedDocument, "unknown dtype " + dtype);
      box.dtype = dtype == "int64" ? DType::int64 : DType::real64;
      return box;
    }
    if (kind == "discrete") return Space::discrete(detail::field(j, "n").get<std::int64_t>(), j.value("start", std::int64_t{0}));
    if (kind == "multi_discrete") return Space::multi_discrete(detail::field(j, "nvec").get<std::vector<std::int64_t>>());
    if (kind == "multi_binary") return Space::multi_binary(detail::field(j, "n").get<std::int64_t>());
    if (kind == "text")
      return Space::text(detail::field(j, "min_length").get<std::size_t>(), detail::field(j, "max_length").get<std::size_t>(),
                         j.value("charset", alphanumeric_charset()));
    if (kind == "tuple") return Space::product(children("spaces"));
    if (kind == "dict") {
      std::vector<std::pair<std::string, Space>> entries;
      for (const auto& e : detail::field(j, "spaces"))
        entries.emplace_back(detail::field(e, "key").get<std::string>(), space_from_json(detail::field(e, "space")));
      return Space::mapping(std::move(entries));
    }
    if (kind == "sequence") return Space::sequence(space_from_json(detail::field(j, "space")));
    if (kind == "graph") {
      std::optional<Space> edge;
      if (j.contains("edge_space") && !j.at("edge_space").is_null()) edge = space_from_json(j.at("edge_space"));
      return Space::graph(space_from_json(detail::field(j, "node_space")), std::move(edge));
    }
    if (kind == "one_of") return Space::one_of(children("spaces"));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::MalformedDocument, e.what());
  }
  throw Error(ErrorKind::MalformedDocument, "unknown space kind '" + kind + "'");
}

namespace detail {

template <typename T>
Json array_to_json(const NdArray<T>& a, std::size_t dim, std::size_t& pos) {
  if (dim == a.shape.size()) {
    const auto x = a.data[pos++];
    if constexpr (std::is_floating_point_v<T>) return bound_to_json(x);
    return x;
  }
  Json out = Json::array();
  for (std::int64_t i = 0; i < a.shape[dim]; ++i) out.push_back(array_to_json(a, dim + 1, pos));
  return out;
}

template <typename T>
NdArray<T> array_from_json(const Json& j, const Shape& shape) {
  NdArray<T> a(shape, {});
  a.data.reserve(static_cast<std::size_t>(shape_size(shape)));
  auto walk = [&](auto&& self, const Json& node, std::size_t dim) -> void {
    if (dim == shape.size()) {
      if constexpr (std::is_floating_point_v<T>) {
        a.data.push_back(bound_from_json(node));
      } else {
        a.data.push_back(node.get<T>());
      }
      return;
    }
    if (!node.is_array() || static_cast<std::int64_t>(node.size()) != shape[dim])
      throw Error(ErrorKind::MalformedDocument, "array does not match the space shape");
    for (const auto& child : node) self(self, child, dim + 1);
  };
  walk(walk, j, 0);
  return a;
}

}  // namespace detail

/// Native JSON form of a value: arrays as nested lists, Mapping as an object,
/// Graph as {"nodes","edges","edge_links"}, OneOf as {"index","value"}.
inline Json value_to_json(const Value& value) {
  return std::visit(
      [&](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::int64_t> || std::is_same_v<T, std::string>) {
          return v;
        } else if constexpr (std::is_same_v<T, RealArray> || std::is_same_v<T, IntArray>) {
          std::size_t pos = 0;
          return detail::array_to_json(v, 0, pos);
        } else if constexpr (std::is_same_v<T, ValueList>) {
          Json out = Json::array();
          for (const auto& x : v) out.push_back(value_to_json(x));
          return out;
        } else if constexpr (std::is_same_v<T, ValueMap>) {
          Json out = Json::object();
          for (const auto& [k, x] : v) out[k] = value_to_json(x);
          return out;
        } else if constexpr (std::is_same_v<T, GraphValue>) {
          Json nodes = Json::array();
          Json edges = Json::array();
          for (const auto& x : v.nodes) nodes.push_back(value_to_json(x));
          for (const auto& x : v.edges) edges.push_back(value_to_json(x));
          return {{"nodes", nodes}, {"edges", edges}, {"edge_links", v.edge_links}};
        } else {
          return {{"index", v.index}, {"value", value_to_json(*v.value)}};
        }
      },
      value.data);
}

/// Inverse of value_to_json, guided by the space the value belongs to.
/// Does not check membership.
inline Value value_from_json(const Space& space, const Json& j) {
  try {
    return std::visit(
        [&](const auto& s) -> Value {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, BoxSpace>) {
            if (s.dtype == DType::real64) return detail::array_from_json<double>(j, s.shape);
            return detail::array_from_json<std::int64_t>(j, s.shape);
          } else if constexpr (std::is_same_v<T, DiscreteSpace>) {
            return j.get<std::int64_t>();
          } else if constexpr (std::is_same_v<T, MultiDiscreteSpace>) {
            return detail::array_from_json<std::int64_t>(j, Shape{static_cast<std::int64_t>(s.nvec.size())});
          } else if constexpr (std::is_same_v<T, MultiBinarySpace>) {
            return detail::array_from_json<std::int64_t>(j, Shape{s.n});
          } else if constexpr (std::is_same_v<T, TextSpace>) {
            return j.get<std::string>();
          } else if constexpr (std::is_same_v<T, ProductSpace>) {
            if (!j.is_array() || j.size() != s.subspaces.size())
              throw Error(ErrorKind::MalformedDocument, "tuple arity mismatch");
            ValueList out;
            for (std::size_t i = 0; i < j.size(); ++i) out.push_back(value_from_json(s.subspaces[i], j[i]));
            return out;
          } else if constexpr (std::is_same_v<T, MappingSpace>) {
            ValueMap out;
            for (const auto& [key, sub] : s.entries) out.emplace_back(key, value_from_json(sub, detail::field(j, key.c_str())));
            return out;
          } else if constexpr (std::is_same_v<T, SequenceSpace>) {
            ValueList out;
            for (const auto& x : j) out.push_back(value_from_json(*s.element, x));
            return out;
          } else if constexpr (std::is_same_v<T, GraphSpace>) {
            GraphValue g;
            for (const auto& x : detail::field(j, "nodes")) g.nodes.push_back(value_from_json(*s.node_space, x));
            if (s.edge_space)
              for (const auto& x : detail::field(j, "edges")) g.edges.push_back(value_from_json(**s.edge_space, x));
            g.edge_links = j.value("edge_links", std::vector<std::array<std::int64_t, 2>>{});
            return g;
          } else {
            const auto index = detail::field(j, "index").get<std::size_t>();
            if (index >= s.alternatives.size()) throw Error(ErrorKind::MalformedDocument, "OneOf index out of range");
            return TaggedValue{index, value_from_json(s.alternatives[index], detail::field(j, "value"))};
          }
        },
        space.node());
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::MalformedDocument, e.what());
  }
}

}  // namespace gymkit
