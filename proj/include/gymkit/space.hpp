#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gymkit/detail/recursive.hpp"
#include "gymkit/error.hpp"
#include "gymkit/seeding.hpp"
#include "gymkit/value.hpp"

namespace gymkit {

enum class DType { real64, int64 };

class Space;

struct BoxSpace {
  std::vector<double> low;
  std::vector<double> high;
  Shape shape;
  DType dtype = DType::real64;

  friend bool operator==(const BoxSpace&, const BoxSpace&) = default;
};

struct DiscreteSpace {
  std::int64_t n = 1;
  std::int64_t start = 0;

  friend bool operator==(const DiscreteSpace&, const DiscreteSpace&) = default;
};

struct MultiDiscreteSpace {
  std::vector<std::int64_t> nvec;

  friend bool operator==(const MultiDiscreteSpace&, const MultiDiscreteSpace&) = default;
};

struct MultiBinarySpace {
  std::int64_t n = 1;

  friend bool operator==(const MultiBinarySpace&, const MultiBinarySpace&) = default;
};

inline const std::string& alphanumeric_charset() {
  static const std::string charset =
      "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
  return charset;
}

struct TextSpace {
  std::size_t min_length = 0;
  std::size_t max_length = 0;
  std::string charset = alphanumeric_charset();

  friend bool operator==(const TextSpace&, const TextSpace&) = default;
};

struct ProductSpace {
  std::vector<Space> subspaces;

  friend bool operator==(const ProductSpace&, const ProductSpace&);
};

struct MappingSpace {
  std::vector<std::pair<std::string, Space>> entries;

  friend bool operator==(const MappingSpace&, const MappingSpace&);
};

struct SequenceSpace {
  detail::Recursive<Space> element;

  friend bool operator==(const SequenceSpace&, const SequenceSpace&);
};

struct GraphSpace {
  detail::Recursive<Space> node_space;
  std::optional<detail::Recursive<Space>> edge_space;

  friend bool operator==(const GraphSpace&, const GraphSpace&);
};

struct OneOfSpace {
  std::vector<Space> alternatives;

  friend bool operator==(const OneOfSpace&, const OneOfSpace&);
};

enum class SpaceKind { box, discrete, multi_discrete, multi_binary, text, product, mapping, sequence, graph, one_of };

/// The set of valid observations or actions. Immutable once built; every
/// constructor validates its invariants and throws ErrorKind::InvalidSpace.
class Space {
 public:
  using Node = std::variant<BoxSpace, DiscreteSpace, MultiDiscreteSpace, MultiBinarySpace, TextSpace,
                            ProductSpace, MappingSpace, SequenceSpace, GraphSpace, OneOfSpace>;

  Space(BoxSpace s) : node_(std::move(s)) { validate(); }  // NOLINT(google-explicit-constructor)
  Space(DiscreteSpace s) : node_(s) { validate(); }  // NOLINT
  Space(MultiDiscreteSpace s) : node_(std::move(s)) { validate(); }  // NOLINT
  Space(MultiBinarySpace s) : node_(s) { validate(); }  // NOLINT
  Space(TextSpace s) : node_(std::move(s)) { validate(); }  // NOLINT
  Space(ProductSpace s) : node_(std::move(s)) { validate(); }  // NOLINT
  Space(MappingSpace s) : node_(std::move(s)) { validate(); }  // NOLINT
  Space(SequenceSpace s) : node_(std::move(s)) { validate(); }  // NOLINT
  Space(GraphSpace s) : node_(std::move(s)) { validate(); }  // NOLINT
  Space(OneOfSpace s) : node_(std::move(s)) { validate(); }  // NOLINT

  // Convenience builders.
  static Space box(std::vector<double> low, std::vector<double> high, Shape shape, DType dtype = DType::real64) {
    return BoxSpace{std::move(low), std::move(high), std::move(shape), dtype};
  }
  /// Box with the same scalar bound on every element.
  static Space box(double low, double high, Shape shape, DType dtype = DType::real64) {
    const auto n = static_cast<std::size_t>(shape_size(shape));
    return BoxSpace{std::vector<double>(n, low), std::vector<double>(n, high), std::move(shape), dtype};
  }
  /// One-dimensional Box from bound vectors.
  static Space box(std::vector<double> low, std::vector<double> high) {
    Shape shape{static_cast<std::int64_t>(low.size())};
    return BoxSpace{std::move(low), std::move(high), std::move(shape), DType::real64};
  }
  static Space discrete(std::int64_t n, std::int64_t start = 0) { return DiscreteSpace{n, start}; }
  static Space multi_discrete(std::vector<std::int64_t> nvec) { return MultiDiscreteSpace{std::move(nvec)}; }
  static Space multi_binary(std::int64_t n) { return MultiBinarySpace{n}; }
  static Space text(std::size_t min_length, std::size_t max_length, std::string charset = alphanumeric_charset()) {
    return TextSpace{min_length, max_length, std::move(charset)};
  }
  static Space product(std::vector<Space> subspaces) { return ProductSpace{std::move(subspaces)}; }
  static Space mapping(std::vector<std::pair<std::string, Space>> entries) { return MappingSpace{std::move(entries)}; }
  static Space sequence(Space element) { return SequenceSpace{std::move(element)}; }
  static Space graph(Space node_space, std::optional<Space> edge_space = std::nullopt) {
    GraphSpace g{std::move(node_space), std::nullopt};
    if (edge_space) g.edge_space.emplace(std::move(*edge_space));
    return g;
  }
  static Space one_of(std::vector<Space> alternatives) { return OneOfSpace{std::move(alternatives)}; }

  SpaceKind kind() const noexcept { return static_cast<SpaceKind>(node_.index()); }
  const Node& node() const noexcept { return node_; }

  template <typename T>
  const T* get_if() const noexcept { return std::get_if<T>(&node_); }
  template <typename T>
  const T& as() const { return std::get<T>(node_); }

  friend bool operator==(const Space& a, const Space& b) { return a.node_ == b.node_; }

 private:
  void validate() const;

  Node node_;
};

inline bool operator==(const ProductSpace& a, const ProductSpace& b) { return a.subspaces == b.subspaces; }
inline bool operator==(const MappingSpace& a, const MappingSpace& b) { return a.entries == b.entries; }
inline bool operator==(const SequenceSpace& a, const SequenceSpace& b) { return a.element == b.element; }
inline bool operator==(const GraphSpace& a, const GraphSpace& b) {
  return a.node_space == b.node_space && a.edge_space == b.edge_space;
}
inline bool operator==(const OneOfSpace& a, const OneOfSpace& b) { return a.alternatives == b.alternatives; }

inline std::string_view space_kind_name(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::box: return "box";
    case SpaceKind::discrete: return "discrete";
    case SpaceKind::multi_discrete: return "multi_discrete";
    case SpaceKind::multi_binary: return "multi_binary";
    case SpaceKind::text: return "text";
    case SpaceKind::product: return "tuple";
    case SpaceKind::mapping: return "dict";
    case SpaceKind::sequence: return "sequence";
    case SpaceKind::graph: return "graph";
    case SpaceKind::one_of: return "one_of";
  }
  return "unknown";
}

inline void Space::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidSpace, msg); };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSpace>) {
          for (auto d : s.shape)
            if (d < 0) fail("Box shape has a negative dimension");
          const auto n = static_cast<std::size_t>(shape_size(s.shape));
          if (s.low.size() != n || s.high.size() != n) fail("Box bounds do not match its shape");
          for (std::size_t i = 0; i < n; ++i) {
            if (std::isnan(s.low[i]) || std::isnan(s.high[i])) fail("Box bounds contain NaN");
            if (s.low[i] > s.high[i]) fail("Box low exceeds high at element " + std::to_string(i));
            if (s.dtype == DType::int64) {
              if (!std::isfinite(s.low[i]) || !std::isfinite(s.high[i]))
                fail("integer Box bounds must be finite");
              if (std::trunc(s.low[i]) != s.low[i] || std::trunc(s.high[i]) != s.high[i])
                fail("integer Box bounds must be integral");
              if (std::abs(s.low[i]) > 0x1.0p53 || std::abs(s.high[i]) > 0x1.0p53)
                fail("integer Box bounds must lie within +-2^53");
            }
          }
        } else if constexpr (std::is_same_v<T, DiscreteSpace>) {
          if (s.n < 1) fail("Discrete n must be >= 1");
        } else if constexpr (std::is_same_v<T, MultiDiscreteSpace>) {
          if (s.nvec.empty()) fail("MultiDiscrete nvec must be non-empty");
          for (auto n : s.nvec)
            if (n < 1) fail("MultiDiscrete entries must be >= 1");
        } else if constexpr (std::is_same_v<T, MultiBinarySpace>) {
          if (s.n < 1) fail("MultiBinary n must be >= 1");
        } else if constexpr (std::is_same_v<T, TextSpace>) {
          if (s.charset.empty()) fail("Text charset must be non-empty");
          if (s.min_length > s.max_length) fail("Text min_length exceeds max_length");
          if (std::set<char>(s.charset.begin(), s.charset.end()).size() != s.charset.size())
            fail("Text charset contains duplicates");
        } else if constexpr (std::is_same_v<T, ProductSpace>) {
          if (s.subspaces.empty()) fail("Product needs at least one subspace");
        } else if constexpr (std::is_same_v<T, MappingSpace>) {
          std::set<std::string> keys;
          for (const auto& [key, sub] : s.entries)
            if (!keys.insert(key).second) fail("Mapping key '" + key + "' is duplicated");
        } else if constexpr (std::is_same_v<T, GraphSpace>) {
          auto leaf = [](const Space& sp) {
            return sp.kind() == SpaceKind::box || sp.kind() == SpaceKind::discrete;
          };
          if (!leaf(*s.node_space)) fail("Graph node space must be Box or Discrete");
          if (s.edge_space && !leaf(**s.edge_space)) fail("Graph edge space must be Box or Discrete");
        } else if constexpr (std::is_same_v<T, OneOfSpace>) {
          if (s.alternatives.empty()) fail("OneOf needs at least one alternative");
        }
      },
      node_);
}

// ---------------------------------------------------------------------------
// Membership

namespace detail {

template <typename T>
bool box_contains(const BoxSpace& box, const NdArray<T>& a) {
  if (a.shape != box.shape || a.data.size() != box.low.size()) return false;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const auto x = static_cast<double>(a.data[i]);
    if (std::isnan(x) || x < box.low[i] || x > box.high[i]) return false;
  }
  return true;
}

}  // namespace detail

/// Structural and numeric membership. Never throws on a mismatched value.
inline bool contains(const Space& space, const Value& value) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSpace>) {
          if (s.dtype == DType::real64) {
            const auto* a = value.get_if<RealArray>();
            return a && detail::box_contains(s, *a);
          }
          const auto* a = value.get_if<IntArray>();
          return a && detail::box_contains(s, *a);
        } else if constexpr (std::is_same_v<T, DiscreteSpace>) {
          const auto* v = value.get_if<std::int64_t>();
          return v && *v >= s.start && *v - s.start < s.n;
        } else if constexpr (std::is_same_v<T, MultiDiscreteSpace>) {
          const auto* a = value.get_if<IntArray>();
          if (!a || a->shape != Shape{static_cast<std::int64_t>(s.nvec.size())} || a->data.size() != s.nvec.size())
            return false;
          for (std::size_t i = 0; i < s.nvec.size(); ++i)
            if (a->data[i] < 0 || a->data[i] >= s.nvec[i]) return false;
          return true;
        } else if constexpr (std::is_same_v<T, MultiBinarySpace>) {
          const auto* a = value.get_if<IntArray>();
          if (!a || a->shape != Shape{s.n} || a->data.size() != static_cast<std::size_t>(s.n)) return false;
          return std::all_of(a->data.begin(), a->data.end(), [](auto b) { return b == 0 || b == 1; });
        } else if constexpr (std::is_same_v<T, TextSpace>) {
          const auto* str = value.get_if<std::string>();
          if (!str || str->size() < s.min_length || str->size() > s.max_length) return false;
          return std::all_of(str->begin(), str->end(),
                             [&](char c) { return s.charset.find(c) != std::string::npos; });
        } else if constexpr (std::is_same_v<T, ProductSpace>) {
          const auto* l = value.get_if<ValueList>();
          if (!l || l->size() != s.subspaces.size()) return false;
          for (std::size_t i = 0; i < l->size(); ++i)
            if (!contains(s.subspaces[i], (*l)[i])) return false;
          return true;
        } else if constexpr (std::is_same_v<T, MappingSpace>) {
          const auto* m = value.get_if<ValueMap>();
          if (!m || m->size() != s.entries.size()) return false;
          for (const auto& [key, sub] : s.entries) {
            auto it = std::find_if(m->begin(), m->end(), [&](const auto& kv) { return kv.first == key; });
            if (it == m->end() || !contains(sub, it->second)) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, SequenceSpace>) {
          const auto* l = value.get_if<ValueList>();
          if (!l) return false;
          return std::all_of(l->begin(), l->end(), [&](const Value& v) { return contains(*s.element, v); });
        } else if constexpr (std::is_same_v<T, GraphSpace>) {
          const auto* g = value.get_if<GraphValue>();
          if (!g) return false;
          for (const auto& node : g->nodes)
            if (!contains(*s.node_space, node)) return false;
          if (!s.edge_space) return g->edges.empty() && g->edge_links.empty();
          if (g->edges.size() != g->edge_links.size()) return false;
          for (const auto& edge : g->edges)
            if (!contains(**s.edge_space, edge)) return false;
          const auto num_nodes = static_cast<std::int64_t>(g->nodes.size());
          for (const auto& link : g->edge_links)
            for (auto endpoint : link)
              if (endpoint < 0 || endpoint >= num_nodes) return false;
          return true;
        } else {
          static_assert(std::is_same_v<T, OneOfSpace>);
          const auto* t = value.get_if<TaggedValue>();
          return t && t->index < s.alternatives.size() && contains(s.alternatives[t->index], *t->value);
        }
      },
      space.node());
}

// ---------------------------------------------------------------------------
// Sampling

namespace detail {

inline constexpr double kSequenceStopProbability = 0.25;
inline constexpr std::size_t kSequenceMaxLength = 16;
inline constexpr std::int64_t kGraphMaxNodes = 10;

inline double sample_box_element(double low, double high, Rng& rng) {
  const bool low_finite = std::isfinite(low);
  const bool high_finite = std::isfinite(high);
  if (low_finite && high_finite) return std::clamp(low + (high - low) * rng.next_double(), low, high);
  if (!low_finite && !high_finite) return rng.normal();
  if (low_finite) return low + rng.exponential();
  return high - rng.exponential();
}

}  // namespace detail

/// Draws a member of `space`. Same rng state gives the same sample.
///
/// Box: uniform when both bounds are finite, standard normal when both are
/// infinite, bound plus/minus a standard exponential when half-bounded;
/// integer Boxes draw uniformly over the inclusive range. Sequence length is
/// geometric (stop probability 0.25, at most 16). Graphs have 1..10 nodes and
/// 0..2*nodes edges with uniform endpoints.
inline Value sample(const Space& space, Rng& rng) {
  return std::visit(
      [&](const auto& s) -> Value {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSpace>) {
          if (s.dtype == DType::real64) {
            std::vector<double> data(s.low.size());
            for (std::size_t i = 0; i < data.size(); ++i) data[i] = detail::sample_box_element(s.low[i], s.high[i], rng);
            return RealArray(s.shape, std::move(data));
          }
          std::vector<std::int64_t> data(s.low.size());
          for (std::size_t i = 0; i < data.size(); ++i)
            data[i] = rng.integer(static_cast<std::int64_t>(s.low[i]), static_cast<std::int64_t>(s.high[i]));
          return IntArray(s.shape, std::move(data));
        } else if constexpr (std::is_same_v<T, DiscreteSpace>) {
          return s.start + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(s.n)));
        } else if constexpr (std::is_same_v<T, MultiDiscreteSpace>) {
          std::vector<std::int64_t> data(s.nvec.size());
          for (std::size_t i = 0; i < data.size(); ++i)
            data[i] = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(s.nvec[i])));
          return IntArray(std::move(data));
        } else if constexpr (std::is_same_v<T, MultiBinarySpace>) {
          std::vector<std::int64_t> data(static_cast<std::size_t>(s.n));
          for (auto& b : data) b = static_cast<std::int64_t>(rng.next() >> 63);
          return IntArray(std::move(data));
        } else if constexpr (std::is_same_v<T, TextSpace>) {
          const auto length = static_cast<std::size_t>(
              rng.integer(static_cast<std::int64_t>(s.min_length), static_cast<std::int64_t>(s.max_length)));
          std::string text(length, ' ');
          for (auto& c : text) c = s.charset[rng.next_below(s.charset.size())];
          return text;
        } else if constexpr (std::is_same_v<T, ProductSpace>) {
          ValueList out;
          out.reserve(s.subspaces.size());
          for (const auto& sub : s.subspaces) out.push_back(sample(sub, rng));
          return out;
        } else if constexpr (std::is_same_v<T, MappingSpace>) {
          ValueMap out;
          out.reserve(s.entries.size());
          for (const auto& [key, sub] : s.entries) out.emplace_back(key, sample(sub, rng));
          return out;
        } else if constexpr (std::is_same_v<T, SequenceSpace>) {
          ValueList out;
          while (out.size() < detail::kSequenceMaxLength && rng.next_double() >= detail::kSequenceStopProbability)
            out.push_back(sample(*s.element, rng));
          return out;
        } else if constexpr (std::is_same_v<T, GraphSpace>) {
          GraphValue g;
          const auto num_nodes = rng.integer(1, detail::kGraphMaxNodes);
          for (std::int64_t i = 0; i < num_nodes; ++i) g.nodes.push_back(sample(*s.node_space, rng));
          if (s.edge_space) {
            const auto num_edges = rng.integer(0, 2 * num_nodes);
            for (std::int64_t i = 0; i < num_edges; ++i) {
              g.edges.push_back(sample(**s.edge_space, rng));
              const auto from = rng.integer(0, num_nodes - 1);
              const auto to = rng.integer(0, num_nodes - 1);
              g.edge_links.push_back({from, to});
            }
          }
          return g;
        } else {
          static_assert(std::is_same_v<T, OneOfSpace>);
          const auto index = static_cast<std::size_t>(rng.next_below(s.alternatives.size()));
          return TaggedValue{index, sample(s.alternatives[index], rng)};
        }
      },
      space.node());
}

// ---------------------------------------------------------------------------
// Printing

inline std::ostream& operator<<(std::ostream& os, const Space& space) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSpace>) {
          os << "Box(shape=[";
          for (std::size_t i = 0; i < s.shape.size(); ++i) os << (i ? ", " : "") << s.shape[i];
          os << "], dtype=" << (s.dtype == DType::real64 ? "float64" : "int64") << ')';
        } else if constexpr (std::is_same_v<T, DiscreteSpace>) {
          os << "Discrete(" << s.n;
          if (s.start != 0) os << ", start=" << s.start;
          os << ')';
        } else if constexpr (std::is_same_v<T, MultiDiscreteSpace>) {
          os << "MultiDiscrete([";
          for (std::size_t i = 0; i < s.nvec.size(); ++i) os << (i ? ", " : "") << s.nvec[i];
          os << "])";
        } else if constexpr (std::is_same_v<T, MultiBinarySpace>) {
          os << "MultiBinary(" << s.n << ')';
        } else if constexpr (std::is_same_v<T, TextSpace>) {
          os << "Text(" << s.min_length << ", " << s.max_length << ')';
        } else if constexpr (std::is_same_v<T, ProductSpace>) {
          os << "Tuple(";
          for (std::size_t i = 0; i < s.subspaces.size(); ++i) os << (i ? ", " : "") << s.subspaces[i];
          os << ')';
        } else if constexpr (std::is_same_v<T, MappingSpace>) {
          os << "Dict(";
          for (std::size_t i = 0; i < s.entries.size(); ++i)
            os << (i ? ", " : "") << s.entries[i].first << ": " << s.entries[i].second;
          os << ')';
        } else if constexpr (std::is_same_v<T, SequenceSpace>) {
          os << "Sequence(" << *s.element << ')';
        } else if constexpr (std::is_same_v<T, GraphSpace>) {
          os << "Graph(" << *s.node_space;
          if (s.edge_space) os << ", " << **s.edge_space;
          os << ')';
        } else {
          os << "OneOf(";
          for (std::size_t i = 0; i < s.alternatives.size(); ++i) os << (i ? ", " : "") << s.alternatives[i];
          os << ')';
        }
      },
      space.node());
  return os;
}

inline std::string to_string(const Space& space) {
  std::ostringstream os;
  os << space;
  return os.str();
}

}  // namespace gymkit
