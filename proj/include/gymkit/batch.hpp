#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gymkit/error.hpp"
#include "gymkit/space.hpp"
#include "gymkit/value.hpp"

namespace gymkit {

namespace detail {

inline Space stacked_int_box(const std::vector<double>& low, const std::vector<double>& high, Shape inner,
                             std::size_t n) {
  std::vector<double> lo;
  std::vector<double> hi;
  lo.reserve(low.size() * n);
  hi.reserve(high.size() * n);
  for (std::size_t i = 0; i < n; ++i) {
    lo.insert(lo.end(), low.begin(), low.end());
    hi.insert(hi.end(), high.begin(), high.end());
  }
  Shape shape{static_cast<std::int64_t>(n)};
  shape.insert(shape.end(), inner.begin(), inner.end());
  return Space::box(std::move(lo), std::move(hi), std::move(shape), DType::int64);
}

inline Space copies(const Space& space, std::size_t n) {
  return Space::product(std::vector<Space>(n, space));
}

}  // namespace detail

/// Space of n stacked samples.
///   Box -> Box with a leading axis of n
///   Discrete{k} -> MultiDiscrete([k] * n)  (integer Box when start != 0)
///   MultiDiscrete, MultiBinary -> integer Box with a leading axis of n
///   Product, Mapping -> children batched recursively
///   Text, Sequence, Graph, OneOf -> Product of n copies
inline Space batch_space(const Space& space, std::size_t n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "batch size must be >= 1");
  return std::visit(
      [&](const auto& s) -> Space {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSpace>) {
          BoxSpace out{{}, {}, {static_cast<std::int64_t>(n)}, s.dtype};
          out.shape.insert(out.shape.end(), s.shape.begin(), s.shape.end());
          for (std::size_t i = 0; i < n; ++i) {
            out.low.insert(out.low.end(), s.low.begin(), s.low.end());
            out.high.insert(out.high.end(), s.high.begin(), s.high.end());
          }
          return out;
        } else if constexpr (std::is_same_v<T, DiscreteSpace>) {
          if (s.start == 0) return Space::multi_discrete(std::vector<std::int64_t>(n, s.n));
          const auto lo = static_cast<double>(s.start);
          const auto hi = static_cast<double>(s.start + s.n - 1);
          return Space::box(lo, hi, Shape{static_cast<std::int64_t>(n)}, DType::int64);
        } else if constexpr (std::is_same_v<T, MultiDiscreteSpace>) {
          std::vector<double> low(s.nvec.size(), 0.0);
          std::vector<double> high;
          for (auto k : s.nvec) high.push_back(static_cast<double>(k - 1));
          return detail::stacked_int_box(low, high, Shape{static_cast<std::int64_t>(s.nvec.size())}, n);
        } else if constexpr (std::is_same_v<T, MultiBinarySpace>) {
          const auto m = static_cast<std::size_t>(s.n);
          return detail::stacked_int_box(std::vector<double>(m, 0.0), std::vector<double>(m, 1.0), Shape{s.n}, n);
        } else if constexpr (std::is_same_v<T, ProductSpace>) {
          std::vector<Space> subs;
          for (const auto& sub : s.subspaces) subs.push_back(batch_space(sub, n));
          return Space::product(std::move(subs));
        } else if constexpr (std::is_same_v<T, MappingSpace>) {
          std::vector<std::pair<std::string, Space>> entries;
          for (const auto& [key, sub] : s.entries) entries.emplace_back(key, batch_space(sub, n));
          return Space::mapping(std::move(entries));
        } else {
          return detail::copies(space, n);
        }
      },
      space.node());
}

namespace detail {

template <typename T>
NdArray<T> stack_arrays(const std::vector<const NdArray<T>*>& parts) {
  Shape shape{static_cast<std::int64_t>(parts.size())};
  shape.insert(shape.end(), parts.front()->shape.begin(), parts.front()->shape.end());
  std::vector<T> data;
  data.reserve(parts.size() * parts.front()->data.size());
  for (const auto* p : parts) data.insert(data.end(), p->data.begin(), p->data.end());
  return NdArray<T>(std::move(shape), std::move(data));
}

template <typename T>
std::vector<NdArray<T>> unstack_array(const NdArray<T>& batched) {
  const auto n = static_cast<std::size_t>(batched.shape.front());
  Shape inner(batched.shape.begin() + 1, batched.shape.end());
  const auto stride = n == 0 ? 0 : batched.data.size() / n;
  std::vector<NdArray<T>> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto first = batched.data.begin() + static_cast<std::ptrdiff_t>(i * stride);
    out.emplace_back(inner, std::vector<T>(first, first + static_cast<std::ptrdiff_t>(stride)));
  }
  return out;
}

inline Value concatenate_unchecked(const Space& space, const std::vector<const Value*>& samples) {
  return std::visit(
      [&](const auto& s) -> Value {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSpace>) {
          if (s.dtype == DType::real64) {
            std::vector<const RealArray*> parts;
            for (const auto* v : samples) parts.push_back(&v->as_real());
            return stack_arrays(parts);
          }
          std::vector<const IntArray*> parts;
          for (const auto* v : samples) parts.push_back(&v->as_ints());
          return stack_arrays(parts);
        } else if constexpr (std::is_same_v<T, DiscreteSpace>) {
          std::vector<std::int64_t> data;
          for (const auto* v : samples) data.push_back(v->as_int());
          return IntArray(std::move(data));
        } else if constexpr (std::is_same_v<T, MultiDiscreteSpace> || std::is_same_v<T, MultiBinarySpace>) {
          std::vector<const IntArray*> parts;
          for (const auto* v : samples) parts.push_back(&v->as_ints());
          return stack_arrays(parts);
        } else if constexpr (std::is_same_v<T, ProductSpace>) {
          ValueList out;
          for (std::size_t i = 0; i < s.subspaces.size(); ++i) {
            std::vector<const Value*> column;
            for (const auto* v : samples) column.push_back(&v->as_list()[i]);
            out.push_back(concatenate_unchecked(s.subspaces[i], column));
          }
          return out;
        } else if constexpr (std::is_same_v<T, MappingSpace>) {
          ValueMap out;
          for (const auto& [key, sub] : s.entries) {
            std::vector<const Value*> column;
            for (const auto* v : samples) {
              const auto& m = v->as_map();
              auto it = std::find_if(m.begin(), m.end(), [&](const auto& kv) { return kv.first == key; });
              column.push_back(&it->second);
            }
            out.emplace_back(key, concatenate_unchecked(sub, column));
          }
          return out;
        } else {
          ValueList out;
          for (const auto* v : samples) out.push_back(*v);
          return out;
        }
      },
      space.node());
}

// Number of samples in a batched value, if its structure allows reading it.
inline std::optional<std::size_t> batch_length(const Space& space, const Value& batched) {
  return std::visit(
      [&](const auto& s) -> std::optional<std::size_t> {
        using T = std::decay_t<decltype(s)>;
        auto leading = [](const auto* a) -> std::optional<std::size_t> {
          if (!a || a->shape.empty() || a->shape.front() < 1) return std::nullopt;
          return static_cast<std::size_t>(a->shape.front());
        };
        if constexpr (std::is_same_v<T, BoxSpace>) {
          if (s.dtype == DType::real64) return leading(batched.get_if<RealArray>());
          return leading(batched.get_if<IntArray>());
        } else if constexpr (std::is_same_v<T, DiscreteSpace> || std::is_same_v<T, MultiDiscreteSpace> ||
                             std::is_same_v<T, MultiBinarySpace>) {
          return leading(batched.get_if<IntArray>());
        } else if constexpr (std::is_same_v<T, ProductSpace>) {
          const auto* l = batched.get_if<ValueList>();
          if (!l || l->size() != s.subspaces.size()) return std::nullopt;
          return batch_length(s.subspaces.front(), l->front());
        } else if constexpr (std::is_same_v<T, MappingSpace>) {
          const auto* m = batched.get_if<ValueMap>();
          if (!m || s.entries.empty()) return std::nullopt;
          const auto& [key, sub] = s.entries.front();
          auto it = std::find_if(m->begin(), m->end(), [&](const auto& kv) { return kv.first == key; });
          if (it == m->end()) return std::nullopt;
          return batch_length(sub, it->second);
        } else {
          const auto* l = batched.get_if<ValueList>();
          if (!l || l->empty()) return std::nullopt;
          return l->size();
        }
      },
      space.node());
}

inline std::vector<Value> iterate_unchecked(const Space& space, const Value& batched, std::size_t n) {
  return std::visit(
      [&](const auto& s) -> std::vector<Value> {
        using T = std::decay_t<decltype(s)>;
        std::vector<Value> out;
        out.reserve(n);
        if constexpr (std::is_same_v<T, BoxSpace>) {
          if (s.dtype == DType::real64) {
            for (auto& a : unstack_array(batched.as_real())) out.emplace_back(std::move(a));
          } else {
            for (auto& a : unstack_array(batched.as_ints())) out.emplace_back(std::move(a));
          }
        } else if constexpr (std::is_same_v<T, DiscreteSpace>) {
          for (auto x : batched.as_ints().data) out.emplace_back(x);
        } else if constexpr (std::is_same_v<T, MultiDiscreteSpace> || std::is_same_v<T, MultiBinarySpace>) {
          for (auto& a : unstack_array(batched.as_ints())) out.emplace_back(std::move(a));
        } else if constexpr (std::is_same_v<T, ProductSpace>) {
          std::vector<std::vector<Value>> columns;
          for (std::size_t i = 0; i < s.subspaces.size(); ++i)
            columns.push_back(iterate_unchecked(s.subspaces[i], batched.as_list()[i], n));
          for (std::size_t j = 0; j < n; ++j) {
            ValueList row;
            for (auto& column : columns) row.push_back(std::move(column[j]));
            out.emplace_back(std::move(row));
          }
        } else if constexpr (std::is_same_v<T, MappingSpace>) {
          const auto& m = batched.as_map();
          std::vector<std::vector<Value>> columns;
          for (const auto& [key, sub] : s.entries) {
            auto it = std::find_if(m.begin(), m.end(), [&](const auto& kv) { return kv.first == key; });
            columns.push_back(iterate_unchecked(sub, it->second, n));
          }
          for (std::size_t j = 0; j < n; ++j) {
            ValueMap row;
            for (std::size_t i = 0; i < s.entries.size(); ++i) row.emplace_back(s.entries[i].first, std::move(columns[i][j]));
            out.emplace_back(std::move(row));
          }
        } else {
          out = batched.as_list();
        }
        return out;
      },
      space.node());
}

}  // namespace detail

/// Stacks samples into a member of batch_space(space, samples.size()), preserving order.
inline Value concatenate(const Space& space, const std::vector<Value>& samples) {
  if (samples.empty()) throw Error(ErrorKind::EmptyBatch, "cannot concatenate an empty list of samples");
  std::vector<const Value*> ptrs;
  ptrs.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!contains(space, samples[i]))
      throw Error(ErrorKind::ValueNotInSpace, "sample " + std::to_string(i) + " is not in " + to_string(space));
    ptrs.push_back(&samples[i]);
  }
  return detail::concatenate_unchecked(space, ptrs);
}

/// Left inverse of concatenate: splits a batched value back into samples.
inline std::vector<Value> iterate(const Space& space, const Value& batched) {
  const auto n = detail::batch_length(space, batched);
  if (!n || !contains(batch_space(space, *n), batched))
    throw Error(ErrorKind::NotABatch, "value is not a batch of " + to_string(space));
  return detail::iterate_unchecked(space, batched, *n);
}

}  // namespace gymkit
