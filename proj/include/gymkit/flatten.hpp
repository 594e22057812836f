#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gymkit/error.hpp"
#include "gymkit/space.hpp"
#include "gymkit/value.hpp"

namespace gymkit {

using FlatVector = std::vector<double>;

/// Length of the flat encoding. Discrete and MultiDiscrete dimensions are one-hot;
/// OneOf takes one tag slot plus room for every alternative.
inline std::int64_t flatdim(const Space& space) {
  return std::visit(
      [&](const auto& s) -> std::int64_t {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSpace>) {
          return shape_size(s.shape);
        } else if constexpr (std::is_same_v<T, DiscreteSpace>) {
          return s.n;
        } else if constexpr (std::is_same_v<T, MultiDiscreteSpace>) {
          std::int64_t total = 0;
          for (auto n : s.nvec) total += n;
          return total;
        } else if constexpr (std::is_same_v<T, MultiBinarySpace>) {
          return s.n;
        } else if constexpr (std::is_same_v<T, ProductSpace>) {
          std::int64_t total = 0;
          for (const auto& sub : s.subspaces) total += flatdim(sub);
          return total;
        } else if constexpr (std::is_same_v<T, MappingSpace>) {
          std::int64_t total = 0;
          for (const auto& [key, sub] : s.entries) total += flatdim(sub);
          return total;
        } else if constexpr (std::is_same_v<T, OneOfSpace>) {
          std::int64_t total = 1;
          for (const auto& sub : s.alternatives) total += flatdim(sub);
          return total;
        } else {
          throw Error(ErrorKind::UnflattenableSpace, to_string(space) + " has no fixed flat dimension");
        }
      },
      space.node());
}

inline bool is_flattenable(const Space& space) {
  try {
    (void)flatdim(space);
    return true;
  } catch (const Error&) {
    return false;
  }
}

namespace detail {

inline void flatten_into(const Space& space, const Value& value, FlatVector& out) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSpace>) {
          if (s.dtype == DType::real64) {
            const auto& a = value.as_real();
            out.insert(out.end(), a.data.begin(), a.data.end());
          } else {
            for (auto x : value.as_ints().data) out.push_back(static_cast<double>(x));
          }
        } else if constexpr (std::is_same_v<T, DiscreteSpace>) {
          const auto offset = out.size();
          out.resize(offset + static_cast<std::size_t>(s.n), 0.0);
          out[offset + static_cast<std::size_t>(value.as_int() - s.start)] = 1.0;
        } else if constexpr (std::is_same_v<T, MultiDiscreteSpace>) {
          const auto& a = value.as_ints();
          for (std::size_t i = 0; i < s.nvec.size(); ++i) {
            const auto offset = out.size();
            out.resize(offset + static_cast<std::size_t>(s.nvec[i]), 0.0);
            out[offset + static_cast<std::size_t>(a.data[i])] = 1.0;
          }
        } else if constexpr (std::is_same_v<T, MultiBinarySpace>) {
          for (auto x : value.as_ints().data) out.push_back(static_cast<double>(x));
        } else if constexpr (std::is_same_v<T, ProductSpace>) {
          const auto& l = value.as_list();
          for (std::size_t i = 0; i < s.subspaces.size(); ++i) flatten_into(s.subspaces[i], l[i], out);
        } else if constexpr (std::is_same_v<T, MappingSpace>) {
          const auto& m = value.as_map();
          for (const auto& [key, sub] : s.entries) {
            auto it = std::find_if(m.begin(), m.end(), [&](const auto& kv) { return kv.first == key; });
            flatten_into(sub, it->second, out);
          }
        } else if constexpr (std::is_same_v<T, OneOfSpace>) {
          const auto& t = value.as_tagged();
          out.push_back(static_cast<double>(t.index));
          for (std::size_t i = 0; i < s.alternatives.size(); ++i) {
            if (i == t.index) {
              flatten_into(s.alternatives[i], *t.value, out);
            } else {
              out.resize(out.size() + static_cast<std::size_t>(flatdim(s.alternatives[i])), 0.0);
            }
          }
        }
      },
      space.node());
}

/// Lowest-index argmax of a one-hot block. A block with no positive entry
/// carries no information and is rejected.
inline std::size_t decode_one_hot(std::span<const double> block) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < block.size(); ++i)
    if (block[i] > block[best]) best = i;
  if (!(block[best] > 0.0)) throw Error(ErrorKind::MalformedEncoding, "one-hot block has no positive entry");
  return best;
}

class FlatReader {
 public:
  explicit FlatReader(std::span<const double> flat) : flat_(flat) {}

  std::span<const double> take(std::size_t n) {
    auto block = flat_.subspan(pos_, n);
    pos_ += n;
    return block;
  }

 private:
  std::span<const double> flat_;
  std::size_t pos_ = 0;
};

inline Value unflatten_from(const Space& space, FlatReader& in) {
  return std::visit(
      [&](const auto& s) -> Value {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSpace>) {
          auto block = in.take(s.low.size());
          if (s.dtype == DType::real64) return RealArray(s.shape, {block.begin(), block.end()});
          std::vector<std::int64_t> data(block.size());
          for (std::size_t i = 0; i < block.size(); ++i) data[i] = std::llround(block[i]);
          return IntArray(s.shape, std::move(data));
        } else if constexpr (std::is_same_v<T, DiscreteSpace>) {
          return s.start + static_cast<std::int64_t>(decode_one_hot(in.take(static_cast<std::size_t>(s.n))));
        } else if constexpr (std::is_same_v<T, MultiDiscreteSpace>) {
          std::vector<std::int64_t> data;
          data.reserve(s.nvec.size());
          for (auto n : s.nvec)
            data.push_back(static_cast<std::int64_t>(decode_one_hot(in.take(static_cast<std::size_t>(n)))));
          return IntArray(std::move(data));
        } else if constexpr (std::is_same_v<T, MultiBinarySpace>) {
          auto block = in.take(static_cast<std::size_t>(s.n));
          std::vector<std::int64_t> data(block.size());
          for (std::size_t i = 0; i < block.size(); ++i) data[i] = block[i] >= 0.5 ? 1 : 0;
          return IntArray(std::move(data));
        } else if constexpr (std::is_same_v<T, ProductSpace>) {
          ValueList out;
          for (const auto& sub : s.subspaces) out.push_back(unflatten_from(sub, in));
          return out;
        } else if constexpr (std::is_same_v<T, MappingSpace>) {
          ValueMap out;
          for (const auto& [key, sub] : s.entries) out.emplace_back(key, unflatten_from(sub, in));
          return out;
        } else if constexpr (std::is_same_v<T, OneOfSpace>) {
          const double tag = in.take(1)[0];
          const auto index = std::llround(tag);
          if (!std::isfinite(tag) || index < 0 || static_cast<std::size_t>(index) >= s.alternatives.size())
            throw Error(ErrorKind::MalformedEncoding, "OneOf tag slot does not name an alternative");
          std::optional<Value> active;
          for (std::size_t i = 0; i < s.alternatives.size(); ++i) {
            if (i == static_cast<std::size_t>(index)) {
              active = unflatten_from(s.alternatives[i], in);
            } else {
              (void)in.take(static_cast<std::size_t>(flatdim(s.alternatives[i])));
            }
          }
          return TaggedValue{static_cast<std::size_t>(index), std::move(*active)};
        } else {
          throw Error(ErrorKind::UnflattenableSpace, to_string(space) + " cannot be unflattened");
        }
      },
      space.node());
}

}  // namespace detail

/// Deterministic flat encoding; real64 Box entries are copied verbatim.
inline FlatVector flatten(const Space& space, const Value& value) {
  const auto dim = flatdim(space);
  if (!contains(space, value)) throw Error(ErrorKind::ValueNotInSpace, "cannot flatten a value outside " + to_string(space));
  FlatVector out;
  out.reserve(static_cast<std::size_t>(dim));
  detail::flatten_into(space, value, out);
  return out;
}

/// Inverse of flatten. One-hot blocks decode by argmax (lowest index on ties).
inline Value unflatten(const Space& space, std::span<const double> flat) {
  const auto dim = flatdim(space);
  if (static_cast<std::int64_t>(flat.size()) != dim)
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(dim) + " elements, got " +
                                                  std::to_string(flat.size()));
  detail::FlatReader reader(flat);
  return detail::unflatten_from(space, reader);
}

/// Box of the flat encoding, with bounds derived from the source space.
inline Space flatten_space(const Space& space) {
  const auto dim = static_cast<std::size_t>(flatdim(space));
  std::vector<double> low;
  std::vector<double> high;
  low.reserve(dim);
  high.reserve(dim);
  auto append = [&](auto&& self, const Space& sp) -> void {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, BoxSpace>) {
            low.insert(low.end(), s.low.begin(), s.low.end());
            high.insert(high.end(), s.high.begin(), s.high.end());
          } else if constexpr (std::is_same_v<T, ProductSpace>) {
            for (const auto& sub : s.subspaces) self(self, sub);
          } else if constexpr (std::is_same_v<T, MappingSpace>) {
            for (const auto& [key, sub] : s.entries) self(self, sub);
          } else if constexpr (std::is_same_v<T, OneOfSpace>) {
            low.push_back(0.0);
            high.push_back(static_cast<double>(s.alternatives.size() - 1));
            // Inactive blocks are zero, so every bound must admit 0.
            for (const auto& sub : s.alternatives) {
              const auto start = low.size();
              self(self, sub);
              for (auto i = start; i < low.size(); ++i) {
                low[i] = std::min(low[i], 0.0);
                high[i] = std::max(high[i], 0.0);
              }
            }
          } else {
            const auto n = static_cast<std::size_t>(flatdim(sp));
            low.insert(low.end(), n, 0.0);
            high.insert(high.end(), n, 1.0);
          }
        },
        sp.node());
  };
  append(append, space);
  return Space::box(std::move(low), std::move(high), Shape{static_cast<std::int64_t>(dim)});
}

}  // namespace gymkit
