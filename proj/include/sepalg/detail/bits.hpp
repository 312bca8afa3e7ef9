#pragma once

#include <bit>
#include <cstdint>
#include <span>

namespace sepalg::detail {

inline bool words_equal(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

inline bool words_subset(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] & ~b[i]) return false;
  return true;
}

inline bool words_empty(std::span<const std::uint64_t> a) {
  for (std::uint64_t w : a)
    if (w) return false;
  return true;
}

inline bool words_disjoint(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] & b[i]) return false;
  return true;
}

// First index present in a but not in b; 0xffffffff when none.
inline std::uint32_t first_diff_bit(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::uint64_t d = a[i] & ~b[i];
    if (d) return static_cast<std::uint32_t>(i * 64 + std::countr_zero(d));
  }
  return 0xffffffffu;
}

template <typename Fn>
inline void for_each_bit(std::span<const std::uint64_t> words, Fn&& fn) {
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::uint64_t bits = words[i];
    while (bits) {
      fn(static_cast<std::uint32_t>(i * 64 + std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
}

}  // namespace sepalg::detail
