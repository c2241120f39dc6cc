#pragma once

#include <vector>

#include "dal/types.hpp"

namespace dal::detail {

// Separable d-dimensional moving sums over a flat lexicographic array
// (axis 0 slowest). Both modes run one pass per axis in O(sites).

/// "Valid" mode: windows of `width` consecutive entries fully inside the
/// array. Axis extent shrinks to extent - width + 1. Requires width <= extent.
template <typename T>
std::vector<T> moving_sum_valid(const std::vector<T>& data, std::vector<Index> dims, Index width) {
  std::vector<T> cur = data;
  const int d = static_cast<int>(dims.size());
  for (int axis = 0; axis < d; ++axis) {
    Index outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= dims[i];
    for (int i = axis + 1; i < d; ++i) inner *= dims[i];
    const Index n = dims[axis];
    const Index m = n - width + 1;
    std::vector<T> next(static_cast<size_t>(outer * m * inner), T(0));
    for (Index o = 0; o < outer; ++o) {
      for (Index in = 0; in < inner; ++in) {
        const T* src = cur.data() + (o * n) * inner + in;
        T* dst = next.data() + (o * m) * inner + in;
        T acc = T(0);
        for (Index j = 0; j < width; ++j) acc += src[j * inner];
        dst[0] = acc;
        for (Index j = 1; j < m; ++j) {
          acc += src[(j + width - 1) * inner] - src[(j - 1) * inner];
          dst[j * inner] = acc;
        }
      }
    }
    dims[axis] = m;
    cur.swap(next);
  }
  return cur;
}

/// "Same" mode with zero extension: output[i] = sum of data over the
/// centered window of half-width h, entries outside the array counting 0.
template <typename T>
std::vector<T> moving_sum_same(const std::vector<T>& data, const std::vector<Index>& dims, Index h) {
  std::vector<T> cur = data;
  const int d = static_cast<int>(dims.size());
  for (int axis = 0; axis < d; ++axis) {
    Index outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= dims[i];
    for (int i = axis + 1; i < d; ++i) inner *= dims[i];
    const Index n = dims[axis];
    std::vector<T> next(cur.size(), T(0));
    for (Index o = 0; o < outer; ++o) {
      for (Index in = 0; in < inner; ++in) {
        const T* src = cur.data() + (o * n) * inner + in;
        T* dst = next.data() + (o * n) * inner + in;
        T acc = T(0);
        for (Index j = 0; j <= std::min(h, n - 1); ++j) acc += src[j * inner];
        dst[0] = acc;
        for (Index j = 1; j < n; ++j) {
          Index add = j + h, sub = j - h - 1;
          if (add < n) acc += src[add * inner];
          if (sub >= 0) acc -= src[sub * inner];
          dst[j * inner] = acc;
        }
      }
    }
    cur.swap(next);
  }
  return cur;
}

}  // namespace dal::detail
