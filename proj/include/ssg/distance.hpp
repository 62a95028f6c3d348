#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>

namespace ssg {

// Squared Euclidean distance with 32-bit float accumulation. All internal
// comparisons run on squared distances (order-preserving); callers take the
// square root only where a true distance or an angle is required.
inline float squared_euclidean(const float* a, const float* b, std::size_t dim) {
  // 16-lane accumulation vectorizes to two full-width FMA chains under -O3.
  float acc[16] = {0.0f};
  std::size_t i = 0;
  for (; i + 16 <= dim; i += 16) {
    for (std::size_t j = 0; j < 16; ++j) {
      float d = a[i + j] - b[i + j];
      acc[j] += d * d;
    }
  }
  float total = 0.0f;
  for (std::size_t j = 0; j < 16; ++j) total += acc[j];
  for (; i < dim; ++i) {
    float d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

inline float squared_euclidean(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("squared_euclidean: dimension mismatch");
  return squared_euclidean(a.data(), b.data(), a.size());
}

}  // namespace ssg
