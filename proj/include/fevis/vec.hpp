// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>

namespace fevis {

/// Fixed-size point/vector storage.  Meshes are 2-D or 3-D at runtime; 2-D
/// code uses the first two components and keeps the third at zero.
using Vec3 = std::array<double, 3>;

inline constexpr Vec3 vec_add(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline constexpr Vec3 vec_sub(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline constexpr Vec3 vec_scale(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}

inline constexpr double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1],
          a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 normalized(const Vec3& a) {
  const double n = norm(a);
  return {a[0] / n, a[1] / n, a[2] / n};
}

inline double distance(const Vec3& a, const Vec3& b) { return norm(vec_sub(a, b)); }

inline std::string vec_to_string(const Vec3& a, int dim) {
  std::string s = "(" + std::to_string(a[0]);
  for (int d = 1; d < dim; ++d) s += ", " + std::to_string(a[d]);
  return s + ")";
}

} // namespace fevis
