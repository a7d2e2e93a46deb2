// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include <fevis/render.hpp>
#include <fevis/vec.hpp>

namespace testutil {

/// Deterministic generator so failures reproduce bit-for-bit.
inline std::mt19937& rng() {
  static std::mt19937 gen(20260817u);
  return gen;
}

inline double uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng());
}

/// Rotate a square raster a quarter turn counterclockwise: destination pixel
/// (col, row) = (j, w-1-i) receives source pixel (i, j).
inline fevis::ImageGrid rotate90(const fevis::ImageGrid& img) {
  fevis::ImageGrid out;
  out.width = img.height;
  out.height = img.width;
  out.values.resize(img.values.size());
  for (int j = 0; j < img.height; ++j)
    for (int i = 0; i < img.width; ++i) {
      const double v =
          img.values[static_cast<std::size_t>(j) * static_cast<std::size_t>(img.width) +
                     static_cast<std::size_t>(i)];
      const int di = j;
      const int dj = img.width - 1 - i;
      out.values[static_cast<std::size_t>(dj) * static_cast<std::size_t>(out.width) +
                 static_cast<std::size_t>(di)] = v;
    }
  return out;
}

inline double max_abs_diff(const fevis::ImageGrid& a, const fevis::ImageGrid& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

/// A scratch file path inside the build tree that is unique per tag.
inline std::string scratch_path(const std::string& tag) {
  return "fevis_test_scratch_" + tag;
}

} // namespace testutil
