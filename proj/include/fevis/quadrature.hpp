// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "vec.hpp"

namespace fevis {

/// Highest supported quadrature exactness degree.
inline constexpr int kMaxQuadratureDegree = 20;

/// Quadrature rule on the reference simplex.  Weights sum to the reference
/// volume (1/2 in 2-D, 1/6 in 3-D) and are all strictly positive.
struct QuadratureRule {
  int dim = 2;
  int degree = 1;  ///< every polynomial up to this total degree is integrated exactly
  std::vector<Vec3> points;
  std::vector<double> weights;
};

namespace detail {

/// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on the
/// Legendre recurrence (no tables; accurate to machine precision).
inline void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 64; ++iter) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = (n == 1) ? 1.0 : n * (t * p1 - p0) / (t * t - 1.0);
      const double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-15) {
        // One polishing pass after convergence, then stop.
        p0 = 1.0;
        p1 = t;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (t * p1 - p0) / (t * t - 1.0);
        break;
      }
    }
    x[static_cast<std::size_t>(i)] = 0.5 * (t + 1.0);
    w[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

} // namespace detail

/// Build a rule exact for all polynomials of total degree <= degree.
/// Degree <= 2 uses the classic symmetric simplex rules; higher degrees use
/// collapsed-coordinate tensor Gauss-Legendre rules, whose weights are
/// positive by construction at every degree.
inline QuadratureRule quadrature_rule(int dim, int degree) {
  if (dim != 2 && dim != 3)
    throw ValidationError("quadrature_rule: dimension must be 2 or 3, got " +
                          std::to_string(dim));
  if (degree < 0 || degree > kMaxQuadratureDegree)
    throw ValidationError("quadrature_rule: degree must be in [0, " +
                          std::to_string(kMaxQuadratureDegree) + "], got " +
                          std::to_string(degree));

  QuadratureRule rule;
  rule.dim = dim;
  rule.degree = std::max(degree, 1);

  if (dim == 2 && degree <= 1) {
    rule.points = {{1.0 / 3.0, 1.0 / 3.0, 0.0}};
    rule.weights = {0.5};
    return rule;
  }
  if (dim == 2 && degree == 2) {
    rule.points = {{1.0 / 6.0, 1.0 / 6.0, 0.0},
                   {2.0 / 3.0, 1.0 / 6.0, 0.0},
                   {1.0 / 6.0, 2.0 / 3.0, 0.0}};
    rule.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
    return rule;
  }
  if (dim == 3 && degree <= 1) {
    rule.points = {{0.25, 0.25, 0.25}};
    rule.weights = {1.0 / 6.0};
    return rule;
  }
  if (dim == 3 && degree == 2) {
    const double a = (5.0 - std::sqrt(5.0)) / 20.0;
    const double b = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
    rule.points = {{a, a, a}, {b, a, a}, {a, b, a}, {a, a, b}};
    rule.weights = {1.0 / 24.0, 1.0 / 24.0, 1.0 / 24.0, 1.0 / 24.0};
    return rule;
  }

  // Collapsed tensor product: map the unit square/cube onto the simplex.
  // 2-D: (x, y) = (u, v(1-u)), Jacobian (1-u);
  // 3-D: (x, y, z) = (u, v(1-u), w(1-u)(1-v)), Jacobian (1-u)^2 (1-v).
  // A monomial of total degree p pulls back to 1-D degrees at most p+dim-1
  // in the first axis, so (degree+dim+1)/2 points per axis suffice.
  const int n1d = (degree + dim + 1) / 2;
  std::vector<double> gx, gw;
  detail::gauss_legendre_01(n1d, gx, gw);

  if (dim == 2) {
    for (int iu = 0; iu < n1d; ++iu)
      for (int iv = 0; iv < n1d; ++iv) {
        const double u = gx[static_cast<std::size_t>(iu)], v = gx[static_cast<std::size_t>(iv)];
        rule.points.push_back({u, v * (1.0 - u), 0.0});
        rule.weights.push_back(gw[static_cast<std::size_t>(iu)] * gw[static_cast<std::size_t>(iv)] * (1.0 - u));
      }
  } else {
    for (int iu = 0; iu < n1d; ++iu)
      for (int iv = 0; iv < n1d; ++iv)
        for (int iw = 0; iw < n1d; ++iw) {
          const double u = gx[static_cast<std::size_t>(iu)], v = gx[static_cast<std::size_t>(iv)],
                       w = gx[static_cast<std::size_t>(iw)];
          rule.points.push_back({u, v * (1.0 - u), w * (1.0 - u) * (1.0 - v)});
          rule.weights.push_back(gw[static_cast<std::size_t>(iu)] * gw[static_cast<std::size_t>(iv)] *
                                 gw[static_cast<std::size_t>(iw)] * (1.0 - u) * (1.0 - u) * (1.0 - v));
        }
  }
  return rule;
}

} // namespace fevis
