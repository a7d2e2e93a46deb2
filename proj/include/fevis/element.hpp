// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"
#include "vec.hpp"

namespace fevis {

/// Highest supported Lagrange degree.
inline constexpr int kMaxDegree = 10;

/// Largest basis size across supported elements: C(10+3, 3).
inline constexpr int kMaxBasisSize = 286;

/// Classification of a reference node by the sub-simplex that carries it.
enum class NodeClass { Vertex, Edge, Face, Interior };

struct BasisTabulation {
  int ndofs = 0;
  int dim = 0;
  std::vector<double> values;     ///< ndofs entries
  std::vector<double> gradients;  ///< ndofs x dim, row-major
};

/// Lagrange element of degree k on the reference simplex (vertices at the
/// origin and the unit points of each axis).  Nodes are the principal
/// lattice {xi = m/k : m in N^dim, |m| <= k} in lexicographic order (last
/// reference coordinate slowest).  The nodal basis is represented in the
/// Bernstein basis of the same degree; the coefficients come from solving
/// the Bernstein collocation system at the nodes.
struct ReferenceElement {
  int dim = 2;
  int degree = 1;
  int ndofs = 3;
  std::vector<Vec3> nodes;
  /// Integer barycentric coordinates of each node (entries sum to degree;
  /// slot 0 belongs to the origin vertex, slot d+1 to the unit point of
  /// axis d; unused slots hold 0).
  std::vector<std::array<int, 4>> node_bary;
  std::vector<NodeClass> node_classes;
  /// Sorted local-vertex slots with positive barycentric weight (-1 padded):
  /// the sub-simplex carrying the node.
  std::vector<std::array<int, 4>> node_carriers;

  /// Bernstein multi-indices (same lattice order) and their multinomial
  /// scale factors degree! / prod(a_i!).
  std::vector<std::array<int, 4>> bern_index;
  std::vector<double> bern_scale;
  /// ndofs x ndofs: nodal basis phi_i = sum_j coeff[j*ndofs + i] * B_j.
  std::vector<double> coeff;
};

namespace detail {

/// Dense partial-pivot LU solve helper for the collocation system.
struct DenseLu {
  int n = 0;
  std::vector<double> lu;   // row-major factors
  std::vector<int> perm;

  void factor(std::vector<double> a, int size) {
    n = size;
    lu = std::move(a);
    perm.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int col = 0; col < n; ++col) {
      int pivot = col;
      double best = std::abs(lu[static_cast<std::size_t>(col * n + col)]);
      for (int row = col + 1; row < n; ++row) {
        const double v = std::abs(lu[static_cast<std::size_t>(row * n + col)]);
        if (v > best) {
          best = v;
          pivot = row;
        }
      }
      if (!(best > 0.0))
        throw NumericError("singular basis collocation matrix");
      if (pivot != col) {
        for (int c = 0; c < n; ++c)
          std::swap(lu[static_cast<std::size_t>(col * n + c)], lu[static_cast<std::size_t>(pivot * n + c)]);
        std::swap(perm[static_cast<std::size_t>(col)], perm[static_cast<std::size_t>(pivot)]);
      }
      const double d = lu[static_cast<std::size_t>(col * n + col)];
      for (int row = col + 1; row < n; ++row) {
        const double m = lu[static_cast<std::size_t>(row * n + col)] / d;
        lu[static_cast<std::size_t>(row * n + col)] = m;
        for (int c = col + 1; c < n; ++c)
          lu[static_cast<std::size_t>(row * n + c)] -= m * lu[static_cast<std::size_t>(col * n + c)];
      }
    }
  }

  void solve(const double* rhs, double* x) const {
    std::vector<double> y(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      double v = rhs[perm[static_cast<std::size_t>(i)]];
      for (int c = 0; c < i; ++c) v -= lu[static_cast<std::size_t>(i * n + c)] * y[static_cast<std::size_t>(c)];
      y[static_cast<std::size_t>(i)] = v;
    }
    for (int i = n - 1; i >= 0; --i) {
      double v = y[static_cast<std::size_t>(i)];
      for (int c = i + 1; c < n; ++c) v -= lu[static_cast<std::size_t>(i * n + c)] * x[static_cast<std::size_t>(c)];
      x[static_cast<std::size_t>(i)] = v / lu[static_cast<std::size_t>(i * n + i)];
    }
  }
};

inline void bernstein_values(const ReferenceElement& elem, const Vec3& xi, double* out) {
  double lam[4] = {1.0, xi[0], xi[1], xi[2]};
  for (int d = 0; d < elem.dim; ++d) lam[0] -= xi[static_cast<std::size_t>(d)];
  for (int j = 0; j < elem.ndofs; ++j) {
    const auto& a = elem.bern_index[static_cast<std::size_t>(j)];
    double v = elem.bern_scale[static_cast<std::size_t>(j)];
    for (int c = 0; c <= elem.dim; ++c)
      for (int p = 0; p < a[static_cast<std::size_t>(c)]; ++p) v *= lam[c];
    out[j] = v;
  }
}

/// Gradients of the Bernstein basis with respect to xi, ndofs x dim
/// row-major.  Uses d(lam_0)/d(xi_d) = -1 and d(lam_{d+1})/d(xi_d) = 1.
inline void bernstein_gradients(const ReferenceElement& elem, const Vec3& xi, double* out) {
  double lam[4] = {1.0, xi[0], xi[1], xi[2]};
  for (int d = 0; d < elem.dim; ++d) lam[0] -= xi[static_cast<std::size_t>(d)];
  for (int j = 0; j < elem.ndofs; ++j) {
    const auto& a = elem.bern_index[static_cast<std::size_t>(j)];
    double dlam[4] = {0.0, 0.0, 0.0, 0.0};  // partial wrt each barycentric
    for (int c = 0; c <= elem.dim; ++c) {
      if (a[static_cast<std::size_t>(c)] == 0) continue;
      double v = elem.bern_scale[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(c)];
      for (int c2 = 0; c2 <= elem.dim; ++c2) {
        const int reps = a[static_cast<std::size_t>(c2)] - (c2 == c ? 1 : 0);
        for (int p = 0; p < reps; ++p) v *= lam[c2];
      }
      dlam[c] = v;
    }
    for (int d = 0; d < elem.dim; ++d)
      out[j * elem.dim + d] = dlam[d + 1] - dlam[0];
  }
}

inline void nodal_from_bernstein(const ReferenceElement& elem, const double* bern, double* out,
                                 int comps) {
  const int nd = elem.ndofs;
  for (int i = 0; i < nd * comps; ++i) out[i] = 0.0;
  for (int j = 0; j < nd; ++j)
    for (int comp = 0; comp < comps; ++comp) {
      const double bj = bern[j * comps + comp];
      if (bj == 0.0) continue;
      const double* row = elem.coeff.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(nd);
      for (int i = 0; i < nd; ++i) out[i * comps + comp] += row[i] * bj;
    }
}

/// Nodal basis values at xi written into out[ndofs] (no allocation).
inline void eval_basis_into(const ReferenceElement& elem, const Vec3& xi, double* out) {
  double bern[kMaxBasisSize];
  bernstein_values(elem, xi, bern);
  nodal_from_bernstein(elem, bern, out, 1);
}

/// Nodal basis gradients at xi written into out[ndofs*dim] (no allocation).
inline void eval_basis_gradients_into(const ReferenceElement& elem, const Vec3& xi, double* out) {
  double bern[kMaxBasisSize * 3];
  bernstein_gradients(elem, xi, bern);
  nodal_from_bernstein(elem, bern, out, elem.dim);
}

} // namespace detail

/// Build the degree-k Lagrange element; rejects k = 0 and k > kMaxDegree.
inline ReferenceElement lagrange_element(int dim, int degree) {
  if (dim != 2 && dim != 3)
    throw ValidationError("lagrange_element: dimension must be 2 or 3, got " +
                          std::to_string(dim));
  if (degree < 1 || degree > kMaxDegree)
    throw ValidationError("lagrange_element: degree must be in [1, " +
                          std::to_string(kMaxDegree) + "], got " + std::to_string(degree));

  ReferenceElement elem;
  elem.dim = dim;
  elem.degree = degree;

  // Principal lattice and (identical) Bernstein index enumeration.
  const int k = degree;
  const int kmax3 = (dim == 3) ? k : 0;
  for (int m3 = 0; m3 <= kmax3; ++m3)
    for (int m2 = 0; m2 + m3 <= k; ++m2)
      for (int m1 = 0; m1 + m2 + m3 <= k; ++m1) {
        const std::array<int, 4> bary{k - m1 - m2 - m3, m1, m2, m3};
        elem.node_bary.push_back(bary);
        elem.bern_index.push_back(bary);
        elem.nodes.push_back({static_cast<double>(m1) / k, static_cast<double>(m2) / k,
                              static_cast<double>(m3) / k});
      }
  elem.ndofs = static_cast<int>(elem.nodes.size());

  for (const auto& bary : elem.node_bary) {
    std::array<int, 4> carrier{-1, -1, -1, -1};
    int positives = 0;
    for (int c = 0; c <= dim; ++c)
      if (bary[static_cast<std::size_t>(c)] > 0) carrier[static_cast<std::size_t>(positives++)] = c;
    elem.node_carriers.push_back(carrier);
    NodeClass cls = NodeClass::Interior;
    if (positives == 1)
      cls = NodeClass::Vertex;
    else if (positives == 2)
      cls = NodeClass::Edge;
    else if (positives == 3 && dim == 3)
      cls = NodeClass::Face;
    elem.node_classes.push_back(cls);
  }

  elem.bern_scale.reserve(static_cast<std::size_t>(elem.ndofs));
  for (const auto& a : elem.bern_index) {
    double scale = 1.0;
    // degree! / prod(a_c!) accumulated as binomials to stay integral.
    int remaining = degree;
    for (int c = 0; c <= dim; ++c) {
      for (int p = 1; p <= a[static_cast<std::size_t>(c)]; ++p) {
        scale = scale * remaining / p;
        --remaining;
      }
    }
    elem.bern_scale.push_back(scale);
  }

  // Collocation matrix V[m][j] = B_j(node_m); the nodal coefficients solve
  // V * C = I.  One iterative-refinement pass tightens each column to keep
  // the Kronecker property near machine precision at high degree.
  const int nd = elem.ndofs;
  std::vector<double> v(static_cast<std::size_t>(nd) * static_cast<std::size_t>(nd));
  for (int m = 0; m < nd; ++m)
    detail::bernstein_values(elem, elem.nodes[static_cast<std::size_t>(m)],
                             v.data() + static_cast<std::size_t>(m) * static_cast<std::size_t>(nd));

  detail::DenseLu lu;
  lu.factor(v, nd);

  elem.coeff.assign(static_cast<std::size_t>(nd) * static_cast<std::size_t>(nd), 0.0);
  std::vector<double> rhs(static_cast<std::size_t>(nd)), col(static_cast<std::size_t>(nd)),
      residual(static_cast<std::size_t>(nd)), correction(static_cast<std::size_t>(nd));
  for (int i = 0; i < nd; ++i) {
    for (int m = 0; m < nd; ++m) rhs[static_cast<std::size_t>(m)] = (m == i) ? 1.0 : 0.0;
    lu.solve(rhs.data(), col.data());
    for (int m = 0; m < nd; ++m) {
      double r = rhs[static_cast<std::size_t>(m)];
      const double* vrow = v.data() + static_cast<std::size_t>(m) * static_cast<std::size_t>(nd);
      for (int j = 0; j < nd; ++j) r -= vrow[j] * col[static_cast<std::size_t>(j)];
      residual[static_cast<std::size_t>(m)] = r;
    }
    lu.solve(residual.data(), correction.data());
    for (int j = 0; j < nd; ++j) {
      col[static_cast<std::size_t>(j)] += correction[static_cast<std::size_t>(j)];
      elem.coeff[static_cast<std::size_t>(j) * static_cast<std::size_t>(nd) + static_cast<std::size_t>(i)] =
          col[static_cast<std::size_t>(j)];
    }
  }
  return elem;
}

/// Nodal basis values at a reference point (evaluation outside the simplex
/// is permitted; polynomials extend globally).
inline std::vector<double> eval_basis(const ReferenceElement& elem, const Vec3& xi) {
  std::vector<double> out(static_cast<std::size_t>(elem.ndofs));
  detail::eval_basis_into(elem, xi, out.data());
  return out;
}

/// Nodal basis gradients at a reference point, ndofs x dim row-major.
inline std::vector<double> eval_basis_gradients(const ReferenceElement& elem, const Vec3& xi) {
  std::vector<double> out(static_cast<std::size_t>(elem.ndofs) * static_cast<std::size_t>(elem.dim));
  detail::eval_basis_gradients_into(elem, xi, out.data());
  return out;
}

/// Values and gradients together.
inline BasisTabulation tabulate(const ReferenceElement& elem, const Vec3& xi) {
  BasisTabulation tab;
  tab.ndofs = elem.ndofs;
  tab.dim = elem.dim;
  tab.values = eval_basis(elem, xi);
  tab.gradients = eval_basis_gradients(elem, xi);
  return tab;
}

/// Batch tabulation at many points: values are nq x ndofs and gradients
/// nq x ndofs x dim, both row-major in that order.
inline BasisTabulation tabulate(const ReferenceElement& elem, const std::vector<Vec3>& points) {
  BasisTabulation tab;
  tab.ndofs = elem.ndofs;
  tab.dim = elem.dim;
  const std::size_t nd = static_cast<std::size_t>(elem.ndofs);
  const std::size_t d = static_cast<std::size_t>(elem.dim);
  tab.values.resize(points.size() * nd);
  tab.gradients.resize(points.size() * nd * d);
  for (std::size_t q = 0; q < points.size(); ++q) {
    detail::eval_basis_into(elem, points[q], &tab.values[q * nd]);
    detail::eval_basis_gradients_into(elem, points[q], &tab.gradients[q * nd * d]);
  }
  return tab;
}

} // namespace fevis
