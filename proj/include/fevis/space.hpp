// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "element.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "mesh.hpp"
#include "vec.hpp"

namespace fevis {

/// Continuous Lagrange function space on a simplicial mesh.
///
/// Global DOF numbering: mesh vertices first (in mesh vertex order), then
/// edge nodes (edges ordered by sorted vertex pair, nodes by parameter from
/// the lower-index endpoint), then -- in 3-D -- face nodes (faces ordered by
/// sorted vertex triple, nodes in lattice order over the sorted corners),
/// then cell-interior nodes (by cell index, then reference lattice order).
/// Shared nodes are unified through these sub-simplex keys, so continuity
/// across facets holds by construction.
struct FunctionSpace {
  Mesh mesh;
  ReferenceElement element;
  /// cell-major: global DOF of (cell, local node) at [cell*ndofs + local].
  std::vector<int> dof_map;
  int global_dof_count = 0;
  /// Physical position of each global DOF.
  std::vector<Vec3> dof_coords;
  /// Per-cell affine maps and a point-location index (precomputed; the
  /// space is immutable after construction and safe for concurrent reads).
  std::vector<AffineMap> maps;
  SpatialIndex index;

  int cell_dof(int cell, int local) const {
    return dof_map[static_cast<std::size_t>(cell) * static_cast<std::size_t>(element.ndofs) +
                   static_cast<std::size_t>(local)];
  }

  /// The cell's ndofs global indices as a contiguous block.
  const int* cell_dof(int cell) const {
    return dof_map.data() +
           static_cast<std::size_t>(cell) * static_cast<std::size_t>(element.ndofs);
  }
};

using SpacePtr = std::shared_ptr<const FunctionSpace>;

namespace detail {

/// Rank of an interior face-lattice point with weights (u1, u2) on the
/// second and third sorted corner (u1, u2 >= 1, u1 + u2 <= degree - 1),
/// enumerated in lexicographic (u1, u2) order.
inline int face_lattice_rank(int u1, int u2, int degree) {
  int rank = 0;
  for (int t = 1; t < u1; ++t) rank += degree - 1 - t;
  return rank + (u2 - 1);
}

} // namespace detail

/// Build a continuous Lagrange space.  Family accepts "P" or its synonym
/// "CG"; anything else is rejected by name.
inline SpacePtr function_space(const Mesh& mesh, std::string_view family, int degree) {
  if (family != "P" && family != "CG")
    throw ValidationError("unsupported element family '" + std::string(family) +
                          "'; supported families: \"P\" (alias \"CG\")");

  auto space = std::make_shared<FunctionSpace>();
  space->mesh = mesh;
  space->element = lagrange_element(mesh.dim, degree);

  const Mesh& m = space->mesh;
  const ReferenceElement& elem = space->element;
  const int k = degree;
  const int ncells = m.cell_count();
  const int nverts = m.vertex_count();

  space->maps.reserve(static_cast<std::size_t>(ncells));
  for (int c = 0; c < ncells; ++c) space->maps.push_back(affine_map(m, c));

  // Enumerate shared sub-simplices with deterministic ids (std::map keeps
  // keys sorted, so ids follow the sorted-tuple order).
  std::map<std::array<int, 2>, int> edges;
  std::map<std::array<int, 3>, int> faces;
  for (int c = 0; c < ncells; ++c) {
    const auto& cell = m.cells[static_cast<std::size_t>(c)];
    for (int a = 0; a <= m.dim; ++a)
      for (int b = a + 1; b <= m.dim; ++b) {
        std::array<int, 2> key{cell[static_cast<std::size_t>(a)], cell[static_cast<std::size_t>(b)]};
        if (key[0] > key[1]) std::swap(key[0], key[1]);
        edges.emplace(key, 0);
      }
    if (m.dim == 3 && k >= 3)
      for (int omit = 0; omit <= 3; ++omit) {
        std::array<int, 3> key{};
        int n = 0;
        for (int v = 0; v <= 3; ++v)
          if (v != omit) key[static_cast<std::size_t>(n++)] = cell[static_cast<std::size_t>(v)];
        std::sort(key.begin(), key.end());
        faces.emplace(key, 0);
      }
  }
  {
    int id = 0;
    for (auto& [key, value] : edges) value = id++;
    id = 0;
    for (auto& [key, value] : faces) value = id++;
  }

  const int edge_interior = k - 1;
  const int face_interior = (m.dim == 3) ? (k - 1) * (k - 2) / 2 : 0;
  int cell_interior = 0;
  std::vector<int> interior_rank(static_cast<std::size_t>(elem.ndofs), -1);
  for (int n = 0; n < elem.ndofs; ++n)
    if (elem.node_classes[static_cast<std::size_t>(n)] == NodeClass::Interior)
      interior_rank[static_cast<std::size_t>(n)] = cell_interior++;

  const int edge_base = nverts;
  const int face_base = edge_base + static_cast<int>(edges.size()) * edge_interior;
  const int interior_base = face_base + static_cast<int>(faces.size()) * face_interior;
  space->global_dof_count = interior_base + ncells * cell_interior;

  space->dof_map.assign(static_cast<std::size_t>(ncells) * static_cast<std::size_t>(elem.ndofs), -1);
  space->dof_coords.assign(static_cast<std::size_t>(space->global_dof_count), Vec3{0, 0, 0});
  std::vector<char> coord_set(static_cast<std::size_t>(space->global_dof_count), 0);

  for (int c = 0; c < ncells; ++c) {
    const auto& cell = m.cells[static_cast<std::size_t>(c)];
    for (int n = 0; n < elem.ndofs; ++n) {
      const auto& bary = elem.node_bary[static_cast<std::size_t>(n)];
      const auto& carrier = elem.node_carriers[static_cast<std::size_t>(n)];
      int dof = -1;
      switch (elem.node_classes[static_cast<std::size_t>(n)]) {
      case NodeClass::Vertex:
        dof = cell[static_cast<std::size_t>(carrier[0])];
        break;
      case NodeClass::Edge: {
        const int g0 = cell[static_cast<std::size_t>(carrier[0])];
        const int g1 = cell[static_cast<std::size_t>(carrier[1])];
        const int w1 = bary[static_cast<std::size_t>(carrier[1])];  // weight on g1
        std::array<int, 2> key{g0, g1};
        if (key[0] > key[1]) std::swap(key[0], key[1]);
        // Node position along the edge counted from the lower-index
        // endpoint: its rank is the weight sitting on the other endpoint.
        const int slot = (g0 < g1 ? w1 : k - w1) - 1;
        dof = edge_base + edges.at(key) * edge_interior + slot;
        break;
      }
      case NodeClass::Face: {
        std::array<std::pair<int, int>, 3> gw;  // (global vertex, weight)
        for (int t = 0; t < 3; ++t)
          gw[static_cast<std::size_t>(t)] = {cell[static_cast<std::size_t>(carrier[t])],
                                             bary[static_cast<std::size_t>(carrier[t])]};
        std::sort(gw.begin(), gw.end());
        const std::array<int, 3> key{gw[0].first, gw[1].first, gw[2].first};
        dof = face_base + faces.at(key) * face_interior +
              detail::face_lattice_rank(gw[1].second, gw[2].second, k);
        break;
      }
      case NodeClass::Interior:
        dof = interior_base + c * cell_interior + interior_rank[static_cast<std::size_t>(n)];
        break;
      }
      space->dof_map[static_cast<std::size_t>(c) * static_cast<std::size_t>(elem.ndofs) +
                     static_cast<std::size_t>(n)] = dof;
      if (!coord_set[static_cast<std::size_t>(dof)]) {
        coord_set[static_cast<std::size_t>(dof)] = 1;
        space->dof_coords[static_cast<std::size_t>(dof)] =
            map_to_physical(space->maps[static_cast<std::size_t>(c)], elem.nodes[static_cast<std::size_t>(n)]);
      }
    }
  }

  space->index = build_spatial_index(m, default_bucket_count(m));
  return space;
}

/// Scalar finite-element field: a coefficient per global DOF.
struct FEField {
  SpacePtr space;
  std::vector<double> coeffs;
};

/// Wrap coefficients as a field after checking the size.
inline FEField make_field(SpacePtr space, std::vector<double> coeffs) {
  if (static_cast<int>(coeffs.size()) != space->global_dof_count)
    throw ValidationError("field coefficient count " + std::to_string(coeffs.size()) +
                          " does not match the space's " +
                          std::to_string(space->global_dof_count) + " DOFs");
  return FEField{std::move(space), std::move(coeffs)};
}

/// Interpolate an expression: each coefficient is the expression value at
/// its DOF position.
inline FEField interpolate(const SpacePtr& space, const Expr& expr) {
  std::vector<double> coeffs(static_cast<std::size_t>(space->global_dof_count));
  for (int g = 0; g < space->global_dof_count; ++g) {
    const Vec3& p = space->dof_coords[static_cast<std::size_t>(g)];
    try {
      coeffs[static_cast<std::size_t>(g)] = eval_expr(expr, p);
    } catch (const NumericError& err) {
      throw NumericError(std::string(err.what()) + " while interpolating at the DOF at " +
                         vec_to_string(p, space->mesh.dim));
    }
  }
  return FEField{space, std::move(coeffs)};
}

/// Evaluate inside a specific cell (the point is taken on trust; no
/// containment check).
inline double eval_in_cell(const FEField& f, int cell, const Vec3& p) {
  const FunctionSpace& space = *f.space;
  const ReferenceElement& elem = space.element;
  const Vec3 xi = map_to_reference(space.maps[static_cast<std::size_t>(cell)], p);
  double values[kMaxBasisSize];
  detail::eval_basis_into(elem, xi, values);
  double out = 0.0;
  for (int n = 0; n < elem.ndofs; ++n)
    out += values[n] * f.coeffs[static_cast<std::size_t>(space.cell_dof(cell, n))];
  return out;
}

/// Physical-space gradient evaluated inside a specific cell.
inline Vec3 eval_gradient_in_cell(const FEField& f, int cell, const Vec3& p) {
  const FunctionSpace& space = *f.space;
  const ReferenceElement& elem = space.element;
  const AffineMap& map = space.maps[static_cast<std::size_t>(cell)];
  const Vec3 xi = map_to_reference(map, p);
  double grads[kMaxBasisSize * 3];
  detail::eval_basis_gradients_into(elem, xi, grads);
  double ref[3] = {0.0, 0.0, 0.0};
  for (int n = 0; n < elem.ndofs; ++n) {
    const double c = f.coeffs[static_cast<std::size_t>(space.cell_dof(cell, n))];
    for (int d = 0; d < elem.dim; ++d) ref[d] += c * grads[n * elem.dim + d];
  }
  // Chain rule: grad_x = J^{-T} grad_xi.
  Vec3 out{0.0, 0.0, 0.0};
  for (int r = 0; r < elem.dim; ++r)
    for (int d = 0; d < elem.dim; ++d)
      out[static_cast<std::size_t>(r)] += map.Jinv[d][r] * ref[d];
  return out;
}

inline std::optional<int> locate(const FEField& f, const Vec3& p) {
  return locate_cell(f.space->mesh, f.space->index, p);
}

inline bool inside(const FEField& f, const Vec3& p) { return locate(f, p).has_value(); }

/// Evaluate at a physical point; throws OutOfDomainError outside the mesh.
inline double eval_point(const FEField& f, const Vec3& p) {
  const auto cell = locate(f, p);
  if (!cell)
    throw OutOfDomainError("point " + vec_to_string(p, f.space->mesh.dim) +
                           " is outside the mesh domain");
  return eval_in_cell(f, *cell, p);
}

/// Gradient at a physical point; throws OutOfDomainError outside the mesh.
inline Vec3 eval_gradient(const FEField& f, const Vec3& p) {
  const auto cell = locate(f, p);
  if (!cell)
    throw OutOfDomainError("point " + vec_to_string(p, f.space->mesh.dim) +
                           " is outside the mesh domain");
  return eval_gradient_in_cell(f, *cell, p);
}

} // namespace fevis
