// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "vec.hpp"

namespace fevis {

/// Barycentric containment slack: a point belongs to a cell when all its
/// barycentric coordinates are >= -kBaryTol.
inline constexpr double kBaryTol = 1e-12;

/// |det J| at or below this is treated as a degenerate cell.
inline constexpr double kDegenerateDetTol = 1e-14;

enum class MeshKind { SquareLattice, BoxLattice };

/// Simplicial mesh (triangles in 2-D, tetrahedra in 3-D) with positively
/// oriented cells.  Facets are conforming: every interior facet is shared by
/// exactly two cells.  The lattice provenance fields describe how the mesh
/// was constructed and make fields on it serializable.
struct Mesh {
  int dim = 2;
  std::vector<Vec3> vertices;
  /// dim+1 vertex indices per cell; the unused slot holds -1 in 2-D.
  std::vector<std::array<int, 4>> cells;
  /// Sorted vertex tuples of facets incident to exactly one cell
  /// (dim entries used; the unused slot holds -1 in 2-D).
  std::vector<std::array<int, 3>> boundary_facets;

  MeshKind kind = MeshKind::SquareLattice;
  std::array<int, 3> counts{0, 0, 0};
  Vec3 lengths{0.0, 0.0, 0.0};

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int cell_count() const { return static_cast<int>(cells.size()); }
};

/// Affine reference-to-physical map x(xi) = origin + J * xi for one cell.
/// Unused rows/columns are padded with the identity so the 3x3 forms work
/// uniformly in 2-D.
struct AffineMap {
  int dim = 2;
  Vec3 origin{0.0, 0.0, 0.0};
  double J[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  double Jinv[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  /// |det J| (cells are orientation-normalized, so the signed determinant of
  /// a valid cell is positive anyway).
  double det = 1.0;
};

namespace detail {

inline double signed_cell_volume_factor(const Mesh& mesh, const std::array<int, 4>& cell) {
  // Signed determinant of the edge matrix [v1-v0, v2-v0(, v3-v0)];
  // the simplex volume is this value / dim!.
  const Vec3& v0 = mesh.vertices[static_cast<std::size_t>(cell[0])];
  const Vec3 e1 = vec_sub(mesh.vertices[static_cast<std::size_t>(cell[1])], v0);
  const Vec3 e2 = vec_sub(mesh.vertices[static_cast<std::size_t>(cell[2])], v0);
  if (mesh.dim == 2) return e1[0] * e2[1] - e1[1] * e2[0];
  const Vec3 e3 = vec_sub(mesh.vertices[static_cast<std::size_t>(cell[3])], v0);
  return dot(e1, cross(e2, e3));
}

/// Flip two vertices of any negatively oriented cell, then derive boundary
/// facets and check conformity (every facet on 1 or 2 cells).
inline void finalize_mesh(Mesh& mesh) {
  for (auto& cell : mesh.cells)
    if (signed_cell_volume_factor(mesh, cell) < 0.0)
      std::swap(cell[mesh.dim - 1], cell[mesh.dim]);

  std::map<std::array<int, 3>, int> facet_count;
  for (const auto& cell : mesh.cells) {
    for (int omit = 0; omit <= mesh.dim; ++omit) {
      std::array<int, 3> facet{-1, -1, -1};
      int n = 0;
      for (int v = 0; v <= mesh.dim; ++v)
        if (v != omit) facet[static_cast<std::size_t>(n++)] = cell[static_cast<std::size_t>(v)];
      std::sort(facet.begin(), facet.begin() + mesh.dim);
      ++facet_count[facet];
    }
  }
  mesh.boundary_facets.clear();
  for (const auto& [facet, count] : facet_count) {
    if (count > 2)
      throw NumericError("non-conforming mesh: a facet is shared by " +
                         std::to_string(count) + " cells");
    if (count == 1) mesh.boundary_facets.push_back(facet);
  }
}

} // namespace detail

/// Uniform triangulation of the axis-aligned rectangle [0,lx] x [0,ly]:
/// nx-by-ny squares, each split along its lower-left to upper-right
/// diagonal into two triangles (2*nx*ny cells).
inline Mesh unit_square_mesh(int nx, int ny, std::array<double, 2> lengths = {1.0, 1.0}) {
  if (nx < 1 || ny < 1)
    throw ValidationError("unit_square_mesh: subdivision counts must be >= 1, got " +
                          std::to_string(nx) + "x" + std::to_string(ny));
  if (!(lengths[0] > 0.0) || !(lengths[1] > 0.0))
    throw ValidationError("unit_square_mesh: side lengths must be positive");

  Mesh mesh;
  mesh.dim = 2;
  mesh.kind = MeshKind::SquareLattice;
  mesh.counts = {nx, ny, 0};
  mesh.lengths = {lengths[0], lengths[1], 0.0};

  const double hx = lengths[0] / nx, hy = lengths[1] / ny;
  mesh.vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) mesh.vertices.push_back({i * hx, j * hy, 0.0});

  const auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  mesh.cells.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.cells.push_back({v00, v10, v11, -1});
      mesh.cells.push_back({v00, v11, v01, -1});
    }

  detail::finalize_mesh(mesh);
  return mesh;
}

/// Uniform tetrahedralization of the axis-aligned box
/// [0,lx] x [0,ly] x [0,lz]: nx-by-ny-by-nz hexahedra, each split into six
/// tetrahedra that share the main diagonal (6*nx*ny*nz cells; the
/// subdivision is translation-invariant, so facets conform across cubes).
inline Mesh box_mesh(int nx, int ny, int nz, std::array<double, 3> lengths = {1.0, 1.0, 1.0}) {
  if (nx < 1 || ny < 1 || nz < 1)
    throw ValidationError("box_mesh: subdivision counts must be >= 1, got " +
                          std::to_string(nx) + "x" + std::to_string(ny) + "x" +
                          std::to_string(nz));
  if (!(lengths[0] > 0.0) || !(lengths[1] > 0.0) || !(lengths[2] > 0.0))
    throw ValidationError("box_mesh: side lengths must be positive");

  Mesh mesh;
  mesh.dim = 3;
  mesh.kind = MeshKind::BoxLattice;
  mesh.counts = {nx, ny, nz};
  mesh.lengths = {lengths[0], lengths[1], lengths[2]};

  const double hx = lengths[0] / nx, hy = lengths[1] / ny, hz = lengths[2] / nz;
  mesh.vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1) * (nz + 1)));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i) mesh.vertices.push_back({i * hx, j * hy, k * hz});

  const auto vid = [nx, ny](int i, int j, int k) {
    return (k * (ny + 1) + j) * (nx + 1) + i;
  };
  // One tetrahedron per axis permutation: walk from the cube's low corner to
  // its high corner, advancing one axis at a time.
  static constexpr int kAxisOrders[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                            {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  mesh.cells.reserve(static_cast<std::size_t>(6 * nx * ny * nz));
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        for (const auto& order : kAxisOrders) {
          std::array<int, 4> cell{};
          int c[3] = {i, j, k};
          cell[0] = vid(c[0], c[1], c[2]);
          for (int step = 0; step < 3; ++step) {
            ++c[order[step]];
            cell[static_cast<std::size_t>(step + 1)] = vid(c[0], c[1], c[2]);
          }
          mesh.cells.push_back(cell);
        }

  detail::finalize_mesh(mesh);
  return mesh;
}

/// Axis-aligned bounding box over all mesh vertices.
inline std::pair<Vec3, Vec3> mesh_bounds(const Mesh& mesh) {
  Vec3 lo = mesh.vertices.at(0), hi = mesh.vertices.at(0);
  for (const Vec3& v : mesh.vertices)
    for (int d = 0; d < 3; ++d) {
      lo[static_cast<std::size_t>(d)] = std::min(lo[static_cast<std::size_t>(d)], v[static_cast<std::size_t>(d)]);
      hi[static_cast<std::size_t>(d)] = std::max(hi[static_cast<std::size_t>(d)], v[static_cast<std::size_t>(d)]);
    }
  return {lo, hi};
}

/// Build the affine map of one cell.  Throws NumericError for degenerate
/// cells (|det J| <= kDegenerateDetTol).
inline AffineMap affine_map(const Mesh& mesh, int cell) {
  const auto& c = mesh.cells.at(static_cast<std::size_t>(cell));
  AffineMap map;
  map.dim = mesh.dim;
  map.origin = mesh.vertices[static_cast<std::size_t>(c[0])];
  for (int col = 0; col < mesh.dim; ++col) {
    const Vec3 e = vec_sub(mesh.vertices[static_cast<std::size_t>(c[col + 1])], map.origin);
    for (int row = 0; row < 3; ++row) map.J[row][col] = e[static_cast<std::size_t>(row)];
  }

  double det;
  if (mesh.dim == 2) {
    det = map.J[0][0] * map.J[1][1] - map.J[0][1] * map.J[1][0];
  } else {
    det = map.J[0][0] * (map.J[1][1] * map.J[2][2] - map.J[1][2] * map.J[2][1]) -
          map.J[0][1] * (map.J[1][0] * map.J[2][2] - map.J[1][2] * map.J[2][0]) +
          map.J[0][2] * (map.J[1][0] * map.J[2][1] - map.J[1][1] * map.J[2][0]);
  }
  if (!(std::abs(det) > kDegenerateDetTol))
    throw NumericError("degenerate cell " + std::to_string(cell) +
                       ": |det J| = " + std::to_string(std::abs(det)));
  map.det = std::abs(det);

  if (mesh.dim == 2) {
    map.Jinv[0][0] = map.J[1][1] / det;
    map.Jinv[0][1] = -map.J[0][1] / det;
    map.Jinv[1][0] = -map.J[1][0] / det;
    map.Jinv[1][1] = map.J[0][0] / det;
  } else {
    const auto cof = [&](int r0, int r1, int c0, int c1) {
      return map.J[r0][c0] * map.J[r1][c1] - map.J[r0][c1] * map.J[r1][c0];
    };
    map.Jinv[0][0] = cof(1, 2, 1, 2) / det;
    map.Jinv[0][1] = -cof(0, 2, 1, 2) / det;
    map.Jinv[0][2] = cof(0, 1, 1, 2) / det;
    map.Jinv[1][0] = -cof(1, 2, 0, 2) / det;
    map.Jinv[1][1] = cof(0, 2, 0, 2) / det;
    map.Jinv[1][2] = -cof(0, 1, 0, 2) / det;
    map.Jinv[2][0] = cof(1, 2, 0, 1) / det;
    map.Jinv[2][1] = -cof(0, 2, 0, 1) / det;
    map.Jinv[2][2] = cof(0, 1, 0, 1) / det;
  }
  return map;
}

inline Vec3 map_to_physical(const AffineMap& map, const Vec3& xi) {
  Vec3 x = map.origin;
  for (int r = 0; r < map.dim; ++r)
    for (int c = 0; c < map.dim; ++c)
      x[static_cast<std::size_t>(r)] += map.J[r][c] * xi[static_cast<std::size_t>(c)];
  return x;
}

inline Vec3 map_to_reference(const AffineMap& map, const Vec3& x) {
  const Vec3 rel = vec_sub(x, map.origin);
  Vec3 xi{0.0, 0.0, 0.0};
  for (int r = 0; r < map.dim; ++r)
    for (int c = 0; c < map.dim; ++c)
      xi[static_cast<std::size_t>(r)] += map.Jinv[r][c] * rel[static_cast<std::size_t>(c)];
  return xi;
}

/// Barycentric coordinates (1 - sum(xi), xi_0, ..., xi_{dim-1}); the unused
/// slot holds 0 in 2-D.
inline std::array<double, 4> barycentric(const AffineMap& map, const Vec3& x) {
  const Vec3 xi = map_to_reference(map, x);
  std::array<double, 4> b{0.0, 0.0, 0.0, 0.0};
  double sum = 0.0;
  for (int d = 0; d < map.dim; ++d) {
    b[static_cast<std::size_t>(d + 1)] = xi[static_cast<std::size_t>(d)];
    sum += xi[static_cast<std::size_t>(d)];
  }
  b[0] = 1.0 - sum;
  return b;
}

inline double cell_volume(const AffineMap& map) {
  return map.det / (map.dim == 2 ? 2.0 : 6.0);
}

/// Uniform-grid acceleration structure for point location.  Each bucket
/// lists, in ascending order, the cells whose (slightly inflated) bounding
/// boxes overlap it.
struct SpatialIndex {
  int dim = 2;
  std::array<int, 3> buckets{1, 1, 1};
  Vec3 lo{0.0, 0.0, 0.0};
  Vec3 hi{0.0, 0.0, 0.0};
  /// CSR-style bucket lists: bucket b owns entries [offsets[b], offsets[b+1]).
  std::vector<std::int64_t> offsets;
  std::vector<int> entries;

  int bucket_of(const std::array<int, 3>& b) const {
    return (b[2] * buckets[1] + b[1]) * buckets[0] + b[0];
  }
};

/// Default bucket count per axis for build_spatial_index.
inline int default_bucket_count(const Mesh& mesh) {
  return 2 * static_cast<int>(std::ceil(std::pow(static_cast<double>(mesh.cell_count()),
                                                 1.0 / mesh.dim)));
}

inline SpatialIndex build_spatial_index(const Mesh& mesh, int buckets_per_axis) {
  if (buckets_per_axis < 1)
    throw ValidationError("build_spatial_index: bucket count must be >= 1, got " +
                          std::to_string(buckets_per_axis));
  SpatialIndex index;
  index.dim = mesh.dim;
  std::tie(index.lo, index.hi) = mesh_bounds(mesh);
  for (int d = 0; d < mesh.dim; ++d) index.buckets[static_cast<std::size_t>(d)] = buckets_per_axis;
  if (mesh.dim == 2) index.buckets[2] = 1;

  double width[3] = {1.0, 1.0, 1.0};
  // Cell boxes are inflated by a sliver of the bucket width so that points
  // within the barycentric containment slack of a cell always land in a
  // bucket that lists it (this keeps lookups exactly equivalent to a
  // brute-force scan).
  double slack[3] = {0.0, 0.0, 0.0};
  for (int d = 0; d < mesh.dim; ++d) {
    const double extent = index.hi[static_cast<std::size_t>(d)] - index.lo[static_cast<std::size_t>(d)];
    if (!(extent > 0.0))
      throw NumericError("build_spatial_index: mesh is flat along axis " + std::to_string(d));
    width[d] = extent / index.buckets[static_cast<std::size_t>(d)];
    slack[d] = 1e-9 * width[d];
  }

  const auto bucket_range = [&](const Vec3& lo_c, const Vec3& hi_c, int d) {
    const int nb = index.buckets[static_cast<std::size_t>(d)];
    const double origin = index.lo[static_cast<std::size_t>(d)];
    int b0 = static_cast<int>(std::floor((lo_c[static_cast<std::size_t>(d)] - slack[d] - origin) / width[d]));
    int b1 = static_cast<int>(std::floor((hi_c[static_cast<std::size_t>(d)] + slack[d] - origin) / width[d]));
    return std::pair<int, int>{std::clamp(b0, 0, nb - 1), std::clamp(b1, 0, nb - 1)};
  };

  const std::size_t nbuckets = static_cast<std::size_t>(index.buckets[0]) *
                               static_cast<std::size_t>(index.buckets[1]) *
                               static_cast<std::size_t>(index.buckets[2]);
  index.offsets.assign(nbuckets + 1, 0);

  // Two passes: count entries per bucket, then fill.  Filling in ascending
  // cell order keeps every bucket list sorted.
  for (int pass = 0; pass < 2; ++pass) {
    for (int cell = 0; cell < mesh.cell_count(); ++cell) {
      const auto& c = mesh.cells[static_cast<std::size_t>(cell)];
      Vec3 lo_c = mesh.vertices[static_cast<std::size_t>(c[0])];
      Vec3 hi_c = lo_c;
      for (int v = 1; v <= mesh.dim; ++v) {
        const Vec3& p = mesh.vertices[static_cast<std::size_t>(c[v])];
        for (int d = 0; d < mesh.dim; ++d) {
          lo_c[static_cast<std::size_t>(d)] = std::min(lo_c[static_cast<std::size_t>(d)], p[static_cast<std::size_t>(d)]);
          hi_c[static_cast<std::size_t>(d)] = std::max(hi_c[static_cast<std::size_t>(d)], p[static_cast<std::size_t>(d)]);
        }
      }
      std::array<std::pair<int, int>, 3> range{{{0, 0}, {0, 0}, {0, 0}}};
      for (int d = 0; d < mesh.dim; ++d) range[static_cast<std::size_t>(d)] = bucket_range(lo_c, hi_c, d);
      for (int bz = range[2].first; bz <= range[2].second; ++bz)
        for (int by = range[1].first; by <= range[1].second; ++by)
          for (int bx = range[0].first; bx <= range[0].second; ++bx) {
            const std::size_t b = static_cast<std::size_t>(index.bucket_of({bx, by, bz}));
            if (pass == 0)
              ++index.offsets[b + 1];
            else
              index.entries[static_cast<std::size_t>(index.offsets[b + 1]++)] = cell;
          }
    }
    if (pass == 0) {
      for (std::size_t b = 1; b < index.offsets.size(); ++b) index.offsets[b] += index.offsets[b - 1];
      index.entries.resize(static_cast<std::size_t>(index.offsets.back()));
      // Shift so offsets[b+1] is the running fill cursor of bucket b.
      for (std::size_t b = index.offsets.size() - 1; b > 0; --b) index.offsets[b] = index.offsets[b - 1];
    }
  }

  return index;
}

/// Locate the lowest-index cell containing the point (all barycentric
/// coordinates >= -kBaryTol), or nullopt when the point is outside the mesh.
inline std::optional<int> locate_cell(const Mesh& mesh, const SpatialIndex& index, const Vec3& p) {
  std::array<int, 3> b{0, 0, 0};
  for (int d = 0; d < mesh.dim; ++d) {
    const double extent = index.hi[static_cast<std::size_t>(d)] - index.lo[static_cast<std::size_t>(d)];
    const double width = extent / index.buckets[static_cast<std::size_t>(d)];
    const double rel = p[static_cast<std::size_t>(d)] - index.lo[static_cast<std::size_t>(d)];
    if (rel < -1e-9 * width || rel > extent + 1e-9 * width) return std::nullopt;
    b[static_cast<std::size_t>(d)] =
        std::clamp(static_cast<int>(std::floor(rel / width)), 0, index.buckets[static_cast<std::size_t>(d)] - 1);
  }
  const std::size_t bucket = static_cast<std::size_t>(index.bucket_of(b));
  const std::int64_t begin = index.offsets[bucket], end = index.offsets[bucket + 1];
  for (std::int64_t e = begin; e < end; ++e) {
    const int cell = index.entries[static_cast<std::size_t>(e)];
    const auto bary = barycentric(affine_map(mesh, cell), p);
    bool ok = true;
    for (int d = 0; d <= mesh.dim; ++d) ok = ok && bary[static_cast<std::size_t>(d)] >= -kBaryTol;
    if (ok) return cell;
  }
  return std::nullopt;
}

} // namespace fevis
