// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "detail/bytes.hpp"
#include "errors.hpp"
#include "mesh.hpp"
#include "space.hpp"

namespace fevis {

/// On-disk field container.  Because every mesh this library produces is a
/// structured lattice, the file stores the lattice recipe (kind, resolution,
/// edge lengths) plus degree and coefficients; the loader rebuilds the mesh
/// and space deterministically, so degrees of freedom line up by
/// construction.  All scalars little-endian.
///
///   bytes 0..7   magic "FEVISFD1"
///   u32          dimension (2 or 3)
///   u32          polynomial degree
///   u32          mesh kind (0 = square lattice, 1 = box lattice)
///   u32 x3       cells per axis (third entry 0 for 2-D)
///   f64 x3       edge lengths   (third entry 0 for 2-D)
///   u64          coefficient count
///   f64 x count  coefficients
inline constexpr char kFieldMagic[8] = {'F', 'E', 'V', 'I', 'S', 'F', 'D', '1'};

inline void save_field(const std::string& path, const FEField& field) {
  const FunctionSpace& space = *field.space;
  const Mesh& mesh = space.mesh;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");

  out.write(kFieldMagic, sizeof(kFieldMagic));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(mesh.dim));
  detail::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(space.element.degree));
  detail::write_le<std::uint32_t>(out, mesh.kind == MeshKind::SquareLattice ? 0u : 1u);
  for (int d = 0; d < 3; ++d)
    detail::write_le<std::uint32_t>(
        out, static_cast<std::uint32_t>(mesh.counts[static_cast<std::size_t>(d)]));
  for (int d = 0; d < 3; ++d)
    detail::write_le<double>(out, mesh.lengths[static_cast<std::size_t>(d)]);
  detail::write_le<std::uint64_t>(out, static_cast<std::uint64_t>(field.coeffs.size()));
  for (double c : field.coeffs) detail::write_le<double>(out, c);
  if (!out) throw IoError("failed while writing '" + path + "'");
}

inline FEField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kFieldMagic, sizeof(magic)) != 0)
    throw IoError("'" + path + "' is not a field file (bad magic)");

  const auto dim = detail::read_le<std::uint32_t>(in, "dimension");
  const auto degree = detail::read_le<std::uint32_t>(in, "degree");
  const auto kind = detail::read_le<std::uint32_t>(in, "mesh kind");
  std::uint32_t n[3];
  for (auto& v : n) v = detail::read_le<std::uint32_t>(in, "lattice resolution");
  double lengths[3];
  for (auto& v : lengths) v = detail::read_le<double>(in, "lattice lengths");
  const auto count = detail::read_le<std::uint64_t>(in, "coefficient count");

  if (dim != 2 && dim != 3)
    throw IoError("'" + path + "': invalid dimension " + std::to_string(dim));
  if (kind > 1) throw IoError("'" + path + "': invalid mesh kind " + std::to_string(kind));
  if ((kind == 0) != (dim == 2))
    throw IoError("'" + path + "': mesh kind does not match dimension");
  if (degree < 1 || degree > static_cast<std::uint32_t>(kMaxDegree))
    throw IoError("'" + path + "': invalid degree " + std::to_string(degree));

  Mesh mesh;
  try {
    if (dim == 2)
      mesh = unit_square_mesh(static_cast<int>(n[0]), static_cast<int>(n[1]),
                              {lengths[0], lengths[1]});
    else
      mesh = box_mesh(static_cast<int>(n[0]), static_cast<int>(n[1]),
                      static_cast<int>(n[2]), {lengths[0], lengths[1], lengths[2]});
  } catch (const Error& e) {
    throw IoError("'" + path + "': stored mesh parameters are invalid: " + e.what());
  }

  auto space = function_space(mesh, "P", static_cast<int>(degree));
  if (count != static_cast<std::uint64_t>(space->global_dof_count))
    throw IoError("'" + path + "': coefficient count " + std::to_string(count) +
                  " does not match the space (" +
                  std::to_string(space->global_dof_count) + " degrees of freedom)");

  FEField field;
  field.space = space;
  field.coeffs.resize(static_cast<std::size_t>(count));
  for (double& c : field.coeffs) c = detail::read_le<double>(in, "coefficients");
  return field;
}

} // namespace fevis
