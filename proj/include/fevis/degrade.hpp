// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "errors.hpp"
#include "solver.hpp"
#include "space.hpp"

namespace fevis {

/// How to reduce a field to the piecewise-linear space on the same mesh.
enum class DegradeMode {
  Interpolate,  ///< keep vertex values, discard everything between
  L2Project,    ///< closest linear field in the L2 norm (mass-matrix solve)
};

inline DegradeMode degrade_mode_from_string(const std::string& name) {
  if (name == "interpolate") return DegradeMode::Interpolate;
  if (name == "project") return DegradeMode::L2Project;
  throw ValidationError("unknown degrade mode '" + name +
                        "' (expected 'interpolate' or 'project')");
}

/// Re-express a field in degree-1 Lagrange on the same mesh.  Interpolation
/// evaluates the source at mesh vertices; projection solves M c = b with the
/// linear mass matrix and b_i = integral(phi_i u).  Both lose everything the
/// linear space cannot represent, which is the point: downsampling a
/// higher-order field this way shifts interior extrema.
inline FEField degrade_to_linear(const FEField& u, DegradeMode mode) {
  const FunctionSpace& src = *u.space;
  auto p1 = function_space(src.mesh, "P", 1);

  FEField out;
  out.space = p1;
  out.coeffs.assign(static_cast<std::size_t>(p1->global_dof_count), 0.0);

  if (mode == DegradeMode::Interpolate) {
    // Linear degrees of freedom sit at mesh vertices; evaluate the source in
    // a known incident cell at each vertex (no point location, and continuity
    // makes the choice of incident cell irrelevant).
    const int dim = src.mesh.dim;
    for (std::size_t c = 0; c < p1->mesh.cells.size(); ++c) {
      const int* dofs = p1->cell_dof(static_cast<int>(c));
      for (int i = 0; i <= dim; ++i) {
        const int vertex = p1->mesh.cells[c][static_cast<std::size_t>(i)];
        out.coeffs[static_cast<std::size_t>(dofs[i])] = eval_in_cell(
            u, static_cast<int>(c), p1->mesh.vertices[static_cast<std::size_t>(vertex)]);
      }
    }
    return out;
  }

  // L2 projection: quadrature exact for phi_i * u (degree k+1, one extra for
  // headroom) and for the linear mass matrix.
  const int k = src.element.degree;
  const int quad_degree = std::min(k + 2, kMaxQuadratureDegree);
  CsrMatrix mass = assemble_mass(*p1, quad_degree);

  const auto tab1 = detail::tabulate_for_quadrature(*p1, quad_degree);
  const auto tabk = detail::tabulate_for_quadrature(src, quad_degree);
  const int nd1 = p1->element.ndofs;
  const int ndk = src.element.ndofs;
  const std::size_t nq = tab1.rule.points.size();

  std::vector<double> rhs(static_cast<std::size_t>(p1->global_dof_count), 0.0);
  for (std::size_t c = 0; c < p1->mesh.cells.size(); ++c) {
    const double det = p1->maps[c].det;
    const int* dofs1 = p1->cell_dof(static_cast<int>(c));
    const int* dofsk = src.cell_dof(static_cast<int>(c));
    for (std::size_t q = 0; q < nq; ++q) {
      const double* phi1 = &tab1.basis.values[q * static_cast<std::size_t>(nd1)];
      const double* phik = &tabk.basis.values[q * static_cast<std::size_t>(ndk)];
      double uq = 0.0;
      for (int j = 0; j < ndk; ++j)
        uq += u.coeffs[static_cast<std::size_t>(dofsk[j])] * phik[j];
      const double wq = tab1.rule.weights[q] * det * uq;
      for (int i = 0; i < nd1; ++i)
        rhs[static_cast<std::size_t>(dofs1[i])] += wq * phi1[i];
    }
  }

  CgResult cg = cg_solve(mass, rhs, 1e-12);
  out.coeffs = std::move(cg.x);
  return out;
}

} // namespace fevis
