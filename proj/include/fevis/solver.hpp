// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "element.hpp"
#include "errors.hpp"
#include "expr.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"
#include "space.hpp"

namespace fevis {

/// Sparse matrix in compressed-sparse-row form; both triangles are stored,
/// so symmetric matrices are stored symmetrically entry-for-entry.
struct CsrMatrix {
  int n = 0;
  std::vector<std::int64_t> row_ptr;  ///< size n+1
  std::vector<int> col_idx;           ///< size row_ptr[n], ascending within each row
  std::vector<double> values;
};

struct LinearSystem {
  CsrMatrix matrix;
  std::vector<double> rhs;
};

/// Manufactured Helmholtz problem used by solve_helmholtz: the forcing below
/// makes u(x,y) = cos(2 pi x) cos(2 pi y) the exact solution of  -lap(u) + u = f
/// on the unit square with natural (do-nothing) boundary conditions.
inline constexpr const char* kHelmholtzForcing =
    "(1.0+8.0*pi^2)*cos(2*pi*x[0])*cos(2*pi*x[1])";
inline constexpr const char* kHelmholtzExact = "cos(2*pi*x[0])*cos(2*pi*x[1])";

namespace detail {

/// Accumulate (row, col, value) contributions and convert to CSR once.
/// Duplicate coordinates are summed, as assembly requires.
class CsrBuilder {
 public:
  explicit CsrBuilder(int n) : n_(n) {}

  void add(int row, int col, double value) { entries_.emplace_back(row, col, value); }

  CsrMatrix take() {
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) {
                return std::tie(std::get<0>(a), std::get<1>(a)) <
                       std::tie(std::get<0>(b), std::get<1>(b));
              });
    CsrMatrix m;
    m.n = n_;
    m.row_ptr.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (std::size_t i = 0; i < entries_.size();) {
      const int row = std::get<0>(entries_[i]);
      const int col = std::get<1>(entries_[i]);
      double sum = 0.0;
      while (i < entries_.size() && std::get<0>(entries_[i]) == row &&
             std::get<1>(entries_[i]) == col) {
        sum += std::get<2>(entries_[i]);
        ++i;
      }
      m.col_idx.push_back(col);
      m.values.push_back(sum);
      ++m.row_ptr[static_cast<std::size_t>(row) + 1];
    }
    for (int r = 0; r < n_; ++r)
      m.row_ptr[static_cast<std::size_t>(r) + 1] += m.row_ptr[static_cast<std::size_t>(r)];
    entries_.clear();
    entries_.shrink_to_fit();
    return m;
  }

 private:
  using Entry = std::tuple<int, int, double>;
  int n_;
  std::vector<Entry> entries_;
};

} // namespace detail

/// y = A x
inline std::vector<double> matvec(const CsrMatrix& a, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != a.n)
    throw ValidationError("matvec: vector length " + std::to_string(x.size()) +
                          " does not match matrix size " + std::to_string(a.n));
  std::vector<double> y(static_cast<std::size_t>(a.n), 0.0);
  for (int r = 0; r < a.n; ++r) {
    double sum = 0.0;
    for (std::int64_t k = a.row_ptr[static_cast<std::size_t>(r)];
         k < a.row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      sum += a.values[static_cast<std::size_t>(k)] *
             x[static_cast<std::size_t>(a.col_idx[static_cast<std::size_t>(k)])];
    }
    y[static_cast<std::size_t>(r)] = sum;
  }
  return y;
}

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double rel_residual = 0.0;  ///< true residual |b - A x| / |b| at exit
};

/// Conjugate gradients from a zero initial guess.  Convergence means the
/// *recomputed* residual |b - A x| drops below rel_tol * |b|; the recurrence
/// residual alone is not trusted.  Throws NumericError if the iteration
/// budget is exhausted or the matrix reveals itself as not positive definite.
inline CgResult cg_solve(const CsrMatrix& a, const std::vector<double>& b,
                         double rel_tol = 1e-10, int max_iter = -1) {
  if (static_cast<int>(b.size()) != a.n)
    throw ValidationError("cg_solve: rhs length " + std::to_string(b.size()) +
                          " does not match matrix size " + std::to_string(a.n));
  if (max_iter < 0) max_iter = 20 * a.n + 100;

  CgResult result;
  result.x.assign(b.size(), 0.0);
  const std::size_t n = b.size();

  auto dot_vec = [n](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += u[i] * v[i];
    return s;
  };
  auto true_residual = [&]() {
    std::vector<double> ax = matvec(a, result.x);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ri = b[i] - ax[i];
      s += ri * ri;
    }
    return std::sqrt(s);
  };

  const double norm_b = std::sqrt(dot_vec(b, b));
  if (norm_b == 0.0) return result;  // x = 0 solves exactly

  int used = 0;
  // Outer restarts guard against drift in the recurrence residual.
  for (int restart = 0; restart < 4; ++restart) {
    std::vector<double> ax = matvec(a, result.x);
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
    std::vector<double> p = r;
    double rs = dot_vec(r, r);
    if (std::sqrt(rs) <= rel_tol * norm_b) {
      result.rel_residual = std::sqrt(rs) / norm_b;
      return result;
    }
    while (used < max_iter) {
      const std::vector<double> ap = matvec(a, p);
      const double p_ap = dot_vec(p, ap);
      if (!(p_ap > 0.0))
        throw NumericError("cg_solve: matrix is not positive definite "
                           "(p'Ap = " + std::to_string(p_ap) + ")");
      const double alpha = rs / p_ap;
      for (std::size_t i = 0; i < n; ++i) result.x[i] += alpha * p[i];
      for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * ap[i];
      ++used;
      const double rs_new = dot_vec(r, r);
      if (std::sqrt(rs_new) <= rel_tol * norm_b) break;
      const double beta = rs_new / rs;
      rs = rs_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    const double true_r = true_residual();
    result.iterations = used;
    result.rel_residual = true_r / norm_b;
    if (true_r <= rel_tol * norm_b) return result;
    if (used >= max_iter) break;
  }
  throw NumericError("cg_solve: no convergence after " + std::to_string(used) +
                     " iterations (relative residual " +
                     std::to_string(result.rel_residual) + ")");
}

namespace detail {

/// Basis values and reference gradients tabulated at quadrature points.
struct CellTabulation {
  QuadratureRule rule;
  BasisTabulation basis;
};

inline CellTabulation tabulate_for_quadrature(const FunctionSpace& space, int quad_degree) {
  CellTabulation tab;
  tab.rule = quadrature_rule(space.mesh.dim, quad_degree);
  tab.basis = tabulate(space.element, tab.rule.points);
  return tab;
}

/// Check that a coefficient field belongs to (a space laid out identically to)
/// the assembly space, so its cell-local coefficients can be read directly.
inline void require_same_space(const FunctionSpace& space, const FEField& f,
                               const char* where) {
  const FunctionSpace& fs = *f.space;
  if (&fs == &space) return;
  if (fs.mesh.dim != space.mesh.dim || fs.element.degree != space.element.degree ||
      fs.global_dof_count != space.global_dof_count ||
      fs.mesh.cells.size() != space.mesh.cells.size())
    throw ValidationError(std::string(where) +
                          ": coefficient field lives in an incompatible function space");
}

} // namespace detail

/// Mass matrix M_ij = integral(phi_i phi_j).
inline CsrMatrix assemble_mass(const FunctionSpace& space, int quad_degree = -1) {
  const int k = space.element.degree;
  if (quad_degree < 0) quad_degree = 2 * k;
  const auto tab = detail::tabulate_for_quadrature(space, quad_degree);
  const int nd = space.element.ndofs;
  const std::size_t nq = tab.rule.points.size();

  detail::CsrBuilder builder(space.global_dof_count);
  std::vector<double> local(static_cast<std::size_t>(nd) * static_cast<std::size_t>(nd));
  for (std::size_t c = 0; c < space.mesh.cells.size(); ++c) {
    std::fill(local.begin(), local.end(), 0.0);
    const double det = space.maps[c].det;
    for (std::size_t q = 0; q < nq; ++q) {
      const double wq = tab.rule.weights[q] * det;
      const double* phi = &tab.basis.values[q * static_cast<std::size_t>(nd)];
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j)
          local[static_cast<std::size_t>(i) * nd + j] += wq * phi[i] * phi[j];
    }
    const int* dofs = space.cell_dof(static_cast<int>(c));
    for (int i = 0; i < nd; ++i)
      for (int j = 0; j < nd; ++j)
        builder.add(dofs[i], dofs[j], local[static_cast<std::size_t>(i) * nd + j]);
  }
  return builder.take();
}

/// Stiffness matrix K_ij = integral(grad phi_i . grad phi_j).
inline CsrMatrix assemble_stiffness(const FunctionSpace& space, int quad_degree = -1) {
  const int k = space.element.degree;
  if (quad_degree < 0) quad_degree = std::max(0, 2 * (k - 1));
  const auto tab = detail::tabulate_for_quadrature(space, quad_degree);
  const int dim = space.mesh.dim;
  const int nd = space.element.ndofs;
  const std::size_t nq = tab.rule.points.size();

  detail::CsrBuilder builder(space.global_dof_count);
  std::vector<double> local(static_cast<std::size_t>(nd) * static_cast<std::size_t>(nd));
  std::vector<double> gphys(static_cast<std::size_t>(nd) * 3);
  for (std::size_t c = 0; c < space.mesh.cells.size(); ++c) {
    std::fill(local.begin(), local.end(), 0.0);
    const AffineMap& map = space.maps[c];
    for (std::size_t q = 0; q < nq; ++q) {
      const double wq = tab.rule.weights[q] * map.det;
      const double* gref =
          &tab.basis.gradients[q * static_cast<std::size_t>(nd) * static_cast<std::size_t>(dim)];
      // Push reference gradients forward: g_phys = Jinv^T g_ref.
      for (int i = 0; i < nd; ++i)
        for (int r = 0; r < dim; ++r) {
          double s = 0.0;
          for (int d = 0; d < dim; ++d)
            s += map.Jinv[d][r] * gref[static_cast<std::size_t>(i * dim + d)];
          gphys[static_cast<std::size_t>(i) * 3 + r] = s;
        }
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) {
          double s = 0.0;
          for (int r = 0; r < dim; ++r)
            s += gphys[static_cast<std::size_t>(i) * 3 + r] *
                 gphys[static_cast<std::size_t>(j) * 3 + r];
          local[static_cast<std::size_t>(i) * nd + j] += wq * s;
        }
    }
    const int* dofs = space.cell_dof(static_cast<int>(c));
    for (int i = 0; i < nd; ++i)
      for (int j = 0; j < nd; ++j)
        builder.add(dofs[i], dofs[j], local[static_cast<std::size_t>(i) * nd + j]);
  }
  return builder.take();
}

/// Load vector b_i = integral(phi_i f_h) for a coefficient field f_h in the
/// same space layout.
inline std::vector<double> assemble_load(const FunctionSpace& space, const FEField& f,
                                         int quad_degree = -1) {
  detail::require_same_space(space, f, "assemble_load");
  const int k = space.element.degree;
  if (quad_degree < 0) quad_degree = 2 * k;
  const auto tab = detail::tabulate_for_quadrature(space, quad_degree);
  const int nd = space.element.ndofs;
  const std::size_t nq = tab.rule.points.size();

  std::vector<double> rhs(static_cast<std::size_t>(space.global_dof_count), 0.0);
  for (std::size_t c = 0; c < space.mesh.cells.size(); ++c) {
    const double det = space.maps[c].det;
    const int* dofs = space.cell_dof(static_cast<int>(c));
    for (std::size_t q = 0; q < nq; ++q) {
      const double* phi = &tab.basis.values[q * static_cast<std::size_t>(nd)];
      double fq = 0.0;
      for (int j = 0; j < nd; ++j)
        fq += f.coeffs[static_cast<std::size_t>(dofs[j])] * phi[j];
      const double wq = tab.rule.weights[q] * det * fq;
      for (int i = 0; i < nd; ++i)
        rhs[static_cast<std::size_t>(dofs[i])] += wq * phi[i];
    }
  }
  return rhs;
}

/// Assemble the Helmholtz system (K + M) x = b in a single pass over cells:
/// stiffness, mass, and load contributions are computed from one shared
/// tabulation per quadrature point instead of three separate sweeps.
inline LinearSystem assemble_helmholtz(const FunctionSpace& space, const FEField& f,
                                       int quad_degree = -1) {
  detail::require_same_space(space, f, "assemble_helmholtz");
  const int k = space.element.degree;
  if (quad_degree < 0) quad_degree = std::max(2, 2 * k);
  const auto tab = detail::tabulate_for_quadrature(space, quad_degree);
  const int dim = space.mesh.dim;
  const int nd = space.element.ndofs;
  const std::size_t nq = tab.rule.points.size();

  detail::CsrBuilder builder(space.global_dof_count);
  std::vector<double> rhs(static_cast<std::size_t>(space.global_dof_count), 0.0);
  std::vector<double> local(static_cast<std::size_t>(nd) * static_cast<std::size_t>(nd));
  std::vector<double> local_rhs(static_cast<std::size_t>(nd));
  std::vector<double> gphys(static_cast<std::size_t>(nd) * 3);

  for (std::size_t c = 0; c < space.mesh.cells.size(); ++c) {
    std::fill(local.begin(), local.end(), 0.0);
    std::fill(local_rhs.begin(), local_rhs.end(), 0.0);
    const AffineMap& map = space.maps[c];
    const int* dofs = space.cell_dof(static_cast<int>(c));
    for (std::size_t q = 0; q < nq; ++q) {
      const double wq = tab.rule.weights[q] * map.det;
      const double* phi = &tab.basis.values[q * static_cast<std::size_t>(nd)];
      const double* gref =
          &tab.basis.gradients[q * static_cast<std::size_t>(nd) * static_cast<std::size_t>(dim)];
      for (int i = 0; i < nd; ++i)
        for (int r = 0; r < dim; ++r) {
          double s = 0.0;
          for (int d = 0; d < dim; ++d)
            s += map.Jinv[d][r] * gref[static_cast<std::size_t>(i * dim + d)];
          gphys[static_cast<std::size_t>(i) * 3 + r] = s;
        }
      double fq = 0.0;
      for (int j = 0; j < nd; ++j)
        fq += f.coeffs[static_cast<std::size_t>(dofs[j])] * phi[j];
      for (int i = 0; i < nd; ++i) {
        for (int j = 0; j < nd; ++j) {
          double grad_dot = 0.0;
          for (int r = 0; r < dim; ++r)
            grad_dot += gphys[static_cast<std::size_t>(i) * 3 + r] *
                        gphys[static_cast<std::size_t>(j) * 3 + r];
          local[static_cast<std::size_t>(i) * nd + j] += wq * (grad_dot + phi[i] * phi[j]);
        }
        local_rhs[static_cast<std::size_t>(i)] += wq * phi[i] * fq;
      }
    }
    for (int i = 0; i < nd; ++i) {
      for (int j = 0; j < nd; ++j)
        builder.add(dofs[i], dofs[j], local[static_cast<std::size_t>(i) * nd + j]);
      rhs[static_cast<std::size_t>(dofs[i])] += local_rhs[static_cast<std::size_t>(i)];
    }
  }

  LinearSystem sys;
  sys.matrix = builder.take();
  sys.rhs = std::move(rhs);
  return sys;
}

/// L2 distance between a coefficient field and an exact callable
/// (Vec3 -> double), integrated with quadrature two degrees above what the
/// squared field needs so the error functional itself is not under-resolved.
template <class ExactFn>
double l2_error(const FEField& u, ExactFn&& exact) {
  const FunctionSpace& space = *u.space;
  const int k = space.element.degree;
  const auto tab = detail::tabulate_for_quadrature(space, std::min(2 * k + 2, kMaxQuadratureDegree));
  const int nd = space.element.ndofs;
  const std::size_t nq = tab.rule.points.size();

  double total = 0.0;
  for (std::size_t c = 0; c < space.mesh.cells.size(); ++c) {
    const AffineMap& map = space.maps[c];
    const int* dofs = space.cell_dof(static_cast<int>(c));
    for (std::size_t q = 0; q < nq; ++q) {
      const double* phi = &tab.basis.values[q * static_cast<std::size_t>(nd)];
      double uq = 0.0;
      for (int j = 0; j < nd; ++j)
        uq += u.coeffs[static_cast<std::size_t>(dofs[j])] * phi[j];
      const Vec3 x = map_to_physical(map, tab.rule.points[q]);
      const double diff = uq - exact(x);
      total += tab.rule.weights[q] * map.det * diff * diff;
    }
  }
  return std::sqrt(total);
}

/// Iteration diagnostics from the linear solve inside solve_helmholtz.
struct SolveStats {
  int cg_iterations = 0;
  double cg_rel_residual = 0.0;
};

/// Solve  -lap(u) + u = f  on a 2-D mesh with the manufactured forcing
/// kHelmholtzForcing, whose exact solution is kHelmholtzExact.  The forcing
/// is first interpolated into the same space, then the one-pass assembly and
/// conjugate gradients produce the coefficient vector.
inline FEField solve_helmholtz(const Mesh& mesh, int degree, SolveStats* stats = nullptr) {
  if (mesh.dim != 2)
    throw ValidationError("solve_helmholtz: mesh must be 2-D, got dimension " +
                          std::to_string(mesh.dim));
  auto space = function_space(mesh, "P", degree);
  FEField f = interpolate(space, parse(kHelmholtzForcing, 2));
  LinearSystem sys = assemble_helmholtz(*space, f);
  CgResult cg = cg_solve(sys.matrix, sys.rhs, 1e-10);
  if (stats) {
    stats->cg_iterations = cg.iterations;
    stats->cg_rel_residual = cg.rel_residual;
  }
  FEField u;
  u.space = space;
  u.coeffs = std::move(cg.x);
  return u;
}

} // namespace fevis
