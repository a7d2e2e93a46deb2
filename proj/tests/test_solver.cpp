// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>
#include <fevis/quadrature.hpp>
#include <fevis/solver.hpp>

#include "test_util.hpp"

using namespace fevis;

namespace {

// Exact integral of x^a y^b z^c over the unit reference simplex:
//   a! b! c! / (a + b + c + dim)!
// computed in extended precision so the oracle does not share code (or
// rounding) with the quadrature under test.
double simplex_monomial_integral(int dim, const int* powers) {
  auto factorial = [](int n) {
    long double f = 1.0L;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  long double numerator = 1.0L;
  int total = dim;  // the "+ dim" in the denominator's argument
  for (int d = 0; d < dim; ++d) {
    numerator *= factorial(powers[d]);
    total += powers[d];
  }
  return static_cast<double>(numerator / factorial(total));
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// A mesh consisting of exactly the reference triangle (0,0),(1,0),(0,1),
// so local element matrices appear verbatim in the assembled operator.
Mesh reference_triangle_mesh() {
  Mesh m;
  m.dim = 2;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  m.cells = {{0, 1, 2, -1}};
  return m;
}

Mesh reference_tet_mesh() {
  Mesh m;
  m.dim = 3;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  m.cells = {{0, 1, 2, 3}};
  return m;
}

std::vector<std::vector<double>> dense(const CsrMatrix& a) {
  std::vector<std::vector<double>> d(
      static_cast<std::size_t>(a.n),
      std::vector<double>(static_cast<std::size_t>(a.n), 0.0));
  for (int r = 0; r < a.n; ++r)
    for (std::int64_t k = a.row_ptr[static_cast<std::size_t>(r)];
         k < a.row_ptr[static_cast<std::size_t>(r) + 1]; ++k)
      d[static_cast<std::size_t>(r)]
       [static_cast<std::size_t>(a.col_idx[static_cast<std::size_t>(k)])] =
          a.values[static_cast<std::size_t>(k)];
  return d;
}

CsrMatrix csr_from_dense(const std::vector<std::vector<double>>& d) {
  detail::CsrBuilder builder(static_cast<int>(d.size()));
  for (std::size_t r = 0; r < d.size(); ++r)
    for (std::size_t c = 0; c < d.size(); ++c)
      if (d[r][c] != 0.0) builder.add(static_cast<int>(r), static_cast<int>(c), d[r][c]);
  return builder.take();
}

} // namespace

TEST_CASE("quadrature arguments are validated", "[quadrature]") {
  CHECK_THROWS_AS(quadrature_rule(1, 2), ValidationError);
  CHECK_THROWS_AS(quadrature_rule(4, 2), ValidationError);
  CHECK_THROWS_AS(quadrature_rule(2, -1), ValidationError);
  CHECK_THROWS_AS(quadrature_rule(2, kMaxQuadratureDegree + 1), ValidationError);
  CHECK_NOTHROW(quadrature_rule(2, kMaxQuadratureDegree));
}

TEST_CASE("quadrature weights are positive and sum to the simplex measure",
          "[quadrature]") {
  for (int dim : {2, 3}) {
    const double measure = dim == 2 ? 0.5 : 1.0 / 6.0;
    for (int degree = 0; degree <= kMaxQuadratureDegree; ++degree) {
      const QuadratureRule rule = quadrature_rule(dim, degree);
      REQUIRE(rule.points.size() == rule.weights.size());
      double total = 0.0;
      for (double w : rule.weights) {
        CHECK(w > 0.0);
        total += w;
      }
      INFO("dim " << dim << " degree " << degree);
      CHECK(total == Catch::Approx(measure).epsilon(1e-14));
      // Every point stays inside the closed reference simplex.
      for (const Vec3& p : rule.points) {
        double bary_rest = 1.0;
        for (int d = 0; d < dim; ++d) {
          CHECK(p[static_cast<std::size_t>(d)] >= -1e-14);
          bary_rest -= p[static_cast<std::size_t>(d)];
        }
        CHECK(bary_rest >= -1e-14);
      }
    }
  }
}

TEST_CASE("quadrature integrates every monomial up to its degree", "[quadrature]") {
  for (int dim : {2, 3}) {
    for (int degree = 0; degree <= kMaxQuadratureDegree; ++degree) {
      const QuadratureRule rule = quadrature_rule(dim, degree);
      double worst = 0.0;
      for (int a = 0; a <= degree; ++a)
        for (int b = 0; a + b <= degree; ++b)
          for (int c = 0; dim == 3 ? a + b + c <= degree : c == 0; ++c) {
            const int powers[3] = {a, b, c};
            double got = 0.0;
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
              double term = rule.weights[q];
              for (int d = 0; d < dim; ++d)
                term *= ipow(rule.points[q][static_cast<std::size_t>(d)], powers[d]);
              got += term;
            }
            const double want = simplex_monomial_integral(dim, powers);
            worst = std::max(worst, std::abs(got - want) / want);
          }
      INFO("dim " << dim << " degree " << degree);
      CHECK(worst < 1e-12);
    }
  }
}

TEST_CASE("P1 mass and stiffness on the reference triangle match hand formulas",
          "[assembly]") {
  const auto space = function_space(reference_triangle_mesh(), "P", 1);
  const auto mass = dense(assemble_mass(*space));
  const auto stiffness = dense(assemble_stiffness(*space));

  // Mass: area/12 * (1 + delta_ij) with area 1/2.
  const double m_off = 1.0 / 24.0;
  const double k_half = 0.5;
  const double expected_mass[3][3] = {{2 * m_off, m_off, m_off},
                                      {m_off, 2 * m_off, m_off},
                                      {m_off, m_off, 2 * m_off}};
  // Stiffness: gradients (-1,-1), (1,0), (0,1) dotted pairwise, times area.
  const double expected_stiffness[3][3] = {{2 * k_half, -k_half, -k_half},
                                           {-k_half, k_half, 0.0},
                                           {-k_half, 0.0, k_half}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      CHECK(mass[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
            Catch::Approx(expected_mass[i][j]).margin(1e-12));
      CHECK(stiffness[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
            Catch::Approx(expected_stiffness[i][j]).margin(1e-12));
    }
}

TEST_CASE("P1 mass and stiffness on the reference tetrahedron match hand formulas",
          "[assembly]") {
  const auto space = function_space(reference_tet_mesh(), "P", 1);
  const auto mass = dense(assemble_mass(*space));
  const auto stiffness = dense(assemble_stiffness(*space));

  const double volume = 1.0 / 6.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      // Mass: volume/20 * (1 + delta_ij).
      const double want_mass = volume / 20.0 * (i == j ? 2.0 : 1.0);
      CHECK(mass[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
            Catch::Approx(want_mass).margin(1e-12));
      // Stiffness from gradients (-1,-1,-1), e1, e2, e3 times volume.
      double want_stiff;
      if (i == 0 && j == 0)
        want_stiff = 3.0 * volume;
      else if (i == 0 || j == 0)
        want_stiff = -volume;
      else
        want_stiff = (i == j) ? volume : 0.0;
      CHECK(stiffness[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
            Catch::Approx(want_stiff).margin(1e-12));
    }
}

TEST_CASE("assembled operators are symmetric with clean sparsity", "[assembly]") {
  const Mesh mesh = unit_square_mesh(3, 2);
  const auto space = function_space(mesh, "P", 2);
  for (const CsrMatrix& a : {assemble_mass(*space), assemble_stiffness(*space)}) {
    REQUIRE(a.n == space->global_dof_count);
    REQUIRE(a.row_ptr.size() == static_cast<std::size_t>(a.n) + 1);
    CHECK(a.row_ptr.front() == 0);
    CHECK(a.row_ptr.back() == static_cast<std::int64_t>(a.values.size()));
    for (int r = 0; r < a.n; ++r)
      for (std::int64_t k = a.row_ptr[static_cast<std::size_t>(r)] + 1;
           k < a.row_ptr[static_cast<std::size_t>(r) + 1]; ++k)
        REQUIRE(a.col_idx[static_cast<std::size_t>(k - 1)] <
                a.col_idx[static_cast<std::size_t>(k)]);
    const auto d = dense(a);
    double asym = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        asym = std::max(asym, std::abs(d[i][j] - d[j][i]));
    CHECK(asym < 1e-12);
  }
}

TEST_CASE("operator row sums recover integral identities", "[assembly]") {
  // Lattice over [0,2]x[0,1] so the expected area is not the trivial 1.
  const Mesh mesh = unit_square_mesh(4, 2, {2.0, 1.0});
  const auto space = function_space(mesh, "P", 3);
  const auto mass = assemble_mass(*space);
  const auto stiffness = assemble_stiffness(*space);

  // Sum of all mass entries = integral of 1 = area; each stiffness row
  // kills constants, so its row sums vanish.
  double mass_total = 0.0;
  for (double v : mass.values) mass_total += v;
  CHECK(mass_total == Catch::Approx(2.0).epsilon(1e-13));

  const auto d = dense(stiffness);
  for (const auto& row : d) {
    double s = 0.0;
    for (double v : row) s += v;
    CHECK(std::abs(s) < 1e-12);
  }

  const FEField one = interpolate(space, parse("1", 2));
  const std::vector<double> load = assemble_load(*space, one);
  double load_total = 0.0;
  for (double v : load) load_total += v;
  CHECK(load_total == Catch::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("one-pass Helmholtz assembly equals mass + stiffness + load",
          "[assembly]") {
  const Mesh mesh = unit_square_mesh(2, 2);
  const auto space = function_space(mesh, "P", 3);
  const FEField f = interpolate(space, parse(kHelmholtzForcing, 2));
  const int quad = 2 * space->element.degree;

  const LinearSystem sys = assemble_helmholtz(*space, f, quad);
  const auto combined = dense(sys.matrix);
  const auto mass = dense(assemble_mass(*space, quad));
  const auto stiffness = dense(assemble_stiffness(*space, quad));
  const std::vector<double> load = assemble_load(*space, f, quad);

  double worst = 0.0;
  for (std::size_t i = 0; i < combined.size(); ++i)
    for (std::size_t j = 0; j < combined.size(); ++j)
      worst = std::max(worst,
                       std::abs(combined[i][j] - mass[i][j] - stiffness[i][j]));
  CHECK(worst < 1e-12);
  REQUIRE(sys.rhs.size() == load.size());
  for (std::size_t i = 0; i < load.size(); ++i)
    CHECK(sys.rhs[i] == Catch::Approx(load[i]).margin(1e-12));
}

TEST_CASE("conjugate gradients solves small systems exactly", "[cg]") {
  SECTION("identity converges immediately") {
    const CsrMatrix eye = csr_from_dense({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    const CgResult r = cg_solve(eye, {3.0, -1.0, 2.0});
    CHECK(r.iterations <= 1);
    CHECK(r.x[0] == Catch::Approx(3.0).margin(1e-12));
    CHECK(r.x[1] == Catch::Approx(-1.0).margin(1e-12));
    CHECK(r.x[2] == Catch::Approx(2.0).margin(1e-12));
  }
  SECTION("2x2 system with known inverse") {
    const CsrMatrix a = csr_from_dense({{4, 1}, {1, 3}});
    const CgResult r = cg_solve(a, {1.0, 2.0});
    CHECK(r.x[0] == Catch::Approx(1.0 / 11.0).margin(1e-12));
    CHECK(r.x[1] == Catch::Approx(7.0 / 11.0).margin(1e-12));
    CHECK(r.rel_residual <= 1e-10);
  }
  SECTION("zero right-hand side short-circuits") {
    const CsrMatrix a = csr_from_dense({{4, 1}, {1, 3}});
    const CgResult r = cg_solve(a, {0.0, 0.0});
    CHECK(r.iterations == 0);
    CHECK(r.x[0] == 0.0);
    CHECK(r.x[1] == 0.0);
  }
}

TEST_CASE("conjugate gradients reports failure honestly", "[cg]") {
  SECTION("indefinite matrix is detected") {
    const CsrMatrix a = csr_from_dense({{1, 0}, {0, -1}});
    CHECK_THROWS_WITH(cg_solve(a, {1.0, 1.0}),
                      Catch::Matchers::ContainsSubstring("not positive definite"));
  }
  SECTION("iteration budget exhaustion throws") {
    const CsrMatrix a = csr_from_dense({{1, 0, 0}, {0, 2, 0}, {0, 0, 3}});
    CHECK_THROWS_AS(cg_solve(a, {1.0, 1.0, 1.0}, 1e-14, 1), NumericError);
  }
  SECTION("size mismatch is rejected up front") {
    const CsrMatrix a = csr_from_dense({{1, 0}, {0, 1}});
    CHECK_THROWS_AS(cg_solve(a, {1.0, 2.0, 3.0}), ValidationError);
    CHECK_THROWS_AS(matvec(a, {1.0}), ValidationError);
  }
}

TEST_CASE("load assembly rejects fields from a different space", "[assembly]") {
  const auto space = function_space(unit_square_mesh(2, 2), "P", 2);
  const auto other = function_space(unit_square_mesh(3, 3), "P", 2);
  const FEField f = interpolate(other, parse("1", 2));
  CHECK_THROWS_AS(assemble_load(*space, f), ValidationError);
}

TEST_CASE("the Helmholtz solve satisfies its own discrete system", "[helmholtz]") {
  const Mesh mesh = unit_square_mesh(6, 6);
  const int degree = 2;
  SolveStats stats;
  const FEField u = solve_helmholtz(mesh, degree, &stats);

  CHECK(stats.cg_iterations > 0);
  CHECK(stats.cg_rel_residual <= 1e-10);

  // Re-assemble independently and measure the true algebraic residual.
  const auto space = u.space;
  const FEField f = interpolate(space, parse(kHelmholtzForcing, 2));
  const LinearSystem sys = assemble_helmholtz(*space, f);
  const std::vector<double> ax = matvec(sys.matrix, u.coeffs);
  double rnorm = 0.0, bnorm = 0.0;
  for (std::size_t i = 0; i < ax.size(); ++i) {
    rnorm += (sys.rhs[i] - ax[i]) * (sys.rhs[i] - ax[i]);
    bnorm += sys.rhs[i] * sys.rhs[i];
  }
  CHECK(std::sqrt(rnorm / bnorm) <= 1e-9);
}

TEST_CASE("the Helmholtz error shrinks under refinement", "[helmholtz]") {
  const Expr exact_expr = parse(kHelmholtzExact, 2);
  auto exact = [&](const Vec3& p) { return eval_expr(exact_expr, p); };
  const double err4 = l2_error(solve_helmholtz(unit_square_mesh(4, 4), 2), exact);
  const double err8 = l2_error(solve_helmholtz(unit_square_mesh(8, 8), 2), exact);
  CHECK(err8 < err4 / 4.0);  // at least the quadratic-degree rate
  CHECK(err4 < 1.0);
}

TEST_CASE("the Helmholtz solver only accepts 2-D meshes", "[helmholtz]") {
  CHECK_THROWS_AS(solve_helmholtz(box_mesh(2, 2, 2), 1), ValidationError);
}
