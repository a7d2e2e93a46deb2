// SPDX-FileCopyrightText: Copyright (c) 2026 The fevis authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>
#include <fevis/element.hpp>

#include "test_util.hpp"

using namespace fevis;

namespace {

long long binomial(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Uniform random point in the reference simplex, a safe margin from the
/// boundary when margin > 0.
Vec3 random_ref_point(int dim, double margin = 0.0) {
  while (true) {
    Vec3 p{0, 0, 0};
    double sum = 0.0;
    for (int d = 0; d < dim; ++d) {
      p[static_cast<std::size_t>(d)] = testutil::uniform(margin, 1.0 - margin);
      sum += p[static_cast<std::size_t>(d)];
    }
    if (sum <= 1.0 - margin) return p;
  }
}

/// Dense total-degree polynomial with fixed random coefficients.
struct RandomPoly {
  int dim, degree;
  std::vector<std::array<int, 3>> powers;
  std::vector<double> coeffs;

  RandomPoly(int dim_, int degree_) : dim(dim_), degree(degree_) {
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b)
        for (int c = 0; a + b + c <= degree; ++c) {
          if (dim == 2 && c > 0) continue;
          powers.push_back({a, b, c});
          coeffs.push_back(testutil::uniform(-1.0, 1.0));
        }
  }

  double operator()(const Vec3& p) const {
    double out = 0.0;
    for (std::size_t m = 0; m < powers.size(); ++m) {
      double term = coeffs[m];
      for (int d = 0; d < dim; ++d)
        for (int rep = 0; rep < powers[m][static_cast<std::size_t>(d)]; ++rep)
          term *= p[static_cast<std::size_t>(d)];
      out += term;
    }
    return out;
  }
};

} // namespace

TEST_CASE("basis size follows the lattice count", "[element]") {
  for (int dim : {2, 3})
    for (int k = 1; k <= kMaxDegree; ++k) {
      const ReferenceElement elem = lagrange_element(dim, k);
      CHECK(elem.ndofs == static_cast<int>(binomial(k + dim, dim)));
      CHECK(static_cast<int>(elem.nodes.size()) == elem.ndofs);
    }
}

TEST_CASE("degree bounds are enforced", "[element]") {
  CHECK_THROWS_AS(lagrange_element(2, 0), ValidationError);
  CHECK_THROWS_AS(lagrange_element(2, 11), ValidationError);
  CHECK_THROWS_AS(lagrange_element(3, -1), ValidationError);
  CHECK_THROWS_AS(lagrange_element(4, 2), ValidationError);
}

TEST_CASE("nodal basis is Kronecker delta at its own nodes", "[element]") {
  for (int dim : {2, 3})
    for (int k = 1; k <= kMaxDegree; ++k) {
      const ReferenceElement elem = lagrange_element(dim, k);
      double worst = 0.0;
      for (int j = 0; j < elem.ndofs; ++j) {
        const auto phi = eval_basis(elem, elem.nodes[static_cast<std::size_t>(j)]);
        for (int i = 0; i < elem.ndofs; ++i) {
          const double want = (i == j) ? 1.0 : 0.0;
          worst = std::max(worst, std::abs(phi[static_cast<std::size_t>(i)] - want));
        }
      }
      INFO("dim " << dim << " degree " << k);
      CHECK(worst < 1e-10);
    }
}

TEST_CASE("basis forms a partition of unity", "[element]") {
  for (int dim : {2, 3})
    for (int k : {1, 2, 3, 5, 8, 10}) {
      const ReferenceElement elem = lagrange_element(dim, k);
      for (int trial = 0; trial < 50; ++trial) {
        const Vec3 p = random_ref_point(dim);
        const auto phi = eval_basis(elem, p);
        double sum = 0.0;
        for (double v : phi) sum += v;
        CHECK(sum == Catch::Approx(1.0).margin(1e-10));
      }
    }
}

TEST_CASE("linear element matches the hand-written formulas", "[element]") {
  const ReferenceElement elem = lagrange_element(2, 1);
  REQUIRE(elem.ndofs == 3);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 p = random_ref_point(2);
    const auto phi = eval_basis(elem, p);
    CHECK(phi[0] == Catch::Approx(1.0 - p[0] - p[1]).margin(1e-14));
    CHECK(phi[1] == Catch::Approx(p[0]).margin(1e-14));
    CHECK(phi[2] == Catch::Approx(p[1]).margin(1e-14));
    const auto grad = eval_basis_gradients(elem, p);
    const double want[3][2] = {{-1, -1}, {1, 0}, {0, 1}};
    for (int i = 0; i < 3; ++i)
      for (int d = 0; d < 2; ++d)
        CHECK(grad[static_cast<std::size_t>(i * 2 + d)] ==
              Catch::Approx(want[i][d]).margin(1e-13));
  }
}

TEST_CASE("interpolation at nodes reproduces polynomials of matching degree",
          "[element]") {
  for (int dim : {2, 3})
    for (int k : {1, 2, 3, 4, 6, 10}) {
      const ReferenceElement elem = lagrange_element(dim, k);
      const RandomPoly poly(dim, k);
      std::vector<double> nodal(static_cast<std::size_t>(elem.ndofs));
      for (int i = 0; i < elem.ndofs; ++i)
        nodal[static_cast<std::size_t>(i)] = poly(elem.nodes[static_cast<std::size_t>(i)]);
      for (int trial = 0; trial < 30; ++trial) {
        const Vec3 p = random_ref_point(dim);
        const auto phi = eval_basis(elem, p);
        double value = 0.0;
        for (int i = 0; i < elem.ndofs; ++i)
          value += nodal[static_cast<std::size_t>(i)] * phi[static_cast<std::size_t>(i)];
        INFO("dim " << dim << " degree " << k);
        CHECK(value == Catch::Approx(poly(p)).margin(1e-9));
      }
    }
}

TEST_CASE("gradients agree with central finite differences", "[element]") {
  const double h = 1e-6;
  for (int dim : {2, 3})
    for (int k : {1, 3, 7, 10}) {
      const ReferenceElement elem = lagrange_element(dim, k);
      for (int trial = 0; trial < 10; ++trial) {
        const Vec3 p = random_ref_point(dim, 1e-3);
        const auto grad = eval_basis_gradients(elem, p);
        for (int d = 0; d < dim; ++d) {
          Vec3 plus = p, minus = p;
          plus[static_cast<std::size_t>(d)] += h;
          minus[static_cast<std::size_t>(d)] -= h;
          const auto vp = eval_basis(elem, plus);
          const auto vm = eval_basis(elem, minus);
          for (int i = 0; i < elem.ndofs; ++i) {
            const double fd = (vp[static_cast<std::size_t>(i)] - vm[static_cast<std::size_t>(i)]) / (2 * h);
            const double an = grad[static_cast<std::size_t>(i * dim + d)];
            const double scale = std::max(1.0, std::abs(an));
            INFO("dim " << dim << " degree " << k << " node " << i << " axis " << d);
            CHECK(std::abs(fd - an) / scale < 1e-5);
          }
        }
      }
    }
}

TEST_CASE("node classification counts match the simplex combinatorics", "[element]") {
  for (int dim : {2, 3})
    for (int k : {1, 2, 3, 4, 5}) {
      const ReferenceElement elem = lagrange_element(dim, k);
      int vertices = 0, edges = 0, faces = 0, interior = 0;
      for (const NodeClass c : elem.node_classes) {
        if (c == NodeClass::Vertex) ++vertices;
        else if (c == NodeClass::Edge) ++edges;
        else if (c == NodeClass::Face) ++faces;
        else ++interior;
      }
      const int num_edges = (dim == 2) ? 3 : 6;
      CHECK(vertices == dim + 1);
      CHECK(edges == num_edges * (k - 1));
      if (dim == 2) {
        CHECK(faces == 0);
        CHECK(interior == (k - 1) * (k - 2) / 2);
      } else {
        CHECK(faces == 4 * (k - 1) * (k - 2) / 2);
        CHECK(interior == (k - 1) * (k - 2) * (k - 3) / 6);
      }
    }
}

TEST_CASE("batch tabulation matches pointwise evaluation", "[element]") {
  const ReferenceElement elem = lagrange_element(2, 3);
  std::vector<Vec3> points;
  for (int trial = 0; trial < 7; ++trial) points.push_back(random_ref_point(2));
  const BasisTabulation tab = tabulate(elem, points);
  REQUIRE(tab.values.size() == points.size() * static_cast<std::size_t>(elem.ndofs));
  REQUIRE(tab.gradients.size() ==
          points.size() * static_cast<std::size_t>(elem.ndofs) * 2);
  for (std::size_t q = 0; q < points.size(); ++q) {
    const auto phi = eval_basis(elem, points[q]);
    const auto grad = eval_basis_gradients(elem, points[q]);
    for (int i = 0; i < elem.ndofs; ++i) {
      CHECK(tab.values[q * static_cast<std::size_t>(elem.ndofs) + static_cast<std::size_t>(i)] ==
            phi[static_cast<std::size_t>(i)]);
      for (int d = 0; d < 2; ++d)
        CHECK(tab.gradients[(q * static_cast<std::size_t>(elem.ndofs) +
                             static_cast<std::size_t>(i)) * 2 + static_cast<std::size_t>(d)] ==
              grad[static_cast<std::size_t>(i * 2 + d)]);
    }
  }
}
