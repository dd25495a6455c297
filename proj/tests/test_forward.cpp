#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "drumlab/errors.hpp"
#include "drumlab/forward.hpp"
#include "support.hpp"

using namespace drumlab;
using namespace drumlab::testing;
using std::numbers::pi;

namespace {

const Solved& sine201() {
  static const Solved s = sine_1d(201, 60);
  return s;
}

// conformal rectangle, all modes
const Solved& conformal_rect() {
  static const Solved s =
      solve(build_rect_mesh(24, 20, 1.2, 1.0, Topology::Rectangle),
            MetricDescriptor::conformal("0.3*sin(pi*x/1.2)*sin(pi*y)+0.1*x"),
            BoundaryCondition::Dirichlet, 0);
  return s;
}

const Solved& flat_torus() {
  static const Solved s = solve(build_rect_mesh(33, 33, 1.0, 1.0, Topology::Torus2),
                                MetricDescriptor::identity(2), BoundaryCondition::None, 40);
  return s;
}

void check_residual_and_orthonormality(const Solved& s) {
  const auto& ops = s.ops;
  const int K = s.es.size();
  Eigen::MatrixXd E(ops.num_free(), K);
  for (int f = 0; f < ops.num_free(); ++f) E.row(f) = s.es.modes.row(ops.free_vertices[f]);
  for (int j = 0; j < K; ++j) {
    const Eigen::VectorXd Ke = ops.stiffness * E.col(j);
    const double l2 = s.es.frequencies[j] * s.es.frequencies[j];
    const Eigen::VectorXd r = Ke - l2 * ops.mass.cwiseProduct(E.col(j));
    EXPECT_LE(r.norm(), 1e-8 * std::max(Ke.norm(), 1e-300) + 1e-12) << "mode " << j;
  }
  const Eigen::MatrixXd G = E.transpose() * ops.mass.asDiagonal() * E;
  EXPECT_LE((G - Eigen::MatrixXd::Identity(K, K)).cwiseAbs().maxCoeff(), 1e-10);
}

// Smallest eigenvalue of K x = l M x for tridiagonal K and diagonal M (1D only).
double smallest_tridiagonal(const Operators& ops) {
  const int n = ops.num_free();
  Eigen::VectorXd d(n), e(n - 1);
  for (int i = 0; i < n; ++i) d[i] = ops.stiffness.coeff(i, i) / ops.mass[i];
  for (int i = 0; i + 1 < n; ++i)
    e[i] = ops.stiffness.coeff(i, i + 1) / std::sqrt(ops.mass[i] * ops.mass[i + 1]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

const Solved& rect64() {
  static const Solved s = rect_phi(64, 40);
  return s;
}

}  // namespace

TEST(Assembly, FlatIntervalStencil) {
  const Mesh m = build_interval_mesh(11, 1.0);
  const Operators ops =
      assemble_operators(m, sample_metric(MetricDescriptor::identity(1), m), BoundaryCondition::Dirichlet);
  ASSERT_EQ(ops.num_free(), 9);
  const double h = 0.1;
  for (int i = 0; i < 9; ++i) {
    EXPECT_NEAR(ops.stiffness.coeff(i, i), 2 / h, 1e-12);
    if (i + 1 < 9) EXPECT_NEAR(ops.stiffness.coeff(i, i + 1), -1 / h, 1e-12);
    EXPECT_NEAR(ops.mass[i], h, 1e-15);
  }
  EXPECT_NEAR(ops.weights[0], h / 2, 1e-15);
}

TEST(Assembly, TorusRowsSumToZero) {
  const auto& ops = flat_torus().ops;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ops.num_free());
  const Eigen::VectorXd rows = ops.stiffness * ones;
  EXPECT_LE(rows.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(ops.num_free(), 32 * 32);
}

TEST(Assembly, SymmetricPositiveSemidefinite) {
  const auto& ops = conformal_rect().ops;
  const Eigen::SparseMatrix<double> asym = ops.stiffness - Eigen::SparseMatrix<double>(ops.stiffness.transpose());
  EXPECT_LE(asym.norm(), 1e-12 * ops.stiffness.norm());
  EXPECT_GT(ops.mass.minCoeff(), 0.0);
  EXPECT_GT(conformal_rect().es.frequencies.front(), 0.0);
}

TEST(Assembly, DimensionMismatch) {
  const Mesh m = build_interval_mesh(5, 1.0);
  const Mesh other = build_interval_mesh(7, 1.0);
  const MetricField g = sample_metric(MetricDescriptor::identity(1), other);
  EXPECT_THROW(assemble_operators(m, g, BoundaryCondition::Dirichlet), Error);
}

// Arc length turns the sine metric into the flat unit interval, so the
// continuum Dirichlet frequencies are k pi; the fine-grid solve is the
// reference the coarse one is held to.
TEST(Forward, SineMetricLowestFrequency) {
  const double coarse = sine201().es.frequencies[0];
  const Mesh fine_mesh = build_interval_mesh(2001, 1.0);
  const Operators fine = assemble_operators(
      fine_mesh, sample_metric(MetricDescriptor::conformal(kSineU), fine_mesh), BoundaryCondition::Dirichlet);
  const double reference = std::sqrt(smallest_tridiagonal(fine));
  EXPECT_LE(std::fabs(coarse - reference) / reference, 0.005);
  EXPECT_NEAR(reference, pi, 1e-4);
}

TEST(Forward, FlatIntervalFrequencies) {
  const Solved s = solve(build_interval_mesh(201, 1.0), MetricDescriptor::identity(1),
                         BoundaryCondition::Dirichlet, 5);
  EXPECT_LE(std::fabs(s.es.frequencies[0] - pi), 1e-3);
  for (int k = 1; k <= 5; ++k) EXPECT_NEAR(s.es.frequencies[k - 1] / (k * pi), 1.0, 1e-3);
  // E_1(0.5) = 2 sin^2(pi/2)
  EXPECT_NEAR(s.table.fields(100, 0), 2.0, 1e-3);
}

TEST(Forward, ResidualAndOrthonormality) {
  check_residual_and_orthonormality(sine201());
  check_residual_and_orthonormality(conformal_rect());
  check_residual_and_orthonormality(flat_torus());
}

TEST(Forward, SignConvention) {
  for (const Solved* s : {&sine201(), &conformal_rect()}) {
    for (int j = 0; j < s->es.size(); ++j) {
      const Eigen::VectorXd e = s->es.modes.col(j);
      const double cut = 1e-12 * e.cwiseAbs().maxCoeff();
      int first = 0;
      while (std::fabs(e[first]) <= cut) ++first;
      EXPECT_GT(e[first], 0.0);
    }
  }
  Eigen::VectorXd v(3);
  v << 0.0, -2.0, 1.0;
  normalize_sign(v);
  EXPECT_EQ(v[1], 2.0);
}

TEST(Forward, GroundStates) {
  const auto& t = flat_torus();
  EXPECT_LE(std::fabs(t.es.frequencies[0]), 1e-6);
  const Eigen::VectorXd e1 = t.es.modes.col(0);
  EXPECT_LE(e1.maxCoeff() - e1.minCoeff(), 1e-10);
  // Dirichlet: e1 is positive at every interior vertex
  const auto& r = conformal_rect();
  for (int v : r.ops.free_vertices) EXPECT_GT(r.es.modes(v, 0), 0.0);
}

TEST(Forward, FlatTorusMultiplicities) {
  const auto& t = flat_torus();
  // 5-point-equivalent stencil: 4/h^2 sin^2(pi k h) per direction
  const double h = 1.0 / 32;
  const double l1 = 4 / (h * h) * std::pow(std::sin(pi * h), 2);
  std::vector<double> expect{0, l1, l1, l1, l1, 2 * l1, 2 * l1, 2 * l1, 2 * l1};
  for (int j = 0; j < 9; ++j) {
    const double l2 = t.es.frequencies[j] * t.es.frequencies[j];
    EXPECT_NEAR(l2, expect[j], 1e-8 * 8 * l1);
    if (j > 0) EXPECT_NEAR(l2 / (j <= 4 ? 4 * pi * pi : 8 * pi * pi), 1.0, 0.01);
  }
  ASSERT_GE(t.table.size(), 3);
  EXPECT_EQ(t.table.multiplicities[0], 1);
  EXPECT_EQ(t.table.multiplicities[1], 4);
  EXPECT_EQ(t.table.multiplicities[2], 4);
}

TEST(Forward, RectangleClosedForm) {
  const Solved& s = rect64();
  std::vector<double> exact;
  for (int m = 1; m <= 30; ++m)
    for (int n = 1; n <= 30; ++n) exact.push_back(pi * pi * (m * m / (kPhi * kPhi) + n * n));
  std::sort(exact.begin(), exact.end());
  for (int j = 0; j < 20; ++j) {
    const double l2 = s.es.frequencies[j] * s.es.frequencies[j];
    EXPECT_LE(std::fabs(l2 - exact[j]) / exact[j], 0.01) << "mode " << j;
  }
  check_residual_and_orthonormality(s);
}

TEST(LocalWeyl, SimpleSpectrumFieldsAreSquares) {
  const auto& s = sine201();
  ASSERT_EQ(s.table.size(), s.es.size());
  for (int j = 0; j < s.table.size(); ++j) {
    EXPECT_EQ(s.table.frequencies[j], s.es.frequencies[j]);
    EXPECT_LE((s.table.fields.col(j) - s.es.modes.col(j).cwiseAbs2()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(s.table.fields.col(j).dot(s.table.weights), 1.0, 1e-10);
  }
}

TEST(LocalWeyl, CountingFunctions) {
  const auto& t = conformal_rect().table;
  for (int v : {0, 37, 200}) {
    double prev = -1;
    for (double lam = 0; lam < t.frequencies.back() + 1; lam += 0.37) {
      const double n = local_counting(t, v, lam);
      EXPECT_GE(n, prev);
      prev = n;
    }
  }
  for (double lam : {0.0, 5.0, 12.0, 30.0, 100.0}) {
    double direct = 0;
    for (int j = 0; j < t.size(); ++j)
      if (t.frequencies[j] <= lam) direct += t.multiplicities[j];
    EXPECT_NEAR(global_counting(t, lam), direct, 1e-8);
  }
  // non-strict: the jump belongs to its own frequency
  EXPECT_NEAR(global_counting(t, t.frequencies[0]), 1.0, 1e-10);
}

TEST(LocalWeyl, TorusClustersAreConstant) {
  const auto& t = flat_torus().table;
  const double vol = 1.0;
  EXPECT_LE((t.fields.col(0).array() - 1.0 / vol).abs().maxCoeff(), 1e-10);
  // the last cluster may be cut by K
  for (int j = 1; j + 1 < t.size(); ++j) {
    const Eigen::VectorXd f = t.fields.col(j);
    EXPECT_LE(f.maxCoeff() - f.minCoeff(), 1e-8 * f.maxCoeff()) << "cluster " << j;
    EXPECT_NEAR(f.dot(t.weights), t.multiplicities[j], 1e-8);
  }
}

TEST(LocalWeyl, MergeTolerance) {
  EXPECT_DOUBLE_EQ(merge_tolerance(0.001), 1e-8);
  EXPECT_DOUBLE_EQ(merge_tolerance(100.0), 1e-4);
  EigenSystem es;
  es.frequencies = {1.0, 1.0 + 5e-7, 2.0};
  es.modes = Eigen::MatrixXd::Identity(3, 3);
  es.weights = Eigen::VectorXd::Ones(3);
  const LocalWeylTable t = synthesize_local_weyl(es);
  ASSERT_EQ(t.size(), 2);
  EXPECT_EQ(t.multiplicities, (std::vector<int>{2, 1}));
  EXPECT_DOUBLE_EQ(t.fields(0, 0) + t.fields(1, 0), 2.0);
}

TEST(LocalWeyl, ResolvedCount) {
  EXPECT_EQ(resolved_count({1.0, 2.0, 3.0, 6.0}, 0.1), 3);
  EXPECT_EQ(resolved_count({10.0}, 0.1), 0);
}

// max |e_j| / lambda_j^((n-1)/2): last decile median within 10x of the first
TEST(Forward, SupNormGrowthIsBounded) {
  auto ratio = [](const Solved& s, int n, int K) {
    std::vector<double> r;
    for (int j = 0; j < K; ++j)
      r.push_back(s.es.modes.col(j).cwiseAbs().maxCoeff() /
                  std::pow(s.es.frequencies[j], (n - 1) / 2.0));
    const int d = std::max(1, K / 10);
    std::vector<double> lo(r.begin(), r.begin() + d), hi(r.end() - d, r.end());
    std::nth_element(lo.begin(), lo.begin() + d / 2, lo.end());
    std::nth_element(hi.begin(), hi.begin() + d / 2, hi.end());
    return hi[d / 2] / lo[d / 2];
  };
  const auto& r = conformal_rect();
  EXPECT_LE(ratio(sine201(), 1, resolved_count(sine201().es.frequencies, 1.0 / 200)), 10.0);
  EXPECT_LE(ratio(r, 2, resolved_count(r.es.frequencies, max_cell_diameter(r.mesh))), 10.0);
}

// N(lambda) (2 pi)^n / (omega_n Vol lambda^n) over the resolved range
TEST(Forward, WeylTrend) {
  auto check = [](const Solved& s, int n, double vol) {
    const double omega = n == 1 ? 2.0 : pi;
    const int R = resolved_count(s.es.frequencies, max_cell_diameter(s.mesh));
    ASSERT_GE(R, 10);
    std::vector<double> ratios;
    for (int j = R / 2; j < R; ++j) {
      const double lam = s.es.frequencies[j];
      ratios.push_back((j + 1) * std::pow(2 * pi, n) / (omega * vol * std::pow(lam, n)));
    }
    for (double q : ratios) {
      EXPECT_GE(q, 0.7);
      EXPECT_LE(q, 1.3);
    }
    // approach from below for Dirichlet: the upper half is closer to one
    EXPECT_LE(std::fabs(1 - ratios.back()), std::fabs(1 - ratios.front()) + 0.02);
  };
  check(sine201(), 1, 1.0);
  check(rect64(), 2, kPhi);
}

TEST(Forward, ShearPairIsDiscretelyIsospectral) {
  Eigen::MatrixXd g2(2, 2);
  g2 << 1, 1, 1, 2;
  const Mesh m = build_rect_mesh(41, 41, 1.0, 1.0, Topology::Torus2);
  const auto a = synthesize_local_weyl(solve_eigensystem(
      assemble_operators(m, sample_metric(MetricDescriptor::identity(2), m), BoundaryCondition::None), 120));
  const auto b = synthesize_local_weyl(solve_eigensystem(
      assemble_operators(m, sample_metric(MetricDescriptor::constant_matrix(g2), m), BoundaryCondition::None),
      120));
  ASSERT_GE(std::min(a.size(), b.size()), 21);
  for (int j = 0; j < 20; ++j) {
    EXPECT_NEAR(a.frequencies[j], b.frequencies[j], 0.01 * std::max(a.frequencies[j], 1.0));
    EXPECT_EQ(a.multiplicities[j], b.multiplicities[j]);
  }
}
