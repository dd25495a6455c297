#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "drumlab/density.hpp"
#include "drumlab/errors.hpp"
#include "drumlab/weyl_inversion.hpp"
#include "support.hpp"

using namespace drumlab;
using namespace drumlab::testing;

namespace {

const Solved& sine_full() {
  static const Solved s = sine_1d(201, 0);
  return s;
}

const Solved& conformal_rect_full() {
  static const Solved s =
      solve(build_rect_mesh(24, 20, 1.2, 1.0, Topology::Rectangle),
            MetricDescriptor::conformal("0.3*sin(pi*x/1.2)*sin(pi*y)+0.1*x"),
            BoundaryCondition::Dirichlet, 0);
  return s;
}

const Solved& conformal_torus_full() {
  static const Solved s =
      solve(build_rect_mesh(21, 21, 1.0, 1.0, Topology::Torus2),
            MetricDescriptor::conformal("0.15*sin(2*pi*x+0.3)+0.1*cos(2*pi*(x+2*y))"),
            BoundaryCondition::None, 0);
  return s;
}

Eigen::VectorXd sqrt_det(const Solved& s) {
  Eigen::VectorXd mu(s.mesh.num_vertices());
  for (int v = 0; v < mu.size(); ++v) mu[v] = s.metric.volume_density(v);
  return mu;
}

double rel_l2(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& w) {
  return std::sqrt((a - b).cwiseAbs2().dot(w) / b.cwiseAbs2().dot(w));
}

Eigen::MatrixXd random_spd(int n, std::mt19937& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = N(rng);
  return B * B.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST(Gram, TrueMeasureGivesIdentity) {
  const auto& s = sine_full();
  const Eigen::MatrixXd G = gram_matrix(s.es.modes, s.es.weights, 60);
  EXPECT_LE((G - Eigen::MatrixXd::Identity(60, 60)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Gram, ConstantMode) {
  const Mesh m = build_interval_mesh(11, 1.0);
  const Eigen::MatrixXd e = Eigen::MatrixXd::Constant(11, 1, 0.8);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(11, 0.3);
  EXPECT_NEAR(gram_matrix(e, w, 1)(0, 0), 0.64 * 0.3 * 11, 1e-14);
}

// Euclidean reference on the sine metric, checked against long double sums.
TEST(Gram, EuclideanReferenceMatchesExtendedPrecision) {
  const auto& s = sine_full();
  const Eigen::VectorXd ref = euclidean_weights(s.mesh);
  const int K = 40;
  const Eigen::MatrixXd G = gram_matrix(s.es.modes, ref, K);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) {
      long double acc = 0;
      for (int x = 0; x < ref.size(); ++x)
        acc += static_cast<long double>(s.es.modes(x, i)) * s.es.modes(x, j) * ref[x];
      EXPECT_NEAR(G(i, j), static_cast<double>(acc), 1e-13);
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  EXPECT_LT(es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff(), kGramConditionLimit);
}

TEST(Orthonormalize, Examples) {
  EXPECT_LE((orthonormalize(Eigen::MatrixXd::Identity(3, 3)) - Eigen::MatrixXd::Identity(3, 3))
                .cwiseAbs()
                .maxCoeff(),
            1e-15);
  Eigen::MatrixXd G(2, 2);
  G << 4, 0, 0, 9;
  const Eigen::MatrixXd a = orthonormalize(G);
  EXPECT_NEAR(a(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(a(1, 1), 1.0 / 3, 1e-15);
  EXPECT_EQ(a(0, 1), 0.0);
  EXPECT_EQ(a(1, 0), 0.0);
}

TEST(Orthonormalize, RandomSpd) {
  std::mt19937 rng(20240611);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd G = random_spd(10, rng);
    const Eigen::MatrixXd a = orthonormalize(G);
    EXPECT_LE((a * G * a.transpose() - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-10);
    for (int i = 0; i < 10; ++i) {
      EXPECT_GT(a(i, i), 0.0);
      for (int j = i + 1; j < 10; ++j) EXPECT_EQ(a(i, j), 0.0);
    }
  }
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 2, 2, 1;
  EXPECT_THROW(orthonormalize(bad), Error);
}

TEST(RecoverDensity, TrueMeasureGivesOne) {
  const auto& s = sine_full();
  const DensityRecovery d = recover_density(s.es.modes, s.es.weights, s.mesh);
  EXPECT_LE((d.mu.array() - 1.0).abs().maxCoeff(), 1e-8);
}

// mu * reference = w at every kept vertex once all modes are used.
TEST(RecoverDensity, FullTruncationIsExact) {
  for (const Solved* s : {&sine_full(), &conformal_rect_full(), &conformal_torus_full()}) {
    const Eigen::VectorXd ref = euclidean_weights(s->mesh);
    const DensityRecovery d = recover_density(s->es.modes, ref, s->mesh);
    int kept = 0;
    for (int x = 0; x < s->mesh.num_vertices(); ++x) {
      if (!d.kept[x]) continue;
      ++kept;
      EXPECT_NEAR(d.mu[x] * ref[x] / s->es.weights[x], 1.0, 1e-8) << "vertex " << x;
    }
    EXPECT_EQ(kept, s->ops.num_free());
    const DensityRecovery other = recover_density(s->es.modes, Eigen::VectorXd::Constant(ref.size(), 0.01) + ref, s->mesh);
    for (int x = 0; x < s->mesh.num_vertices(); ++x)
      if (other.kept[x]) EXPECT_NEAR(other.mu[x] * (ref[x] + 0.01) / s->es.weights[x], 1.0, 1e-8);
  }
}

// The discrete truth w / w_ref differs from sqrt(det g) at the vertices by the
// cell averaging of the metric, O(h^2); the frozen bound is twice the measured
// 2.5e-4.
TEST(RecoverDensity, FullTruncationAgainstContinuum) {
  const auto& s = sine_full();
  const DensityRecovery d = recover_density(s.es.modes, euclidean_weights(s.mesh), s.mesh);
  const Eigen::VectorXd mu = sqrt_det(s);
  double worst = 0;
  for (int x = 1; x < 200; ++x) worst = std::max(worst, std::fabs(d.mu[x] - mu[x]) / mu[x]);
  EXPECT_LE(worst, 5e-4);
}

// Calibrated once against the forward oracle: 0.22% at K = 50; frozen at 2%.
TEST(RecoverDensity, TruncatedOneDimensional) {
  const auto& s = sine_full();
  const Eigen::VectorXd ref = euclidean_weights(s.mesh);
  const DensityRecovery d = recover_density(s.es.modes, ref, s.mesh, 50);
  EXPECT_LE(rel_l2(d.mu, sqrt_det(s), ref), 0.02);
}

TEST(RecoverDensity, TruncationTrend) {
  const auto& s = sine_full();
  const Eigen::VectorXd ref = euclidean_weights(s.mesh);
  const Eigen::VectorXd mu = sqrt_det(s);
  double prev = 1e9;
  for (int K : {10, 20, 40, 0}) {
    const double e = rel_l2(recover_density(s.es.modes, ref, s.mesh, K).mu, mu, ref);
    EXPECT_LE(e, prev * 1.1) << "K " << K;
    prev = e;
  }
}

TEST(RecoverDensity, InvariantUnderResigning) {
  const auto& s = sine_full();
  const Eigen::VectorXd ref = euclidean_weights(s.mesh);
  const DensityRecovery base = recover_density(s.es.modes, ref, s.mesh, 50);
  std::mt19937 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd m = s.es.modes;
    for (int j = 0; j < m.cols(); ++j)
      if (rng() & 1) m.col(j) *= -1.0;
    const DensityRecovery d = recover_density(m, ref, s.mesh, 50);
    EXPECT_LE((d.mu - base.mu).cwiseAbs().maxCoeff(), 1e-10);
  }
  Eigen::MatrixXd flipped = s.es.modes;
  flipped.col(0) *= -1.0;
  EXPECT_LE((recover_density(flipped, ref, s.mesh, 50).mu - base.mu).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(RecoverDensity, ClosedManifoldConstantMode) {
  const auto& s = conformal_torus_full();
  const Eigen::VectorXd ref = euclidean_weights(s.mesh);
  const DensityRecovery d = recover_density(s.es.modes, ref, s.mesh);
  const double vol = s.es.weights.sum();
  // e1 = Vol^-1/2, so mu = mu_tilde Vol^1/2
  EXPECT_LE((d.mu - d.mu_tilde * std::sqrt(vol)).cwiseAbs().maxCoeff(), 1e-8 * d.mu.maxCoeff());
  for (char k : d.kept) EXPECT_TRUE(k);
}

TEST(RecoverDensity, WrongFirstModeSignsAreRejected) {
  const auto& s = sine_full();
  Eigen::MatrixXd m = s.es.modes;
  for (int x = 120; x < 201; ++x) m(x, 0) = -m(x, 0);
  try {
    recover_density(m, euclidean_weights(s.mesh), s.mesh, 50);
    FAIL() << "expected recovery failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RecoveryFailure);
  }
}

TEST(RecoverDensity, SingularGramIsTooDeep) {
  const auto& s = sine_full();
  Eigen::MatrixXd m = s.es.modes.leftCols(5);
  m.col(4) = m.col(3);
  try {
    recover_density(m, euclidean_weights(s.mesh), s.mesh);
    FAIL() << "expected truncation-too-deep";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TruncationTooDeep);
  }
}
