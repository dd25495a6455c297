#include "drumlab/density.hpp"

#include <lapacke.h>

#include <cmath>
#include <limits>

#include "drumlab/errors.hpp"

namespace drumlab {

Eigen::VectorXd euclidean_weights(const Mesh& mesh) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(mesh.num_vertices());
  const int nc = mesh.corners_per_cell();
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const double vol = cell_volume(mesh, c);
    for (int k = 0; k < nc; ++k) w[mesh.cells[c].v[k]] += vol / nc;
  }
  return w;
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& modes, const Eigen::VectorXd& reference_weights,
                            int K) {
  require(K >= 1 && K <= modes.cols(), ErrorCode::OutOfRange,
          "truncation K = " + std::to_string(K) + " outside 1.." + std::to_string(modes.cols()));
  require(reference_weights.size() == modes.rows(), ErrorCode::DimensionMismatch,
          "reference weights do not match the field length");
  require(reference_weights.minCoeff() > 0.0, ErrorCode::Usage,
          "reference weights must be positive");
  const auto E = modes.leftCols(K);
  Eigen::MatrixXd G = E.transpose() * reference_weights.asDiagonal() * E;
  return 0.5 * (G + G.transpose());
}

namespace {

// Reciprocal 1-norm condition estimate from a Cholesky factor (LAPACK dpocon).
double condition_estimate(const Eigen::MatrixXd& G, const Eigen::MatrixXd& L) {
  const lapack_int n = static_cast<lapack_int>(G.rows());
  const double anorm = G.cwiseAbs().colwise().sum().maxCoeff();
  double rcond = 0.0;
  Eigen::MatrixXd f = L;
  if (LAPACKE_dpocon(LAPACK_COL_MAJOR, 'L', n, f.data(), n, anorm, &rcond) != 0 || rcond <= 0.0)
    return std::numeric_limits<double>::infinity();
  return 1.0 / rcond;
}

}  // namespace

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& G) {
  const lapack_int n = static_cast<lapack_int>(G.rows());
  require(G.rows() == G.cols() && n > 0, ErrorCode::DimensionMismatch, "Gram matrix is not square");
  Eigen::MatrixXd L = G;
  if (LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, L.data(), n) != 0)
    fail(ErrorCode::Numeric, "Cholesky factorization of the Gram matrix failed");
  L.triangularView<Eigen::StrictlyUpper>().setZero();
  if (LAPACKE_dtrtri(LAPACK_COL_MAJOR, 'L', 'N', n, L.data(), n) != 0)
    fail(ErrorCode::Numeric, "triangular inverse failed");
  return L;
}

DensityRecovery recover_density(const Eigen::MatrixXd& modes, const Eigen::VectorXd& reference_weights,
                                const Mesh& mesh, int K) {
  if (K <= 0) K = static_cast<int>(modes.cols());
  DensityRecovery d;
  d.K = K;
  d.reference_weights = reference_weights;
  const Eigen::MatrixXd G = gram_matrix(modes, reference_weights, K);

  Eigen::MatrixXd L = G;
  const lapack_int n = K;
  if (LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, L.data(), n) != 0)
    fail(ErrorCode::TruncationTooDeep,
         "Gram matrix is not positive definite at K = " + std::to_string(K) + "; use a smaller K");
  d.gram_condition = condition_estimate(G, L);
  if (d.gram_condition > kGramConditionLimit)
    fail(ErrorCode::TruncationTooDeep, "Gram matrix condition number " +
                                           std::to_string(d.gram_condition) + " at K = " +
                                           std::to_string(K) + "; use a smaller K");
  d.a = orthonormalize(G);

  // mu_tilde = sum_k a_k1 phi_k with phi_k = sum_j a_kj e_j
  const Eigen::VectorXd c = d.a.transpose() * d.a.col(0);
  d.mu_tilde = modes.leftCols(K) * c;

  const Eigen::VectorXd e1 = modes.col(0);
  Eigen::Index imax = 0;
  e1.cwiseAbs().maxCoeff(&imax);
  const double sgn = e1[imax] >= 0 ? 1.0 : -1.0;
  const double floor = kE1FloorFraction * std::fabs(e1[imax]);

  const int nv = mesh.num_vertices();
  require(e1.size() == nv, ErrorCode::DimensionMismatch, "fields do not match the mesh");
  d.mu = Eigen::VectorXd::Zero(nv);
  d.kept.assign(nv, 0);
  std::vector<int> kept_list;
  for (int x = 0; x < nv; ++x)
    if (sgn * e1[x] < -floor)
      fail(ErrorCode::RecoveryFailure, "first eigenfunction changes sign at vertex " +
                                           std::to_string(x) + "; Step-1 signs wrong");
  for (int x = 0; x < nv; ++x) {
    if (sgn * e1[x] <= floor) continue;
    const double mu = d.mu_tilde[x] / e1[x];
    if (!(mu > 0.0))
      fail(ErrorCode::RecoveryFailure,
           "density is non-positive (" + std::to_string(mu) + ") at vertex " + std::to_string(x) +
               "; K too small or Step-1 signs wrong");
    d.mu[x] = mu;
    d.kept[x] = 1;
    kept_list.push_back(x);
  }
  require(!kept_list.empty(), ErrorCode::RecoveryFailure, "first eigenfunction vanishes everywhere");

  for (int x = 0; x < nv; ++x) {
    if (d.kept[x]) continue;
    double best = std::numeric_limits<double>::infinity();
    int arg = kept_list.front();
    for (int y : kept_list) {
      const Point dp = displacement(mesh, mesh.vertices[x], mesh.vertices[y]);
      const double r = dp[0] * dp[0] + dp[1] * dp[1];
      if (r < best) {
        best = r;
        arg = y;
      }
    }
    d.mu[x] = d.mu[arg];
  }
  return d;
}

}  // namespace drumlab
