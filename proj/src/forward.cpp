#include "drumlab/forward.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>

#include "drumlab/errors.hpp"

namespace drumlab {

std::string to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::None: return "none";
    case BoundaryCondition::Dirichlet: return "dirichlet";
    case BoundaryCondition::Neumann: return "neumann";
  }
  return "none";
}

BoundaryCondition boundary_condition_from_string(const std::string& s) {
  if (s == "none") return BoundaryCondition::None;
  if (s == "dirichlet") return BoundaryCondition::Dirichlet;
  if (s == "neumann") return BoundaryCondition::Neumann;
  fail(ErrorCode::Usage, "unknown boundary condition '" + s + "'");
}

Operators assemble_operators(const Mesh& mesh, const MetricField& metric, BoundaryCondition bc) {
  const int n = mesh.num_vertices();
  require(metric.num_vertices() == n, ErrorCode::DimensionMismatch,
          "metric has " + std::to_string(metric.num_vertices()) + " samples, mesh has " +
              std::to_string(n) + " vertices");
  require(metric.dimension == mesh.dimension, ErrorCode::DimensionMismatch,
          "metric dimension " + std::to_string(metric.dimension) + " vs mesh dimension " +
              std::to_string(mesh.dimension));
  if (mesh.closed())
    require(bc == BoundaryCondition::None, ErrorCode::Usage,
            "closed manifold takes boundary condition 'none'");
  else
    require(bc != BoundaryCondition::None, ErrorCode::Usage,
            "manifold with boundary needs 'dirichlet' or 'neumann'");

  Operators ops;
  ops.num_vertices = n;
  ops.bc = bc;
  ops.closed = mesh.closed();

  std::vector<int> free_index(n, -1);
  std::vector<char> fixed(n, 0);
  if (bc == BoundaryCondition::Dirichlet)
    for (int b : mesh.boundary) fixed[b] = 1;
  for (int v = 0; v < n; ++v)
    if (!fixed[v]) {
      free_index[v] = static_cast<int>(ops.free_vertices.size());
      ops.free_vertices.push_back(v);
    }

  ops.weights = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> trips;
  const int nc = mesh.corners_per_cell();
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c) {
    const auto p = cell_corners(mesh, c);
    const Eigen::MatrixXd g = cell_metric(mesh, metric, c);
    const double sqrt_det = std::sqrt(g.determinant());
    const double vol = cell_volume(mesh, c);
    Eigen::MatrixXd grad(nc, mesh.dimension);
    if (mesh.dimension == 1) {
      const double h = p[1][0] - p[0][0];
      grad << -1.0 / h, 1.0 / h;
    } else {
      Eigen::Matrix2d J;
      J << p[1][0] - p[0][0], p[2][0] - p[0][0], p[1][1] - p[0][1], p[2][1] - p[0][1];
      Eigen::Matrix<double, 3, 2> ref;
      ref << -1, -1, 1, 0, 0, 1;
      grad = ref * J.inverse();
    }
    const Eigen::MatrixXd Ke = vol * sqrt_det * grad * g.inverse() * grad.transpose();
    for (int a = 0; a < nc; ++a) {
      const int va = mesh.cells[c].v[a];
      ops.weights[va] += vol * sqrt_det / nc;
      if (free_index[va] < 0) continue;
      for (int b = 0; b < nc; ++b) {
        const int vb = mesh.cells[c].v[b];
        if (free_index[vb] < 0) continue;
        trips.emplace_back(free_index[va], free_index[vb], Ke(a, b));
      }
    }
  }
  const int nf = ops.num_free();
  ops.stiffness.resize(nf, nf);
  ops.stiffness.setFromTriplets(trips.begin(), trips.end());
  // exact symmetry regardless of summation order in setFromTriplets
  Eigen::SparseMatrix<double> t = ops.stiffness.transpose();
  ops.stiffness = 0.5 * (ops.stiffness + t);
  ops.mass.resize(nf);
  for (int i = 0; i < nf; ++i) ops.mass[i] = ops.weights[ops.free_vertices[i]];
  return ops;
}

void normalize_sign(Eigen::Ref<Eigen::VectorXd> e) {
  const double mx = e.cwiseAbs().maxCoeff();
  if (mx == 0.0) return;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    if (std::fabs(e[i]) > 1e-12 * mx) {
      if (e[i] < 0) e = -e;
      return;
    }
  }
}

EigenSystem solve_eigensystem(const Operators& ops, int K) {
  const int nf = ops.num_free();
  if (K <= 0) K = nf;
  require(K <= nf, ErrorCode::OutOfRange,
          "requested " + std::to_string(K) + " modes but only " + std::to_string(nf) +
              " free vertices exist");

  const Eigen::VectorXd s = ops.mass.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd A = s.asDiagonal() * Eigen::MatrixXd(ops.stiffness) * s.asDiagonal();
  Eigen::VectorXd w(nf);
  Eigen::MatrixXd Z(nf, K);
  std::vector<lapack_int> isuppz(2 * static_cast<size_t>(nf));
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', K == nf ? 'A' : 'I', 'U', nf, A.data(), nf, 0.0, 0.0,
                     1, K, 0.0, &found, w.data(), Z.data(), nf, isuppz.data());
  require(info == 0 && found == K, ErrorCode::Numeric,
          "dsyevr failed (info " + std::to_string(info) + ", found " + std::to_string(found) +
              " of " + std::to_string(K) + ")");

  EigenSystem es;
  es.bc = ops.bc;
  es.weights = ops.weights;
  es.modes = Eigen::MatrixXd::Zero(ops.num_vertices, K);
  es.frequencies.resize(K);
  const bool has_kernel = ops.bc != BoundaryCondition::Dirichlet;
  const double scale = A.size() ? std::max(1.0, w.cwiseAbs().maxCoeff()) : 1.0;
  const double total_mass = ops.mass.sum();
  Eigen::VectorXd row_abs = Eigen::VectorXd::Zero(nf);
  for (int k = 0; k < ops.stiffness.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(ops.stiffness, k); it; ++it)
      row_abs[it.row()] += std::fabs(it.value());
  const double knorm = row_abs.size() ? row_abs.maxCoeff() : 0.0;

  for (int j = 0; j < K; ++j) {
    double lam2 = w[j];
    Eigen::VectorXd e = s.cwiseProduct(Z.col(j));
    if (has_kernel && j == 0 && std::fabs(lam2) <= 1e-10 * scale) {
      // the kernel of a connected mesh is the constants; store it exactly
      lam2 = 0.0;
      e.setConstant(1.0 / std::sqrt(total_mass));
    }
    if (lam2 < 0.0) {
      require(lam2 > -1e-10 * scale, ErrorCode::Numeric,
              "negative eigenvalue " + std::to_string(lam2) + " at mode " + std::to_string(j));
      lam2 = 0.0;
    }
    const Eigen::VectorXd Ke = ops.stiffness * e;
    const Eigen::VectorXd r = Ke - lam2 * ops.mass.cwiseProduct(e);
    const double floor = 1e-12 * knorm * e.norm();
    if (r.norm() > 1e-8 * Ke.norm() + floor)
      fail(ErrorCode::Numeric, "eigenpair " + std::to_string(j) + " residual " +
                                   std::to_string(r.norm()) + " exceeds tolerance (|Ke| = " +
                                   std::to_string(Ke.norm()) + ")");
    for (int i = 0; i < nf; ++i) es.modes(ops.free_vertices[i], j) = e[i];
    normalize_sign(es.modes.col(j));
    es.frequencies[j] = std::sqrt(lam2);
  }
  return es;
}

double merge_tolerance(double lambda) { return std::max(1e-8, 1e-6 * lambda); }

LocalWeylTable synthesize_local_weyl(const EigenSystem& es) {
  LocalWeylTable t;
  t.weights = es.weights;
  t.bc = es.bc;
  const int K = es.size();
  std::vector<std::pair<int, int>> clusters;
  for (int j = 0; j < K;) {
    int k = j + 1;
    while (k < K && es.frequencies[k] - es.frequencies[k - 1] < merge_tolerance(es.frequencies[k]))
      ++k;
    clusters.emplace_back(j, k);
    j = k;
  }
  t.fields = Eigen::MatrixXd::Zero(es.modes.rows(), static_cast<Eigen::Index>(clusters.size()));
  for (size_t c = 0; c < clusters.size(); ++c) {
    const auto [a, b] = clusters[c];
    double sum = 0.0;
    for (int j = a; j < b; ++j) {
      sum += es.frequencies[j];
      t.fields.col(c) += es.modes.col(j).cwiseAbs2();
    }
    t.frequencies.push_back(sum / (b - a));
    t.multiplicities.push_back(b - a);
  }
  return t;
}

double local_counting(const LocalWeylTable& table, int vertex, double lambda) {
  double n = 0.0;
  for (int j = 0; j < table.size() && table.frequencies[j] <= lambda; ++j)
    n += table.fields(vertex, j);
  return n;
}

double global_counting(const LocalWeylTable& table, double lambda) {
  double n = 0.0;
  for (int j = 0; j < table.size() && table.frequencies[j] <= lambda; ++j)
    n += table.fields.col(j).dot(table.weights);
  return n;
}

int resolved_count(const std::vector<double>& frequencies, double h) {
  int k = 0;
  while (k < static_cast<int>(frequencies.size()) && frequencies[k] * h <= 0.5) ++k;
  return k;
}

}  // namespace drumlab
