#include "drumlab/metric_recovery.hpp"

#include <algorithm>
#include <cmath>

#include "drumlab/errors.hpp"

namespace drumlab {

SpectralLaplacian SpectralLaplacian::from(const std::vector<double>& frequencies,
                                          const Eigen::MatrixXd& modes,
                                          const Eigen::VectorXd& weights, int K) {
  if (K <= 0) K = static_cast<int>(frequencies.size());
  require(K <= static_cast<int>(frequencies.size()) && K <= modes.cols(), ErrorCode::OutOfRange,
          "truncation K = " + std::to_string(K) + " exceeds the recovered modes");
  require(weights.size() == modes.rows(), ErrorCode::DimensionMismatch,
          "weights do not match the fields");
  SpectralLaplacian L;
  L.frequencies.assign(frequencies.begin(), frequencies.begin() + K);
  L.modes = modes.leftCols(K);
  L.weights = weights;
  L.K = K;
  return L;
}

namespace {

Eigen::VectorXd scaled_coefficients(const SpectralLaplacian& L, const Eigen::VectorXd& f) {
  require(f.size() == L.modes.rows(), ErrorCode::DimensionMismatch,
          "field length does not match the operator");
  Eigen::VectorXd c = L.modes.transpose() * L.weights.cwiseProduct(f);
  for (int j = 0; j < L.K; ++j) c[j] *= L.frequencies[j] * L.frequencies[j];
  return c;
}

}  // namespace

Eigen::VectorXd apply_spectral_laplacian(const SpectralLaplacian& L, const Eigen::VectorXd& f) {
  return -(L.modes * scaled_coefficients(L, f));
}

double apply_spectral_laplacian_at(const SpectralLaplacian& L, const Eigen::VectorXd& f, int vertex) {
  const Eigen::VectorXd c = scaled_coefficients(L, f);
  double s = 0.0;
  for (int j = 0; j < L.K; ++j) s += c[j] * L.modes(vertex, j);
  return -s;
}

double probe_window(double rho, double r, double s, double p) {
  if (rho >= r) return 0.0;
  const double half = 0.5 * r;
  const double t = std::clamp((rho - half) / half, 0.0, 1.0);
  const double step = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
  return std::exp(-std::pow(rho / s, p)) * (1.0 - step);
}

ProbeConfig ProbeConfig::at(std::vector<double> x0, double r, double s, double p) {
  ProbeConfig c;
  c.x0 = std::move(x0);
  c.r = r;
  c.s = s;
  c.p = p;
  return c;
}

std::vector<double> default_lambda_grid(double s) {
  std::vector<double> g;
  for (int i = 0; i < 5; ++i) g.push_back((0.5 + 0.5 * i / 4.0) / s);
  return g;
}

void validate_probe(const Mesh& mesh, const ProbeConfig& config) {
  require(static_cast<int>(config.x0.size()) == mesh.dimension, ErrorCode::DimensionMismatch,
          "probe point has the wrong dimension");
  require(config.r > 0.0 && config.s > 0.0 && config.p > 0.0, ErrorCode::Usage,
          "probe window parameters must be positive");
  const int vx = nearest_vertex(mesh, config.x0);
  const Point& x = mesh.vertices[vx];
  if (mesh.closed()) {
    require(config.r <= 0.5 * std::min(mesh.extent[0], mesh.extent[1]), ErrorCode::OutOfRange,
            "probe support wraps around the torus");
  } else {
    require(distance_to_boundary(mesh, x) > config.r, ErrorCode::OutOfRange,
            "probe support is not contained in the interior");
  }
  const auto lams = config.lambdas.empty() ? default_lambda_grid(config.s) : config.lambdas;
  require(lams.size() >= 3, ErrorCode::Usage, "lambda grid needs at least 3 values");
  require(std::is_sorted(lams.begin(), lams.end()) && lams.front() > 0.0, ErrorCode::Usage,
          "lambda grid must be positive and ascending");
  const double h = max_cell_diameter(mesh);
  require(lams.back() * h <= 0.5, ErrorCode::OutOfRange,
          "lambda " + std::to_string(lams.back()) + " is not resolved by the grid (lambda h > 0.5)");
}

namespace {

double probe_value(const SpectralLaplacian& L, const Mesh& mesh, const ProbeConfig& config,
                   int vertex, const Eigen::VectorXd& v, double lambda) {
  const Point& x0 = mesh.vertices[vertex];
  Eigen::VectorXd f(mesh.num_vertices());
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const Point d = displacement(mesh, x0, mesh.vertices[i]);
    const double rho = std::hypot(d[0], d[1]);
    const double phi = probe_window(rho, config.r, config.s, config.p);
    if (phi == 0.0) {
      f[i] = 0.0;
      continue;
    }
    double vd = v[0] * d[0];
    if (mesh.dimension == 2) vd += v[1] * d[1];
    f[i] = std::exp(lambda * vd) * phi;
  }
  return apply_spectral_laplacian_at(L, f, vertex) / (lambda * lambda);
}

}  // namespace

ProbeResult probe_quadratic_form(const SpectralLaplacian& L, const Mesh& mesh,
                                 const ProbeConfig& config, const Eigen::VectorXd& v) {
  validate_probe(mesh, config);
  require(v.size() == mesh.dimension, ErrorCode::DimensionMismatch, "direction has the wrong size");
  const int vertex = nearest_vertex(mesh, config.x0);
  ProbeResult r;
  r.v = v;
  r.lambdas = config.lambdas.empty() ? default_lambda_grid(config.s) : config.lambdas;
  const int m = static_cast<int>(r.lambdas.size());
  const int terms = config.symmetrize ? 2 : 3;
  Eigen::MatrixXd X(m, terms);
  Eigen::VectorXd y(m);
  for (int i = 0; i < m; ++i) {
    const double lam = r.lambdas[i];
    double a = probe_value(L, mesh, config, vertex, v, lam);
    if (config.symmetrize) a = 0.5 * (a + probe_value(L, mesh, config, vertex, -v, lam));
    r.A.push_back(a);
    y[i] = a;
    X(i, 0) = 1.0;
    if (config.symmetrize) {
      X(i, 1) = 1.0 / (lam * lam);
    } else {
      X(i, 1) = 1.0 / lam;
      X(i, 2) = 1.0 / (lam * lam);
    }
  }
  r.coeffs = X.colPivHouseholderQr().solve(y);
  r.q = r.coeffs[0];
  r.residual = std::sqrt((X * r.coeffs - y).squaredNorm() / m);
  if (!(r.q > 0.0) || r.residual > config.fit_tol * std::fabs(r.q))
    fail(ErrorCode::UnreliableProbe, "probe fit gave q = " + std::to_string(r.q) +
                                         " with residual " + std::to_string(r.residual));
  return r;
}

MetricRecovery recover_metric_at(const SpectralLaplacian& L, const Mesh& mesh,
                                 const ProbeConfig& config) {
  const int n = mesh.dimension;
  std::vector<Eigen::VectorXd> needed;
  for (int i = 0; i < n; ++i) needed.push_back(Eigen::VectorXd::Unit(n, i));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) needed.push_back(Eigen::VectorXd::Unit(n, i) + Eigen::VectorXd::Unit(n, j));
  for (const auto& d : needed) {
    if (config.directions.empty()) break;
    const bool present = std::any_of(config.directions.begin(), config.directions.end(),
                                     [&](const Eigen::VectorXd& v) { return v.size() == n && v == d; });
    require(present, ErrorCode::Usage, "directions must include every e_i and e_i + e_j");
  }

  MetricRecovery out;
  out.vertex = nearest_vertex(mesh, config.x0);
  out.x0.assign(mesh.vertices[out.vertex].begin(), mesh.vertices[out.vertex].begin() + n);
  for (const auto& d : needed) out.probes.push_back(probe_quadratic_form(L, mesh, config, d));

  out.g_inv.resize(n, n);
  for (int i = 0; i < n; ++i) out.g_inv(i, i) = out.probes[i].q;
  int k = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++k) {
      const double gij = 0.5 * (out.probes[k].q - out.probes[i].q - out.probes[j].q);
      out.g_inv(i, j) = out.g_inv(j, i) = gij;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.g_inv, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0)
    fail(ErrorCode::RecoveryFailure,
         "recovered inverse metric is not positive definite; lambda grid under-resolved");
  out.g = out.g_inv.inverse();
  return out;
}

}  // namespace drumlab
