#pragma once

#include <Eigen/Dense>
#include <vector>

#include "drumlab/mesh.hpp"

namespace drumlab {

struct SpectralLaplacian {
  std::vector<double> frequencies;
  Eigen::MatrixXd modes;    // vertices x K, signed
  Eigen::VectorXd weights;  // mu * reference weights
  int K = 0;

  static SpectralLaplacian from(const std::vector<double>& frequencies, const Eigen::MatrixXd& modes,
                                const Eigen::VectorXd& weights, int K = 0);
};

// Delta_g f = -sum_j lambda_j^2 <f, e_j>_w e_j  (negative semidefinite).
Eigen::VectorXd apply_spectral_laplacian(const SpectralLaplacian& L, const Eigen::VectorXd& f);

// Same, evaluated at one vertex only.
double apply_spectral_laplacian_at(const SpectralLaplacian& L, const Eigen::VectorXd& f, int vertex);

// Probe window: phi(rho) = exp(-(rho/s)^p) * (1 - smoothstep((rho - r/2) / (r/2))),
// with the quintic smoothstep t^3 (10 - 15 t + 6 t^2). phi(0) = 1, grad phi(0) = 0,
// support radius r.
double probe_window(double rho, double r, double s, double p);

struct ProbeConfig {
  std::vector<double> x0;              // chart coordinates; snapped to the nearest vertex
  double r = 0.24;                     // support radius
  double s = 0.08;                     // window core width
  double p = 2.0;                      // window exponent
  std::vector<double> lambdas;         // ascending, >= 3 values; empty selects the default grid
  std::vector<Eigen::VectorXd> directions;  // empty selects e_i and e_i + e_j
  bool symmetrize = true;              // average +v and -v (cancels the 1/lambda term)
  double fit_tol = 0.1;

  static ProbeConfig at(std::vector<double> x0, double r, double s, double p);
};

// Default grid: 5 values evenly spaced in [0.5/s, 1/s].
std::vector<double> default_lambda_grid(double s);

struct ProbeResult {
  Eigen::VectorXd v;
  std::vector<double> lambdas;
  std::vector<double> A;     // lambda^-2 (Delta f_v)(x0)
  Eigen::VectorXd coeffs;    // q, then c2 (and c1 when not symmetrized)
  double q = 0.0;
  double residual = 0.0;     // rms fit residual
};

// Checks the window support is interior and the grid resolves the lambdas.
void validate_probe(const Mesh& mesh, const ProbeConfig& config);

ProbeResult probe_quadratic_form(const SpectralLaplacian& L, const Mesh& mesh,
                                 const ProbeConfig& config, const Eigen::VectorXd& v);

struct MetricRecovery {
  int vertex = -1;
  std::vector<double> x0;       // snapped vertex coordinates
  Eigen::MatrixXd g_inv;
  Eigen::MatrixXd g;
  std::vector<ProbeResult> probes;
};

MetricRecovery recover_metric_at(const SpectralLaplacian& L, const Mesh& mesh,
                                 const ProbeConfig& config);

}  // namespace drumlab
