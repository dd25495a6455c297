#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drumlab/density.hpp"
#include "drumlab/forward.hpp"
#include "drumlab/mesh.hpp"
#include "drumlab/metric.hpp"
#include "drumlab/metric_recovery.hpp"
#include "drumlab/weyl_inversion.hpp"

namespace drumlab {

struct MeshSpec {
  Topology topology = Topology::Interval;
  int n = 201;                 // interval vertices
  int nx = 64, ny = 64;        // grid points per side, ends included
  double a = 1.0, b = 1.0;     // chart extent
  Diagonal diagonal = Diagonal::Anti;

  Mesh build() const;
};

struct RoundTripConfig {
  std::string id = "roundtrip";
  MeshSpec mesh;
  MetricDescriptor metric = MetricDescriptor::identity(1);
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  int K = 60;                  // forward modes; 0 = all
  int density_K = 0;           // 0 = all recovered modes
  Step1Options step1;
  std::vector<std::vector<double>> probes;
  double probe_r = 0.24, probe_s = 0.08, probe_p = 2.0;
  std::vector<double> lambdas;  // empty = default grid
  bool symmetrize = true;
  bool verify = true;
  double freq_tol = 0.01;       // verify_consistency, relative
  double field_tol = 0.05;      // verify_consistency, relative L2
};

struct ProbeReport {
  std::vector<double> x0;
  Eigen::MatrixXd g_recovered;
  Eigen::MatrixXd g_true;
  double max_rel_error = 0.0;
  std::vector<double> fit_residuals;
  std::vector<double> q;
};

struct ConsistencyVerdict {
  bool pass = false;
  double max_freq_rel_diff = 0.0;
  double max_field_rel_diff = 0.0;
  int compared_modes = 0;
  double freq_tol = 0.0;
  double field_tol = 0.0;
  std::string interpolation;
  std::vector<double> freq_rel_diff;
};

struct StageFailure {
  std::string stage;
  std::string code;
  std::string message;
};

struct RoundTripReport {
  RoundTripConfig config;
  std::string mesh_descriptor;
  std::string metric_descriptor;
  int forward_modes = 0;
  int jumps = 0;
  std::optional<SimplicityDiagnostics> simplicity;
  std::vector<ModeRecovery> sign_recovery;
  double mu_rel_l2_error = -1.0;
  double mu_rel_linf_error = -1.0;
  std::vector<ProbeReport> probes;
  std::optional<ConsistencyVerdict> consistency;
  std::map<std::string, double> timings;  // seconds per stage
  std::optional<StageFailure> failure;

  bool ok() const { return !failure.has_value(); }
};

// Recovered model: density over the reference measure plus probe metrics.
struct RecoveredModel {
  Eigen::VectorXd mu;
  std::vector<int> probe_vertices;
  std::vector<Eigen::MatrixXd> probe_metrics;
};

// Rebuilds g = mu^(2/n) S(x), S the unit-determinant shape of the nearest
// probe metric (the identity when no probes are given), and compares the
// forward solution on it with the table.
ConsistencyVerdict verify_consistency(const LocalWeylTable& table, const RecoveredModel& model,
                                      const Mesh& mesh, double freq_tol = 0.01,
                                      double field_tol = 0.05);

RoundTripReport run_roundtrip(const RoundTripConfig& config);

// Ground truth on the mesh: mu = sqrt(det g) for the Euclidean reference.
Eigen::VectorXd true_density(const MetricField& metric);

}  // namespace drumlab
