#pragma once

#include <Eigen/Dense>
#include <numbers>
#include <string>

#include "drumlab/forward.hpp"
#include "drumlab/mesh.hpp"
#include "drumlab/metric.hpp"

namespace drumlab::testing {

// g = (1 + 0.5 sin 2 pi x)^2 on the unit interval.
inline const std::string kSineU = "log(1+0.5*sin(2*pi*x))";
inline const double kPhi = std::numbers::phi;

struct Solved {
  Mesh mesh;
  MetricField metric;
  Operators ops;
  EigenSystem es;
  LocalWeylTable table;
};

inline Solved solve(Mesh mesh, const MetricDescriptor& d, BoundaryCondition bc, int K) {
  Solved s;
  s.mesh = std::move(mesh);
  s.metric = sample_metric(d, s.mesh);
  s.ops = assemble_operators(s.mesh, s.metric, bc);
  s.es = solve_eigensystem(s.ops, K);
  s.table = synthesize_local_weyl(s.es);
  return s;
}

inline Solved sine_1d(int n, int K) {
  return solve(build_interval_mesh(n, 1.0), MetricDescriptor::conformal(kSineU),
               BoundaryCondition::Dirichlet, K);
}

// Flat rectangle [0, phi] x [0, 1], Dirichlet.
inline Solved rect_phi(int nx, int K) {
  return solve(build_rect_mesh(nx, nx, kPhi, 1.0, Topology::Rectangle),
               MetricDescriptor::identity(2), BoundaryCondition::Dirichlet, K);
}

// max |a - s b| with the better global sign s.
inline double signed_deviation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
}

inline std::string data_file(const std::string& name) {
  return std::string(DRUMLAB_DATA_DIR) + "/" + name;
}

}  // namespace drumlab::testing
