#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "drumlab/mesh.hpp"
#include "drumlab/metric.hpp"

namespace drumlab {

enum class BoundaryCondition { None, Dirichlet, Neumann };

std::string to_string(BoundaryCondition bc);
BoundaryCondition boundary_condition_from_string(const std::string& s);

// Stiffness and lumped mass restricted to the free vertices.
struct Operators {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;             // free vertices only
  Eigen::VectorXd weights;          // lumped mass at every vertex
  std::vector<int> free_vertices;   // free index -> vertex
  int num_vertices = 0;
  BoundaryCondition bc = BoundaryCondition::None;
  bool closed = false;

  int num_free() const { return static_cast<int>(free_vertices.size()); }
};

Operators assemble_operators(const Mesh& mesh, const MetricField& metric, BoundaryCondition bc);

struct EigenSystem {
  std::vector<double> frequencies;  // ascending, lambda_j >= 0
  Eigen::MatrixXd modes;            // vertices x K, zero on eliminated vertices
  Eigen::VectorXd weights;          // lumped mass per vertex
  BoundaryCondition bc = BoundaryCondition::None;

  int size() const { return static_cast<int>(frequencies.size()); }
};

// First K eigenpairs of K e = lambda^2 M e. K <= 0 requests all of them.
EigenSystem solve_eigensystem(const Operators& ops, int K);

// Applies the sign convention: first vertex with |e| > 1e-12 max|e| is positive.
void normalize_sign(Eigen::Ref<Eigen::VectorXd> e);

struct LocalWeylTable {
  std::vector<double> frequencies;  // jump locations, ascending
  Eigen::MatrixXd fields;           // vertices x jumps, E_j(x) >= 0
  Eigen::VectorXd weights;
  BoundaryCondition bc = BoundaryCondition::None;
  // Number of discrete modes merged into each jump. Informational only; the
  // inverse pipeline never reads it.
  std::vector<int> multiplicities;

  int size() const { return static_cast<int>(frequencies.size()); }
  int num_vertices() const { return static_cast<int>(weights.size()); }
};

double merge_tolerance(double lambda);

LocalWeylTable synthesize_local_weyl(const EigenSystem& eigsys);

// N(x, lambda) at one vertex and the weight-integrated N(lambda).
double local_counting(const LocalWeylTable& table, int vertex, double lambda);
double global_counting(const LocalWeylTable& table, double lambda);

// Number of leading frequencies with lambda * h <= 0.5.
int resolved_count(const std::vector<double>& frequencies, double h);

}  // namespace drumlab
