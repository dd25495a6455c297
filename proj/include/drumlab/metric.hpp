#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "drumlab/expression.hpp"
#include "drumlab/mesh.hpp"

namespace drumlab {

struct MetricDescriptor {
  enum class Kind { Constant, Conformal, Table };
  Kind kind = Kind::Constant;
  Eigen::MatrixXd constant;              // Constant
  std::string conformal_u;               // Conformal: g = exp(2u) I
  std::vector<Eigen::MatrixXd> table;    // Table: one matrix per vertex

  static MetricDescriptor identity(int dim);
  static MetricDescriptor constant_matrix(Eigen::MatrixXd g);
  static MetricDescriptor conformal(std::string u);
  static MetricDescriptor per_vertex(std::vector<Eigen::MatrixXd> g);

  // Short human-readable tag recorded in reports and mesh files.
  std::string tag() const;
};

struct MetricBounds {
  double g_min = 1e-6;
  double g_max = std::numeric_limits<double>::infinity();
};

struct MetricField {
  int dimension = 1;
  std::vector<Eigen::MatrixXd> g;
  std::optional<MetricDescriptor> descriptor;

  int num_vertices() const { return static_cast<int>(g.size()); }
  double volume_density(int vertex) const { return std::sqrt(g[vertex].determinant()); }
};

MetricField sample_metric(const MetricDescriptor& descriptor, const Mesh& mesh,
                          const MetricBounds& bounds = {});

// Checks symmetry, eigenvalue bounds and finiteness of sqrt(det g).
void validate_metric(const MetricField& metric, const MetricBounds& bounds = {});

// Metric of a cell: mean of its corner samples.
Eigen::MatrixXd cell_metric(const Mesh& mesh, const MetricField& metric, int cell);

}  // namespace drumlab
