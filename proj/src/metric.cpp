#include "drumlab/metric.hpp"

#include <cmath>
#include <sstream>

#include "drumlab/errors.hpp"

namespace drumlab {

MetricDescriptor MetricDescriptor::identity(int dim) {
  return constant_matrix(Eigen::MatrixXd::Identity(dim, dim));
}

MetricDescriptor MetricDescriptor::constant_matrix(Eigen::MatrixXd g) {
  MetricDescriptor d;
  d.kind = Kind::Constant;
  d.constant = std::move(g);
  return d;
}

MetricDescriptor MetricDescriptor::conformal(std::string u) {
  MetricDescriptor d;
  d.kind = Kind::Conformal;
  d.conformal_u = std::move(u);
  return d;
}

MetricDescriptor MetricDescriptor::per_vertex(std::vector<Eigen::MatrixXd> g) {
  MetricDescriptor d;
  d.kind = Kind::Table;
  d.table = std::move(g);
  return d;
}

std::string MetricDescriptor::tag() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Constant:
      os << "constant[";
      for (int i = 0; i < constant.rows(); ++i) {
        os << (i ? ";" : "");
        for (int j = 0; j < constant.cols(); ++j) os << (j ? "," : "") << constant(i, j);
      }
      os << "]";
      break;
    case Kind::Conformal: os << "conformal exp(2u), u = " << conformal_u; break;
    case Kind::Table: os << "table(" << table.size() << " vertices)"; break;
  }
  return os.str();
}

void validate_metric(const MetricField& metric, const MetricBounds& bounds) {
  const int n = metric.dimension;
  for (int v = 0; v < metric.num_vertices(); ++v) {
    const Eigen::MatrixXd& g = metric.g[v];
    const std::string where = "metric at vertex " + std::to_string(v);
    require(g.rows() == n && g.cols() == n, ErrorCode::DimensionMismatch,
            where + " is not " + std::to_string(n) + "x" + std::to_string(n));
    require(g.allFinite(), ErrorCode::MetricValidation, where + " is not finite");
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    require((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
            ErrorCode::MetricValidation, where + " is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    require(lo >= bounds.g_min, ErrorCode::MetricValidation,
            where + " has eigenvalue " + std::to_string(lo) + " below g_min");
    require(hi <= bounds.g_max, ErrorCode::MetricValidation,
            where + " has eigenvalue " + std::to_string(hi) + " above g_max");
    const double vol = std::sqrt(g.determinant());
    require(std::isfinite(vol) && vol > 0.0, ErrorCode::MetricValidation,
            where + " has non-positive volume density");
  }
}

MetricField sample_metric(const MetricDescriptor& descriptor, const Mesh& mesh,
                          const MetricBounds& bounds) {
  MetricField f;
  f.dimension = mesh.dimension;
  f.descriptor = descriptor;
  const int n = mesh.num_vertices();
  const int dim = mesh.dimension;
  f.g.reserve(n);
  switch (descriptor.kind) {
    case MetricDescriptor::Kind::Constant:
      require(descriptor.constant.rows() == dim && descriptor.constant.cols() == dim,
              ErrorCode::DimensionMismatch, "constant metric does not match mesh dimension");
      for (int v = 0; v < n; ++v) f.g.push_back(descriptor.constant);
      break;
    case MetricDescriptor::Kind::Conformal: {
      const Expression u = Expression::parse(descriptor.conformal_u);
      for (int v = 0; v < n; ++v) {
        const double s = std::exp(2.0 * u(std::span<const double>(mesh.vertices[v].data(), dim)));
        f.g.push_back(s * Eigen::MatrixXd::Identity(dim, dim));
      }
      break;
    }
    case MetricDescriptor::Kind::Table:
      require(static_cast<int>(descriptor.table.size()) == n, ErrorCode::DimensionMismatch,
              "metric table has " + std::to_string(descriptor.table.size()) +
                  " entries for a mesh with " + std::to_string(n) + " vertices");
      f.g = descriptor.table;
      break;
  }
  validate_metric(f, bounds);
  return f;
}

Eigen::MatrixXd cell_metric(const Mesh& mesh, const MetricField& metric, int cell) {
  const int nc = mesh.corners_per_cell();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(mesh.dimension, mesh.dimension);
  for (int k = 0; k < nc; ++k) g += metric.g[mesh.cells[cell].v[k]];
  return g / nc;
}

}  // namespace drumlab
