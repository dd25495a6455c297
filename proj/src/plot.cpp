#include "drumlab/plot.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "drumlab/errors.hpp"

namespace drumlab {

namespace {

std::ostringstream csv_stream() {
  std::ostringstream os;
  os << std::setprecision(17);
  return os;
}

void check_vertex(const LocalWeylTable& table, int vertex) {
  require(vertex >= 0 && vertex < table.num_vertices(), ErrorCode::Usage,
          "vertex " + std::to_string(vertex) + " is out of range");
}

}  // namespace

std::string staircase_csv(const LocalWeylTable& table, int vertex) {
  check_vertex(table, vertex);
  auto os = csv_stream();
  os << "lambda,N\n";
  double n = 0.0;
  os << 0.0 << ',' << n << '\n';
  for (int j = 0; j < table.size(); ++j) {
    const double lambda = table.frequencies[j];
    os << lambda << ',' << n << '\n';
    n += table.fields(vertex, j);
    os << lambda << ',' << n << '\n';
  }
  return os.str();
}

std::string jump_fields_csv(const LocalWeylTable& table, int vertex) {
  check_vertex(table, vertex);
  auto os = csv_stream();
  os << "lambda,E\n";
  for (int j = 0; j < table.size(); ++j) os << table.frequencies[j] << ',' << table.fields(vertex, j) << '\n';
  return os.str();
}

std::string mu_csv(const Mesh& mesh, const Eigen::VectorXd& mu,
                   const std::optional<Eigen::VectorXd>& mu_true) {
  require(mu.size() == mesh.num_vertices(), ErrorCode::DimensionMismatch, "mu does not match the mesh");
  auto os = csv_stream();
  os << (mesh.dimension == 1 ? "x" : "x,y") << ",mu_recovered,mu_true\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    os << mesh.vertices[v][0] << ',';
    if (mesh.dimension == 2) os << mesh.vertices[v][1] << ',';
    os << mu[v] << ',';
    if (mu_true) os << (*mu_true)[v];
    os << '\n';
  }
  return os.str();
}

std::string metric_error_csv(const std::vector<std::pair<int, double>>& points) {
  auto os = csv_stream();
  os << "K,error\n";
  for (const auto& [k, e] : points) os << k << ',' << e << '\n';
  return os.str();
}

std::string tori_csv(const NormSpectrum& a, const NormSpectrum& b) {
  std::set<Rational> norms;
  for (const auto& e : a.entries) norms.insert(e.first);
  for (const auto& e : b.entries) norms.insert(e.first);
  auto os = csv_stream();
  os << "lambda,N_a,N_b,diff\n";
  long long na = 0, nb = 0;
  size_t ia = 0, ib = 0;
  for (const Rational& r : norms) {
    if (ia < a.entries.size() && a.entries[ia].first == r) na += a.entries[ia++].second;
    if (ib < b.entries.size() && b.entries[ib].first == r) nb += b.entries[ib++].second;
    os << 2.0 * std::numbers::pi * std::sqrt(to_double(r)) << ',' << na << ',' << nb << ',' << na - nb << '\n';
  }
  return os.str();
}

std::string emit_plot_data(const Json& artifact, const std::string& kind, int vertex) {
  if (kind == "staircase") return staircase_csv(table_from_json(artifact), vertex);
  if (kind == "fields") return jump_fields_csv(table_from_json(artifact), vertex);
  if (kind == "mu") {
    require(artifact.contains("mesh") && artifact.contains("mu"), ErrorCode::Usage,
            "mu plot needs a step2 result with mesh and mu");
    const Mesh mesh = mesh_from_json(artifact["mesh"]);
    const auto mu = artifact["mu"].get<std::vector<double>>();
    std::optional<Eigen::VectorXd> truth;
    if (artifact.contains("mu_true")) {
      const auto t = artifact["mu_true"].get<std::vector<double>>();
      truth = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
    }
    return mu_csv(mesh, Eigen::Map<const Eigen::VectorXd>(mu.data(), static_cast<Eigen::Index>(mu.size())),
                  truth);
  }
  if (kind == "metric-error") {
    std::vector<std::pair<int, double>> pts;
    for (const auto& p : artifact.at("points")) pts.emplace_back(p.at("K").get<int>(), p.at("error").get<double>());
    return metric_error_csv(pts);
  }
  if (kind == "tori")
    return tori_csv(norm_spectrum_from_json(artifact.at("a")), norm_spectrum_from_json(artifact.at("b")));
  fail(ErrorCode::Usage, "unknown plot kind '" + kind + "' (staircase, fields, mu, metric-error, tori)");
}

}  // namespace drumlab
