#include "drumlab/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "drumlab/errors.hpp"

namespace drumlab {

Mesh MeshSpec::build() const {
  if (topology == Topology::Interval) return build_interval_mesh(n, a);
  return build_rect_mesh(nx, ny, a, b, topology, diagonal);
}

Eigen::VectorXd true_density(const MetricField& metric) {
  Eigen::VectorXd mu(metric.num_vertices());
  for (int v = 0; v < metric.num_vertices(); ++v) mu[v] = metric.volume_density(v);
  return mu;
}

namespace {

Eigen::MatrixXd unit_shape(const Eigen::MatrixXd& g) {
  const double det = g.determinant();
  return g / std::pow(det, 1.0 / static_cast<double>(g.rows()));
}

}  // namespace

ConsistencyVerdict verify_consistency(const LocalWeylTable& table, const RecoveredModel& model,
                                      const Mesh& mesh, double freq_tol, double field_tol) {
  const int n = mesh.dimension;
  const int nv = mesh.num_vertices();
  require(model.mu.size() == nv, ErrorCode::DimensionMismatch, "density does not match the mesh");
  ConsistencyVerdict v;
  v.freq_tol = freq_tol;
  v.field_tol = field_tol;
  v.interpolation = model.probe_metrics.empty() || n == 1
                        ? "g = mu^(2/n) I (no shape information used)"
                        : "g = mu^(2/n) S, S = unit-determinant shape of the nearest probe metric";

  std::vector<Eigen::MatrixXd> g(nv);
  for (int x = 0; x < nv; ++x) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n);
    if (n > 1 && !model.probe_metrics.empty()) {
      double best = std::numeric_limits<double>::infinity();
      for (size_t k = 0; k < model.probe_vertices.size(); ++k) {
        const Point d = displacement(mesh, mesh.vertices[x], mesh.vertices[model.probe_vertices[k]]);
        const double r = d[0] * d[0] + d[1] * d[1];
        if (r < best) {
          best = r;
          S = unit_shape(model.probe_metrics[k]);
        }
      }
    }
    g[x] = std::pow(model.mu[x], 2.0 / n) * S;
  }
  const MetricField metric = sample_metric(MetricDescriptor::per_vertex(g), mesh);
  const Operators ops = assemble_operators(mesh, metric, table.bc);
  const int K = std::min(table.size(), ops.num_free());
  const LocalWeylTable re = synthesize_local_weyl(solve_eigensystem(ops, K));

  const double h = max_cell_diameter(mesh);
  const int m = std::min({resolved_count(table.frequencies, h), re.size(), table.size()});
  v.compared_modes = m;
  for (int j = 0; j < m; ++j) {
    const double a = table.frequencies[j];
    const double b = re.frequencies[j];
    const double d = a > 0 ? std::fabs(b - a) / a : std::fabs(b - a);
    v.freq_rel_diff.push_back(d);
    v.max_freq_rel_diff = std::max(v.max_freq_rel_diff, d);
    const Eigen::VectorXd diff = re.fields.col(j) - table.fields.col(j);
    const double num = std::sqrt(diff.cwiseAbs2().dot(table.weights));
    const double den = std::sqrt(table.fields.col(j).cwiseAbs2().dot(table.weights));
    v.max_field_rel_diff = std::max(v.max_field_rel_diff, den > 0 ? num / den : num);
  }
  v.pass = m > 0 && v.max_freq_rel_diff <= freq_tol && v.max_field_rel_diff <= field_tol;
  return v;
}

RoundTripReport run_roundtrip(const RoundTripConfig& config) {
  RoundTripReport rep;
  rep.config = config;
  std::string stage = "mesh";
  auto clock = std::chrono::steady_clock::now();
  auto lap = [&](const std::string& name) {
    const auto now = std::chrono::steady_clock::now();
    rep.timings[name] = std::chrono::duration<double>(now - clock).count();
    clock = now;
  };

  try {
    const Mesh mesh = config.mesh.build();
    validate_mesh(mesh);
    {
      std::ostringstream os;
      os << to_string(mesh.topology) << ' ';
      if (mesh.dimension == 1) os << config.mesh.n << " vertices on [0, " << config.mesh.a << "]";
      else os << config.mesh.nx << "x" << config.mesh.ny << " on [0, " << config.mesh.a << "]x[0, "
              << config.mesh.b << "], " << to_string(config.mesh.diagonal) << " diagonal";
      rep.mesh_descriptor = os.str();
    }
    stage = "metric";
    const MetricField metric = sample_metric(config.metric, mesh);
    rep.metric_descriptor = config.metric.tag();
    lap("setup");

    stage = "forward";
    const Operators ops = assemble_operators(mesh, metric, config.bc);
    const EigenSystem es = solve_eigensystem(ops, config.K);
    const LocalWeylTable table = synthesize_local_weyl(es);
    rep.forward_modes = es.size();
    rep.jumps = table.size();
    lap("forward");

    stage = "check_simplicity";
    rep.simplicity = check_simplicity(table, config.step1.gap_tol);
    if (!rep.simplicity->simple()) {
      std::ostringstream os;
      os << "spectrum is not simple;";
      for (int j : rep.simplicity->mass_flags)
        os << " jump " << j << " (lambda " << table.frequencies[j] << ") integrates to "
           << rep.simplicity->jump_integrals[j] << ";";
      for (const auto& c : rep.simplicity->close_clusters)
        os << " jumps " << c.front() << ".." << c.back() << " closer than gap_tol;";
      throw Error(ErrorCode::NonSimpleSpectrum, os.str());
    }
    lap("check_simplicity");

    stage = "step1";
    const Step1Result s1 = recover_step1(table, mesh, config.step1);
    rep.sign_recovery = s1.modes;
    lap("step1");

    stage = "step2";
    const Eigen::VectorXd ref = euclidean_weights(mesh);
    const DensityRecovery dens = recover_density(s1.fields, ref, mesh, config.density_K);
    const Eigen::VectorXd mu_true = true_density(metric);
    {
      const Eigen::VectorXd diff = dens.mu - mu_true;
      rep.mu_rel_l2_error =
          std::sqrt(diff.cwiseAbs2().dot(ref) / mu_true.cwiseAbs2().dot(ref));
      rep.mu_rel_linf_error = (diff.cwiseAbs().array() / mu_true.array()).maxCoeff();
    }
    lap("step2");

    stage = "step3";
    const Eigen::VectorXd w = dens.mu.cwiseProduct(ref);
    const SpectralLaplacian L = SpectralLaplacian::from(s1.frequencies, s1.fields, w);
    RecoveredModel model;
    model.mu = dens.mu;
    for (const auto& x0 : config.probes) {
      ProbeConfig pc = ProbeConfig::at(x0, config.probe_r, config.probe_s, config.probe_p);
      pc.lambdas = config.lambdas;
      pc.symmetrize = config.symmetrize;
      const MetricRecovery mr = recover_metric_at(L, mesh, pc);
      ProbeReport pr;
      pr.x0 = mr.x0;
      pr.g_recovered = mr.g;
      pr.g_true = metric.g[mr.vertex];
      pr.max_rel_error =
          ((mr.g - pr.g_true).cwiseAbs().array() / pr.g_true.cwiseAbs().maxCoeff()).maxCoeff();
      for (const auto& p : mr.probes) {
        pr.fit_residuals.push_back(p.residual);
        pr.q.push_back(p.q);
      }
      rep.probes.push_back(pr);
      model.probe_vertices.push_back(mr.vertex);
      model.probe_metrics.push_back(mr.g);
    }
    lap("step3");

    if (config.verify) {
      stage = "verify";
      rep.consistency = verify_consistency(table, model, mesh, config.freq_tol, config.field_tol);
      lap("verify");
    }
  } catch (const Error& e) {
    rep.failure = StageFailure{e.stage().empty() ? stage : e.stage(),
                               std::string(error_code_name(e.code())), e.what()};
  }
  return rep;
}

}  // namespace drumlab
