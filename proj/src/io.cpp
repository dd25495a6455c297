#include "drumlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "drumlab/errors.hpp"

namespace drumlab {

namespace fs = std::filesystem;

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  require(!ec, ErrorCode::Io, "cannot create directory for " + path + ": " + ec.message());
  std::random_device rd;
  const fs::path tmp = target.string() + ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::Io, "cannot write " + tmp.string());
    out << content;
    out.flush();
    require(static_cast<bool>(out), ErrorCode::Io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    fail(ErrorCode::Io, "cannot rename onto " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::exception& e) {
    fail(ErrorCode::Io, path + ": " + e.what());
  }
}

void write_json(const std::string& path, const Json& j) { write_file_atomic(path, j.dump(1) + "\n"); }

namespace {

Json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// columns of m as a list of lists
Json columns(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(vec(m.col(j)));
  return out;
}

Eigen::MatrixXd columns_from(const Json& j, Eigen::Index rows) {
  Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(j.size()));
  for (size_t c = 0; c < j.size(); ++c) {
    const Eigen::VectorXd v = vec_from(j[c]);
    require(v.size() == rows, ErrorCode::CorruptTable,
            "field " + std::to_string(c) + " has " + std::to_string(v.size()) + " values, expected " +
                std::to_string(rows));
    m.col(static_cast<Eigen::Index>(c)) = v;
  }
  return m;
}

Json matrix_rows(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vec(m.row(i).transpose()));
  return out;
}

Eigen::MatrixXd matrix_from_rows(const Json& j) {
  const Eigen::Index n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    require(j[i].size() == static_cast<size_t>(n), ErrorCode::DimensionMismatch, "matrix is not square");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

template <class F>
auto parse_guard(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Json::exception& e) {
    fail(ErrorCode::Usage, std::string("malformed ") + what + " JSON: " + e.what());
  }
}

}  // namespace

Json to_json(const MetricDescriptor& d) {
  Json j;
  switch (d.kind) {
    case MetricDescriptor::Kind::Constant:
      j["kind"] = "constant";
      j["matrix"] = matrix_rows(d.constant);
      break;
    case MetricDescriptor::Kind::Conformal:
      j["kind"] = "conformal";
      j["u"] = d.conformal_u;
      break;
    case MetricDescriptor::Kind::Table: j["kind"] = "table"; break;
  }
  return j;
}

MetricDescriptor metric_descriptor_from_json(const Json& j) {
  return parse_guard("metric descriptor", [&] {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return MetricDescriptor::constant_matrix(matrix_from_rows(j.at("matrix")));
    if (kind == "conformal") return MetricDescriptor::conformal(j.at("u").get<std::string>());
    if (kind == "identity") return MetricDescriptor::identity(j.at("dimension").get<int>());
    if (kind == "table") {
      std::vector<Eigen::MatrixXd> g;
      for (const auto& m : j.at("per_vertex")) g.push_back(matrix_from_rows(m));
      return MetricDescriptor::per_vertex(std::move(g));
    }
    fail(ErrorCode::Usage, "unknown metric kind '" + kind + "'");
  });
}

Json to_json(const Mesh& mesh, const MetricField* metric) {
  Json j;
  j["dimension"] = mesh.dimension;
  j["topology"] = to_string(mesh.topology);
  j["extent"] = mesh.dimension == 1 ? Json{mesh.extent[0]} : Json{mesh.extent[0], mesh.extent[1]};
  Json verts = Json::array();
  for (const auto& p : mesh.vertices)
    verts.push_back(mesh.dimension == 1 ? Json{p[0]} : Json{p[0], p[1]});
  j["vertices"] = verts;
  Json cells = Json::array();
  Json shifts = Json::array();
  for (const auto& c : mesh.cells) {
    Json cell = Json::array();
    Json sh = Json::array();
    for (int k = 0; k < mesh.corners_per_cell(); ++k) {
      cell.push_back(c.v[k]);
      sh.push_back(Json{c.shift[k][0], c.shift[k][1]});
    }
    cells.push_back(cell);
    shifts.push_back(sh);
  }
  j["cells"] = cells;
  if (mesh.closed()) j["cell_shifts"] = shifts;
  j["boundary"] = mesh.boundary;
  if (metric) {
    Json m;
    m["descriptor"] = metric->descriptor ? to_json(*metric->descriptor) : Json{{"kind", "table"}};
    Json pv = Json::array();
    for (const auto& g : metric->g) {
      Json flat = Json::array();
      for (int r = 0; r < g.rows(); ++r)
        for (int c = 0; c < g.cols(); ++c) flat.push_back(g(r, c));
      pv.push_back(flat);
    }
    m["per_vertex"] = pv;
    j["metric"] = m;
  }
  return j;
}

Mesh mesh_from_json(const Json& j) {
  return parse_guard("mesh", [&] {
    Mesh m;
    m.dimension = j.at("dimension").get<int>();
    m.topology = topology_from_string(j.at("topology").get<std::string>());
    const auto ext = j.at("extent").get<std::vector<double>>();
    require(static_cast<int>(ext.size()) == m.dimension, ErrorCode::InvalidMesh, "extent size mismatch");
    m.extent = {ext[0], m.dimension == 2 ? ext[1] : 0.0};
    for (const auto& p : j.at("vertices")) {
      require(static_cast<int>(p.size()) == m.dimension, ErrorCode::InvalidMesh,
              "vertex coordinate count mismatch");
      m.vertices.push_back({p[0].get<double>(), m.dimension == 2 ? p[1].get<double>() : 0.0});
    }
    const bool has_shifts = j.contains("cell_shifts");
    for (size_t c = 0; c < j.at("cells").size(); ++c) {
      const auto& jc = j["cells"][c];
      require(static_cast<int>(jc.size()) == m.corners_per_cell(), ErrorCode::InvalidMesh,
              "cell " + std::to_string(c) + " has the wrong corner count");
      Cell cell;
      for (int k = 0; k < m.corners_per_cell(); ++k) {
        cell.v[k] = jc[k].get<int>();
        if (has_shifts) cell.shift[k] = {j["cell_shifts"][c][k][0].get<int>(), j["cell_shifts"][c][k][1].get<int>()};
      }
      m.cells.push_back(cell);
    }
    m.boundary = j.at("boundary").get<std::vector<int>>();
    validate_mesh(m);
    return m;
  });
}

std::optional<MetricField> metric_from_json(const Json& j, const Mesh& mesh) {
  if (!j.contains("metric")) return std::nullopt;
  return parse_guard("metric", [&]() -> std::optional<MetricField> {
    const Json& m = j["metric"];
    const int n = mesh.dimension;
    MetricField f;
    f.dimension = n;
    if (m.contains("per_vertex")) {
      for (const auto& flat : m["per_vertex"]) {
        require(flat.size() == static_cast<size_t>(n * n), ErrorCode::DimensionMismatch,
                "per-vertex metric entry has the wrong size");
        Eigen::MatrixXd g(n, n);
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < n; ++c) g(r, c) = flat[r * n + c].get<double>();
        f.g.push_back(g);
      }
      require(f.num_vertices() == mesh.num_vertices(), ErrorCode::DimensionMismatch,
              "metric sample count does not match the mesh");
      if (m.contains("descriptor") && m["descriptor"].value("kind", "table") != "table")
        f.descriptor = metric_descriptor_from_json(m["descriptor"]);
      validate_metric(f);
      return f;
    }
    return sample_metric(metric_descriptor_from_json(m.at("descriptor")), mesh);
  });
}

Json to_json(const EigenSystem& es) {
  Json j;
  j["frequencies"] = es.frequencies;
  j["fields"] = columns(es.modes);
  j["weights"] = vec(es.weights);
  j["bc"] = to_string(es.bc);
  return j;
}

EigenSystem eigensystem_from_json(const Json& j) {
  return parse_guard("eigensystem", [&] {
    EigenSystem es;
    es.frequencies = j.at("frequencies").get<std::vector<double>>();
    es.weights = vec_from(j.at("weights"));
    es.modes = columns_from(j.at("fields"), es.weights.size());
    es.bc = boundary_condition_from_string(j.at("bc").get<std::string>());
    return es;
  });
}

Json to_json(const LocalWeylTable& t) {
  Json j;
  j["frequencies"] = t.frequencies;
  j["fields"] = columns(t.fields);
  j["weights"] = vec(t.weights);
  j["bc"] = to_string(t.bc);
  if (!t.multiplicities.empty()) j["multiplicities"] = t.multiplicities;
  return j;
}

LocalWeylTable table_from_json(const Json& j) {
  return parse_guard("table", [&] {
    LocalWeylTable t;
    t.frequencies = j.at("frequencies").get<std::vector<double>>();
    t.weights = vec_from(j.at("weights"));
    t.fields = columns_from(j.at("fields"), t.weights.size());
    t.bc = boundary_condition_from_string(j.value("bc", std::string("none")));
    if (j.contains("multiplicities")) t.multiplicities = j["multiplicities"].get<std::vector<int>>();
    require(static_cast<int>(t.fields.cols()) == t.size(), ErrorCode::CorruptTable,
            "table has " + std::to_string(t.fields.cols()) + " fields for " +
                std::to_string(t.size()) + " frequencies");
    require(std::is_sorted(t.frequencies.begin(), t.frequencies.end()), ErrorCode::CorruptTable,
            "jump frequencies are not ascending");
    return t;
  });
}

Json to_json(const SimplicityDiagnostics& d) {
  Json j;
  j["simple"] = d.simple();
  j["close_clusters"] = d.close_clusters;
  j["jump_integrals"] = d.jump_integrals;
  j["mass_flags"] = d.mass_flags;
  return j;
}

Json to_json(const Step1Result& r) {
  Json j;
  j["frequencies"] = r.frequencies;
  j["fields"] = columns(r.fields);
  j["weights"] = vec(r.weights);
  j["bc"] = to_string(r.bc);
  Json modes = Json::array();
  for (const auto& m : r.modes)
    modes.push_back({{"domains", m.domains}, {"graph_edges", m.graph_edges},
                     {"iterations", m.iterations}, {"bipartite", m.bipartite},
                     {"max_conflict", m.max_conflict}});
  j["modes"] = modes;
  j["simplicity"] = to_json(r.simplicity);
  return j;
}

Step1Result step1_from_json(const Json& j) {
  return parse_guard("step1", [&] {
    Step1Result r;
    r.frequencies = j.at("frequencies").get<std::vector<double>>();
    r.weights = vec_from(j.at("weights"));
    r.fields = columns_from(j.at("fields"), r.weights.size());
    r.bc = boundary_condition_from_string(j.value("bc", std::string("none")));
    if (j.contains("modes"))
      for (const auto& m : j["modes"])
        r.modes.push_back({m.at("domains").get<int>(), m.at("graph_edges").get<int>(),
                           m.at("iterations").get<int>(), m.at("bipartite").get<bool>(),
                           m.value("max_conflict", 0.0)});
    return r;
  });
}

Json to_json(const DensityRecovery& d) {
  Json j;
  j["K"] = d.K;
  j["gram_condition"] = d.gram_condition;
  j["reference_weights"] = vec(d.reference_weights);
  j["mu_tilde"] = vec(d.mu_tilde);
  j["mu"] = vec(d.mu);
  std::vector<int> kept(d.kept.begin(), d.kept.end());
  j["kept"] = kept;
  return j;
}

Json to_json(const MetricRecovery& m) {
  Json j;
  j["vertex"] = m.vertex;
  j["x0"] = m.x0;
  j["g"] = matrix_rows(m.g);
  j["g_inv"] = matrix_rows(m.g_inv);
  Json probes = Json::array();
  for (const auto& p : m.probes)
    probes.push_back({{"v", vec(p.v)}, {"lambdas", p.lambdas}, {"A", p.A},
                      {"coefficients", vec(p.coeffs)}, {"q", p.q}, {"residual", p.residual}});
  j["probes"] = probes;
  return j;
}

QMatrix gram_from_json(const Json& j) {
  return parse_guard("Gram", [&] {
    const Json& rows = j.is_object() ? j.at("gram") : j;
    std::vector<std::vector<Rational>> q;
    for (const auto& row : rows) {
      std::vector<Rational> r;
      for (const auto& x : row) {
        if (x.is_string()) r.push_back(parse_rational(x.get<std::string>()));
        else if (x.is_number_integer()) r.emplace_back(x.get<long long>());
        else r.push_back(rational_from_double(x.get<double>()));
      }
      q.push_back(std::move(r));
    }
    return QMatrix::from_rows(q);
  });
}

Json to_json(const QMatrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.size(); ++i) {
    Json r = Json::array();
    for (int k = 0; k < m.size(); ++k) r.push_back(to_string(m(i, k)));
    rows.push_back(r);
  }
  return rows;
}

Json to_json(const NormSpectrum& s) {
  Json j;
  j["bound"] = to_string(s.bound);
  Json e = Json::array();
  for (const auto& [r, m] : s.entries) e.push_back({{"norm", to_string(r)}, {"multiplicity", m}});
  j["entries"] = e;
  j["total"] = s.total();
  return j;
}

NormSpectrum norm_spectrum_from_json(const Json& j) {
  return parse_guard("norm spectrum", [&] {
    NormSpectrum s;
    s.bound = parse_rational(j.at("bound").get<std::string>());
    for (const auto& e : j.at("entries"))
      s.entries.emplace_back(parse_rational(e.at("norm").get<std::string>()),
                             e.at("multiplicity").get<long long>());
    return s;
  });
}

Json to_json(const IsometryResult& r) {
  Json j;
  j["isometric"] = r.U.has_value();
  if (r.U) j["U"] = *r.U;
  else j["U"] = nullptr;
  Json c;
  c["determinants_equal"] = r.certificate.determinants_equal;
  c["candidate_counts"] = r.certificate.candidate_counts;
  Json norms = Json::array();
  for (const auto& x : r.certificate.column_norms) norms.push_back(to_string(x));
  c["column_norms"] = norms;
  c["nodes"] = r.certificate.nodes;
  c["statement"] = r.certificate.statement;
  j["certificate"] = c;
  return j;
}

RoundTripConfig roundtrip_config_from_json(const Json& j) {
  return parse_guard("roundtrip config", [&] {
    RoundTripConfig c;
    c.id = j.value("id", c.id);
    const Json& m = j.at("mesh");
    c.mesh.topology = topology_from_string(m.at("topology").get<std::string>());
    c.mesh.n = m.value("n", c.mesh.n);
    c.mesh.nx = m.value("nx", c.mesh.nx);
    c.mesh.ny = m.value("ny", c.mesh.ny);
    c.mesh.a = m.value("a", c.mesh.a);
    c.mesh.b = m.value("b", c.mesh.b);
    if (m.contains("diagonal")) c.mesh.diagonal = diagonal_from_string(m["diagonal"].get<std::string>());
    const int dim = c.mesh.topology == Topology::Interval ? 1 : 2;
    c.metric = j.contains("metric") ? metric_descriptor_from_json(j["metric"]) : MetricDescriptor::identity(dim);
    c.bc = boundary_condition_from_string(
        j.value("bc", std::string(c.mesh.topology == Topology::Torus2 ? "none" : "dirichlet")));
    c.K = j.value("K", c.K);
    c.density_K = j.value("density_K", c.density_K);
    c.step1.zero_tol = j.value("zero_tol", c.step1.zero_tol);
    c.step1.min_links = j.value("adjacency_min_links", c.step1.min_links);
    c.step1.gap_tol = j.value("gap_tol", c.step1.gap_tol);
    c.step1.conflict_tol = j.value("conflict_tol", c.step1.conflict_tol);
    if (j.contains("probes")) c.probes = j["probes"].get<std::vector<std::vector<double>>>();
    if (j.contains("probe")) {
      const Json& p = j["probe"];
      c.probe_r = p.value("r", c.probe_r);
      c.probe_s = p.value("s", c.probe_s);
      c.probe_p = p.value("p", c.probe_p);
      if (p.contains("lambdas")) c.lambdas = p["lambdas"].get<std::vector<double>>();
      c.symmetrize = p.value("symmetrize", c.symmetrize);
    }
    c.verify = j.value("verify", c.verify);
    c.freq_tol = j.value("freq_tol", c.freq_tol);
    c.field_tol = j.value("field_tol", c.field_tol);
    return c;
  });
}

Json to_json(const RoundTripConfig& c) {
  Json m;
  m["topology"] = to_string(c.mesh.topology);
  if (c.mesh.topology == Topology::Interval) {
    m["n"] = c.mesh.n;
    m["a"] = c.mesh.a;
  } else {
    m["nx"] = c.mesh.nx;
    m["ny"] = c.mesh.ny;
    m["a"] = c.mesh.a;
    m["b"] = c.mesh.b;
    m["diagonal"] = to_string(c.mesh.diagonal);
  }
  Json j;
  j["id"] = c.id;
  j["mesh"] = m;
  j["metric"] = to_json(c.metric);
  j["bc"] = to_string(c.bc);
  j["K"] = c.K;
  j["density_K"] = c.density_K;
  j["zero_tol"] = c.step1.zero_tol;
  j["adjacency_min_links"] = c.step1.min_links;
  j["gap_tol"] = c.step1.gap_tol;
  j["conflict_tol"] = c.step1.conflict_tol;
  j["probes"] = c.probes;
  j["probe"] = {{"r", c.probe_r}, {"s", c.probe_s}, {"p", c.probe_p}, {"lambdas", c.lambdas},
                {"symmetrize", c.symmetrize}};
  j["verify"] = c.verify;
  j["freq_tol"] = c.freq_tol;
  j["field_tol"] = c.field_tol;
  return j;
}

Json to_json(const RoundTripReport& r) {
  Json j;
  j["config"] = to_json(r.config);
  j["mesh"] = r.mesh_descriptor;
  j["metric"] = r.metric_descriptor;
  j["forward_modes"] = r.forward_modes;
  j["jumps"] = r.jumps;
  if (r.simplicity) j["simplicity"] = to_json(*r.simplicity);
  Json modes = Json::array();
  for (const auto& m : r.sign_recovery)
    modes.push_back({{"domains", m.domains}, {"graph_edges", m.graph_edges},
                     {"iterations", m.iterations}, {"bipartite", m.bipartite},
                     {"max_conflict", m.max_conflict}});
  j["sign_recovery"] = modes;
  if (r.mu_rel_l2_error >= 0) {
    j["mu_rel_l2_error"] = r.mu_rel_l2_error;
    j["mu_rel_linf_error"] = r.mu_rel_linf_error;
  }
  Json probes = Json::array();
  for (const auto& p : r.probes)
    probes.push_back({{"x0", p.x0}, {"g_recovered", matrix_rows(p.g_recovered)},
                      {"g_true", matrix_rows(p.g_true)}, {"max_rel_error", p.max_rel_error},
                      {"q", p.q}, {"fit_residuals", p.fit_residuals}});
  j["probes"] = probes;
  if (r.consistency) {
    const auto& v = *r.consistency;
    j["consistency"] = {{"pass", v.pass},
                        {"max_freq_rel_diff", v.max_freq_rel_diff},
                        {"max_field_rel_diff", v.max_field_rel_diff},
                        {"compared_modes", v.compared_modes},
                        {"freq_tol", v.freq_tol},
                        {"field_tol", v.field_tol},
                        {"interpolation", v.interpolation}};
  }
  j["timings_s"] = r.timings;
  j["status"] = r.ok() ? "ok" : "failed";
  if (r.failure)
    j["failure"] = {{"stage", r.failure->stage}, {"code", r.failure->code}, {"message", r.failure->message}};
  return j;
}

std::string summary_text(const RoundTripReport& r) {
  std::ostringstream os;
  os << std::setprecision(6);
  os << "experiment " << r.config.id << "\n";
  os << "  mesh    " << r.mesh_descriptor << "\n";
  os << "  metric  " << r.metric_descriptor << "\n";
  os << "  forward " << r.forward_modes << " modes, " << r.jumps << " jumps\n";
  if (r.simplicity) os << "  simple spectrum: " << (r.simplicity->simple() ? "yes" : "no") << "\n";
  if (!r.sign_recovery.empty()) {
    int maxd = 0;
    for (const auto& m : r.sign_recovery) maxd = std::max(maxd, m.domains);
    os << "  step1   " << r.sign_recovery.size() << " modes signed, up to " << maxd << " nodal domains\n";
  }
  if (r.mu_rel_l2_error >= 0)
    os << "  step2   mu relative L2 error " << r.mu_rel_l2_error << ", Linf " << r.mu_rel_linf_error << "\n";
  for (const auto& p : r.probes) {
    os << "  step3   probe (";
    for (size_t k = 0; k < p.x0.size(); ++k) os << (k ? ", " : "") << p.x0[k];
    os << ") max relative metric error " << p.max_rel_error << "\n";
  }
  if (r.consistency)
    os << "  verify  " << (r.consistency->pass ? "pass" : "FAIL") << ": frequency drift "
       << r.consistency->max_freq_rel_diff << ", field drift " << r.consistency->max_field_rel_diff
       << " over " << r.consistency->compared_modes << " modes\n";
  if (r.failure)
    os << "  FAILED at " << r.failure->stage << " [" << r.failure->code << "]: " << r.failure->message << "\n";
  else
    os << "  status  ok\n";
  return os.str();
}

SampledWeylInput sampled_from_json(const Json& j) {
  return parse_guard("sampled table", [&] {
    SampledWeylInput s;
    s.lambdas = j.at("lambdas").get<std::vector<double>>();
    s.weights = vec_from(j.at("weights"));
    s.bc = boundary_condition_from_string(j.value("bc", std::string("none")));
    // one row per vertex, one column per grid point
    const Json& rows = j.at("samples");
    require(rows.size() == static_cast<size_t>(s.weights.size()), ErrorCode::CorruptTable,
            "sample rows do not match the weights");
    s.samples.resize(s.weights.size(), static_cast<Eigen::Index>(s.lambdas.size()));
    for (size_t x = 0; x < rows.size(); ++x) {
      require(rows[x].size() == s.lambdas.size(), ErrorCode::CorruptTable,
              "vertex " + std::to_string(x) + " has the wrong sample count");
      for (size_t k = 0; k < s.lambdas.size(); ++k)
        s.samples(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(k)) = rows[x][k].get<double>();
    }
    return s;
  });
}

Json to_json(const SampledWeylInput& s) {
  Json j;
  j["lambdas"] = s.lambdas;
  j["weights"] = vec(s.weights);
  j["bc"] = to_string(s.bc);
  Json rows = Json::array();
  for (Eigen::Index x = 0; x < s.samples.rows(); ++x) rows.push_back(vec(s.samples.row(x).transpose()));
  j["samples"] = rows;
  return j;
}

SampledWeylInput sample_table(const LocalWeylTable& table, const std::vector<double>& lambdas) {
  SampledWeylInput s;
  s.lambdas = lambdas;
  s.weights = table.weights;
  s.bc = table.bc;
  s.samples = Eigen::MatrixXd::Zero(table.num_vertices(), static_cast<Eigen::Index>(lambdas.size()));
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(table.num_vertices());
  int j = 0;
  for (size_t k = 0; k < lambdas.size(); ++k) {
    while (j < table.size() && table.frequencies[j] <= lambdas[k]) acc += table.fields.col(j++);
    s.samples.col(static_cast<Eigen::Index>(k)) = acc;
  }
  return s;
}

LocalWeylTable ingest_sampled_table(const SampledWeylInput& in, double jump_tol) {
  const Eigen::Index nv = in.samples.rows();
  const Eigen::Index ng = in.samples.cols();
  require(ng >= 2 && static_cast<Eigen::Index>(in.lambdas.size()) == ng, ErrorCode::CorruptTable,
          "sampled table needs a lambda grid of at least 2 points");
  require(std::is_sorted(in.lambdas.begin(), in.lambdas.end()), ErrorCode::CorruptTable,
          "lambda grid is not ascending");
  for (Eigen::Index x = 0; x < nv; ++x)
    for (Eigen::Index k = 1; k < ng; ++k)
      require(in.samples(x, k) >= in.samples(x, k - 1) - 1e-12, ErrorCode::CorruptTable,
              "N(x, lambda) decreases at vertex " + std::to_string(x));
  const double final_mass = in.samples.col(ng - 1).dot(in.weights);
  require(std::fabs(final_mass - std::round(final_mass)) <= 0.01, ErrorCode::CorruptTable,
          "final counting value " + std::to_string(final_mass) + " is not an integer");

  LocalWeylTable t;
  t.weights = in.weights;
  t.bc = in.bc;
  std::vector<Eigen::VectorXd> fields;
  auto add = [&](double lambda, const Eigen::VectorXd& inc, double mass) {
    require(mass < 1.5, ErrorCode::ResolutionTooCoarse,
            "increment of " + std::to_string(mass) + " near lambda " + std::to_string(lambda) +
                ": several eigenvalues share one grid interval");
    t.frequencies.push_back(lambda);
    fields.push_back(inc.cwiseMax(0.0));
    t.multiplicities.push_back(1);
  };
  const Eigen::VectorXd first = in.samples.col(0);
  const double m0 = first.dot(in.weights);
  if (m0 > jump_tol) add(in.lambdas[0], first, m0);
  for (Eigen::Index k = 1; k < ng; ++k) {
    const Eigen::VectorXd inc = in.samples.col(k) - in.samples.col(k - 1);
    const double mass = inc.dot(in.weights);
    if (mass > jump_tol) add(0.5 * (in.lambdas[k - 1] + in.lambdas[k]), inc, mass);
  }
  t.fields.resize(nv, static_cast<Eigen::Index>(fields.size()));
  for (size_t c = 0; c < fields.size(); ++c) t.fields.col(static_cast<Eigen::Index>(c)) = fields[c];
  return t;
}

LocalWeylTable ingest_json(const Json& j, double jump_tol) {
  if (j.contains("frequencies")) return table_from_json(j);
  return ingest_sampled_table(sampled_from_json(j), jump_tol);
}

}  // namespace drumlab
