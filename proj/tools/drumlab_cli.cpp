// drumlab command-line front end. Every subcommand reads JSON, writes its
// results into --out, and prints a one-line summary.
#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "drumlab/errors.hpp"
#include "drumlab/io.hpp"
#include "drumlab/pipeline.hpp"
#include "drumlab/plot.hpp"

using namespace drumlab;
namespace fs = std::filesystem;

namespace {

struct Global {
  unsigned seed = 20240611;
  std::string out = ".";
  std::string format = "json";
};

std::string out_path(const Global& g, const std::string& name) { return (fs::path(g.out) / name).string(); }

void emit(const Global& g, const std::string& stem, const Json& j, const std::string& csv = {}) {
  if (g.format == "csv") {
    require(!csv.empty(), ErrorCode::Usage, stem + " has no CSV form; use --format json");
    write_file_atomic(out_path(g, stem + ".csv"), csv);
    std::cout << "wrote " << out_path(g, stem + ".csv") << "\n";
  } else {
    write_json(out_path(g, stem + ".json"), j);
    std::cout << "wrote " << out_path(g, stem + ".json") << "\n";
  }
}

std::pair<Mesh, std::optional<MetricField>> load_mesh(const std::string& path) {
  const Json j = read_json(path);
  Mesh mesh = mesh_from_json(j);
  auto metric = metric_from_json(j, mesh);
  return {std::move(mesh), std::move(metric)};
}

Eigen::VectorXd to_vector(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int exit_code(ErrorCode code) { return is_validation_error(code) ? 2 : 3; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drumlab: local Weyl tables and inverse spectral recovery"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "seed for randomized steps")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--format", g.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  // forward
  auto* forward = app.add_subcommand("forward", "solve the forward problem and synthesize the local Weyl table");
  std::string fwd_config, fwd_mesh, fwd_bc = "dirichlet";
  int fwd_K = 60, fwd_vertex = 0;
  forward->add_option("--config", fwd_config, "roundtrip-style config JSON (mesh, metric, bc, K)");
  forward->add_option("--mesh", fwd_mesh, "mesh JSON with a metric block");
  forward->add_option("--bc", fwd_bc, "dirichlet, neumann or none (with --mesh)");
  forward->add_option("-K,--modes", fwd_K, "number of modes, 0 for all (with --mesh)");
  forward->add_option("--vertex", fwd_vertex, "vertex for the CSV of E_j(x)");

  // invert
  auto* invert = app.add_subcommand("invert", "inverse steps");
  invert->require_subcommand(1);
  auto* step1 = invert->add_subcommand("step1", "recover signed eigenfunctions from a table");
  std::string s1_table, s1_mesh;
  Step1Options s1_opts;
  step1->add_option("--table", s1_table, "LocalWeylTable JSON")->required();
  step1->add_option("--mesh", s1_mesh, "mesh JSON")->required();
  step1->add_option("--zero-tol", s1_opts.zero_tol, "nodal threshold relative to max amplitude");
  step1->add_option("--adjacency-min-links", s1_opts.min_links, "links needed to join two domains");
  step1->add_option("--gap-tol", s1_opts.gap_tol, "frequency gap below which jumps count as one cluster");
  step1->add_option("--conflict-tol", s1_opts.conflict_tol, "largest tolerated contradicting sign evidence");

  auto* step2 = invert->add_subcommand("step2", "recover the volume density");
  std::string s2_step1, s2_mesh, s2_reference = "euclidean";
  int s2_K = 0;
  step2->add_option("--step1", s2_step1, "step1 result JSON")->required();
  step2->add_option("--mesh", s2_mesh, "mesh JSON")->required();
  step2->add_option("--reference", s2_reference, "euclidean or table (the table's own weights)")
      ->check(CLI::IsMember({"euclidean", "table"}));
  step2->add_option("-K,--modes", s2_K, "truncation, 0 for all");

  auto* step3 = invert->add_subcommand("step3", "recover the metric at probe points");
  std::string s3_step1, s3_step2, s3_mesh, s3_probe;
  step3->add_option("--step1", s3_step1, "step1 result JSON")->required();
  step3->add_option("--step2", s3_step2, "step2 result JSON")->required();
  step3->add_option("--mesh", s3_mesh, "mesh JSON")->required();
  step3->add_option("--probe", s3_probe, "probe JSON: {x0, r, s, p, lambdas} or a list of them")->required();

  // roundtrip
  auto* roundtrip = app.add_subcommand("roundtrip", "forward solve then full inversion");
  std::string rt_config;
  roundtrip->add_option("--config", rt_config, "config JSON")->required();

  // tori
  auto* tori = app.add_subcommand("tori", "flat tori lattice lab");
  tori->require_subcommand(1);
  auto* spectrum = tori->add_subcommand("spectrum", "dual-lattice norms up to a bound");
  std::string sp_gram, sp_bound = "100";
  spectrum->add_option("--gram", sp_gram, "lattice Gram JSON")->required();
  spectrum->add_option("--bound", sp_bound, "norm bound B (rational)");
  auto* compare = tori->add_subcommand("compare", "compare two tori spectrally");
  std::string cmp_a, cmp_b, cmp_bound = "100";
  compare->add_option("--a", cmp_a, "first Gram JSON")->required();
  compare->add_option("--b", cmp_b, "second Gram JSON")->required();
  compare->add_option("--bound", cmp_bound, "norm bound B (rational)");
  auto* isometry = tori->add_subcommand("isometry", "search for a unimodular U with U^T A U = B");
  std::string iso_a, iso_b;
  long long iso_limit = kIsometryNodeLimit;
  isometry->add_option("--a", iso_a, "first Gram JSON")->required();
  isometry->add_option("--b", iso_b, "second Gram JSON")->required();
  isometry->add_option("--node-limit", iso_limit, "search budget");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "read an event or sampled table");
  std::string ing_input;
  double ing_jump_tol = 0.5;
  ingest->add_option("--input", ing_input, "table JSON")->required();
  ingest->add_option("--jump-tol", ing_jump_tol, "integrated increment that counts as a jump");

  // plot
  auto* plot = app.add_subcommand("plot", "emit CSV plot data");
  std::string pl_kind, pl_input;
  int pl_vertex = 0;
  plot->add_option("--kind", pl_kind, "staircase, fields, mu, metric-error or tori")->required();
  plot->add_option("--input", pl_input, "artifact JSON")->required();
  plot->add_option("--vertex", pl_vertex, "vertex for staircase and fields");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*forward) {
      require(fwd_config.empty() != fwd_mesh.empty(), ErrorCode::Usage, "give exactly one of --config and --mesh");
      Mesh mesh;
      MetricField metric;
      BoundaryCondition bc;
      int K;
      if (!fwd_config.empty()) {
        const RoundTripConfig c = roundtrip_config_from_json(read_json(fwd_config));
        mesh = c.mesh.build();
        metric = sample_metric(c.metric, mesh);
        bc = c.bc;
        K = c.K;
      } else {
        auto [m, mf] = load_mesh(fwd_mesh);
        mesh = std::move(m);
        metric = mf ? *mf : sample_metric(MetricDescriptor::identity(mesh.dimension), mesh);
        bc = boundary_condition_from_string(fwd_bc);
        K = fwd_K;
      }
      const EigenSystem es = solve_eigensystem(assemble_operators(mesh, metric, bc), K);
      const LocalWeylTable table = synthesize_local_weyl(es);
      write_json(out_path(g, "mesh.json"), to_json(mesh, &metric));
      write_json(out_path(g, "eigensystem.json"), to_json(es));
      emit(g, "table", to_json(table), jump_fields_csv(table, fwd_vertex));
      std::cout << es.size() << " modes, " << table.size() << " jumps\n";
    } else if (*step1) {
      const auto [mesh, metric] = load_mesh(s1_mesh);
      const LocalWeylTable table = ingest_json(read_json(s1_table));
      const Step1Result r = recover_step1(table, mesh, s1_opts);
      emit(g, "step1", to_json(r));
      std::cout << r.modes.size() << " modes signed\n";
    } else if (*step2) {
      const auto [mesh, metric] = load_mesh(s2_mesh);
      const Step1Result s1 = step1_from_json(read_json(s2_step1));
      const Eigen::VectorXd ref = s2_reference == "table" ? s1.weights : euclidean_weights(mesh);
      const DensityRecovery d = recover_density(s1.fields, ref, mesh, s2_K);
      Json j = to_json(d);
      j["mesh"] = to_json(mesh);
      std::optional<Eigen::VectorXd> truth;
      if (metric) {
        // ground truth relative to the chosen reference
        truth = true_density(*metric);
        if (s2_reference == "table") truth = Eigen::VectorXd::Ones(mesh.num_vertices());
        j["mu_true"] = std::vector<double>(truth->data(), truth->data() + truth->size());
      }
      emit(g, "step2", j, mu_csv(mesh, d.mu, truth));
      std::cout << "density recovered from " << d.K << " modes\n";
    } else if (*step3) {
      const auto [mesh, metric] = load_mesh(s3_mesh);
      const Step1Result s1 = step1_from_json(read_json(s3_step1));
      const Json s2 = read_json(s3_step2);
      const Eigen::VectorXd mu = to_vector(s2.at("mu"));
      const Eigen::VectorXd ref = to_vector(s2.at("reference_weights"));
      require(mu.size() == s1.fields.rows(), ErrorCode::DimensionMismatch, "step2 density does not match step1");
      const SpectralLaplacian L = SpectralLaplacian::from(s1.frequencies, s1.fields, mu.cwiseProduct(ref));
      Json probes = read_json(s3_probe);
      if (!probes.is_array()) probes = Json::array({probes});
      Json out = Json::array();
      std::string csv = "x0,i,j,g_recovered,g_true\n";
      for (const auto& p : probes) {
        ProbeConfig pc = ProbeConfig::at(p.at("x0").get<std::vector<double>>(), p.value("r", 0.24),
                                         p.value("s", 0.08), p.value("p", 2.0));
        if (p.contains("lambdas")) pc.lambdas = p["lambdas"].get<std::vector<double>>();
        pc.symmetrize = p.value("symmetrize", true);
        pc.fit_tol = p.value("fit_tol", pc.fit_tol);
        const MetricRecovery m = recover_metric_at(L, mesh, pc);
        Json jm = to_json(m);
        std::ostringstream x0;
        for (size_t k = 0; k < m.x0.size(); ++k) x0 << (k ? " " : "") << m.x0[k];
        for (int i = 0; i < m.g.rows(); ++i)
          for (int k = 0; k < m.g.cols(); ++k) {
            csv += x0.str() + "," + std::to_string(i) + "," + std::to_string(k) + "," + std::to_string(m.g(i, k)) + ",";
            if (metric) csv += std::to_string(metric->g[m.vertex](i, k));
            csv += "\n";
          }
        if (metric) {
          Json rows = Json::array();
          const Eigen::MatrixXd& gt = metric->g[m.vertex];
          for (int i = 0; i < gt.rows(); ++i) {
            Json row = Json::array();
            for (int k = 0; k < gt.cols(); ++k) row.push_back(gt(i, k));
            rows.push_back(row);
          }
          jm["g_true"] = rows;
        }
        out.push_back(jm);
      }
      emit(g, "step3", out, csv);
      std::cout << out.size() << " probes\n";
    } else if (*roundtrip) {
      const RoundTripConfig c = roundtrip_config_from_json(read_json(rt_config));
      const RoundTripReport rep = run_roundtrip(c);
      write_json(out_path(g, c.id + "_report.json"), to_json(rep));
      const std::string text = summary_text(rep);
      write_file_atomic(out_path(g, c.id + "_summary.txt"), text);
      std::cout << text;
      if (rep.failure) {
        for (int k = 0; k <= static_cast<int>(ErrorCode::Io); ++k)
          if (error_code_name(static_cast<ErrorCode>(k)) == rep.failure->code)
            return exit_code(static_cast<ErrorCode>(k));
        return 3;
      }
      if (rep.consistency && !rep.consistency->pass) return 3;
    } else if (*spectrum) {
      const LatticeForm f = make_form(gram_from_json(read_json(sp_gram)));
      const NormSpectrum s = enumerate_norms(dual_form(f.gram), parse_rational(sp_bound));
      Json j = to_json(s);
      j["volume"] = torus_volume(f);
      emit(g, "spectrum", j, tori_csv(s, s));
      std::cout << s.total() << " dual vectors with norm <= " << sp_bound << "\n";
    } else if (*compare) {
      const LatticeForm a = make_form(gram_from_json(read_json(cmp_a)));
      const LatticeForm b = make_form(gram_from_json(read_json(cmp_b)));
      require(a.dimension() == b.dimension(), ErrorCode::DimensionMismatch, "tori have different dimensions");
      const Rational B = parse_rational(cmp_bound);
      const NormSpectrum sa = enumerate_norms(dual_form(a.gram), B);
      const NormSpectrum sb = enumerate_norms(dual_form(b.gram), B);
      const bool det_equal = determinant(a.gram) == determinant(b.gram);
      Json j;
      j["a"] = to_json(sa);
      j["b"] = to_json(sb);
      j["spectra_equal"] = sa == sb;
      j["determinants_equal"] = det_equal;
      j["local_weyl_equal"] = sa == sb && det_equal;
      emit(g, "compare", j, tori_csv(sa, sb));
      std::cout << "spectra " << (sa == sb ? "equal" : "differ") << " up to " << cmp_bound << ", determinants "
                << (det_equal ? "equal" : "differ") << "\n";
    } else if (*isometry) {
      const QMatrix a = make_form(gram_from_json(read_json(iso_a))).gram;
      const QMatrix b = make_form(gram_from_json(read_json(iso_b))).gram;
      const IsometryResult r = search_isometry(a, b, iso_limit);
      emit(g, "isometry", to_json(r));
      std::cout << r.certificate.statement << "\n";
    } else if (*ingest) {
      const LocalWeylTable t = ingest_json(read_json(ing_input), ing_jump_tol);
      emit(g, "table", to_json(t));
      std::cout << t.size() << " jumps\n";
    } else if (*plot) {
      const std::string csv = emit_plot_data(read_json(pl_input), pl_kind, pl_vertex);
      write_file_atomic(out_path(g, pl_kind + ".csv"), csv);
      std::cout << "wrote " << out_path(g, pl_kind + ".csv") << "\n";
    }
  } catch (const Error& e) {
    std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
