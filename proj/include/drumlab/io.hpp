#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "drumlab/density.hpp"
#include "drumlab/forward.hpp"
#include "drumlab/metric.hpp"
#include "drumlab/metric_recovery.hpp"
#include "drumlab/pipeline.hpp"
#include "drumlab/tori.hpp"
#include "drumlab/weyl_inversion.hpp"

namespace drumlab {

using Json = nlohmann::json;

// Writes to a temporary file in the same directory, then renames.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);
Json read_json(const std::string& path);
void write_json(const std::string& path, const Json& j);

Json to_json(const Mesh& mesh, const MetricField* metric = nullptr);
Mesh mesh_from_json(const Json& j);
std::optional<MetricField> metric_from_json(const Json& j, const Mesh& mesh);

Json to_json(const MetricDescriptor& d);
MetricDescriptor metric_descriptor_from_json(const Json& j);

Json to_json(const EigenSystem& es);
EigenSystem eigensystem_from_json(const Json& j);

Json to_json(const LocalWeylTable& t);
LocalWeylTable table_from_json(const Json& j);

Json to_json(const SimplicityDiagnostics& d);
Json to_json(const Step1Result& r);
Step1Result step1_from_json(const Json& j);

Json to_json(const DensityRecovery& d);
Json to_json(const MetricRecovery& m);

QMatrix gram_from_json(const Json& j);
Json to_json(const QMatrix& m);
Json to_json(const NormSpectrum& s);
NormSpectrum norm_spectrum_from_json(const Json& j);
Json to_json(const IsometryResult& r);

RoundTripConfig roundtrip_config_from_json(const Json& j);
Json to_json(const RoundTripConfig& c);
Json to_json(const RoundTripReport& r);
std::string summary_text(const RoundTripReport& r);

// Sampled N(x, lambda) on a lambda grid.
struct SampledWeylInput {
  std::vector<double> lambdas;  // ascending
  Eigen::MatrixXd samples;      // vertices x grid points
  Eigen::VectorXd weights;
  BoundaryCondition bc = BoundaryCondition::None;
};

SampledWeylInput sampled_from_json(const Json& j);
Json to_json(const SampledWeylInput& s);

// Samples a table on a grid (test and demo helper).
SampledWeylInput sample_table(const LocalWeylTable& table, const std::vector<double>& lambdas);

// A jump is an increment whose weighted integral exceeds jump_tol between two
// grid points; it is placed at the midpoint. Mass already present at the first
// grid point becomes a jump at that grid point.
LocalWeylTable ingest_sampled_table(const SampledWeylInput& input, double jump_tol = 0.5);

// Event-format tables pass through unchanged; sampled input goes through detection.
LocalWeylTable ingest_json(const Json& j, double jump_tol = 0.5);

}  // namespace drumlab
