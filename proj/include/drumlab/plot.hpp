#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drumlab/forward.hpp"
#include "drumlab/io.hpp"
#include "drumlab/mesh.hpp"
#include "drumlab/tori.hpp"

namespace drumlab {

// lambda,N at one vertex. Each jump appears twice: once with the value just
// below it and once with the value at it.
std::string staircase_csv(const LocalWeylTable& table, int vertex);

// lambda,E(x) for every jump at one vertex.
std::string jump_fields_csv(const LocalWeylTable& table, int vertex);

// x,mu_recovered,mu_true (1D) or x,y,mu_recovered,mu_true (2D). mu_true is
// left empty when unknown.
std::string mu_csv(const Mesh& mesh, const Eigen::VectorXd& mu,
                   const std::optional<Eigen::VectorXd>& mu_true);

std::string metric_error_csv(const std::vector<std::pair<int, double>>& points);

// lambda,N_a,N_b,diff at every eigenvalue of either spectrum.
std::string tori_csv(const NormSpectrum& a, const NormSpectrum& b);

// Dispatch on kind: staircase, fields, mu, metric-error, tori.
// Anything else is a usage error.
std::string emit_plot_data(const Json& artifact, const std::string& kind, int vertex = 0);

}  // namespace drumlab
