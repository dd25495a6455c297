#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "drumlab/forward.hpp"
#include "drumlab/mesh.hpp"

namespace drumlab {

struct SpectrumExtraction {
  std::vector<double> frequencies;
  Eigen::MatrixXd amplitudes;  // vertices x jumps, sqrt(E_j)
};

SpectrumExtraction extract_spectrum(const LocalWeylTable& table);

struct SimplicityDiagnostics {
  // groups of consecutive jump indices closer than gap_tol
  std::vector<std::vector<int>> close_clusters;
  // integral of each jump field against the weights (empty if no table given)
  std::vector<double> jump_integrals;
  // jumps whose integral differs from 1 by more than 0.01
  std::vector<int> mass_flags;

  bool simple() const { return close_clusters.empty() && mass_flags.empty(); }
};

SimplicityDiagnostics check_simplicity(const std::vector<double>& frequencies, double gap_tol);
SimplicityDiagnostics check_simplicity(const LocalWeylTable& table, double gap_tol);

inline constexpr int kNodal = 0;

struct NodalPartition {
  std::vector<int> label;  // kNodal or a domain id in 1..m
  int m = 0;
  double zero_tol = 0.0;
  // edges between non-nodal vertices across which the sign changes
  std::vector<std::pair<int, int>> crossings;
  // non-nodal pairs u < w on one chain, separated by a single nodal vertex,
  // with opposite signs
  std::vector<std::pair<int, int>> bridges;
  // largest margin of a relation overruled by stronger ones, relative to
  // max amplitude squared
  double max_conflict = 0.0;
};

// Vertices at or below zero_tol * max are nodal. The remaining zeros fall
// between vertices. Along every straight chain of mesh edges, each sign
// relation (neighbours, and pairs across one nodal vertex) is scored by how
// much the smoothest signed sequence (least squared fourth differences)
// prefers it. Vertex signs are then fixed from the most confident relations
// first; a relation contradicting them by more than conflict_tol (relative to
// max amplitude squared) is an inconsistency. Domains are the components left
// after removing nodal vertices and sign changes.
inline constexpr double kSignConflictTol = 0.05;

NodalPartition nodal_partition(const Eigen::VectorXd& amplitude, const Mesh& mesh,
                               double zero_tol = 1e-6, double conflict_tol = kSignConflictTol);

// Straight chains of edges (grid lines). Closed chains repeat no vertex; the
// flag says whether the last vertex connects back to the first.
struct EdgeChain {
  std::vector<int> vertices;
  bool cyclic = false;
};
std::vector<EdgeChain> edge_chains(const Mesh& mesh);

// Sign relations along one chain. flip[i] concerns points i and i + 1,
// skip_flip[i] points i and i + 2 (vertex indices mod n on cyclic chains).
// Margins are the extra cost of the best sequence with the opposite relation.
struct ChainRelations {
  std::vector<char> flip;
  std::vector<double> flip_margin;
  std::vector<char> skip_flip;
  std::vector<double> skip_margin;
};

ChainRelations chain_relations(const std::vector<double>& a, bool cyclic);

struct DomainGraph {
  int m = 0;
  std::vector<std::pair<int, int>> edges;       // i <= j, sorted; i == j is a sign change inside a domain
  std::vector<std::vector<int>> neighbors;      // index 0 unused
  std::vector<std::vector<int>> link_counts;    // parallel to neighbors
};

int default_min_links(int dimension);

DomainGraph adjacency_graph(const NodalPartition& partition, const Mesh& mesh,
                            const Eigen::VectorXd& amplitude, int min_links);

struct SignAssignment {
  std::vector<int> delta;                       // delta[id], index 0 unused
  std::vector<std::vector<int>> iteration_trace;  // S(0), S(1), ...
};

SignAssignment propagate_signs(const DomainGraph& graph);

Eigen::VectorXd recover_eigenfunction(const Eigen::VectorXd& amplitude,
                                      const NodalPartition& partition,
                                      const SignAssignment& signs);

struct Step1Options {
  double zero_tol = 1e-6;
  double conflict_tol = kSignConflictTol;
  int min_links = 0;  // 0 selects the dimension default
  double gap_tol = 1e-6;
};

struct ModeRecovery {
  int domains = 0;
  int graph_edges = 0;
  int iterations = 0;
  bool bipartite = true;
  double max_conflict = 0.0;
};

struct Step1Result {
  std::vector<double> frequencies;
  Eigen::MatrixXd fields;  // vertices x modes, signed
  Eigen::VectorXd weights;
  BoundaryCondition bc = BoundaryCondition::None;
  std::vector<ModeRecovery> modes;
  SimplicityDiagnostics simplicity;
};

// Full Step 1. Throws inconsistency if the spectrum is not simple.
Step1Result recover_step1(const LocalWeylTable& table, const Mesh& mesh,
                          const Step1Options& options = {});

}  // namespace drumlab
