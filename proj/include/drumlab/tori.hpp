#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drumlab/rational.hpp"

namespace drumlab {

// Gram matrix of the lattice of a flat torus R^d / Lambda.
struct LatticeForm {
  QMatrix gram;
  std::string provenance;

  int dimension() const { return gram.size(); }
};

// Validates symmetry and positive definiteness (exact leading minors).
LatticeForm make_form(QMatrix gram, std::string provenance = {});

QMatrix dual_form(const QMatrix& A);

struct NormSpectrum {
  Rational bound;
  std::vector<std::pair<Rational, long long>> entries;  // ascending distinct norms

  long long total() const;
  bool operator==(const NormSpectrum& o) const { return bound == o.bound && entries == o.entries; }
};

inline constexpr double kEnumerationLimit = 1e8;

// All values v^T A v <= B over integer v, with multiplicities.
NormSpectrum enumerate_norms(const QMatrix& A, const Rational& B);

// Estimated number of lattice points of Gram A in the ball of norm B.
double enumeration_volume(const QMatrix& A, const Rational& B);

// Number of eigenvalues 2 pi sqrt(r) <= lambda (with multiplicity).
long long counting_function(const NormSpectrum& spec, double lambda);

// N(x, lambda) = N(lambda) / Vol with Vol = sqrt(det A).
double local_weyl_torus(const LatticeForm& form, const NormSpectrum& spec, double lambda);

double torus_volume(const LatticeForm& form);

// LLL reduction (delta = 3/4) of a positive definite Gram matrix. Returns the
// reduced Gram V^T A V and writes the unimodular V if requested.
QMatrix lll_reduce(const QMatrix& A, QMatrix* V = nullptr);

using IntMatrix = std::vector<std::vector<long long>>;

struct IsometryCertificate {
  bool determinants_equal = true;
  std::vector<long long> candidate_counts;  // per column of the reduced target basis
  std::vector<Rational> column_norms;
  long long nodes = 0;
  std::string statement;
};

struct IsometryResult {
  std::optional<IntMatrix> U;  // U^T A1 U = A2
  IsometryCertificate certificate;
};

inline constexpr long long kIsometryNodeLimit = 10'000'000;

// Exhaustive search for a unimodular U with U^T A1 U = A2. "none" is exact:
// every A1-vector whose norm equals a reduced basis norm of A2 is enumerated.
IsometryResult search_isometry(const QMatrix& A1, const QMatrix& A2,
                               long long node_limit = kIsometryNodeLimit);

QMatrix to_qmatrix(const IntMatrix& m);

}  // namespace drumlab
