#pragma once

#include <Eigen/Dense>
#include <vector>

#include "drumlab/mesh.hpp"

namespace drumlab {

// Lumped mass of the flat chart metric: the default reference measure.
Eigen::VectorXd euclidean_weights(const Mesh& mesh);

// G_ij = sum_x e_i(x) e_j(x) w(x) over the first K modes.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& modes, const Eigen::VectorXd& reference_weights,
                            int K);

// Lower-triangular a with a G a^T = I (a = L^-1 for G = L L^T).
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& G);

struct DensityRecovery {
  Eigen::VectorXd reference_weights;
  Eigen::MatrixXd a;
  Eigen::VectorXd mu_tilde;
  Eigen::VectorXd mu;
  std::vector<char> kept;  // vertices where mu = mu_tilde / e1 directly
  int K = 0;
  double gram_condition = 0.0;
};

inline constexpr double kGramConditionLimit = 1e12;
inline constexpr double kE1FloorFraction = 1e-3;

// modes: recovered signed eigenfunctions, column 0 is e1 (positive).
// K <= 0 uses every mode.
DensityRecovery recover_density(const Eigen::MatrixXd& modes, const Eigen::VectorXd& reference_weights,
                                const Mesh& mesh, int K = 0);

}  // namespace drumlab
