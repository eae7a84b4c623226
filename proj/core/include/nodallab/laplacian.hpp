#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "nodallab/grid.hpp"

namespace nodallab {

/// Discrete (negative) Laplace-Beltrami operator on the active nodes of a
/// grid, kept in generalized symmetric form: a stiffness matrix L (graph
/// Laplacian with zero-value closures toward inactive neighbours) plus a
/// diagonal mass M.  The operator with the continuum eigenvalues is
/// A = M^{-1} L, self-adjoint in the mass inner product <u, v>_M = u^T M v.
///
/// Edge weight spacing^(dim-2) and node mass spacing^dim make u^T L u the
/// discrete integral of |grad u|^2 (of the zero-extension of u) and
/// u^T M u the integral of u^2.  A conformal 2-D factor q rescales only the
/// mass: the Dirichlet integral is conformally invariant in two dimensions.
struct SparseSymOp {
  Eigen::SparseMatrix<double, Eigen::RowMajor> stiffness;  // active x active
  Eigen::VectorXd mass;                                    // diagonal, > 0
  std::vector<std::int64_t> active_nodes;                  // compact id -> grid node
  std::vector<std::int32_t> compact;  // grid node -> compact id, -1 if inactive
  double spacing = 0.0;
  int dim = 2;
  /// False when no active node touches an inactive neighbour: the constant
  /// vector is then in the kernel (free box, torus) and eigensolves shift.
  bool has_dirichlet_closure = false;

  std::int64_t n() const { return mass.size(); }

  /// y = M^{-1} L u.
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;

  /// u^T L u: equals the sum over grid edges of w_e (u_i - u_j)^2 with u = 0
  /// on inactive nodes.
  double dirichlet_energy(const Eigen::VectorXd& u) const;

  double mass_norm_sq(const Eigen::VectorXd& u) const;
  double mass_dot(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
};

/// Assemble the 5-point (2-D) / 7-point (3-D) operator for a grid.
SparseSymOp assemble_laplacian(const GridDomain& d);

/// dirichlet_energy / mass_norm_sq; throws EmptyDecomposition on u == 0.
double rayleigh_quotient(const SparseSymOp& op, const Eigen::VectorXd& u);

}  // namespace nodallab
