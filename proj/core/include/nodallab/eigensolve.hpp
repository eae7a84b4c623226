#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nodallab/grid.hpp"
#include "nodallab/laplacian.hpp"

namespace nodallab {

struct EigenPair {
  double lambda = 0.0;
  /// Certified residual ||L phi - lambda M phi||_{M^{-1}}; the solver
  /// guarantees residual <= tol * max(lambda, 1).
  double residual = 0.0;
  /// Values on active nodes, mass-normalized (phi^T M phi = 1), sign fixed
  /// so the entry of largest magnitude is positive.
  Eigen::VectorXd phi;
};

struct EigenOptions {
  double tol = 1e-8;
  int max_outer = 5000;
  std::uint64_t seed = 1;
};

/// Copy into the plain container the geometry modules consume.
inline std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

/// Smallest k eigenpairs of L phi = lambda M phi, ascending.
///
/// Block inverse-power iteration with Rayleigh-Ritz restarts on a
/// mass-orthonormal block; inner solves through a sparse LDLT factorization
/// of the stiffness (shifted when the constant vector is in the kernel).
/// Small problems fall back to a dense solve.  Deterministic for fixed
/// (operator, k, seed); degenerate eigenspaces get an arbitrary but
/// reproducible basis.  Throws PreconditionViolation for k out of range and
/// NonConvergence when the iteration budget is exhausted.
std::vector<EigenPair> smallest_eigenpairs(const SparseSymOp& op, int k,
                                           const EigenOptions& opts = {});

// ---------------------------------------------------------------------------
// bundle serialization

struct EigenBundle {
  GridDomain domain;
  std::vector<EigenPair> pairs;
};

/// Writes <prefix>.json (bundle manifest with the domain hash), the domain
/// as <prefix>.domain.json, and one raw little-endian float64 sidecar
/// <prefix>.phiNNN.f64 per eigenvector (values on active nodes in row-major
/// compact order).
void save_bundle(const std::string& prefix, const GridDomain& d,
                 const std::vector<EigenPair>& pairs);

/// Loads a bundle manifest; verifies the domain hash and sidecar sizes.
EigenBundle load_bundle(const std::string& json_path);

}  // namespace nodallab
