#include "nodallab/laplacian.hpp"

#include <cmath>

#include "nodallab/errors.hpp"

namespace nodallab {

Eigen::VectorXd SparseSymOp::apply(const Eigen::VectorXd& u) const {
  Eigen::VectorXd v = stiffness * u;
  return v.cwiseQuotient(mass);
}

double SparseSymOp::dirichlet_energy(const Eigen::VectorXd& u) const {
  return u.dot(stiffness * u);
}

double SparseSymOp::mass_norm_sq(const Eigen::VectorXd& u) const {
  return u.dot(mass.cwiseProduct(u));
}

double SparseSymOp::mass_dot(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
  return u.dot(mass.cwiseProduct(v));
}

SparseSymOp assemble_laplacian(const GridDomain& d) {
  d.validate();
  SparseSymOp op;
  op.spacing = d.spacing;
  op.dim = d.dim;

  const std::int64_t n_nodes = d.n_nodes();
  op.compact.assign(static_cast<std::size_t>(n_nodes), -1);
  op.active_nodes.reserve(static_cast<std::size_t>(d.n_active()));
  for (std::int64_t id = 0; id < n_nodes; ++id) {
    if (d.active(id)) {
      op.compact[static_cast<std::size_t>(id)] = static_cast<std::int32_t>(op.active_nodes.size());
      op.active_nodes.push_back(id);
    }
  }
  const std::int64_t n = static_cast<std::int64_t>(op.active_nodes.size());

  const double w = std::pow(d.spacing, d.dim - 2);  // edge weight
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n * (2 * d.dim + 1)));
  op.mass.resize(n);

  for (std::int64_t row = 0; row < n; ++row) {
    const std::int64_t id = op.active_nodes[static_cast<std::size_t>(row)];
    double diag = 0.0;
    for (int axis = 0; axis < d.dim; ++axis) {
      for (int dir = -1; dir <= 1; dir += 2) {
        const std::int64_t nb = d.neighbor(id, axis, dir);
        if (nb < 0) continue;  // natural boundary: no flux through the grid edge
        if (d.active(nb)) {
          trips.emplace_back(static_cast<int>(row),
                             static_cast<int>(op.compact[static_cast<std::size_t>(nb)]), -w);
          diag += w;
        } else {
          diag += w;  // zero-value closure toward the inactive wall node
          op.has_dirichlet_closure = true;
        }
      }
    }
    trips.emplace_back(static_cast<int>(row), static_cast<int>(row), diag);
    op.mass[row] = d.node_mass(id);
  }

  op.stiffness.resize(static_cast<int>(n), static_cast<int>(n));
  op.stiffness.setFromTriplets(trips.begin(), trips.end());
  op.stiffness.makeCompressed();
  return op;
}

double rayleigh_quotient(const SparseSymOp& op, const Eigen::VectorXd& u) {
  const double m = op.mass_norm_sq(u);
  if (!(m > 0.0)) throw EmptyDecomposition("rayleigh_quotient of the zero vector");
  return op.dirichlet_energy(u) / m;
}

}  // namespace nodallab
