// Assembled operator: symmetry, energies, exact lattice identities.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "nodallab/grid.hpp"
#include "nodallab/laplacian.hpp"
#include "nodallab/rng.hpp"

using namespace nodallab;

namespace {

Eigen::VectorXd random_vector(std::int64_t n, std::uint64_t seed) {
  Eigen::VectorXd u(n);
  CounterRng rng(seed, 0);
  for (std::int64_t i = 0; i < n; ++i) u[i] = rng.next_in(-1.0, 1.0);
  return u;
}

// Discrete sine mode on the active nodes of a unit square.
Eigen::VectorXd sine_mode(const GridDomain& d, int j, int k) {
  const auto ids = active_node_list(d);
  Eigen::VectorXd phi(static_cast<std::int64_t>(ids.size()));
  const double pi = std::numbers::pi;
  for (std::size_t a = 0; a < ids.size(); ++a) {
    const auto p = d.position(ids[a]);
    phi[static_cast<std::int64_t>(a)] = std::sin(j * pi * p[0]) * std::sin(k * pi * p[1]);
  }
  return phi;
}

double lattice_lambda(double h, int j, int k) {
  const double pi = std::numbers::pi;
  const double sj = std::sin(j * pi * h / 2), sk = std::sin(k * pi * h / 2);
  return 4.0 / (h * h) * (sj * sj + sk * sk);
}

}  // namespace

TEST_CASE("stiffness is symmetric and positive semidefinite") {
  const GridDomain d = build_domain(DomainKind::disk, 21);
  const SparseSymOp op = assemble_laplacian(d);
  const Eigen::VectorXd u = random_vector(op.n(), 3);
  const Eigen::VectorXd v = random_vector(op.n(), 4);
  const double uv = u.dot(op.stiffness * v);
  const double vu = v.dot(op.stiffness * u);
  CHECK(std::abs(uv - vu) <= 1e-10 * (std::abs(uv) + 1.0));
  CHECK(op.dirichlet_energy(u) >= 0.0);
  CHECK(op.has_dirichlet_closure);
}

TEST_CASE("discrete sine modes satisfy the exact lattice eigen identity") {
  const GridDomain d = build_domain(DomainKind::square, 17);
  const SparseSymOp op = assemble_laplacian(d);
  const double h = d.spacing;
  for (auto [j, k] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{3, 2}, std::pair{4, 4}}) {
    const Eigen::VectorXd phi = sine_mode(d, j, k);
    const double lam = lattice_lambda(h, j, k);
    // L phi = lambda M phi holds exactly for the 5-point stencil
    const Eigen::VectorXd res =
        op.stiffness * phi - lam * (op.mass.array() * phi.array()).matrix();
    CHECK(res.lpNorm<Eigen::Infinity>() <= 1e-10 * lam * op.mass.maxCoeff());
    // and the Rayleigh quotient reproduces the same value
    CHECK(rayleigh_quotient(op, phi) == doctest::Approx(lam).epsilon(1e-12));
  }
}

TEST_CASE("energy of the wall-distance pyramid equals the area exactly") {
  // u = dist(x, wall) has |grad u| = 1 a.e.; on odd grids the discrete
  // forward-difference energy telescopes to exactly the unit area
  for (int res : {17, 33, 65}) {
    const GridDomain d = build_domain(DomainKind::square, res);
    const SparseSymOp op = assemble_laplacian(d);
    const auto ids = active_node_list(d);
    Eigen::VectorXd u(static_cast<std::int64_t>(ids.size()));
    for (std::size_t a = 0; a < ids.size(); ++a) {
      const auto p = d.position(ids[a]);
      u[static_cast<std::int64_t>(a)] =
          std::min(std::min(p[0], 1.0 - p[0]), std::min(p[1], 1.0 - p[1]));
    }
    CHECK(op.dirichlet_energy(u) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("mass diagonal sums to the active volume") {
  const GridDomain d = build_domain(DomainKind::lshape, 65);
  const SparseSymOp op = assemble_laplacian(d);
  double direct = 0.0;
  for (std::int64_t id = 0; id < d.n_nodes(); ++id)
    if (d.active(id)) direct += d.node_mass(id);
  CHECK(op.mass.sum() == doctest::Approx(direct).epsilon(1e-12));
  CHECK(op.mass.minCoeff() > 0.0);
}

TEST_CASE("constants are flat for free boxes and tori but not with walls") {
  const SparseSymOp free_op = assemble_laplacian(build_free_box(2, 17));
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(free_op.n());
  CHECK(free_op.dirichlet_energy(ones) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(!free_op.has_dirichlet_closure);

  DomainOptions topts;
  topts.torus_dim = 2;
  const SparseSymOp torus_op = assemble_laplacian(build_domain(DomainKind::torus, 12, 1.0, topts));
  ones = Eigen::VectorXd::Ones(torus_op.n());
  CHECK(torus_op.dirichlet_energy(ones) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(!torus_op.has_dirichlet_closure);

  const SparseSymOp wall_op = assemble_laplacian(build_domain(DomainKind::square, 17));
  ones = Eigen::VectorXd::Ones(wall_op.n());
  CHECK(wall_op.dirichlet_energy(ones) > 1.0);  // closure terms see the wall
}

TEST_CASE("conformal factor rescales only the mass") {
  DomainOptions opts;
  opts.q = [](double, double) { return 4.0; };
  const GridDomain flat = build_domain(DomainKind::square, 17);
  const GridDomain conf = build_domain(DomainKind::conformal, 17, 1.0, opts);
  const SparseSymOp op_flat = assemble_laplacian(flat);
  const SparseSymOp op_conf = assemble_laplacian(conf);
  const Eigen::VectorXd u = random_vector(op_flat.n(), 9);
  CHECK(op_conf.dirichlet_energy(u) ==
        doctest::Approx(op_flat.dirichlet_energy(u)).epsilon(1e-13));
  CHECK(op_conf.mass_norm_sq(u) == doctest::Approx(4.0 * op_flat.mass_norm_sq(u)).epsilon(1e-13));
  CHECK(rayleigh_quotient(op_conf, u) ==
        doctest::Approx(rayleigh_quotient(op_flat, u) / 4.0).epsilon(1e-12));
}

TEST_CASE("apply is the mass-weighted stiffness action") {
  const GridDomain d = build_domain(DomainKind::disk, 17);
  const SparseSymOp op = assemble_laplacian(d);
  const Eigen::VectorXd u = random_vector(op.n(), 5);
  const Eigen::VectorXd y = op.apply(u);
  // u^T M (M^{-1} L u) = u^T L u
  CHECK(op.mass_dot(u, y) == doctest::Approx(op.dirichlet_energy(u)).epsilon(1e-12));
}

TEST_CASE("rayleigh quotient rejects the zero vector") {
  const SparseSymOp op = assemble_laplacian(build_domain(DomainKind::square, 9));
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(op.n());
  CHECK_THROWS_AS((void)rayleigh_quotient(op, z), EmptyDecomposition);
}

TEST_CASE("periodic operator couples across the seam") {
  DomainOptions opts;
  opts.torus_dim = 2;
  const GridDomain d = build_domain(DomainKind::torus, 8, 1.0, opts);
  const SparseSymOp op = assemble_laplacian(d);
  // lowest nonconstant mode: cos(2 pi x), lattice eigenvalue (4/h^2) sin^2(pi h)
  const auto ids = active_node_list(d);
  Eigen::VectorXd phi(static_cast<std::int64_t>(ids.size()));
  const double pi = std::numbers::pi;
  for (std::size_t a = 0; a < ids.size(); ++a)
    phi[static_cast<std::int64_t>(a)] = std::cos(2.0 * pi * d.position(ids[a])[0]);
  const double h = d.spacing;
  const double lam = 4.0 / (h * h) * std::pow(std::sin(pi * h), 2);
  CHECK(rayleigh_quotient(op, phi) == doctest::Approx(lam).epsilon(1e-12));
}
