#include "nodallab/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <json.hpp>

#include "nodallab/eigensolve.hpp"
#include "nodallab/errors.hpp"
#include "nodallab/laplacian.hpp"

namespace nodallab {

void CapacityProblem::validate() const {
  box.validate();
  const std::int64_t n = box.n_nodes();
  if (static_cast<std::int64_t>(in_obstacle.size()) != n ||
      static_cast<std::int64_t>(in_region.size()) != n)
    throw PreconditionViolation("capacity masks do not match the grid");
  std::int64_t n_f = 0;
  for (std::int64_t id = 0; id < n; ++id) {
    if (!in_obstacle[static_cast<std::size_t>(id)]) continue;
    ++n_f;
    if (!box.active(id)) throw PreconditionViolation("obstacle touches inactive nodes");
    if (!in_region[static_cast<std::size_t>(id)])
      throw PreconditionViolation("obstacle node outside the region");
    for (int axis = 0; axis < box.dim; ++axis)
      for (int dir = -1; dir <= 1; dir += 2) {
        const std::int64_t nb = box.neighbor(id, axis, dir);
        if (nb >= 0 && !in_region[static_cast<std::size_t>(nb)])
          throw PreconditionViolation("obstacle is not strictly inside the region");
      }
  }
  if (n_f == 0) throw PreconditionViolation("empty obstacle");
  for (std::int64_t id = 0; id < n; ++id)
    if (in_region[static_cast<std::size_t>(id)] && !box.active(id))
      throw PreconditionViolation("region contains inactive nodes");
}

namespace {

GridDomain unit_box_grid(int dim, int resolution) {
  return build_free_box(dim, resolution, 1.0);
}

double node_dist_to_center(const GridDomain& d, std::int64_t id, bool chebyshev) {
  const auto c = d.coords(id);
  double mx = 0.0, sq = 0.0;
  for (int a = 0; a < d.dim; ++a) {
    const double x = double(c[a]) * d.spacing - 0.5;
    mx = std::max(mx, std::abs(x));
    sq += x * x;
  }
  return chebyshev ? mx : std::sqrt(sq);
}

CapacityProblem concentric_problem(int dim, int resolution, double r, double R,
                                   bool chebyshev) {
  if (!(r > 0.0 && r < R && R <= 0.5))
    throw PreconditionViolation("need 0 < r < R <= 0.5 inside the unit box");
  CapacityProblem p;
  p.box = unit_box_grid(dim, resolution);
  const std::int64_t n = p.box.n_nodes();
  p.in_obstacle.assign(static_cast<std::size_t>(n), 0);
  p.in_region.assign(static_cast<std::size_t>(n), 0);
  for (std::int64_t id = 0; id < n; ++id) {
    const double dist = node_dist_to_center(p.box, id, chebyshev);
    if (dist <= r) p.in_obstacle[static_cast<std::size_t>(id)] = 1;
    if (dist < R) p.in_region[static_cast<std::size_t>(id)] = 1;
  }
  p.validate();
  return p;
}

}  // namespace

CapacityProblem annulus_capacity_problem(int dim, int resolution, double r, double R) {
  return concentric_problem(dim, resolution, r, R, false);
}

CapacityProblem square_in_square_problem(int resolution, double r, double R) {
  return concentric_problem(2, resolution, r, R, true);
}

CapacityProblem ball_in_doubled_box_problem(int dim, int resolution, double hole_fraction) {
  if (!(hole_fraction > 0.0 && hole_fraction < 1.0))
    throw PreconditionViolation("hole fraction must be in (0,1)");
  CapacityProblem p;
  p.box = unit_box_grid(dim, resolution);
  // the grid is the doubled box, so the inner cube holds 2^-dim of its volume
  const double frac = hole_fraction / std::pow(2.0, dim);
  const double r = dim == 2 ? std::sqrt(frac / M_PI) : std::cbrt(3.0 * frac / (4.0 * M_PI));
  if (r <= p.box.spacing) throw ResolutionTooCoarse("hole smaller than one grid cell");
  const std::int64_t n = p.box.n_nodes();
  p.in_obstacle.assign(static_cast<std::size_t>(n), 0);
  p.in_region.assign(static_cast<std::size_t>(n), 1);
  for (std::int64_t id = 0; id < n; ++id) {
    if (node_dist_to_center(p.box, id, false) <= r)
      p.in_obstacle[static_cast<std::size_t>(id)] = 1;
    const auto c = p.box.coords(id);
    for (int axis = 0; axis < dim; ++axis)
      if (c[axis] == 0 || c[axis] == p.box.shape[axis] - 1)
        p.in_region[static_cast<std::size_t>(id)] = 0;
  }
  p.validate();
  return p;
}

CapacityProblem capacity_problem_from_json(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot read " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidDomain(std::string("capacity problem file is not valid JSON: ") + e.what());
  }
  CapacityProblem p;
  p.box = GridDomain::from_json(j.at("domain").dump());
  const auto parse_mask = [&](const std::string& key) {
    const std::string bits = j.at(key).get<std::string>();
    if (static_cast<std::int64_t>(bits.size()) != p.box.n_nodes())
      throw InvalidDomain(key + " mask length does not match the grid");
    std::vector<std::uint8_t> mask(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] != '0' && bits[i] != '1') throw InvalidDomain(key + " mask must be 0/1");
      mask[i] = bits[i] == '1';
    }
    return mask;
  };
  p.in_obstacle = parse_mask("obstacle");
  p.in_region = parse_mask("region");
  p.validate();
  return p;
}

CapacitySolution solve_capacity(const CapacityProblem& p, double tol) {
  p.validate();
  const GridDomain& d = p.box;
  const SparseSymOp op = assemble_laplacian(d);
  const std::int64_t n_active = op.n();

  // unknowns: active region nodes off the obstacle; everything else is
  // clamped (1 on the obstacle, 0 outside the region)
  std::vector<std::int64_t> unknown_of_compact(static_cast<std::size_t>(n_active), -1);
  std::vector<double> fixed_value(static_cast<std::size_t>(n_active), 0.0);
  std::int64_t n_unknown = 0;
  for (std::int64_t row = 0; row < n_active; ++row) {
    const std::int64_t id = op.active_nodes[static_cast<std::size_t>(row)];
    if (p.in_obstacle[static_cast<std::size_t>(id)])
      fixed_value[static_cast<std::size_t>(row)] = 1.0;
    else if (p.in_region[static_cast<std::size_t>(id)])
      unknown_of_compact[static_cast<std::size_t>(row)] = n_unknown++;
  }

  CapacitySolution sol;
  sol.u.assign(static_cast<std::size_t>(d.n_nodes()), 0.0);
  Eigen::VectorXd full = Eigen::VectorXd::Zero(n_active);
  for (std::int64_t row = 0; row < n_active; ++row)
    full[row] = fixed_value[static_cast<std::size_t>(row)];

  if (n_unknown > 0) {
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_unknown);
    for (std::int64_t row = 0; row < n_active; ++row) {
      const std::int64_t i = unknown_of_compact[static_cast<std::size_t>(row)];
      if (i < 0) continue;
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(op.stiffness, row);
           it; ++it) {
        const std::int64_t j = unknown_of_compact[static_cast<std::size_t>(it.col())];
        if (j >= 0)
          trips.emplace_back(static_cast<int>(i), static_cast<int>(j), it.value());
        else
          rhs[i] -= it.value() * fixed_value[static_cast<std::size_t>(it.col())];
      }
    }
    Eigen::SparseMatrix<double> A(n_unknown, n_unknown);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();

    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(tol);
    cg.setMaxIterations(20 * static_cast<int>(std::sqrt(double(n_unknown)) + 100));
    cg.compute(A);
    const Eigen::VectorXd x = cg.solve(rhs);
    if (cg.info() != Eigen::Success)
      throw NonConvergence("conjugate gradient did not reach the requested residual");
    sol.iterations = cg.iterations();
    for (std::int64_t row = 0; row < n_active; ++row) {
      const std::int64_t i = unknown_of_compact[static_cast<std::size_t>(row)];
      if (i >= 0) full[row] = x[i];
    }
  }

  sol.u_min = full.minCoeff();
  sol.u_max = full.maxCoeff();
  if (sol.u_min < -1e-6 || sol.u_max > 1.0 + 1e-6)
    throw NonConvergence("potential violates the maximum principle beyond tolerance");

  sol.capacity = op.dirichlet_energy(full);
  for (std::int64_t row = 0; row < n_active; ++row)
    sol.u[static_cast<std::size_t>(op.active_nodes[static_cast<std::size_t>(row)])] = full[row];
  return sol;
}

MazyaResult mazya_bound(const GridDomain& q_box, const std::vector<std::uint8_t>& in_obstacle,
                        const std::vector<double>& u_full, double cg_tol) {
  if (q_box.n_active() != q_box.n_nodes())
    throw PreconditionViolation("the box must have all nodes active");
  const std::int64_t res = q_box.shape[0];
  for (int a = 1; a < q_box.dim; ++a)
    if (q_box.shape[a] != res) throw PreconditionViolation("the box must be square");
  if (res % 2 == 0)
    throw PreconditionViolation("doubling needs an odd resolution for a concentric box");
  const std::int64_t n = q_box.n_nodes();
  if (static_cast<std::int64_t>(in_obstacle.size()) != n ||
      static_cast<std::int64_t>(u_full.size()) != n)
    throw PreconditionViolation("mask or sample vector does not match the grid");
  bool any = false;
  for (std::int64_t id = 0; id < n; ++id)
    if (in_obstacle[static_cast<std::size_t>(id)]) {
      any = true;
      if (u_full[static_cast<std::size_t>(id)] != 0.0)
        throw PreconditionViolation("u does not vanish on the obstacle");
    }
  if (!any) throw PreconditionViolation("empty obstacle");

  MazyaResult out;
  const SparseSymOp op = assemble_laplacian(q_box);
  Eigen::VectorXd u(n);
  for (std::int64_t id = 0; id < n; ++id) u[id] = u_full[static_cast<std::size_t>(id)];
  for (std::int64_t id = 0; id < n; ++id)
    out.lhs += u_full[static_cast<std::size_t>(id)] * u_full[static_cast<std::size_t>(id)] *
               q_box.node_mass(id);
  out.energy = op.dirichlet_energy(u);

  // 2Q: same spacing, side doubled, obstacle recentered; the potential is
  // clamped to 0 on the outermost node layer
  CapacityProblem big;
  const std::int64_t res2 = 2 * res - 1;
  std::array<std::int64_t, 3> shape2 = {res2, res2, q_box.dim == 3 ? res2 : 1};
  big.box.dim = q_box.dim;
  big.box.shape = shape2;
  big.box.spacing = q_box.spacing;
  big.box.bc = BoundaryKind::dirichlet;
  big.box.mask.assign(static_cast<std::size_t>(big.box.n_nodes()), 1);
  big.in_obstacle.assign(static_cast<std::size_t>(big.box.n_nodes()), 0);
  big.in_region.assign(static_cast<std::size_t>(big.box.n_nodes()), 0);
  const std::int64_t off = (res - 1) / 2;
  for (std::int64_t id = 0; id < n; ++id) {
    if (!in_obstacle[static_cast<std::size_t>(id)]) continue;
    const auto c = q_box.coords(id);
    big.in_obstacle[static_cast<std::size_t>(
        big.box.node(c[0] + off, c[1] + off, q_box.dim == 3 ? c[2] + off : 0))] = 1;
  }
  for (std::int64_t id = 0; id < big.box.n_nodes(); ++id) {
    const auto c = big.box.coords(id);
    bool skin = false;
    for (int a = 0; a < big.box.dim; ++a)
      skin = skin || c[a] == 0 || c[a] == res2 - 1;
    big.in_region[static_cast<std::size_t>(id)] = !skin;
  }
  out.capacity = solve_capacity(big, cg_tol).capacity;

  const double a_len = double(res - 1) * q_box.spacing;
  const double an = std::pow(a_len, q_box.dim);
  out.rhs = out.capacity > 0.0 ? an / out.capacity * out.energy : 0.0;
  out.c_required = out.energy > 0.0 ? out.lhs * out.capacity / (an * out.energy) : 0.0;
  return out;
}

CapVolResult capacity_volume_lower(const CapacityProblem& p, double tol) {
  CapVolResult out;
  out.capacity = solve_capacity(p, tol).capacity;
  for (std::int64_t id = 0; id < p.box.n_nodes(); ++id) {
    if (p.in_obstacle[static_cast<std::size_t>(id)]) out.vol_obstacle += p.box.node_mass(id);
    if (p.in_region[static_cast<std::size_t>(id)]) out.vol_region += p.box.node_mass(id);
  }
  if (p.box.dim == 2)
    out.bound_unit = 1.0 / std::log(out.vol_region / out.vol_obstacle);
  else
    out.bound_unit = std::pow(out.vol_obstacle, double(p.box.dim - 2) / p.box.dim);
  out.ratio = out.capacity / out.bound_unit;
  return out;
}

Poincare2DResult poincare_2d_projection(const GridDomain& q_box,
                                        const std::vector<double>& u_full,
                                        const std::vector<std::uint8_t>& vanish_nodes,
                                        double gamma, int axis) {
  if (q_box.dim != 2) throw PreconditionViolation("projection inequality is 2-D");
  if (q_box.n_active() != q_box.n_nodes())
    throw PreconditionViolation("the box must have all nodes active");
  if (q_box.shape[0] != q_box.shape[1]) throw PreconditionViolation("the box must be square");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw PreconditionViolation("gamma must be in (0,1]");
  if (axis != 0 && axis != 1) throw PreconditionViolation("axis must be 0 or 1");
  const std::int64_t n = q_box.n_nodes(), res = q_box.shape[0];
  if (static_cast<std::int64_t>(u_full.size()) != n ||
      static_cast<std::int64_t>(vanish_nodes.size()) != n)
    throw PreconditionViolation("sample vector does not match the grid");
  const double s = q_box.spacing;
  const double a = double(res - 1) * s;

  const auto at = [&](std::int64_t t, std::int64_t pos) {
    return axis == 1 ? q_box.node(pos, t, 0) : q_box.node(t, pos, 0);
  };
  std::vector<std::uint8_t> row_has_zero(static_cast<std::size_t>(res), 0);
  for (std::int64_t id = 0; id < n; ++id) {
    if (!vanish_nodes[static_cast<std::size_t>(id)]) continue;
    if (u_full[static_cast<std::size_t>(id)] != 0.0)
      throw PreconditionViolation("u does not vanish on the vanishing set");
    row_has_zero[static_cast<std::size_t>(q_box.coords(id)[axis])] = 1;
  }

  Poincare2DResult out;
  out.a = a;
  out.gamma = gamma;
  out.c_tracked = 2.0 / gamma + 2.0;
  for (auto f : row_has_zero) out.e_rows += f;
  if (double(out.e_rows) * s < gamma * a * (1.0 - 1e-12))
    throw PreconditionViolation("projection of the vanishing set is shorter than gamma * a");

  const auto wgt = [&](std::int64_t pos) {
    return s * ((pos == 0 || pos == res - 1) ? 0.5 : 1.0);
  };
  std::vector<double> row_int(static_cast<std::size_t>(res), 0.0);
  std::vector<double> row_d(static_cast<std::size_t>(res), 0.0);
  for (std::int64_t t = 0; t < res; ++t) {
    for (std::int64_t pos = 0; pos < res; ++pos) {
      const double v = u_full[static_cast<std::size_t>(at(t, pos))];
      row_int[static_cast<std::size_t>(t)] += wgt(pos) * v * v;
      if (pos + 1 < res) {
        const double dv = u_full[static_cast<std::size_t>(at(t, pos + 1))] - v;
        row_d[static_cast<std::size_t>(t)] += dv * dv / s;
      }
    }
    out.int_q += wgt(t) * row_int[static_cast<std::size_t>(t)];  // trapezoid over rows
    out.d_row += s * row_d[static_cast<std::size_t>(t)];
  }
  // cross-row derivative with trapezoid weight along the row direction
  for (std::int64_t pos = 0; pos < res; ++pos)
    for (std::int64_t t = 0; t + 1 < res; ++t) {
      const double dv = u_full[static_cast<std::size_t>(at(t + 1, pos))] -
                        u_full[static_cast<std::size_t>(at(t, pos))];
      out.d_cross += wgt(pos) * dv * dv / s;
    }
  out.grad_total = out.d_row + out.d_cross;

  out.t0_row = -1;
  for (std::int64_t t = 0; t < res; ++t) {
    if (!row_has_zero[static_cast<std::size_t>(t)]) continue;
    out.int_e += s * row_int[static_cast<std::size_t>(t)];
    if (out.t0_row < 0 || row_int[static_cast<std::size_t>(t)] < out.i_t0) {
      out.i_t0 = row_int[static_cast<std::size_t>(t)];
      out.t0_row = t;
    }
  }

  const double pad = 1.0 + 1e-12;
  out.eq_ok = out.int_e <= a * a * out.d_row * pad;
  out.avg_ok = out.i_t0 * gamma * a <= out.int_e * pad;
  out.mid_ok = out.int_q <= (2.0 * a * out.i_t0 + 2.0 * a * a * out.d_cross) * pad;
  out.final_ok = out.int_q <= out.c_tracked * a * a * out.grad_total * pad;
  out.c_required = out.grad_total > 0.0 ? out.int_q / (a * a * out.grad_total) : 0.0;
  return out;
}

Poincare1DResult poincare_1d(const std::vector<double>& u, double x0, double x1,
                             std::int64_t zero_index) {
  const std::int64_t n = static_cast<std::int64_t>(u.size());
  if (n < 2) throw PreconditionViolation("need at least two samples");
  if (!(x1 > x0)) throw PreconditionViolation("empty interval");
  if (zero_index < 0 || zero_index >= n)
    throw PreconditionViolation("zero point outside the sample range");
  if (u[static_cast<std::size_t>(zero_index)] != 0.0)
    throw PreconditionViolation("function does not vanish at the marked sample");
  const double s = (x1 - x0) / double(n - 1);
  Poincare1DResult out;
  for (std::int64_t i = 0; i < n; ++i) {
    const double w = s * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
    out.lhs += w * u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
  }
  for (std::int64_t i = 0; i + 1 < n; ++i) {
    const double dv = u[static_cast<std::size_t>(i + 1)] - u[static_cast<std::size_t>(i)];
    out.rhs += dv * dv / s;
  }
  out.rhs *= (x1 - x0) * (x1 - x0);
  return out;
}

BetaShapePoint measure_beta_point(int dim, int resolution, double gamma, std::uint64_t seed) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw PreconditionViolation("gamma must be in (0,1)");
  GridDomain d = unit_box_grid(dim, resolution);
  const double r = dim == 2 ? std::sqrt(gamma / M_PI) : std::cbrt(3.0 * gamma / (4.0 * M_PI));
  std::int64_t n_f = 0;
  for (std::int64_t id = 0; id < d.n_nodes(); ++id)
    if (node_dist_to_center(d, id, false) <= r) {
      d.mask[static_cast<std::size_t>(id)] = 0;
      ++n_f;
    }
  if (n_f == 0) throw ResolutionTooCoarse("obstacle smaller than one grid cell");
  d.validate();

  BetaShapePoint out;
  out.gamma_requested = gamma;
  out.gamma_actual = double(n_f) / double(d.n_nodes());
  EigenOptions opts;
  opts.seed = seed;
  const SparseSymOp op = assemble_laplacian(d);
  out.lambda1 = smallest_eigenpairs(op, 1, opts).at(0).lambda;
  out.beta = 1.0 / out.lambda1;  // box side is 1
  return out;
}

}  // namespace nodallab
