#include "nodallab/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "nodallab/errors.hpp"
#include "nodallab/laplacian.hpp"

namespace nodallab {

double radius_exponent(int n) {
  if (n < 2) throw PreconditionViolation("dimension must be >= 2");
  return double(n) * n - 15.0 * n / 8.0 + 0.25;
}

double volume_exponent(int n) {
  if (n < 2) throw PreconditionViolation("dimension must be >= 2");
  return 2.0 * n * n + double(n) / 4.0;
}

double beta_of_gamma(double gamma, int n, double c2d, double cnd) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw PreconditionViolation("gamma must be in (0,1)");
  if (n < 2) throw PreconditionViolation("dimension must be >= 2");
  if (!(c2d > 0.0 && cnd > 0.0)) throw PreconditionViolation("constants must be positive");
  if (n == 2) return c2d * std::log(1.0 / gamma);
  return cnd / std::pow(gamma, double(n - 2) / n);
}

std::size_t CubeCover::cube_of_node(const GridDomain& d, std::int64_t node) const {
  const auto c = d.coords(node);
  const std::int64_t side = 4 * m;
  std::size_t idx = 0;
  for (int a = 0; a < 3; ++a) {
    const std::int64_t ca = d.dim == 2 && a == 2 ? 0 : c[a] / side;
    idx = idx * static_cast<std::size_t>(cubes_per_axis[a]) + static_cast<std::size_t>(ca);
  }
  return idx;
}

CubeCover build_cover(const GridDomain& d, double r_e) {
  if (d.bc != BoundaryKind::dirichlet)
    throw NotApplicable("cube cover needs a non-periodic grid");
  const double s = d.spacing;
  if (!(r_e > s)) throw ResolutionTooCoarse("inner radius does not exceed the grid spacing");
  // smallest grid multiple above r_e; must land strictly inside (r_e, 2 r_e)
  std::int64_t m = static_cast<std::int64_t>(std::floor(r_e / s)) + 1;
  if (!(m * s < 2.0 * r_e)) m = static_cast<std::int64_t>(std::ceil(2.0 * r_e / s)) - 1;
  if (m < 1 || !(m * s > r_e) || !(m * s < 2.0 * r_e))
    throw ResolutionTooCoarse("no grid-aligned cube size between r_e and 2 r_e");

  CubeCover cover;
  cover.m = m;
  cover.h = double(m) * s;
  const std::int64_t side = 4 * m;
  for (int a = 0; a < 3; ++a)
    cover.cubes_per_axis[a] = a < d.dim ? (d.shape[a] + side - 1) / side : 1;

  const auto& npa = cover.cubes_per_axis;
  cover.cubes.reserve(static_cast<std::size_t>(npa[0] * npa[1] * npa[2]));
  for (std::int64_t ci = 0; ci < npa[0]; ++ci)
    for (std::int64_t cj = 0; cj < npa[1]; ++cj)
      for (std::int64_t ck = 0; ck < npa[2]; ++ck) {
        CubeRecord cube;
        cube.origin = {ci * side, cj * side, ck * side};
        for (int a = 0; a < 3; ++a) {
          cube.lo[a] = cube.origin[a];
          const std::int64_t want = cube.origin[a] + (a < d.dim ? side : 1);
          cube.hi[a] = std::min(want, d.shape[a]);
          if (cube.hi[a] < want) cube.clipped = true;
        }
        cover.cubes.push_back(cube);
      }
  return cover;
}

void find_holes(CubeCover& cover, const NodalDecomposition& dec, int domain_id,
                const GridDomain& d) {
  if (static_cast<std::int64_t>(dec.label.size()) != d.n_nodes())
    throw PreconditionViolation("decomposition does not match the grid");
  const std::int64_t m = cover.m;
  std::vector<std::int64_t> queue;
  std::vector<std::uint8_t> seen;
  for (auto& cube : cover.cubes) {
    // closed inner box [origin + m, origin + 3m] per axis, clipped to grid
    std::array<std::int64_t, 3> ilo = {0, 0, 0}, ihi = {0, 0, 0};
    bool inner_meets_grid = true;
    for (int a = 0; a < 3; ++a) {
      if (a >= d.dim) {
        ilo[a] = 0;
        ihi[a] = 0;
        continue;
      }
      ilo[a] = cube.origin[a] + m;
      ihi[a] = std::min(cube.origin[a] + 3 * m, d.shape[a] - 1);
      if (ilo[a] > ihi[a]) inner_meets_grid = false;
    }
    if (!inner_meets_grid) continue;
    cube.has_hole_record = true;

    cube.probe_node = -1;
    for (std::int64_t i = ilo[0]; i <= ihi[0] && cube.probe_node < 0; ++i)
      for (std::int64_t j = ilo[1]; j <= ihi[1] && cube.probe_node < 0; ++j)
        for (std::int64_t k = ilo[2]; k <= ihi[2]; ++k) {
          const std::int64_t id = d.node(i, j, k);
          if (dec.label[static_cast<std::size_t>(id)] != domain_id) {
            cube.probe_node = id;
            break;
          }
        }
    cube.step2_ok = cube.probe_node >= 0;
    if (!cube.step2_ok) continue;

    // connected component of (cube \ domain) containing the probe
    std::int64_t cube_nodes = 1;
    for (int a = 0; a < d.dim; ++a) cube_nodes *= cube.hi[a] - cube.lo[a];
    seen.assign(static_cast<std::size_t>(d.n_nodes()), 0);
    queue.assign(1, cube.probe_node);
    seen[static_cast<std::size_t>(cube.probe_node)] = 1;
    cube.hole_nodes = 0;
    std::array<std::vector<std::uint8_t>, 3> coord_hit;
    for (int a = 0; a < 3; ++a)
      coord_hit[a].assign(static_cast<std::size_t>(d.shape[a]), 0);
    cube.touches_boundary = false;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::int64_t u = queue[head];
      ++cube.hole_nodes;
      const auto c = d.coords(u);
      for (int a = 0; a < d.dim; ++a) {
        coord_hit[a][static_cast<std::size_t>(c[a])] = 1;
        if (c[a] == cube.origin[a] || c[a] == cube.origin[a] + 4 * m - 1)
          cube.touches_boundary = true;
      }
      for (int axis = 0; axis < d.dim; ++axis)
        for (int dir = -1; dir <= 1; dir += 2) {
          const std::int64_t w = d.neighbor(u, axis, dir);
          if (w < 0 || seen[static_cast<std::size_t>(w)]) continue;
          if (dec.label[static_cast<std::size_t>(w)] == domain_id) continue;
          const auto cw = d.coords(w);
          bool inside = true;
          for (int a = 0; a < d.dim; ++a)
            inside = inside && cw[a] >= cube.lo[a] && cw[a] < cube.hi[a];
          if (!inside) continue;
          seen[static_cast<std::size_t>(w)] = 1;
          queue.push_back(w);
        }
    }
    std::int64_t max_extent = 0;
    for (int a = 0; a < d.dim; ++a) {
      std::int64_t distinct = 0;
      for (std::int64_t v = cube.lo[a]; v < cube.hi[a]; ++v)
        distinct += coord_hit[a][static_cast<std::size_t>(v)];
      cube.extent_nodes[a] = distinct;
      max_extent = std::max(max_extent, distinct);
    }
    cube.gamma = double(cube.hole_nodes) / double(cube_nodes);

    // extent dichotomy, checked in exact integer arithmetic: a touching hole
    // spans at least m coordinates along the touching axis (it also contains
    // a probe in the inner box); an interior hole of v nodes spans at least
    // v^(1/n) coordinates on some axis.  Clipped cubes have no full skin and
    // are exempt.
    if (cube.clipped) {
      cube.extent_exempt = true;
      cube.extent_ok = true;
    } else if (cube.touches_boundary) {
      cube.extent_ok = max_extent >= m;
    } else {
      std::int64_t pw = max_extent;
      for (int a = 1; a < d.dim; ++a) pw *= max_extent;
      cube.extent_ok = pw >= cube.hole_nodes;
    }
  }
}

double projection_extent(const CubeRecord& cube, int axis, double spacing) {
  if (!cube.has_hole_record || cube.hole_nodes == 0)
    throw PreconditionViolation("cube has no hole record");
  return double(cube.extent_nodes[static_cast<std::size_t>(axis)]) * spacing;
}

CubeEnergy verify_local_poincare(const GridDomain& d, const std::vector<double>& tilde_full,
                                 const CubeCover& cover, std::size_t cube_index) {
  const CubeRecord& cube = cover.cubes.at(cube_index);
  const double w = std::pow(d.spacing, d.dim - 2);
  CubeEnergy out;
  const std::int64_t klo = cube.lo[2], khi = std::max<std::int64_t>(cube.hi[2], klo + 1);
  for (std::int64_t i = cube.lo[0]; i < cube.hi[0]; ++i)
    for (std::int64_t j = cube.lo[1]; j < cube.hi[1]; ++j)
      for (std::int64_t k = klo; k < khi; ++k) {
        const std::int64_t u = d.node(i, j, k);
        if (!d.active(u)) continue;
        const double tu = tilde_full[static_cast<std::size_t>(u)];
        out.mass += tu * tu * d.node_mass(u);
        for (int axis = 0; axis < d.dim; ++axis) {
          const std::int64_t vp = d.neighbor(u, axis, +1);
          if (vp >= 0) {
            if (d.active(vp)) {
              const double dv = tu - tilde_full[static_cast<std::size_t>(vp)];
              out.energy += w * dv * dv;  // edge owned by its lower endpoint
            } else {
              out.energy += w * tu * tu;  // drop to the inactive closure
            }
          }
          const std::int64_t vm = d.neighbor(u, axis, -1);
          if (vm >= 0 && !d.active(vm)) out.energy += w * tu * tu;
        }
      }
  if (out.energy > 0.0) {
    out.beta = out.mass / (cover.h * cover.h * out.energy);
  } else if (out.mass > 0.0) {
    out.beta = std::numeric_limits<double>::infinity();
    out.finite = false;
  }
  return out;
}

ChainReport verify_global_chain(const GridDomain& d, const EigenPair& pair,
                                const NodalDecomposition& dec, int domain_id) {
  if (domain_id < 0 || domain_id >= static_cast<int>(dec.domains.size()))
    throw PreconditionViolation("no such nodal domain");
  const NodalDomainInfo& info = dec.domains[static_cast<std::size_t>(domain_id)];

  ChainReport rep;
  rep.domain_id = domain_id;
  rep.sign = info.sign;
  rep.lambda = pair.lambda;
  rep.r_measured = info.inner_radius;

  CubeCover cover = build_cover(d, info.inner_radius);
  rep.m = cover.m;
  rep.h = cover.h;
  find_holes(cover, dec, domain_id, d);

  // cut-off eigenfunction: phi on the domain, 0 elsewhere
  std::vector<double> tilde = scatter_to_grid(d, to_std(pair.phi));
  for (std::int64_t id = 0; id < d.n_nodes(); ++id)
    if (dec.label[static_cast<std::size_t>(id)] != domain_id)
      tilde[static_cast<std::size_t>(id)] = 0.0;

  rep.step2_all_ok = true;
  rep.extent_all_ok = true;
  rep.beta_max = 0.0;
  rep.gamma_min = std::numeric_limits<double>::infinity();
  bool any_gamma = false;
  for (std::size_t ci = 0; ci < cover.cubes.size(); ++ci) {
    CubeRecord& cube = cover.cubes[ci];
    const CubeEnergy e = verify_local_poincare(d, tilde, cover, ci);
    cube.mass = e.mass;
    cube.energy = e.energy;
    cube.beta = e.beta;
    cube.beta_finite = e.finite;
    rep.mass_total += e.mass;
    rep.energy_total += e.energy;
    if (!e.finite) rep.beta_max_finite = false;
    rep.beta_max = std::max(rep.beta_max, e.beta);
    if (cube.has_hole_record) {
      rep.step2_all_ok = rep.step2_all_ok && cube.step2_ok;
      rep.extent_all_ok = rep.extent_all_ok && cube.extent_ok;
      if (cube.step2_ok) ++rep.n_holes;
      if (cube.step2_ok && e.mass > 0.0) {  // cube meets the domain
        rep.gamma_min = std::min(rep.gamma_min, cube.gamma);
        any_gamma = true;
      }
    }
  }
  if (!any_gamma) rep.gamma_min = 0.0;
  rep.n_cubes = static_cast<std::int64_t>(cover.cubes.size());

  if (!(rep.mass_total > 0.0))
    throw PreconditionViolation("cut-off eigenfunction vanishes identically");
  rep.lambda_chain = rep.energy_total / rep.mass_total;

  // each cube satisfies  mass_Q <= beta_max h^2 energy_Q  by the definition
  // of beta_max; the 1e-12 slack only absorbs rounding in the re-evaluation
  const double h2 = rep.h * rep.h;
  rep.local_all_ok = true;
  if (rep.beta_max_finite)
    for (const auto& cube : cover.cubes)
      rep.local_all_ok =
          rep.local_all_ok && cube.mass <= rep.beta_max * h2 * cube.energy * (1.0 + 1e-12) +
                                               std::numeric_limits<double>::min();

  const double r2 = rep.r_measured * rep.r_measured;
  rep.global_ok =
      !rep.beta_max_finite ||
      rep.mass_total <= 16.0 * rep.beta_max * r2 * rep.energy_total * (1.0 + 1e-12);
  rep.r_bound = rep.beta_max_finite && rep.beta_max > 0.0
                    ? 1.0 / (4.0 * std::sqrt(rep.lambda * rep.beta_max))
                    : 0.0;
  rep.bound_ok = rep.r_measured >= rep.r_bound;
  rep.all_ok = rep.step2_all_ok && rep.extent_all_ok && rep.local_all_ok && rep.global_ok &&
               rep.bound_ok;
  rep.cubes = std::move(cover.cubes);
  return rep;
}

std::string chain_report_json(const ChainReport& rep) {
  nlohmann::json j;
  j["domain_id"] = rep.domain_id;
  j["sign"] = rep.sign;
  j["lambda"] = rep.lambda;
  j["lambda_chain"] = rep.lambda_chain;
  j["r_measured"] = rep.r_measured;
  j["m"] = rep.m;
  j["h"] = rep.h;
  j["n_cubes"] = rep.n_cubes;
  j["n_holes"] = rep.n_holes;
  j["beta_max"] = rep.beta_max_finite ? rep.beta_max : 0.0;
  j["beta_max_finite"] = rep.beta_max_finite;
  j["gamma_min"] = rep.gamma_min;
  j["mass_total"] = rep.mass_total;
  j["energy_total"] = rep.energy_total;
  j["r_bound"] = rep.r_bound;
  j["checks"] = {{"step2", rep.step2_all_ok},   {"extent", rep.extent_all_ok},
                 {"local", rep.local_all_ok},   {"global", rep.global_ok},
                 {"bound", rep.bound_ok},       {"all_ok", rep.all_ok}};
  nlohmann::json cubes = nlohmann::json::array();
  for (const auto& c : rep.cubes) {
    nlohmann::json cj;
    cj["origin"] = {c.origin[0], c.origin[1], c.origin[2]};
    cj["clipped"] = c.clipped;
    cj["has_hole"] = c.has_hole_record;
    if (c.has_hole_record) {
      cj["probe_node"] = c.probe_node;
      cj["step2_ok"] = c.step2_ok;
      cj["hole_nodes"] = c.hole_nodes;
      cj["gamma"] = c.gamma;
      cj["extent_nodes"] = {c.extent_nodes[0], c.extent_nodes[1], c.extent_nodes[2]};
      cj["touches_boundary"] = c.touches_boundary;
      cj["extent_ok"] = c.extent_ok;
      cj["extent_exempt"] = c.extent_exempt;
    }
    cj["mass"] = c.mass;
    cj["energy"] = c.energy;
    cj["beta"] = c.beta_finite ? c.beta : 0.0;
    cj["beta_finite"] = c.beta_finite;
    cubes.push_back(cj);
  }
  j["cubes"] = cubes;
  return j.dump(2);
}

DomainBoundCheck inrad_upper_check(const GridDomain& d, unsigned seed) {
  DomainBoundCheck out;
  EigenOptions opts;
  opts.seed = seed;
  const SparseSymOp op = assemble_laplacian(d);
  out.lambda1 = smallest_eigenpairs(op, 1, opts).at(0).lambda;
  out.inrad = active_set_inner_radius(d);
  out.product = out.lambda1 * out.inrad * out.inrad;
  return out;
}

double faber_krahn_check(const GridDomain& d, unsigned seed) {
  if (!d.q.empty()) throw NotApplicable("volume comparison needs the flat metric");
  EigenOptions opts;
  opts.seed = seed;
  const SparseSymOp op = assemble_laplacian(d);
  const double lambda1 = smallest_eigenpairs(op, 1, opts).at(0).lambda;
  double vol = 0.0;
  for (std::int64_t id = 0; id < d.n_nodes(); ++id)
    if (d.active(id)) vol += d.node_mass(id);
  return lambda1 * std::pow(vol, 2.0 / d.dim);
}

}  // namespace nodallab
