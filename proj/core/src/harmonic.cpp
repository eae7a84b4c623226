#include "nodallab/harmonic.hpp"

#include <algorithm>
#include <cmath>

#include "nodallab/distance_transform.hpp"
#include "nodallab/errors.hpp"
#include "nodallab/rng.hpp"

namespace nodallab {

ObstacleSet ObstacleSet::empty() { return ObstacleSet{}; }

ObstacleSet ObstacleSet::radial_slit(double r0) {
  if (!(r0 > 0.0 && r0 < 1.0)) throw PreconditionViolation("slit needs r0 in (0,1)");
  ObstacleSet e;
  e.kind_ = Kind::radial_slit;
  e.r0_param_ = r0;
  return e;
}

ObstacleSet ObstacleSet::circle(double r0) {
  if (!(r0 > 0.0 && r0 < 1.0)) throw PreconditionViolation("circle needs r0 in (0,1)");
  ObstacleSet e;
  e.kind_ = Kind::circle;
  e.r0_param_ = r0;
  return e;
}

ObstacleSet ObstacleSet::union_of_disks(std::vector<Disk> disks) {
  if (disks.empty()) throw PreconditionViolation("disk union needs at least one disk");
  for (const auto& dd : disks) {
    if (!(dd.r > 0.0)) throw PreconditionViolation("disk radius must be positive");
    if (std::hypot(dd.cx, dd.cy) + dd.r > 1.0)
      throw PreconditionViolation("disk escapes the unit disk");
    if (std::hypot(dd.cx, dd.cy) <= dd.r)
      throw PreconditionViolation("disk covers the origin");
  }
  ObstacleSet e;
  e.kind_ = Kind::union_of_disks;
  e.disks_ = std::move(disks);
  return e;
}

ObstacleSet ObstacleSet::from_mask(const GridDomain& grid,
                                   const std::vector<std::uint8_t>& obstacle) {
  if (grid.dim != 2) throw PreconditionViolation("mask obstacles are 2-D");
  if (static_cast<std::int64_t>(obstacle.size()) != grid.n_nodes())
    throw PreconditionViolation("obstacle mask does not match the grid");
  ObstacleSet e;
  e.kind_ = Kind::mask;
  e.grid_ = grid;
  e.center_x_ = 0.5 * double(grid.shape[0] - 1) * grid.spacing;
  e.center_y_ = 0.5 * double(grid.shape[1] - 1) * grid.spacing;
  const auto dist2 = distance_sq_to_features(grid, obstacle);
  e.node_dist_.resize(dist2.size());
  bool any = false;
  for (std::size_t i = 0; i < dist2.size(); ++i) {
    any = any || obstacle[i];
    e.node_dist_[i] =
        dist2[i] >= kDistanceInf ? kDistanceInf : std::sqrt(dist2[i]) * grid.spacing;
  }
  if (!any) throw PreconditionViolation("empty obstacle mask");
  // every marked node must stay inside the unit disk
  for (std::int64_t id = 0; id < grid.n_nodes(); ++id) {
    if (!obstacle[static_cast<std::size_t>(id)]) continue;
    const auto c = grid.coords(id);
    const double x = double(c[0]) * grid.spacing - e.center_x_;
    const double y = double(c[1]) * grid.spacing - e.center_y_;
    if (std::hypot(x, y) > 1.0)
      throw PreconditionViolation("obstacle node outside the unit disk");
  }
  return e;
}

double ObstacleSet::inner_distance() const {
  switch (kind_) {
    case Kind::empty:
      return kDistanceInf;
    case Kind::radial_slit:
    case Kind::circle:
      return r0_param_;
    case Kind::union_of_disks: {
      double best = kDistanceInf;
      for (const auto& dd : disks_)
        best = std::min(best, std::hypot(dd.cx, dd.cy) - dd.r);
      return std::max(0.0, best);
    }
    case Kind::mask: {
      double best = kDistanceInf;
      for (std::int64_t id = 0; id < grid_.n_nodes(); ++id) {
        if (node_dist_[static_cast<std::size_t>(id)] != 0.0) continue;
        const auto c = grid_.coords(id);
        best = std::min(best, std::hypot(double(c[0]) * grid_.spacing - center_x_,
                                         double(c[1]) * grid_.spacing - center_y_));
      }
      return best;
    }
  }
  return kDistanceInf;
}

double ObstacleSet::distance(double x, double y) const {
  switch (kind_) {
    case Kind::empty:
      return kDistanceInf;
    case Kind::radial_slit: {
      const double px = std::clamp(x, r0_param_, 1.0);
      return std::hypot(x - px, y);
    }
    case Kind::circle:
      return std::abs(std::hypot(x, y) - r0_param_);
    case Kind::union_of_disks: {
      double best = kDistanceInf;
      for (const auto& dd : disks_)
        best = std::min(best, std::max(0.0, std::hypot(x - dd.cx, y - dd.cy) - dd.r));
      return best;
    }
    case Kind::mask: {
      const double s = grid_.spacing;
      double gx = (x + center_x_) / s, gy = (y + center_y_) / s;
      // clamp into the node box; the walk pays the out-of-box excess exactly
      const double cx = std::clamp(gx, 0.0, double(grid_.shape[0] - 1));
      const double cy = std::clamp(gy, 0.0, double(grid_.shape[1] - 1));
      const double excess = std::hypot(gx - cx, gy - cy) * s;
      const std::int64_t i0 = std::min<std::int64_t>(static_cast<std::int64_t>(cx),
                                                     grid_.shape[0] - 2);
      const std::int64_t j0 = std::min<std::int64_t>(static_cast<std::int64_t>(cy),
                                                     grid_.shape[1] - 2);
      const double fx = cx - double(i0), fy = cy - double(j0);
      const auto nv = [&](std::int64_t i, std::int64_t j) {
        return node_dist_[static_cast<std::size_t>(grid_.node(i, j, 0))];
      };
      const double interp = (1 - fx) * (1 - fy) * nv(i0, j0) + fx * (1 - fy) * nv(i0 + 1, j0) +
                            (1 - fx) * fy * nv(i0, j0 + 1) + fx * fy * nv(i0 + 1, j0 + 1);
      // the node field is 1-Lipschitz; half a cell diagonal guards against
      // interpolation overshoot so the walk never jumps across E
      return std::max(0.0, interp - 0.7071067811865476 * s) + excess;
    }
  }
  return kDistanceInf;
}

MeasureEstimate harmonic_measure_at_zero(const ObstacleSet& e, const WosOptions& opt) {
  if (opt.n_samples < 1) throw PreconditionViolation("need at least one sample");
  if (!(opt.eps > 0.0 && opt.eps < 0.1)) throw PreconditionViolation("eps out of range");
  const double tip_radius = std::sqrt(opt.eps);
  constexpr int kMaxAttempts = 32;
  constexpr double kTwoPi = 6.283185307179586476925286766559;

  MeasureEstimate est;
  est.n_samples = opt.n_samples;
  est.seed = opt.seed;
  std::int64_t hits = 0;
  for (std::int64_t sample = 0; sample < opt.n_samples; ++sample) {
    int outcome = -1;
    for (int attempt = 0; attempt < kMaxAttempts && outcome < 0; ++attempt) {
      if (attempt > 0) ++est.resampled;
      CounterRng rng(opt.seed, static_cast<std::uint64_t>(sample) * kMaxAttempts +
                                   static_cast<std::uint64_t>(attempt));
      double x = 0.0, y = 0.0;
      for (int step = 0; step < opt.max_steps; ++step) {
        const double d_obstacle = e.distance(x, y);
        if (d_obstacle <= opt.eps) {
          outcome = 1;
          break;
        }
        const double d_boundary = 1.0 - std::hypot(x, y);
        if (d_boundary <= opt.eps) {
          outcome = 0;
          break;
        }
        const double r = std::min(d_obstacle, d_boundary);
        const double theta = kTwoPi * rng.next_double();
        x += r * std::cos(theta);
        y += r * std::sin(theta);
      }
      if (outcome < 0 && e.distance(x, y) <= tip_radius) {
        outcome = 1;
        ++est.tip_captured;
      }
    }
    if (outcome < 0) outcome = 0;  // exhausted attempts: counted as escape
    hits += outcome;
  }
  est.omega0 = double(hits) / double(opt.n_samples);
  est.stderr_ = std::sqrt(est.omega0 * (1.0 - est.omega0) / double(opt.n_samples));
  return est;
}

double slit_measure_closed_form(double r0) {
  if (!(r0 > 0.0 && r0 < 1.0)) throw PreconditionViolation("slit needs r0 in (0,1)");
  const double a = 0.5 * (r0 + 1.0 / r0);
  const double b = (3.0 - a) / (1.0 + a);
  return std::acos(std::clamp(b, -1.0, 1.0)) / M_PI;
}

std::vector<BeurlingRow> beurling_nevanlinna_check(const std::vector<double>& r0_list,
                                                   const WosOptions& opt) {
  std::vector<BeurlingRow> rows;
  rows.reserve(r0_list.size());
  for (std::size_t i = 0; i < r0_list.size(); ++i) {
    WosOptions row_opt = opt;
    row_opt.seed = opt.seed + i;
    const auto est = harmonic_measure_at_zero(ObstacleSet::radial_slit(r0_list[i]), row_opt);
    BeurlingRow row;
    row.r0 = r0_list[i];
    row.omega0 = est.omega0;
    row.stderr_ = est.stderr_;
    row.implied_c = (1.0 - est.omega0) / std::sqrt(r0_list[i]);
    rows.push_back(row);
  }
  return rows;
}

double PoissonMixture::eval(double x, double y) const {
  double out = 0.0;
  for (const auto& atom : atoms) {
    const double px = atom.radius * std::cos(atom.angle);
    const double py = atom.radius * std::sin(atom.angle);
    const double num = atom.radius * atom.radius - (x * x + y * y);
    const double den = (px - x) * (px - x) + (py - y) * (py - y);
    out += atom.weight * num / den;
  }
  return out;
}

namespace {

bool in_component_of_origin(const ObstacleSet& e, double x, double y) {
  const double r = std::hypot(x, y);
  if (r >= 1.0) return false;
  switch (e.kind()) {
    case ObstacleSet::Kind::empty:
      return true;
    case ObstacleSet::Kind::radial_slit:
      return e.distance(x, y) > 0.0;  // a slit does not disconnect the disk
    case ObstacleSet::Kind::circle:
      return r < e.r0_param();  // the component of 0 is the inner disk
    default:
      throw NotApplicable("component geometry implemented for empty/slit/circle only");
  }
}

MajorizationResult finish_majorization(MajorizationResult res) {
  res.lhs = res.max_u > 0.0 ? res.u0 / res.max_u : 0.0;
  res.rhs = 1.0 - res.omega0;
  res.ok = res.lhs <= res.rhs + 3.0 * res.stderr_;
  return res;
}

}  // namespace

MajorizationResult majorization_check(const PoissonMixture& u, const ObstacleSet& e,
                                      const WosOptions& opt) {
  if (u.atoms.empty()) throw PreconditionViolation("mixture needs at least one atom");
  for (const auto& atom : u.atoms) {
    if (!(atom.weight > 0.0)) throw PreconditionViolation("atom weights must be positive");
    if (!(atom.radius >= 1.0)) throw PreconditionViolation("atom poles must sit outside the open disk");
  }
  MajorizationResult res;
  res.u0 = u.eval(0.0, 0.0);
  if (!(res.u0 > 0.0)) throw PreconditionViolation("u must be positive at the origin");

  constexpr int kNr = 800, kNt = 1600;
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  res.max_u = res.u0;
  for (int ir = 1; ir <= kNr; ++ir) {
    const double r = (double(ir) - 0.5) / double(kNr);
    for (int it = 0; it < kNt; ++it) {
      const double th = kTwoPi * double(it) / double(kNt);
      const double x = r * std::cos(th), y = r * std::sin(th);
      if (!in_component_of_origin(e, x, y)) continue;
      res.max_u = std::max(res.max_u, u.eval(x, y));
    }
  }
  const auto est = harmonic_measure_at_zero(e, opt);
  res.omega0 = est.omega0;
  res.stderr_ = est.stderr_;
  return finish_majorization(res);
}

MajorizationResult majorization_extremal_check(const ObstacleSet& e, const WosOptions& opt) {
  if (e.kind() != ObstacleSet::Kind::empty && e.kind() != ObstacleSet::Kind::radial_slit)
    throw NotApplicable("extremal check needs the component of 0 to reach the outer boundary");
  MajorizationResult res;
  WosOptions lhs_opt = opt;
  lhs_opt.seed = opt.seed ^ 0x9e3779b97f4a7c15ull;
  const auto lhs_est = harmonic_measure_at_zero(e, lhs_opt);
  // u = 1 - omega has supremum 1 (approached at the free boundary)
  res.u0 = 1.0 - lhs_est.omega0;
  res.max_u = 1.0;
  const auto est = harmonic_measure_at_zero(e, opt);
  res.omega0 = est.omega0;
  res.stderr_ = std::sqrt(est.stderr_ * est.stderr_ + lhs_est.stderr_ * lhs_est.stderr_);
  return finish_majorization(res);
}

double center_maximality_gap(const GridDomain& d, const EigenPair& pair,
                             const NodalDecomposition& dec, int domain_id) {
  if (domain_id < 0 || domain_id >= static_cast<int>(dec.domains.size()))
    throw PreconditionViolation("no such nodal domain");
  const auto full = scatter_to_grid(d, to_std(pair.phi));
  std::int64_t argmax = -1;
  double best = -1.0;
  for (std::int64_t id = 0; id < d.n_nodes(); ++id) {
    if (dec.label[static_cast<std::size_t>(id)] != domain_id) continue;
    const double mag = std::abs(full[static_cast<std::size_t>(id)]);
    if (mag > best) {
      best = mag;
      argmax = id;
    }
  }
  const auto bdist = boundary_distance_field(d, dec, domain_id);
  return bdist[static_cast<std::size_t>(argmax)] * std::sqrt(pair.lambda);
}

}  // namespace nodallab
