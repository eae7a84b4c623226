#include "nodallab/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "nodallab/distance_transform.hpp"
#include "nodallab/errors.hpp"
#include "nodallab/svg.hpp"

namespace nodallab {

NodalDecomposition extract_nodal_domains(const GridDomain& d,
                                         const std::vector<double>& phi_active,
                                         double zero_tol) {
  const std::int64_t n = d.n_nodes();
  const auto full = scatter_to_grid(d, phi_active);
  std::vector<std::int8_t> sgn(static_cast<std::size_t>(n), 0);
  bool any = false;
  for (std::int64_t id = 0; id < n; ++id) {
    if (!d.active(id)) continue;
    const double v = full[static_cast<std::size_t>(id)];
    if (v > zero_tol) {
      sgn[static_cast<std::size_t>(id)] = 1;
      any = true;
    } else if (v < -zero_tol) {
      sgn[static_cast<std::size_t>(id)] = -1;
      any = true;
    }
  }
  if (!any) throw EmptyDecomposition("no strictly signed node");

  NodalDecomposition dec;
  dec.label.assign(static_cast<std::size_t>(n), -1);
  std::vector<std::int64_t> queue;
  for (std::int64_t seed = 0; seed < n; ++seed) {
    if (sgn[static_cast<std::size_t>(seed)] == 0 ||
        dec.label[static_cast<std::size_t>(seed)] != -1)
      continue;
    NodalDomainInfo info;
    info.id = static_cast<int>(dec.domains.size());
    info.sign = sgn[static_cast<std::size_t>(seed)];
    queue.assign(1, seed);
    dec.label[static_cast<std::size_t>(seed)] = info.id;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::int64_t u = queue[head];
      ++info.node_count;
      info.volume += d.node_mass(u);
      for (int axis = 0; axis < d.dim; ++axis)
        for (int dir = -1; dir <= 1; dir += 2) {
          const std::int64_t w = d.neighbor(u, axis, dir);
          if (w < 0 || dec.label[static_cast<std::size_t>(w)] != -1 ||
              sgn[static_cast<std::size_t>(w)] != info.sign)
            continue;
          dec.label[static_cast<std::size_t>(w)] = info.id;
          queue.push_back(w);
        }
    }
    dec.domains.push_back(info);
  }

  // Largest inscribed ball per domain.  A node whose nearest outside node is
  // k index steps away is k*s - s/2 from the cell-accurate domain boundary;
  // shrinking by another s/2 keeps the reported ball inside the domain even
  // in the worst diagonal arrangement (a lone node reports radius 0).
  std::vector<std::uint8_t> feature(static_cast<std::size_t>(n));
  for (auto& info : dec.domains) {
    for (std::int64_t id = 0; id < n; ++id)
      feature[static_cast<std::size_t>(id)] =
          dec.label[static_cast<std::size_t>(id)] != info.id;
    const auto dist2 = distance_sq_to_features(d, feature);
    double best = -1.0;
    std::int64_t best_node = -1;
    for (std::int64_t id = 0; id < n; ++id) {
      if (dec.label[static_cast<std::size_t>(id)] != info.id) continue;
      if (dist2[static_cast<std::size_t>(id)] > best) {
        best = dist2[static_cast<std::size_t>(id)];
        best_node = id;
      }
    }
    const double boundary_dist = std::sqrt(best) * d.spacing - 0.5 * d.spacing;
    info.inner_radius = std::max(0.0, boundary_dist - 0.5 * d.spacing);
    info.center_node = best_node;
  }
  return dec;
}

std::vector<double> boundary_distance_field(const GridDomain& d,
                                            const NodalDecomposition& dec, int id) {
  const std::int64_t n = d.n_nodes();
  if (id < 0 || id >= static_cast<int>(dec.domains.size()))
    throw PreconditionViolation("no such nodal domain");
  std::vector<std::uint8_t> feature(static_cast<std::size_t>(n));
  for (std::int64_t v = 0; v < n; ++v)
    feature[static_cast<std::size_t>(v)] = dec.label[static_cast<std::size_t>(v)] != id;
  const auto dist2 = distance_sq_to_features(d, feature);
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t v = 0; v < n; ++v)
    if (dec.label[static_cast<std::size_t>(v)] == id)
      out[static_cast<std::size_t>(v)] =
          std::sqrt(dist2[static_cast<std::size_t>(v)]) * d.spacing - 0.5 * d.spacing;
  return out;
}

double active_set_inner_radius(const GridDomain& d) {
  const std::int64_t n = d.n_nodes();
  std::vector<std::uint8_t> feature(static_cast<std::size_t>(n));
  bool any = false;
  for (std::int64_t id = 0; id < n; ++id) {
    feature[static_cast<std::size_t>(id)] = !d.active(id);
    any = any || !d.active(id);
  }
  if (!any) throw NotApplicable("active set has no inactive boundary");
  const auto dist2 = distance_sq_to_features(d, feature);
  double best = 0.0;
  for (std::int64_t id = 0; id < n; ++id)
    if (d.active(id)) best = std::max(best, dist2[static_cast<std::size_t>(id)]);
  return std::max(0.0, std::sqrt(best) * d.spacing - d.spacing);
}

double nodal_set_length(const GridDomain& d, const std::vector<double>& phi_active) {
  if (d.dim != 2) throw NotApplicable("zero-set length is a 2-D quantity");
  const auto full = scatter_to_grid(d, phi_active);
  const bool periodic = d.bc == BoundaryKind::periodic;
  const std::int64_t N0 = d.shape[0], N1 = d.shape[1];
  const std::int64_t ic = periodic ? N0 : N0 - 1;
  const std::int64_t jc = periodic ? N1 : N1 - 1;
  const double s = d.spacing;
  double total = 0.0;
  for (std::int64_t i = 0; i < ic; ++i) {
    const std::int64_t i1 = (i + 1) % N0;
    for (std::int64_t j = 0; j < jc; ++j) {
      const std::int64_t j1 = (j + 1) % N1;
      // corners counter-clockwise: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1)
      const std::int64_t ids[4] = {d.node(i, j, 0), d.node(i1, j, 0), d.node(i1, j1, 0),
                                   d.node(i, j1, 0)};
      double v[4];
      bool usable = true;
      for (int c = 0; c < 4; ++c) {
        if (!d.active(ids[c])) {
          usable = false;
          break;
        }
        v[c] = full[static_cast<std::size_t>(ids[c])];
        if (v[c] == 0.0) {
          usable = false;
          break;
        }
      }
      if (!usable) continue;
      int config = 0;
      for (int c = 0; c < 4; ++c)
        if (v[c] > 0.0) config |= 1 << c;
      if (config == 0 || config == 15) continue;

      const double px[4] = {double(i) * s, double(i + 1) * s, double(i + 1) * s, double(i) * s};
      const double py[4] = {double(j) * s, double(j) * s, double(j + 1) * s, double(j + 1) * s};
      const int ea[4] = {0, 1, 2, 3}, eb[4] = {1, 2, 3, 0};
      double cx[4], cy[4];
      int cross[4], nc = 0;
      for (int e = 0; e < 4; ++e) {
        const int a = ea[e], b = eb[e];
        if ((v[a] > 0.0) == (v[b] > 0.0)) continue;
        const double t = v[a] / (v[a] - v[b]);
        cx[e] = px[a] + t * (px[b] - px[a]);
        cy[e] = py[a] + t * (py[b] - py[a]);
        cross[nc++] = e;
      }
      auto seg = [&](int e1, int e2) {
        const double dx = cx[e1] - cx[e2], dy = cy[e1] - cy[e2];
        total += std::sqrt(dx * dx + dy * dy);
      };
      if (nc == 2) {
        seg(cross[0], cross[1]);
      } else {
        // saddle cell: both diagonals strictly signed; resolve the pairing
        // with the sign of the cell average
        const bool center_pos = (v[0] + v[1] + v[2] + v[3]) >= 0.0;
        const bool pos_on_02 = config == 5;  // positive corners on the 0-2 diagonal
        if (center_pos == pos_on_02) {
          seg(0, 1);  // isolate corner 1
          seg(2, 3);  // isolate corner 3
        } else {
          seg(3, 0);  // isolate corner 0
          seg(1, 2);  // isolate corner 2
        }
      }
    }
  }
  return total;
}

double local_component_fraction(const GridDomain& d, const NodalDecomposition& dec,
                                int id, std::int64_t center_node, double radius) {
  if (id < 0 || id >= static_cast<int>(dec.domains.size()))
    throw PreconditionViolation("no such nodal domain");
  if (!(radius > 0.0)) throw PreconditionViolation("radius must be positive");
  if (center_node < 0 || center_node >= d.n_nodes())
    throw PreconditionViolation("center node out of range");
  const bool periodic = d.bc == BoundaryKind::periodic;
  const double s = d.spacing;
  const auto cc = d.coords(center_node);
  const std::int64_t reach = static_cast<std::int64_t>(std::floor(radius / s)) + 1;
  const double r2 = radius * radius, half_r2 = 0.25 * radius * radius;

  std::array<std::int64_t, 3> lo = {0, 0, 0}, hi = {0, 0, 0};
  for (int a = 0; a < d.dim; ++a) {
    if (periodic) {
      lo[a] = std::max(-reach, -(d.shape[a] / 2));
      hi[a] = std::min(reach, d.shape[a] / 2);
    } else {
      lo[a] = std::max(-reach, -cc[a]);
      hi[a] = std::min(reach, d.shape[a] - 1 - cc[a]);
    }
  }

  std::vector<std::uint8_t> in_ball(static_cast<std::size_t>(d.n_nodes()), 0);
  std::vector<std::int64_t> members;
  double vol_ball = 0.0;
  bool near = false;
  for (std::int64_t di = lo[0]; di <= hi[0]; ++di)
    for (std::int64_t dj = lo[1]; dj <= hi[1]; ++dj)
      for (std::int64_t dk = lo[2]; dk <= hi[2]; ++dk) {
        const double dist2 = double(di * di + dj * dj + dk * dk) * s * s;
        if (dist2 > r2) continue;
        std::array<std::int64_t, 3> c = {cc[0] + di, cc[1] + dj, cc[2] + dk};
        if (periodic)
          for (int a = 0; a < d.dim; ++a) c[a] = (c[a] + d.shape[a]) % d.shape[a];
        const std::int64_t node = d.node(c[0], c[1], c[2]);
        if (in_ball[static_cast<std::size_t>(node)]) continue;
        in_ball[static_cast<std::size_t>(node)] = 1;
        vol_ball += d.node_mass(node);
        if (dec.label[static_cast<std::size_t>(node)] == id) {
          members.push_back(node);
          if (dist2 <= half_r2) near = true;
        }
      }
  if (!near)
    throw NotApplicable("nodal domain does not meet the half-radius ball");

  std::vector<std::uint8_t> seen(static_cast<std::size_t>(d.n_nodes()), 0);
  double min_frac = 1e300;
  std::vector<std::int64_t> queue;
  for (const std::int64_t seed : members) {
    if (seen[static_cast<std::size_t>(seed)]) continue;
    double comp_vol = 0.0;
    queue.assign(1, seed);
    seen[static_cast<std::size_t>(seed)] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::int64_t u = queue[head];
      comp_vol += d.node_mass(u);
      for (int axis = 0; axis < d.dim; ++axis)
        for (int dir = -1; dir <= 1; dir += 2) {
          const std::int64_t w = d.neighbor(u, axis, dir);
          if (w < 0 || seen[static_cast<std::size_t>(w)] ||
              !in_ball[static_cast<std::size_t>(w)] ||
              dec.label[static_cast<std::size_t>(w)] != id)
            continue;
          seen[static_cast<std::size_t>(w)] = 1;
          queue.push_back(w);
        }
    }
    min_frac = std::min(min_frac, comp_vol / vol_ball);
  }
  return min_frac;
}

void write_nodal_csv(const std::string& path, const GridDomain& d,
                     const NodalDecomposition& dec) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  os << "domain_id,sign,volume,inner_radius,center_i,center_j";
  if (d.dim == 3) os << ",center_k";
  os << "\n";
  char buf[160];
  for (const auto& info : dec.domains) {
    const auto c = d.coords(info.center_node);
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%lld,%lld", info.id, info.sign,
                  info.volume, info.inner_radius, static_cast<long long>(c[0]),
                  static_cast<long long>(c[1]));
    os << buf;
    if (d.dim == 3) os << "," << c[2];
    os << "\n";
  }
}

void write_nodal_svg(const std::string& path, const GridDomain& d,
                     const NodalDecomposition& dec) {
  if (d.dim != 2) throw NotApplicable("nodal pictures are 2-D only");
  const std::int64_t N0 = d.shape[0], N1 = d.shape[1];
  SvgDoc doc{double(N0), double(N1)};
  doc.rect(0, 0, double(N0), double(N1), "#ffffff");
  // one path per domain built from row runs; node (i,j) fills the unit cell
  // x in [i,i+1), y in [N1-1-j, N1-j)  (y axis flipped for screen space)
  for (const auto& info : dec.domains) {
    std::string dstr;
    for (std::int64_t j = 0; j < N1; ++j) {
      const double y = double(N1 - 1 - j);
      for (std::int64_t i = 0; i < N0;) {
        if (dec.label[static_cast<std::size_t>(d.node(i, j, 0))] != info.id) {
          ++i;
          continue;
        }
        std::int64_t i0 = i;
        while (i < N0 && dec.label[static_cast<std::size_t>(d.node(i, j, 0))] == info.id) ++i;
        dstr += "M" + svg_num(double(i0)) + " " + svg_num(y) + "h" + svg_num(double(i - i0)) +
                "v1h" + svg_num(-double(i - i0)) + "z";
      }
    }
    doc.path(dstr, info.sign > 0 ? "#e4572e" : "#3b7dd8", "none", 0.0, 0.85);
  }
  for (const auto& info : dec.domains) {
    if (info.inner_radius <= 0.0) continue;
    const auto c = d.coords(info.center_node);
    doc.circle(double(c[0]) + 0.5, double(N1 - 1 - c[1]) + 0.5, info.inner_radius / d.spacing,
               "none", "#111111", 0.75);
  }
  doc.save(path);
}

}  // namespace nodallab
