#include "nodallab/distance_transform.hpp"

#include <limits>

namespace nodallab {

namespace {

// One-dimensional squared-distance transform: out[q] = min_p (q-p)^2 + f[p].
// Lower envelope of parabolas rooted at (p, f[p]); sites with f >= inf are
// skipped.  v = site of each envelope parabola, z = segment break points.
void dt1d(const std::vector<double>& f, std::vector<double>& out, std::vector<int>& v,
          std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] >= kDistanceInf) continue;
    double s = 0;
    while (k >= 0) {
      s = (f[q] + double(q) * q - f[v[k]] - double(v[k]) * v[k]) / (2.0 * q - 2.0 * v[k]);
      if (s > z[k]) break;
      --k;
    }
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -std::numeric_limits<double>::infinity();
      z[1] = std::numeric_limits<double>::infinity();
    } else {
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = std::numeric_limits<double>::infinity();
    }
  }
  if (k < 0) {  // no finite site on this line
    for (int q = 0; q < n; ++q) out[q] = kDistanceInf;
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    double dq = q - v[j];
    out[q] = dq * dq + f[v[j]];
  }
}

}  // namespace

std::vector<double> distance_sq_to_features(const GridDomain& d,
                                            const std::vector<std::uint8_t>& feature) {
  const std::int64_t n = d.n_nodes();
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (std::int64_t id = 0; id < n; ++id)
    dist[id] = feature[static_cast<std::size_t>(id)] ? 0.0 : kDistanceInf;

  const bool periodic = d.bc == BoundaryKind::periodic;
  std::int64_t max_axis = 0;
  for (int a = 0; a < d.dim; ++a) max_axis = std::max(max_axis, d.shape[a]);
  const std::size_t cap = static_cast<std::size_t>(3 * max_axis);
  std::vector<double> line(cap), out(cap);
  std::vector<int> v(cap);
  std::vector<double> z(cap + 1);

  for (int axis = 0; axis < d.dim; ++axis) {
    const std::int64_t len = d.shape[axis];
    // stride of one step along `axis` in the flat row-major index
    std::int64_t stride = 1;
    for (int a = axis + 1; a < 3; ++a) stride *= d.shape[a];
    const std::int64_t n_lines = n / len;
    for (std::int64_t l = 0; l < n_lines; ++l) {
      // flat index of the line's first node: unrank l over the other axes
      std::int64_t base;
      {
        std::int64_t r = l;
        std::array<std::int64_t, 3> c = {0, 0, 0};
        for (int a = 2; a >= 0; --a) {
          if (a == axis) continue;
          c[a] = r % d.shape[a];
          r /= d.shape[a];
        }
        base = d.node(c[0], c[1], c[2]);
      }

      if (!periodic) {
        line.resize(static_cast<std::size_t>(len));
        out.resize(static_cast<std::size_t>(len));
        for (std::int64_t i = 0; i < len; ++i)
          line[i] = dist[static_cast<std::size_t>(base + i * stride)];
        dt1d(line, out, v, z);
        for (std::int64_t i = 0; i < len; ++i)
          dist[static_cast<std::size_t>(base + i * stride)] = out[i];
      } else {
        line.resize(static_cast<std::size_t>(3 * len));
        out.resize(static_cast<std::size_t>(3 * len));
        for (std::int64_t i = 0; i < len; ++i) {
          double fv = dist[static_cast<std::size_t>(base + i * stride)];
          line[i] = line[i + len] = line[i + 2 * len] = fv;
        }
        dt1d(line, out, v, z);
        for (std::int64_t i = 0; i < len; ++i)
          dist[static_cast<std::size_t>(base + i * stride)] = out[i + len];
      }
    }
  }
  return dist;
}

}  // namespace nodallab
