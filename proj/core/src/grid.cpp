#include "nodallab/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nodallab {

std::int64_t GridDomain::n_active() const {
  std::int64_t n = 0;
  for (auto m : mask) n += (m != 0);
  return n;
}

std::int64_t GridDomain::neighbor(std::int64_t id, int axis, int dir) const {
  auto c = coords(id);
  std::int64_t v = c[axis] + dir;
  if (bc == BoundaryKind::periodic) {
    if (v < 0) v += shape[axis];
    if (v >= shape[axis]) v -= shape[axis];
  } else if (v < 0 || v >= shape[axis]) {
    return -1;
  }
  c[axis] = v;
  return node(c[0], c[1], c[2]);
}

double GridDomain::node_mass(std::int64_t id) const {
  double cell = spacing * spacing;
  if (dim == 3) cell *= spacing;
  if (q.empty()) return cell;
  return q[static_cast<std::size_t>(id)] * cell;
}

void GridDomain::validate() const {
  if (dim != 2 && dim != 3) throw InvalidDomain("dim must be 2 or 3");
  if (spacing <= 0.0) throw InvalidDomain("spacing must be positive");
  for (int a = 0; a < dim; ++a)
    if (shape[a] < 2) throw InvalidDomain("need at least 2 nodes per axis");
  if (dim == 2 && shape[2] != 1) throw InvalidDomain("2-D grid must have shape[2] == 1");
  if (static_cast<std::int64_t>(mask.size()) != n_nodes())
    throw InvalidDomain("mask size does not match node count");
  if (!q.empty()) {
    if (dim != 2) throw InvalidDomain("conformal factor is only supported in 2-D");
    if (static_cast<std::int64_t>(q.size()) != n_nodes())
      throw InvalidDomain("q size does not match node count");
    for (std::int64_t id = 0; id < n_nodes(); ++id)
      if (active(id) && !(q[static_cast<std::size_t>(id)] > 0.0))
        throw InvalidDomain("conformal factor must be positive on active nodes");
  }
  if (bc == BoundaryKind::periodic) {
    for (auto m : mask)
      if (!m) throw InvalidDomain("periodic grid must be all-active");
  }
  if (n_active() == 0) throw InvalidDomain("no active nodes");
}

// ---------------------------------------------------------------------------
// serialization

std::string GridDomain::to_json() const {
  nlohmann::json j;
  j["dim"] = dim;
  std::vector<std::int64_t> sh(shape.begin(), shape.begin() + dim);
  j["shape"] = sh;
  j["spacing"] = spacing;
  j["bc"] = bc == BoundaryKind::dirichlet ? "dirichlet" : "periodic";
  std::string bits(mask.size(), '0');
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) bits[i] = '1';
  j["mask"] = bits;
  if (!q.empty()) j["q"] = q;
  return j.dump();
}

GridDomain GridDomain::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidDomain(std::string("domain JSON parse error: ") + e.what());
  }
  GridDomain d;
  try {
    d.dim = j.at("dim").get<int>();
    auto sh = j.at("shape").get<std::vector<std::int64_t>>();
    if (static_cast<int>(sh.size()) != d.dim)
      throw InvalidDomain("shape length does not match dim");
    d.shape = {1, 1, 1};
    for (int a = 0; a < d.dim; ++a) d.shape[a] = sh[a];
    if (d.dim == 2) d.shape[2] = 1;
    d.spacing = j.at("spacing").get<double>();
    std::string bcs = j.at("bc").get<std::string>();
    if (bcs == "dirichlet")
      d.bc = BoundaryKind::dirichlet;
    else if (bcs == "periodic")
      d.bc = BoundaryKind::periodic;
    else
      throw InvalidDomain("unknown bc: " + bcs);
    std::string bits = j.at("mask").get<std::string>();
    d.mask.assign(bits.size(), 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i] == '1')
        d.mask[i] = 1;
      else if (bits[i] != '0')
        throw InvalidDomain("mask must be a 0/1 string");
    }
    if (j.contains("q")) d.q = j.at("q").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidDomain(std::string("domain JSON field error: ") + e.what());
  }
  d.validate();
  return d;
}

void GridDomain::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << to_json() << "\n";
}

GridDomain GridDomain::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::uint64_t GridDomain::hash() const {
  std::string s = to_json();
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a 64
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string GridDomain::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

// ---------------------------------------------------------------------------
// builders

namespace {

GridDomain blank_grid(int dim, std::array<std::int64_t, 3> shape, double spacing,
                      BoundaryKind bc) {
  GridDomain d;
  d.dim = dim;
  d.shape = shape;
  d.spacing = spacing;
  d.bc = bc;
  d.mask.assign(static_cast<std::size_t>(d.n_nodes()), 1);
  return d;
}

bool on_boundary_ring(const GridDomain& d, std::int64_t id) {
  auto c = d.coords(id);
  for (int a = 0; a < d.dim; ++a)
    if (c[a] == 0 || c[a] == d.shape[a] - 1) return true;
  return false;
}

}  // namespace

GridDomain build_domain(DomainKind kind, int resolution, double physical_size,
                        const DomainOptions& opts) {
  if (resolution < 3) throw InvalidDomain("resolution must be at least 3");
  if (!(physical_size > 0.0)) throw InvalidDomain("physical_size must be positive");
  const std::int64_t n = resolution;
  const double s = physical_size / (resolution - 1);

  switch (kind) {
    case DomainKind::square:
    case DomainKind::conformal: {
      GridDomain d = blank_grid(2, {n, n, 1}, s, BoundaryKind::dirichlet);
      for (std::int64_t id = 0; id < d.n_nodes(); ++id)
        if (on_boundary_ring(d, id)) d.mask[id] = 0;
      if (kind == DomainKind::conformal) {
        if (!opts.q) throw InvalidDomain("conformal domain needs a q(x, y) callable");
        d.q.resize(static_cast<std::size_t>(d.n_nodes()));
        for (std::int64_t id = 0; id < d.n_nodes(); ++id) {
          auto p = d.position(id);
          d.q[id] = opts.q(p[0], p[1]);
        }
      }
      d.validate();
      return d;
    }
    case DomainKind::rectangle: {
      if (!(opts.aspect >= 1.0)) throw InvalidDomain("rectangle aspect must be >= 1");
      std::int64_t nx = static_cast<std::int64_t>(std::llround(opts.aspect * (resolution - 1))) + 1;
      GridDomain d = blank_grid(2, {nx, n, 1}, s, BoundaryKind::dirichlet);
      for (std::int64_t id = 0; id < d.n_nodes(); ++id)
        if (on_boundary_ring(d, id)) d.mask[id] = 0;
      d.validate();
      return d;
    }
    case DomainKind::box: {
      GridDomain d = blank_grid(3, {n, n, n}, s, BoundaryKind::dirichlet);
      for (std::int64_t id = 0; id < d.n_nodes(); ++id)
        if (on_boundary_ring(d, id)) d.mask[id] = 0;
      d.validate();
      return d;
    }
    case DomainKind::disk: {
      if (resolution < 5) throw ResolutionTooCoarse("disk needs resolution >= 5");
      GridDomain d = blank_grid(2, {n, n, 1}, s, BoundaryKind::dirichlet);
      const double r = physical_size / 2;
      const double cx = d.extent(0) / 2, cy = d.extent(1) / 2;
      for (std::int64_t id = 0; id < d.n_nodes(); ++id) {
        auto p = d.position(id);
        double dx = p[0] - cx, dy = p[1] - cy;
        d.mask[id] = (dx * dx + dy * dy < r * r) && !on_boundary_ring(d, id);
      }
      d.validate();
      return d;
    }
    case DomainKind::lshape: {
      if (resolution < 5) throw ResolutionTooCoarse("lshape needs resolution >= 5");
      GridDomain d = blank_grid(2, {n, n, 1}, s, BoundaryKind::dirichlet);
      for (std::int64_t id = 0; id < d.n_nodes(); ++id) {
        auto c = d.coords(id);
        // closed upper-right quadrant {x >= size/2, y >= size/2} removed;
        // integer compare keeps the corner exact for odd and even n alike
        bool removed = (2 * c[0] >= n - 1) && (2 * c[1] >= n - 1);
        d.mask[id] = !removed && !on_boundary_ring(d, id);
      }
      d.validate();
      return d;
    }
    case DomainKind::slit_square: {
      if (resolution < 5) throw ResolutionTooCoarse("slit square needs resolution >= 5");
      if (resolution % 2 == 0)
        throw ResolutionTooCoarse("slit square needs an odd resolution so y = size/2 is a node row");
      GridDomain d = blank_grid(2, {n, n, 1}, s, BoundaryKind::dirichlet);
      const std::int64_t mid = (n - 1) / 2;
      for (std::int64_t id = 0; id < d.n_nodes(); ++id) {
        auto c = d.coords(id);
        bool slit = (c[1] == mid) && (c[0] >= mid);
        d.mask[id] = !slit && !on_boundary_ring(d, id);
      }
      d.validate();
      return d;
    }
    case DomainKind::torus: {
      int dim = opts.torus_dim;
      if (dim != 2 && dim != 3) throw InvalidDomain("torus dim must be 2 or 3");
      // period = physical_size: n nodes cover [0, size) with spacing size/n
      std::array<std::int64_t, 3> shape = {n, n, dim == 3 ? n : 1};
      GridDomain d = blank_grid(dim, shape, physical_size / resolution, BoundaryKind::periodic);
      d.validate();
      return d;
    }
  }
  throw InvalidDomain("unknown domain kind");
}

GridDomain build_free_box(int dim, int resolution, double physical_size) {
  if (dim != 2 && dim != 3) throw InvalidDomain("free box dim must be 2 or 3");
  if (resolution < 2) throw InvalidDomain("free box needs resolution >= 2");
  if (!(physical_size > 0.0)) throw InvalidDomain("physical_size must be positive");
  std::array<std::int64_t, 3> shape = {resolution, resolution, dim == 3 ? resolution : 1};
  GridDomain d = blank_grid(dim, shape, physical_size / (resolution - 1), BoundaryKind::dirichlet);
  d.validate();
  return d;
}

std::vector<std::int64_t> active_node_list(const GridDomain& d) {
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(d.n_active()));
  for (std::int64_t id = 0; id < d.n_nodes(); ++id)
    if (d.active(id)) out.push_back(id);
  return out;
}

std::vector<double> scatter_to_grid(const GridDomain& d, const std::vector<double>& u_active) {
  auto act = active_node_list(d);
  if (u_active.size() != act.size())
    throw PreconditionViolation("compact vector length does not match active node count");
  std::vector<double> full(static_cast<std::size_t>(d.n_nodes()), 0.0);
  for (std::size_t r = 0; r < act.size(); ++r)
    full[static_cast<std::size_t>(act[r])] = u_active[r];
  return full;
}

}  // namespace nodallab
