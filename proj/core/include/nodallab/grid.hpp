#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nodallab/errors.hpp"

namespace nodallab {

enum class BoundaryKind { dirichlet, periodic };

/// Built-in domain families.  `conformal` is a unit square carrying a
/// user-supplied conformal factor q (2-D metric g = q * euclidean).
enum class DomainKind {
  square,
  rectangle,
  box,
  disk,
  lshape,
  slit_square,
  torus,
  conformal,
};

struct DomainOptions {
  /// Rectangle long-side / short-side ratio (axis 0 is the long side).
  double aspect = 1.0;
  /// Torus dimension (2 or 3).
  int torus_dim = 2;
  /// Conformal factor sampled at node positions; required for
  /// DomainKind::conformal, must be strictly positive on active nodes.
  std::function<double(double, double)> q;
};

/// Uniform-grid discretization of a flat 2-D or 3-D computational domain.
///
/// Nodes sit at integer multiples of `spacing` along each axis; `mask`
/// stores one activity flag per node in row-major (i, j, k) order.  A
/// Dirichlet wall is realized as an inactive node layer *inside* the grid:
/// the discrete Laplacian couples an active node to an inactive neighbour
/// through a zero-value closure term.  A grid edge with no neighbour at all
/// contributes nothing (natural boundary); the all-active "free box" used
/// by the cube-wise Poincare checks relies on that.  With periodic
/// boundaries the mask is all-true and neighbours wrap.
struct GridDomain {
  int dim = 2;
  std::array<std::int64_t, 3> shape = {0, 0, 1};  // nodes per axis; [2]==1 in 2-D
  double spacing = 0.0;
  BoundaryKind bc = BoundaryKind::dirichlet;
  std::vector<std::uint8_t> mask;  // row-major activity flags
  std::vector<double> q;           // conformal factor per node; empty = euclidean

  std::int64_t n_nodes() const { return shape[0] * shape[1] * shape[2]; }

  std::int64_t node(std::int64_t i, std::int64_t j, std::int64_t k = 0) const {
    return (i * shape[1] + j) * shape[2] + k;
  }

  std::array<std::int64_t, 3> coords(std::int64_t id) const {
    std::array<std::int64_t, 3> c;
    c[2] = id % shape[2];
    id /= shape[2];
    c[1] = id % shape[1];
    c[0] = id / shape[1];
    return c;
  }

  std::array<double, 3> position(std::int64_t id) const {
    auto c = coords(id);
    return {c[0] * spacing, c[1] * spacing, c[2] * spacing};
  }

  bool active(std::int64_t id) const { return mask[static_cast<std::size_t>(id)] != 0; }

  std::int64_t n_active() const;

  /// Physical extent of the grid along `axis`: (shape-1)*spacing.
  double extent(int axis) const { return (shape[axis] - 1) * spacing; }

  /// Neighbour of `id` one step along `axis` in direction `dir` (+1/-1);
  /// -1 when the step leaves a non-periodic grid.  Periodic axes wrap.
  std::int64_t neighbor(std::int64_t id, int axis, int dir) const;

  /// Quadrature weight of one node: spacing^dim, or q*spacing^2 on a
  /// conformal 2-D grid (d vol_g = q dx).
  double node_mass(std::int64_t id) const;

  /// Throws InvalidDomain unless shapes, mask and q are consistent.
  void validate() const;

  // ---- serialization ----
  std::string to_json() const;
  static GridDomain from_json(const std::string& text);
  void save(const std::string& path) const;
  static GridDomain load(const std::string& path);

  /// FNV-1a hash of the canonical serialization; identifies a domain in
  /// eigenpair bundles.
  std::uint64_t hash() const;
  std::string hash_hex() const;
};

/// Build one of the named domain families.
///
/// `resolution` is the node count along the (short) unit side and
/// `physical_size` its physical length.  Dirichlet families keep the grid
/// boundary ring inactive so the wall is part of the grid; `disk` activates
/// nodes with center-distance < physical_size/2; `lshape` removes the
/// closed upper-right quadrant; `slit_square` removes the node row
/// {y = size/2, x >= size/2} and requires an odd resolution.
GridDomain build_domain(DomainKind kind, int resolution, double physical_size = 1.0,
                        const DomainOptions& opts = {});

/// All-active grid with natural (no-flux) grid edges: integrals over a cube
/// Q with no boundary condition on its walls.  dim is 2 or 3.
GridDomain build_free_box(int dim, int resolution, double physical_size = 1.0);

/// Active node ids in row-major order: the canonical compact indexing used
/// by the assembled operator and by eigenvector sidecars.
std::vector<std::int64_t> active_node_list(const GridDomain& d);

/// Scatter a compact active-node vector onto the full grid (0 elsewhere).
std::vector<double> scatter_to_grid(const GridDomain& d, const std::vector<double>& u_active);

}  // namespace nodallab
