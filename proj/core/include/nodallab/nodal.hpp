#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nodallab/grid.hpp"

namespace nodallab {

/// One sign-definite connected component of an eigenfunction.
struct NodalDomainInfo {
  int id = -1;                     ///< label, assigned in row-major discovery order
  int sign = 0;                    ///< +1 or -1
  std::int64_t node_count = 0;     ///< grid nodes carrying this label
  double volume = 0.0;             ///< sum of node masses (area in 2-D)
  double inner_radius = 0.0;       ///< radius of the largest inscribed ball
  std::int64_t center_node = -1;   ///< grid node id of the inscribed-ball center
};

/// Labeling of the grid into nodal domains.
struct NodalDecomposition {
  std::vector<std::int32_t> label;      ///< per grid node; -1 = no domain
  std::vector<NodalDomainInfo> domains; ///< indexed by label
};

/// Split the grid into strict-sign connected components of `phi_active`
/// (compact active-node indexing, as produced by the eigensolver).  Nodes
/// with |phi| <= zero_tol and inactive nodes get label -1.  Components use
/// face adjacency (4 neighbors in 2-D, 6 in 3-D) and respect periodic wrap.
/// Throws EmptyDecomposition when every value is below the threshold.
NodalDecomposition extract_nodal_domains(const GridDomain& d,
                                         const std::vector<double>& phi_active,
                                         double zero_tol = 0.0);

/// Distance from each node of domain `id` to the complement of the domain,
/// measured to the half-spacing cell boundary: a node whose nearest
/// outside node is k index steps away gets k*spacing - spacing/2.
/// Nodes outside the domain get 0.
std::vector<double> boundary_distance_field(const GridDomain& d,
                                            const NodalDecomposition& dec, int id);

/// Inner radius of the whole active node set, same ball convention as the
/// per-domain radii.  Throws NotApplicable when no node is inactive.
double active_set_inner_radius(const GridDomain& d);

/// Total length of the zero-crossing curve of a 2-D eigenfunction, from
/// linear interpolation along cell edges.  Cells touching inactive nodes
/// are skipped, so the value undercounts near the domain walls by O(h).
double nodal_set_length(const GridDomain& d, const std::vector<double>& phi_active);

/// Smallest component fraction of domain `id` inside the ball B(center,
/// radius): min over connected components K of (domain intersect B) of
/// vol(K)/vol(B).  Requires a node of the domain within radius/2 of the
/// center, else throws NotApplicable.
double local_component_fraction(const GridDomain& d, const NodalDecomposition& dec,
                                int id, std::int64_t center_node, double radius);

/// CSV rows: domain_id,sign,volume,inner_radius,center_i,center_j[,center_k].
void write_nodal_csv(const std::string& path, const GridDomain& d,
                     const NodalDecomposition& dec);

/// Two-color picture of the decomposition with inscribed circles (2-D only).
void write_nodal_svg(const std::string& path, const GridDomain& d,
                     const NodalDecomposition& dec);

}  // namespace nodallab
