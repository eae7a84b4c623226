#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nodallab/eigensolve.hpp"
#include "nodallab/grid.hpp"
#include "nodallab/nodal.hpp"

namespace nodallab {

/// Dimension exponents of the inner-radius lower bound: k(n) = n^2 - 15n/8 + 1/4.
double radius_exponent(int n);

/// Dimension exponents of the hole-volume envelope: alpha(n) = 2n^2 + n/4.
double volume_exponent(int n);

/// Poincare-constant envelope in the hole fraction: C*log(1/gamma) in 2-D,
/// C/gamma^((n-2)/n) for n >= 3.
double beta_of_gamma(double gamma, int n, double c2d, double cnd);

/// One cube of the cover (side 4m nodes), plus its verification record.
struct CubeRecord {
  std::array<std::int64_t, 3> origin = {0, 0, 0};  ///< low corner, index units
  std::array<std::int64_t, 3> lo = {0, 0, 1};      ///< clipped node box, half-open
  std::array<std::int64_t, 3> hi = {0, 0, 1};
  bool clipped = false;

  bool has_hole_record = false;   ///< inner box met the grid, probe searched
  std::int64_t probe_node = -1;   ///< first inner-box node outside the domain
  bool step2_ok = true;           ///< probe exists (false = falsification finding)
  std::int64_t hole_nodes = 0;    ///< component of the probe in cube \ domain
  double gamma = 0.0;             ///< hole nodes / cube nodes
  std::array<std::int64_t, 3> extent_nodes = {0, 0, 0};  ///< distinct coords
  bool touches_boundary = false;  ///< hole reaches the unclipped cube skin
  bool extent_ok = true;          ///< touch -> extent >= h, else >= vol^(1/n)
  bool extent_exempt = false;     ///< clipped cubes skip the extent dichotomy

  double mass = 0.0;    ///< integral of phi_tilde^2 over the cube
  double energy = 0.0;  ///< integral of |grad phi_tilde|^2 assigned to the cube
  double beta = 0.0;    ///< mass / (h^2 * energy); 0 when the cube is silent
  bool beta_finite = true;
};

/// Cover of the grid box by cubes of side 4m nodes (physical side 4h).
struct CubeCover {
  std::int64_t m = 0;  ///< h in node steps
  double h = 0.0;      ///< quarter edge, physical
  std::array<std::int64_t, 3> cubes_per_axis = {1, 1, 1};
  std::vector<CubeRecord> cubes;  ///< row-major over cube indices

  std::size_t cube_of_node(const GridDomain& d, std::int64_t node) const;
};

/// Tile the grid box with cubes of side 4m where h = m*spacing is the
/// smallest grid multiple above r_e (snapped below 2*r_e if ever needed).
/// Requires r_e > spacing, else ResolutionTooCoarse; Dirichlet grids only.
CubeCover build_cover(const GridDomain& d, double r_e);

/// For every cube whose inner box (the closed concentric box of side 2m+1
/// nodes) meets the grid: find a probe node outside nodal domain
/// `domain_id`, grow its connected component inside the cube, and record
/// volume fraction, per-axis projection extents, and the extent dichotomy.
void find_holes(CubeCover& cover, const NodalDecomposition& dec, int domain_id,
                const GridDomain& d);

/// Projection of the hole onto one axis, in physical length.
double projection_extent(const CubeRecord& cube, int axis, double spacing);

/// Mass and gradient energy of the cut-off eigenfunction inside one cube,
/// with every grid edge assigned to the cube of its lower row-major endpoint
/// so the per-cube energies add up to the total Dirichlet energy exactly.
/// beta is the smallest constant making  mass <= beta * h^2 * energy  true.
struct CubeEnergy {
  double mass = 0.0;
  double energy = 0.0;
  double beta = 0.0;
  bool finite = true;
};
CubeEnergy verify_local_poincare(const GridDomain& d, const std::vector<double>& tilde_full,
                                 const CubeCover& cover, std::size_t cube_index);

/// End-to-end verification record for one nodal domain.
struct ChainReport {
  int domain_id = -1;
  int sign = 0;
  double lambda = 0.0;        ///< certified eigenvalue of the pair
  double lambda_chain = 0.0;  ///< energy_total / mass_total of the cut-off
  double r_measured = 0.0;    ///< inner radius of the domain
  std::int64_t m = 0;
  double h = 0.0;
  std::int64_t n_cubes = 0;
  std::int64_t n_holes = 0;
  double beta_max = 0.0;
  bool beta_max_finite = true;
  double gamma_min = 0.0;   ///< over cubes that contain domain nodes
  double mass_total = 0.0;
  double energy_total = 0.0;
  double r_bound = 0.0;     ///< 1 / (4 sqrt(lambda * beta_max))
  bool step2_all_ok = false;
  bool extent_all_ok = false;
  bool local_all_ok = false;   ///< mass_Q <= beta_max h^2 energy_Q per cube
  bool global_ok = false;      ///< mass <= 16 beta_max r^2 energy
  bool bound_ok = false;       ///< r_measured >= r_bound
  bool all_ok = false;
  std::vector<CubeRecord> cubes;
};

/// Run the cube cover, hole detection, per-cube Poincare constants, and the
/// summed inequality for nodal domain `domain_id` of the given eigenpair.
ChainReport verify_global_chain(const GridDomain& d, const EigenPair& pair,
                                const NodalDecomposition& dec, int domain_id);

std::string chain_report_json(const ChainReport& report);

/// lambda_1 * inrad^2 of the active set (bounded-above family check).
struct DomainBoundCheck {
  double lambda1 = 0.0;
  double inrad = 0.0;
  double product = 0.0;
};
DomainBoundCheck inrad_upper_check(const GridDomain& d, unsigned seed = 1);

/// lambda_1 * Vol^(2/n) of the active set (bounded-below family check).
double faber_krahn_check(const GridDomain& d, unsigned seed = 1);

}  // namespace nodallab
