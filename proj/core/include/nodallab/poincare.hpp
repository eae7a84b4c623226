#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nodallab/grid.hpp"

namespace nodallab {

/// Variational capacity setup: obstacle F held at 1, region Omega outside of
/// which the potential is clamped to 0, both node masks on one grid.
struct CapacityProblem {
  GridDomain box;
  std::vector<std::uint8_t> in_obstacle;  ///< F
  std::vector<std::uint8_t> in_region;    ///< Omega
  /// F nonempty, F subset of Omega's interior (no obstacle node may touch a
  /// node outside the region), masks sized to the grid, obstacle active.
  void validate() const;
};

/// Concentric disks (2-D) or balls (3-D) in the unit box: F radius r, Omega
/// radius R, centered at the box center.
CapacityProblem annulus_capacity_problem(int dim, int resolution, double r, double R);

/// Concentric axis-aligned squares in the unit box: F half-width r, Omega
/// half-width R.
CapacityProblem square_in_square_problem(int resolution, double r, double R);

/// Cube Q with a concentric ball hole, posed on the concentric doubled box:
/// the grid spans the doubled box (side 1, so Q has side 1/2), F is the
/// central ball with |F| = hole_fraction * |Q|, and Omega is the open doubled
/// box (the outermost node ring is clamped).  `resolution` counts nodes
/// across the doubled box.
CapacityProblem ball_in_doubled_box_problem(int dim, int resolution, double hole_fraction);

/// Parse {"domain": <grid json>, "obstacle": "0101...", "region": "0111..."}.
CapacityProblem capacity_problem_from_json(const std::string& path);

struct CapacitySolution {
  double capacity = 0.0;       ///< Dirichlet energy of the equilibrium potential
  double u_min = 0.0;          ///< extremes of the potential (maximum principle)
  double u_max = 0.0;
  std::int64_t iterations = 0; ///< conjugate-gradient iterations
  std::vector<double> u;       ///< full-grid potential (1 on F, 0 outside Omega)
};

/// Equilibrium potential of (F, Omega): discrete-harmonic between the two
/// clamps, solved by Jacobi-preconditioned conjugate gradient to relative
/// residual `tol`.  The returned energy is the exact discrete minimum over
/// all grid functions with those boundary values (up to solver residual).
CapacitySolution solve_capacity(const CapacityProblem& p, double tol = 1e-10);

/// Capacity-weighted Poincare inequality on a box Q (odd resolution):
///   integral_Q u^2  <=  (a^n / cap(F, 2Q)) * integral_Q |grad u|^2
/// where 2Q is the concentric box of twice the side built on the same
/// spacing.  u must vanish identically on the obstacle nodes.
struct MazyaResult {
  double lhs = 0.0;         ///< integral of u^2 over Q
  double rhs = 0.0;         ///< (a^n / capacity) * gradient integral, C = 1
  double capacity = 0.0;    ///< cap(F, 2Q)
  double energy = 0.0;      ///< gradient integral over Q
  double c_required = 0.0;  ///< smallest admissible constant for this u
};
MazyaResult mazya_bound(const GridDomain& q_box, const std::vector<std::uint8_t>& in_obstacle,
                        const std::vector<double>& u_full, double cg_tol = 1e-10);

/// Capacity against the volume lower-bound shape: bound_unit is
/// 1/log(Vol(Omega)/Vol(F)) in 2-D and Vol(F)^((n-2)/n) for n >= 3; the
/// suite tracks ratio = capacity / bound_unit over shape families.
struct CapVolResult {
  double capacity = 0.0;
  double bound_unit = 0.0;
  double ratio = 0.0;
  double vol_obstacle = 0.0;
  double vol_region = 0.0;
};
CapVolResult capacity_volume_lower(const CapacityProblem& p, double tol = 1e-10);

/// Projection Poincare inequality on a 2-D box for functions vanishing on a
/// node set whose projection on one axis covers at least gamma * side:
/// checks the three intermediate inequalities and the final bound with
/// tracked constant 2/gamma + 2.
struct Poincare2DResult {
  double a = 0.0;            ///< box side
  double gamma = 0.0;        ///< required projection fraction
  std::int64_t e_rows = 0;   ///< rows containing a vanishing node
  std::int64_t t0_row = -1;  ///< argmin row of the row integral
  double int_e = 0.0;        ///< integral of u^2 over the E rows
  double int_q = 0.0;        ///< integral of u^2 over the box
  double i_t0 = 0.0;         ///< row integral at t0
  double d_row = 0.0;        ///< integral of the along-row derivative squared
  double d_cross = 0.0;      ///< integral of the cross-row derivative squared
  double grad_total = 0.0;   ///< d_row + d_cross
  bool eq_ok = false;        ///< int_e <= a^2 d_row
  bool avg_ok = false;       ///< i_t0 <= int_e / (gamma a)
  bool mid_ok = false;       ///< int_q <= 2a i_t0 + 2a^2 d_cross
  bool final_ok = false;     ///< int_q <= (2/gamma + 2) a^2 grad_total
  double c_required = 0.0;   ///< int_q / (a^2 grad_total)
  double c_tracked = 0.0;    ///< 2/gamma + 2
};
Poincare2DResult poincare_2d_projection(const GridDomain& q_box,
                                        const std::vector<double>& u_full,
                                        const std::vector<std::uint8_t>& vanish_nodes,
                                        double gamma, int axis = 1);

/// One-dimensional vanishing-point inequality: trapezoid integral of u^2
/// over [x0, x1] against (x1-x0)^2 times the derivative energy of the
/// piecewise-linear interpolant.  The sample at zero_index must be 0.
struct Poincare1DResult {
  double lhs = 0.0;
  double rhs = 0.0;
};
Poincare1DResult poincare_1d(const std::vector<double>& u, double x0, double x1,
                             std::int64_t zero_index);

/// Optimal box Poincare constant for functions vanishing on a concentric
/// disk/ball obstacle of volume fraction gamma, measured as the smallest
/// eigenvalue of the mixed problem (clamped on F, free on the box skin):
/// beta = 1 / (lambda_1 * a^2).
struct BetaShapePoint {
  double gamma_requested = 0.0;
  double gamma_actual = 0.0;
  double lambda1 = 0.0;
  double beta = 0.0;
};
BetaShapePoint measure_beta_point(int dim, int resolution, double gamma,
                                  std::uint64_t seed = 1);

}  // namespace nodallab
