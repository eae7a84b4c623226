#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nodallab/eigensolve.hpp"
#include "nodallab/grid.hpp"
#include "nodallab/nodal.hpp"

namespace nodallab {

/// Obstacle inside the closed unit disk whose harmonic measure is sampled.
class ObstacleSet {
 public:
  enum class Kind { empty, radial_slit, circle, union_of_disks, mask };

  struct Disk {
    double cx = 0.0, cy = 0.0, r = 0.0;
  };

  static ObstacleSet empty();
  /// Segment [r0, 1] on the positive real axis.
  static ObstacleSet radial_slit(double r0);
  /// Full circle |z| = r0.
  static ObstacleSet circle(double r0);
  /// Union of closed disks, each contained in the unit disk.
  static ObstacleSet union_of_disks(std::vector<Disk> disks);
  /// Marked nodes of a 2-D grid whose box is re-centered on the origin;
  /// distances come from a bilinearly interpolated node-distance field with
  /// a half-cell safety margin subtracted.
  static ObstacleSet from_mask(const GridDomain& grid,
                               const std::vector<std::uint8_t>& obstacle);

  Kind kind() const { return kind_; }
  double r0_param() const { return r0_param_; }
  /// inf{|z| : z in E}, recomputed from the geometry (kDistanceInf if empty).
  double inner_distance() const;
  /// Distance from (x, y) to E; infinite for the empty obstacle.
  double distance(double x, double y) const;

 private:
  Kind kind_ = Kind::empty;
  double r0_param_ = 0.0;
  std::vector<Disk> disks_;
  // mask kind
  GridDomain grid_;
  std::vector<double> node_dist_;  ///< physical distance to E at each node
  double center_x_ = 0.0, center_y_ = 0.0;
};

struct WosOptions {
  std::int64_t n_samples = 1000000;
  double eps = 1e-4;       ///< absorption shell thickness
  int max_steps = 10000;   ///< per walk before tip-capture / resample
  std::uint64_t seed = 1;
};

struct MeasureEstimate {
  double omega0 = 0.0;  ///< harmonic measure of E at the origin
  double stderr_ = 0.0; ///< sqrt(omega0 (1 - omega0) / n)
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::int64_t tip_captured = 0;  ///< walks ended by the sqrt(eps) capture rule
  std::int64_t resampled = 0;     ///< walks restarted after step exhaustion
};

/// Walk-on-spheres Bernoulli estimator of the harmonic measure of E at 0 in
/// the unit disk: each walk jumps uniformly on the largest circle avoiding
/// both E and the disk boundary until it lands in an eps-shell (E counts 1,
/// boundary counts 0).  Deterministic per (seed, sample, attempt).
MeasureEstimate harmonic_measure_at_zero(const ObstacleSet& e, const WosOptions& opt = {});

/// Closed-form measure of the radial slit [r0, 1] at the origin.
double slit_measure_closed_form(double r0);

struct BeurlingRow {
  double r0 = 0.0;
  double omega0 = 0.0;
  double stderr_ = 0.0;
  double implied_c = 0.0;  ///< (1 - omega0) / sqrt(r0)
};

/// Slit family sweep for the lower bound  omega(0) >= 1 - C sqrt(r0):
/// per-row implied constants; the suite asserts boundedness, small
/// variation, and monotone omega0.  Row seeds are opt.seed + row.
std::vector<BeurlingRow> beurling_nevanlinna_check(const std::vector<double>& r0_list,
                                                   const WosOptions& opt = {});

/// Positive harmonic comparison function: mixture of Poisson kernels with
/// atoms at radius >= 1 (atoms on the unit circle give unbounded spikes that
/// only a grid maximum can normalize).
struct PoissonMixture {
  struct Atom {
    double angle = 0.0;   ///< position angle of the kernel pole
    double radius = 1.0;  ///< pole radius, >= 1
    double weight = 1.0;  ///< > 0
  };
  std::vector<Atom> atoms;
  double eval(double x, double y) const;
};

struct MajorizationResult {
  double u0 = 0.0;     ///< u(0)
  double max_u = 0.0;  ///< maximum over a fine polar grid of the component
  double lhs = 0.0;    ///< u0 / max_u
  double omega0 = 0.0;
  double stderr_ = 0.0;
  double rhs = 0.0;  ///< 1 - omega0
  bool ok = false;   ///< lhs <= rhs + 3 stderr
};

/// Majorization bound  u(0)/max u <= 1 - omega(0)  for u positive harmonic
/// on the component of 0 (supported obstacle kinds: empty, slit, circle).
MajorizationResult majorization_check(const PoissonMixture& u, const ObstacleSet& e,
                                      const WosOptions& opt = {});

/// Extremal case u = 1 - omega, estimated with an independent seed on the
/// right-hand side: equality within Monte Carlo error.
MajorizationResult majorization_extremal_check(const ObstacleSet& e,
                                               const WosOptions& opt = {});

/// Distance from the peak node of |phi| inside a nodal domain to the domain
/// boundary, scaled by sqrt(lambda): the located-ball observable.
double center_maximality_gap(const GridDomain& d, const EigenPair& pair,
                             const NodalDecomposition& dec, int domain_id);

}  // namespace nodallab
