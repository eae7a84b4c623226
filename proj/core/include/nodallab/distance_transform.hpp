#pragma once

#include <cstdint>
#include <vector>

#include "nodallab/grid.hpp"

namespace nodallab {

/// Sentinel returned for nodes with no feature anywhere on the grid.
inline constexpr double kDistanceInf = 1e30;

/// Exact squared Euclidean distance transform on the grid's node lattice.
///
/// Returns, for every node, the squared distance in node-index units to the
/// nearest node where `feature` is nonzero (multiply by spacing^2 for
/// physical units).  Separable two-pass lower-envelope construction; exact,
/// not an approximation.  On periodic axes the sites are replicated one
/// period to each side, which is exact because a wrapped distance never
/// exceeds one period.
std::vector<double> distance_sq_to_features(const GridDomain& d,
                                            const std::vector<std::uint8_t>& feature);

}  // namespace nodallab
