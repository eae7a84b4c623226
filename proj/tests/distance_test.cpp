// Exact distance transform against a brute-force reference.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "nodallab/distance_transform.hpp"
#include "nodallab/grid.hpp"
#include "nodallab/rng.hpp"

using namespace nodallab;

namespace {

// O(n^2) reference: squared index distance to the nearest feature node,
// with wrap-around on periodic grids.
std::vector<double> brute_force(const GridDomain& d, const std::vector<std::uint8_t>& feat) {
  const bool periodic = d.bc == BoundaryKind::periodic;
  std::vector<std::int64_t> sites;
  for (std::int64_t id = 0; id < d.n_nodes(); ++id)
    if (feat[static_cast<std::size_t>(id)]) sites.push_back(id);
  std::vector<double> out(static_cast<std::size_t>(d.n_nodes()), kDistanceInf);
  if (sites.empty()) return out;
  for (std::int64_t id = 0; id < d.n_nodes(); ++id) {
    const auto a = d.coords(id);
    double best = kDistanceInf;
    for (std::int64_t s : sites) {
      const auto b = d.coords(s);
      double acc = 0.0;
      for (int axis = 0; axis < 3; ++axis) {
        double delta = std::abs(static_cast<double>(a[axis] - b[axis]));
        if (periodic && d.shape[axis] > 1)
          delta = std::min(delta, static_cast<double>(d.shape[axis]) - delta);
        acc += delta * delta;
      }
      best = std::min(best, acc);
    }
    out[static_cast<std::size_t>(id)] = best;
  }
  return out;
}

std::vector<std::uint8_t> random_features(const GridDomain& d, std::uint64_t seed,
                                          double density) {
  std::vector<std::uint8_t> feat(static_cast<std::size_t>(d.n_nodes()), 0);
  CounterRng rng(seed, 0);
  for (auto& f : feat) f = rng.next_double() < density ? 1 : 0;
  return feat;
}

void check_matches_brute_force(const GridDomain& d, const std::vector<std::uint8_t>& feat) {
  const auto fast = distance_sq_to_features(d, feat);
  const auto slow = brute_force(d, feat);
  REQUIRE(fast.size() == slow.size());
  for (std::size_t i = 0; i < fast.size(); ++i) {
    CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("matches brute force on random 2-d masks") {
  const GridDomain d = build_free_box(2, 17);
  for (std::uint64_t seed : {11ull, 12ull, 13ull})
    check_matches_brute_force(d, random_features(d, seed, 0.07));
}

TEST_CASE("matches brute force on a sparse 3-d mask") {
  const GridDomain d = build_free_box(3, 9);
  check_matches_brute_force(d, random_features(d, 5, 0.02));
}

TEST_CASE("matches brute force with periodic wrap") {
  DomainOptions opts;
  opts.torus_dim = 2;
  const GridDomain d = build_domain(DomainKind::torus, 16, 1.0, opts);
  // single site: the far corner must wrap, not cross the whole grid
  std::vector<std::uint8_t> feat(static_cast<std::size_t>(d.n_nodes()), 0);
  feat[static_cast<std::size_t>(d.node(1, 2))] = 1;
  const auto fast = distance_sq_to_features(d, feat);
  CHECK(fast[static_cast<std::size_t>(d.node(15, 2))] == doctest::Approx(4.0));  // wrap: 2 steps
  CHECK(fast[static_cast<std::size_t>(d.node(1, 14))] == doctest::Approx(16.0));
  check_matches_brute_force(d, feat);
  check_matches_brute_force(d, random_features(d, 77, 0.05));
}

TEST_CASE("matches brute force on a 3-d torus") {
  DomainOptions opts;
  opts.torus_dim = 3;
  const GridDomain d = build_domain(DomainKind::torus, 7, 1.0, opts);
  check_matches_brute_force(d, random_features(d, 21, 0.04));
}

TEST_CASE("feature everywhere gives zero, feature nowhere gives the sentinel") {
  const GridDomain d = build_free_box(2, 9);
  std::vector<std::uint8_t> all(static_cast<std::size_t>(d.n_nodes()), 1);
  for (double v : distance_sq_to_features(d, all)) CHECK(v == 0.0);
  std::vector<std::uint8_t> none(static_cast<std::size_t>(d.n_nodes()), 0);
  for (double v : distance_sq_to_features(d, none)) CHECK(v == kDistanceInf);
}

TEST_CASE("anisotropic case: distance to a single far corner") {
  const GridDomain d = build_free_box(2, 33);
  std::vector<std::uint8_t> feat(static_cast<std::size_t>(d.n_nodes()), 0);
  feat[static_cast<std::size_t>(d.node(0, 0))] = 1;
  const auto dist = distance_sq_to_features(d, feat);
  CHECK(dist[static_cast<std::size_t>(d.node(32, 32))] == doctest::Approx(2.0 * 32 * 32));
  CHECK(dist[static_cast<std::size_t>(d.node(5, 12))] == doctest::Approx(25.0 + 144.0));
}
