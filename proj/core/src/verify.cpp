#include "nodallab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>

#include <unistd.h>

#include "nodallab/errors.hpp"
#include "nodallab/harmonic.hpp"
#include "nodallab/laplacian.hpp"
#include "nodallab/nodal.hpp"
#include "nodallab/rng.hpp"
#include "nodallab/svg.hpp"

namespace nodallab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kJ01 = 2.404825557695772768621632;  // first zero of J_0

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct Timer {
  double t0 = now_seconds();
  double lap() const { return now_seconds() - t0; }
};

std::string strf(const char* fmt, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  return std::string(buf);
}

double active_volume(const GridDomain& d) {
  double v = 0.0;
  for (std::int64_t id = 0; id < d.n_nodes(); ++id)
    if (d.active(id)) v += d.node_mass(id);
  return v;
}

EigenBundle solve_bundle(const GridDomain& d, int k) {
  const SparseSymOp op = assemble_laplacian(d);
  EigenBundle b;
  b.domain = d;
  b.pairs = smallest_eigenpairs(op, k);
  return b;
}

// ---------------------------------------------------------------------------
// shared experiment caches (the acceptance checks reuse each other's heavy
// artifacts; everything below is deterministic, so caching cannot change
// any measured value, only the attribution of wall time)

constexpr int kSuiteResolution = 257;
constexpr int kSuiteBundleK = 60;

struct Bundles {
  EigenBundle square;
  EigenBundle disk;
};

const Bundles& bundles() {
  static const Bundles b = [] {
    Bundles out;
    out.square = solve_bundle(build_domain(DomainKind::square, kSuiteResolution), kSuiteBundleK);
    out.disk = solve_bundle(build_domain(DomainKind::disk, kSuiteResolution), kSuiteBundleK);
    return out;
  }();
  return b;
}

struct DomainStat {
  std::string name;
  double lambda1 = 0.0;
  double inrad = 0.0;
  double volume = 0.0;
};

const std::vector<DomainStat>& five_domain_suite() {
  static const std::vector<DomainStat> suite = [] {
    std::vector<DomainStat> out;
    auto add = [&out](const std::string& name, const GridDomain& d, double lambda1) {
      out.push_back({name, lambda1, active_set_inner_radius(d), active_volume(d)});
    };
    add("square", bundles().square.domain, bundles().square.pairs[0].lambda);
    add("disk", bundles().disk.domain, bundles().disk.pairs[0].lambda);
    DomainOptions rect_opts;
    rect_opts.aspect = 10.0;
    const GridDomain rect =
        build_domain(DomainKind::rectangle, kSuiteResolution, 1.0, rect_opts);
    add("rectangle-1x10", rect, solve_bundle(rect, 1).pairs[0].lambda);
    const GridDomain lshape = build_domain(DomainKind::lshape, kSuiteResolution);
    add("lshape", lshape, solve_bundle(lshape, 1).pairs[0].lambda);
    const GridDomain slit = build_domain(DomainKind::slit_square, kSuiteResolution);
    add("slit-square", slit, solve_bundle(slit, 1).pairs[0].lambda);
    return out;
  }();
  return suite;
}

struct ChainCase {
  std::string domain;
  int index = 0;
  double seconds = 0.0;
  double r_min = 0.0;
  int n_domains = 0;
  ChainReport report;
};

struct ArgminChain {
  int n_domains = 0;
  double r_min = 0.0;
  bool ran = false;
  ChainReport report;
};

ArgminChain chain_on_pair(const GridDomain& d, const EigenPair& pair) {
  const NodalDecomposition dec = extract_nodal_domains(d, to_std(pair.phi));
  ArgminChain out;
  out.n_domains = static_cast<int>(dec.domains.size());
  out.r_min = dec.domains.empty() ? 0.0 : dec.domains[0].inner_radius;
  int target = -1;
  double target_r = 0.0;
  for (const auto& dom : dec.domains) {
    out.r_min = std::min(out.r_min, dom.inner_radius);
    if (dom.inner_radius > d.spacing && (target < 0 || dom.inner_radius < target_r)) {
      target = dom.id;
      target_r = dom.inner_radius;
    }
  }
  if (target >= 0 && d.bc == BoundaryKind::dirichlet) {
    out.report = verify_global_chain(d, pair, dec, target);
    out.ran = true;
  }
  return out;
}

const std::vector<ChainCase>& chain_suite() {
  static const std::vector<ChainCase> cases = [] {
    std::vector<ChainCase> out;
    auto run = [&out](const std::string& name, const EigenBundle& b,
                      const std::vector<int>& indices) {
      for (int idx : indices) {
        Timer t;
        ArgminChain ac = chain_on_pair(b.domain, b.pairs[static_cast<std::size_t>(idx)]);
        ChainCase c;
        c.domain = name;
        c.index = idx;
        c.seconds = t.lap();
        c.r_min = ac.r_min;
        c.n_domains = ac.n_domains;
        c.report = ac.report;
        if (!ac.ran) c.report.domain_id = -1;
        out.push_back(std::move(c));
      }
    };
    run("square", bundles().square, {0, 4, 11, 24, 39, 54});
    run("disk", bundles().disk, {0, 5, 15, 30, 50});
    return out;
  }();
  return cases;
}

/// sup over the chain-suite cubes of beta / log(1/gamma): the smallest
/// two-dimensional envelope constant covering every observed cube.
double chain_beta_c2_sup() {
  double sup = 0.0;
  for (const auto& c : chain_suite()) {
    if (c.report.domain_id < 0) continue;
    for (const auto& cube : c.report.cubes) {
      if (!cube.has_hole_record || !cube.beta_finite) continue;
      if (!(cube.gamma > 0.0 && cube.gamma < 1.0)) continue;
      if (!(cube.beta > 0.0)) continue;
      sup = std::max(sup, cube.beta / std::log(1.0 / cube.gamma));
    }
  }
  return sup;
}

double five_suite_max_product() {
  double mx = 0.0;
  for (const auto& s : five_domain_suite())
    mx = std::max(mx, s.lambda1 * s.inrad * s.inrad);
  return mx;
}

// ---------------------------------------------------------------------------
// acceptance checks

CriterionResult c1_eigensolver_accuracy() {
  CriterionResult r{1, "eigensolver-accuracy", false, "", 0.0};
  Timer total;
  const GridDomain d = build_domain(DomainKind::square, kSuiteResolution);
  const SparseSymOp op = assemble_laplacian(d);
  Timer solve;
  const auto pairs = smallest_eigenpairs(op, 20);
  const double solve_seconds = solve.lap();

  std::vector<double> exact;
  for (int j = 1; j <= 12; ++j)
    for (int k = 1; k <= 12; ++k) exact.push_back(kPi * kPi * double(j * j + k * k));
  std::sort(exact.begin(), exact.end());
  double max_rel = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    max_rel = std::max(max_rel, std::abs(pairs[i].lambda - exact[i]) / exact[i]);

  r.pass = max_rel <= 0.01 && solve_seconds < 60.0;
  r.detail = strf("max_rel_err=%.3e solve_s=%.2f lambda1=%.6f", max_rel, solve_seconds,
                  pairs[0].lambda);
  r.seconds = total.lap();
  return r;
}

CriterionResult c2_inner_radius_scaling() {
  CriterionResult r{2, "inner-radius-scaling", false, "", 0.0};
  Timer total;
  const auto rows_square = scaling_rows(bundles().square.domain, bundles().square);
  const auto rows_disk = scaling_rows(bundles().disk.domain, bundles().disk);

  std::vector<double> lx, ly;
  double min_rsl = 1e30;
  int n_rows = 0;
  for (const auto* rows : {&rows_square, &rows_disk}) {
    for (const auto& row : *rows) {
      if (row.lambda > 5000.0) continue;
      ++n_rows;
      min_rsl = std::min(min_rsl, row.r_min_sqrt_lambda);
      if (row.r_min > 0.0) {
        lx.push_back(std::log10(row.lambda));
        ly.push_back(std::log10(row.r_min));
      }
    }
  }
  const LinearFit fit = fit_line(lx, ly);

  // identify simple square modes against the exact discrete spectrum of the
  // five-point operator and compare r*sqrt(lambda) with the product-mode
  // value pi/sqrt(2) (only multiplicity-one modes have a forced profile)
  const double h = bundles().square.domain.spacing;
  std::vector<double> lattice;
  double lambda_cap = 0.0;
  for (const auto& row : rows_square) lambda_cap = std::max(lambda_cap, row.lambda);
  for (int j = 1; j <= 64; ++j)
    for (int k = 1; k <= 64; ++k) {
      const double sj = std::sin(0.5 * kPi * double(j) * h);
      const double sk = std::sin(0.5 * kPi * double(k) * h);
      const double lam = 4.0 / (h * h) * (sj * sj + sk * sk);
      if (lam <= 1.5 * lambda_cap + 10.0) lattice.push_back(lam);
    }
  std::sort(lattice.begin(), lattice.end());

  int n_checked = 0;
  int n_unidentified = 0;
  double max_dev = 0.0;
  const double closed = kPi / std::sqrt(2.0);
  for (const auto& row : rows_square) {
    // count every lattice value matching this eigenvalue: a duplicate means a
    // degenerate level, whose solved vectors are arbitrary in-space mixtures
    const double id_tol = 1e-6 * row.lambda;
    const auto lo = std::lower_bound(lattice.begin(), lattice.end(), row.lambda - id_tol);
    const auto hi = std::upper_bound(lattice.begin(), lattice.end(), row.lambda + id_tol);
    if (lo == hi) {
      ++n_unidentified;
      continue;
    }
    double neighbor_gap = 1e300;
    if (lo != lattice.begin()) neighbor_gap = std::min(neighbor_gap, row.lambda - *(lo - 1));
    if (hi != lattice.end()) neighbor_gap = std::min(neighbor_gap, *hi - row.lambda);
    if (hi - lo > 1 || neighbor_gap < 1e-3 * row.lambda)
      continue;  // multiple (or tightly clustered) mode, profile not forced
    ++n_checked;
    max_dev = std::max(max_dev, std::abs(row.r_min_sqrt_lambda / closed - 1.0));
  }

  r.pass = n_rows >= 100 && fit.slope >= -0.6 && fit.slope <= -0.4 && min_rsl >= 0.5 &&
           n_unidentified == 0 && n_checked >= 3 && max_dev <= 0.10;
  r.detail = strf("rows=%d slope=%.4f min_r_sqrt_lambda=%.3f simple_modes=%d max_dev=%.3f",
                  n_rows, fit.slope, min_rsl, n_checked, max_dev);
  r.seconds = total.lap();
  return r;
}

CriterionResult c3_inner_radius_upper(const ConstantsStore& store) {
  CriterionResult r{3, "inner-radius-upper-bound", false, "", 0.0};
  Timer total;
  std::string detail;
  double mx = 0.0;
  for (const auto& s : five_domain_suite()) {
    const double product = s.lambda1 * s.inrad * s.inrad;
    mx = std::max(mx, product);
    detail += strf("%s=%.4f ", s.name.c_str(), product);
  }
  const std::optional<StoredConstant> frozen = store.find(kConstInradSuiteMax);
  if (!frozen) {
    r.detail = detail + "frozen-constant-missing";
  } else {
    const double rel = std::abs(mx - frozen->value) / frozen->value;
    r.pass = mx <= 7.0 && rel <= 0.05;
    r.detail = detail + strf("max=%.4f frozen=%.4f rel=%.2e", mx, frozen->value, rel);
  }
  r.seconds = total.lap();
  return r;
}

CriterionResult c4_faber_krahn() {
  CriterionResult r{4, "faber-krahn", false, "", 0.0};
  Timer total;
  const double sharp = kPi * kJ01 * kJ01;  // lambda1 * area of any disk
  bool all_above = true;
  double disk_rel = 1.0;
  std::string detail;
  for (const auto& s : five_domain_suite()) {
    const double product = s.lambda1 * s.volume;
    all_above = all_above && product >= sharp * 0.98;
    if (s.name == "disk") disk_rel = std::abs(product / sharp - 1.0);
    detail += strf("%s=%.3f ", s.name.c_str(), product);
  }
  r.pass = all_above && disk_rel <= 0.02;
  r.detail = detail + strf("sharp=%.3f disk_rel=%.4f", sharp, disk_rel);
  r.seconds = total.lap();
  return r;
}

CriterionResult c5_cube_chain(const ConstantsStore& store) {
  CriterionResult r{5, "cube-chain-pipeline", false, "", 0.0};
  Timer total;
  int n_cases = 0, n_step2_bad = 0, n_bound_bad = 0, n_flag_bad = 0;
  double max_seconds = 0.0;
  for (const auto& c : chain_suite()) {
    if (c.report.domain_id < 0) continue;  // untestable at this resolution
    ++n_cases;
    max_seconds = std::max(max_seconds, c.seconds);
    if (!c.report.step2_all_ok) ++n_step2_bad;
    if (!c.report.bound_ok) ++n_bound_bad;
    if (!c.report.all_ok) ++n_flag_bad;
  }
  const double c2_sup = chain_beta_c2_sup();
  const std::optional<StoredConstant> frozen = store.find(kConstChainBetaC2);
  const bool c2_ok = frozen.has_value() && c2_sup <= frozen->value * (1.0 + 1e-9);
  r.pass = n_cases >= 10 && n_step2_bad == 0 && n_bound_bad == 0 && n_flag_bad == 0 &&
           max_seconds < 10.0 && c2_ok;
  r.detail = strf(
      "cases=%d step2_bad=%d bound_bad=%d flags_bad=%d max_s=%.2f beta_c2_sup=%.4f frozen=%s",
      n_cases, n_step2_bad, n_bound_bad, n_flag_bad, max_seconds, c2_sup,
      frozen ? strf("%.4f", frozen->value).c_str() : "missing");
  r.seconds = total.lap();
  return r;
}

CriterionResult c6_capacity_oracles() {
  CriterionResult r{6, "capacity-oracles", false, "", 0.0};
  Timer total;
  const CapacitySolution flat =
      solve_capacity(annulus_capacity_problem(2, kSuiteResolution, 0.25, 0.5));
  const double oracle2 = 2.0 * kPi / std::log(2.0);
  const double dev2 = std::abs(flat.capacity / oracle2 - 1.0);

  const CapacitySolution ball = solve_capacity(annulus_capacity_problem(3, 97, 0.25, 0.5));
  const double oracle3 = 4.0 * kPi / (1.0 / 0.25 - 1.0 / 0.5);
  const double dev3 = std::abs(ball.capacity / oracle3 - 1.0);

  r.pass = dev2 <= 0.05 && dev3 <= 0.07;
  r.detail = strf("cap2=%.4f dev2=%.4f cap3=%.4f dev3=%.4f", flat.capacity, dev2,
                  ball.capacity, dev3);
  r.seconds = total.lap();
  return r;
}

CriterionResult c7_beta_gamma_shape() {
  CriterionResult r{7, "beta-gamma-shape", false, "", 0.0};
  Timer total;
  // The hole-fraction law for the cube Poincare constant comes from the
  // capacity route: beta(gamma) = a^n / cap(F, doubled box), composed with
  // the capacity-volume lower bound whose exact form keeps the enclosing
  // volume on the shape side:
  //   2-D:    cap * log(vol(Omega)/vol(F))                 is constant,
  //   n >= 3: cap * (vol(F)^(-1/3) - vol(Omega)^(-1/3))    is constant.
  // A concentric ball is the capacity-minimizing hole at fixed volume, so it
  // traces the extremal beta(gamma); measured volumes (pixel counts) are used
  // so mask quantization cannot bias the shape products.  A raw eigenvalue
  // 1/lambda_1 cannot follow the asymptotic law over gamma up to 1/4: the
  // hole then nearly fills its cube and thin-gap effects dominate.
  std::vector<double> gammas;
  for (int e = 2; e <= 8; ++e) gammas.push_back(std::pow(0.5, e));

  double c2min = 1e300, c2max = 0.0;
  for (double g : gammas) {
    const CapacityProblem p = ball_in_doubled_box_problem(2, 513, g);
    const CapVolResult cv = capacity_volume_lower(p);
    const double c = cv.capacity * std::log(cv.vol_region / cv.vol_obstacle);
    c2min = std::min(c2min, c);
    c2max = std::max(c2max, c);
  }
  const double band2 = c2max / c2min - 1.0;

  double c3min = 1e300, c3max = 0.0;
  for (double g : gammas) {
    const CapacityProblem p = ball_in_doubled_box_problem(3, 97, g);
    const CapVolResult cv = capacity_volume_lower(p);
    const double c = cv.capacity * (std::pow(cv.vol_obstacle, -1.0 / 3.0) -
                                    std::pow(cv.vol_region, -1.0 / 3.0));
    c3min = std::min(c3min, c);
    c3max = std::max(c3max, c);
  }
  const double band3 = c3max / c3min - 1.0;

  r.pass = band2 <= 0.20 && band3 <= 0.20;
  r.detail = strf("c2d_band=%.3f (%.3f..%.3f) c3d_band=%.3f (%.3f..%.3f)", band2, c2min,
                  c2max, band3, c3min, c3max);
  r.seconds = total.lap();
  return r;
}

CriterionResult c8_projection_poincare() {
  CriterionResult r{8, "projection-poincare", false, "", 0.0};
  Timer total;
  const int res = 65;
  const GridDomain box = build_free_box(2, res);
  const double gamma = 0.25;
  const int e_rows = 17;  // 17/64 >= gamma * side
  int falsified = 0;
  double worst_margin = 1e300;
  for (int trial = 0; trial < 100; ++trial) {
    CounterRng rng(8001, static_cast<std::uint64_t>(trial));
    std::vector<double> u(static_cast<std::size_t>(box.n_nodes()));
    for (auto& v : u) v = rng.next_in(-1.0, 1.0);
    std::vector<std::uint8_t> vanish(u.size(), 0);
    // e_rows distinct rows, one or more forced zeros in each
    std::vector<int> rows(static_cast<std::size_t>(res));
    for (int i = 0; i < res; ++i) rows[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < e_rows; ++i) {
      const int j = i + static_cast<int>(rng.next_double() * double(res - i));
      std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
    }
    for (int i = 0; i < e_rows; ++i) {
      const int t = rows[static_cast<std::size_t>(i)];
      const int zeros = 1 + static_cast<int>(rng.next_double() * 3.0);
      for (int z = 0; z < zeros; ++z) {
        const int p = static_cast<int>(rng.next_double() * double(res));
        const std::int64_t id = box.node(p, t);
        u[static_cast<std::size_t>(id)] = 0.0;
        vanish[static_cast<std::size_t>(id)] = 1;
      }
    }
    const Poincare2DResult pr = poincare_2d_projection(box, u, vanish, gamma, 1);
    if (!(pr.eq_ok && pr.avg_ok && pr.mid_ok && pr.final_ok)) ++falsified;
    worst_margin = std::min(worst_margin, pr.c_tracked - pr.c_required);
  }
  r.pass = falsified == 0;
  r.detail = strf("trials=100 falsified=%d worst_margin=%.4f tracked=%.1f", falsified,
                  worst_margin, 2.0 / gamma + 2.0);
  r.seconds = total.lap();
  return r;
}

CriterionResult c9_interval_lemma() {
  CriterionResult r{9, "interval-lemma", false, "", 0.0};
  Timer total;
  int falsified = 0;
  double worst_ratio = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    CounterRng rng(9001, static_cast<std::uint64_t>(trial));
    const int m = 3 + static_cast<int>(rng.next_double() * 38.0);
    std::vector<double> u(static_cast<std::size_t>(m));
    for (auto& v : u) v = rng.next_in(-1.0, 1.0);
    const auto zero = static_cast<std::int64_t>(rng.next_double() * double(m));
    u[static_cast<std::size_t>(zero)] = 0.0;
    const double x1 = rng.next_in(0.3, 3.0);
    const Poincare1DResult pr = poincare_1d(u, 0.0, x1, zero);
    if (pr.lhs > pr.rhs * (1.0 + 1e-6)) ++falsified;
    if (pr.rhs > 0.0) worst_ratio = std::max(worst_ratio, pr.lhs / pr.rhs);
  }
  r.pass = falsified == 0;
  r.detail = strf("trials=1000 falsified=%d worst_lhs_over_rhs=%.4f", falsified, worst_ratio);
  r.seconds = total.lap();
  return r;
}

CriterionResult c10_harmonic_measure() {
  CriterionResult r{10, "harmonic-measure", false, "", 0.0};
  Timer total;
  WosOptions small;
  small.n_samples = 100000;
  const MeasureEstimate none = harmonic_measure_at_zero(ObstacleSet::empty(), small);
  const bool empty_ok = none.omega0 == 0.0;

  const MeasureEstimate ring = harmonic_measure_at_zero(ObstacleSet::circle(0.3), small);
  const bool circle_ok = ring.omega0 >= 1.0 - 3.0 * ring.stderr_;

  WosOptions big;
  big.n_samples = 1000000;
  const std::vector<double> r0_list{0.4, 0.2, 0.1, 0.05, 0.025};
  Timer sweep;
  const auto rows = beurling_nevanlinna_check(r0_list, big);
  const double per_row_s = sweep.lap() / double(rows.size());

  double cmin = 1e300, cmax = 0.0;
  bool monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    cmin = std::min(cmin, rows[i].implied_c);
    cmax = std::max(cmax, rows[i].implied_c);
    if (i > 0 && !(rows[i].omega0 > rows[i - 1].omega0)) monotone = false;
  }
  const double variation = cmax / cmin - 1.0;

  r.pass = empty_ok && circle_ok && variation < 0.30 && monotone && per_row_s < 30.0;
  r.detail = strf("empty=%.0f circle=%.5f c_var=%.3f monotone=%d per_1e6_s=%.2f", none.omega0,
                  ring.omega0, variation, monotone ? 1 : 0, per_row_s);
  r.seconds = total.lap();
  return r;
}

CriterionResult c11_exponents() {
  CriterionResult r{11, "exponent-formulas", false, "", 0.0};
  Timer total;
  r.pass = radius_exponent(2) == 0.5 && radius_exponent(3) == 3.625 &&
           volume_exponent(2) == 8.5 && volume_exponent(3) == 18.75;
  r.detail = strf("k2=%g k3=%g a2=%g a3=%g", radius_exponent(2), radius_exponent(3),
                  volume_exponent(2), volume_exponent(3));
  r.seconds = total.lap();
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// shared experiment runners

std::vector<ScalingRow> scaling_rows(const GridDomain& d, const EigenBundle& bundle) {
  std::vector<ScalingRow> rows;
  rows.reserve(bundle.pairs.size());
  for (std::size_t i = 0; i < bundle.pairs.size(); ++i) {
    const EigenPair& pair = bundle.pairs[i];
    const ArgminChain ac = chain_on_pair(d, pair);
    ScalingRow row;
    row.index = static_cast<int>(i);
    row.lambda = pair.lambda;
    row.n_domains = ac.n_domains;
    row.r_min = ac.r_min;
    row.r_min_sqrt_lambda = ac.r_min * std::sqrt(pair.lambda);
    row.r_bound = ac.ran ? ac.report.r_bound : 0.0;
    rows.push_back(row);
  }
  return rows;
}

void write_scaling_csv(const std::string& path, const std::vector<ScalingRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << "index,lambda,n_domains,r_min,r_min_sqrt_lambda,r_bound\n";
  for (const auto& r : rows)
    out << strf("%d,%.12g,%d,%.12g,%.12g,%.12g\n", r.index, r.lambda, r.n_domains, r.r_min,
                r.r_min_sqrt_lambda, r.r_bound);
}

void write_scaling_svg(const std::string& path,
                       const std::vector<std::string>& series_names,
                       const std::vector<std::vector<ScalingRow>>& series) {
  if (series_names.size() != series.size())
    throw PreconditionViolation("one name per series");
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  std::vector<PlotSeries> plot;
  std::vector<double> lx, ly;
  for (std::size_t s = 0; s < series.size(); ++s) {
    PlotSeries ps;
    ps.name = series_names[s];
    ps.color = kColors[s % 4];
    for (const auto& row : series[s]) {
      if (row.r_min <= 0.0 || row.lambda <= 0.0) continue;
      ps.points.push_back({row.lambda, row.r_min});
      lx.push_back(std::log10(row.lambda));
      ly.push_back(std::log10(row.r_min));
    }
    plot.push_back(std::move(ps));
  }
  std::vector<PlotLine> lines;
  if (lx.size() >= 2) {
    const LinearFit fit = fit_line(lx, ly);
    PlotLine line;
    line.slope = fit.slope;
    line.intercept = fit.intercept;
    line.color = "#555555";
    line.label = strf("fit slope %.3f", fit.slope);
    lines.push_back(std::move(line));
  }
  write_loglog_plot(path, "smallest nodal inner radius vs eigenvalue", "lambda", "r_min",
                    plot, lines);
}

ChainSummaryRow chain_summary_row(const GridDomain& d, const EigenPair& pair, int index) {
  const ArgminChain ac = chain_on_pair(d, pair);
  ChainSummaryRow row;
  row.index = index;
  row.lambda = pair.lambda;
  row.n_domains = ac.n_domains;
  row.r_min = ac.r_min;
  if (ac.ran) {
    row.r_bound = ac.report.r_bound;
    row.beta_max = ac.report.beta_max_finite ? ac.report.beta_max : 0.0;
    row.gamma_min = ac.report.gamma_min;
    row.all_ok = ac.report.all_ok;
  }
  return row;
}

void write_chain_csv(const std::string& path, const std::vector<ChainSummaryRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << "lambda,n_domains,r_min,r_bound,beta_max,gamma_min,all_ok\n";
  for (const auto& r : rows)
    out << strf("%.12g,%d,%.12g,%.12g,%.12g,%.12g,%d\n", r.lambda, r.n_domains, r.r_min,
                r.r_bound, r.beta_max, r.gamma_min, r.all_ok ? 1 : 0);
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw PreconditionViolation("fit_line needs two matched samples");
  const double n = double(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw PreconditionViolation("fit_line: degenerate abscissae");
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

// ---------------------------------------------------------------------------
// acceptance suite plumbing

std::vector<double> mazya_random_suite(int n_trials, std::uint64_t seed) {
  const int res = 33;
  const GridDomain box = build_free_box(2, res);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_trials));
  for (int trial = 0; trial < n_trials; ++trial) {
    CounterRng rng(seed ^ 0x6d617a7961ull, static_cast<std::uint64_t>(trial));
    std::vector<std::uint8_t> obstacle(static_cast<std::size_t>(box.n_nodes()), 0);
    const int i0 = 2 + static_cast<int>(rng.next_double() * 25.0);
    const int j0 = 2 + static_cast<int>(rng.next_double() * 25.0);
    const int wi = 1 + static_cast<int>(rng.next_double() * 6.0);
    const int wj = 1 + static_cast<int>(rng.next_double() * 6.0);
    for (int i = i0; i < std::min(res - 2, i0 + wi); ++i)
      for (int j = j0; j < std::min(res - 2, j0 + wj); ++j)
        obstacle[static_cast<std::size_t>(box.node(i, j))] = 1;

    std::vector<double> u(static_cast<std::size_t>(box.n_nodes()));
    for (std::size_t i = 0; i < u.size(); ++i)
      u[i] = obstacle[i] ? 0.0 : rng.next_in(-1.0, 1.0);

    out.push_back(mazya_bound(box, obstacle, u).c_required);
  }
  return out;
}

CriterionResult run_criterion(int id, const ConstantsStore& store) {
  CriterionResult r{id, "", false, "", 0.0};
  Timer total;
  try {
    switch (id) {
      case 1: return c1_eigensolver_accuracy();
      case 2: return c2_inner_radius_scaling();
      case 3: return c3_inner_radius_upper(store);
      case 4: return c4_faber_krahn();
      case 5: return c5_cube_chain(store);
      case 6: return c6_capacity_oracles();
      case 7: return c7_beta_gamma_shape();
      case 8: return c8_projection_poincare();
      case 9: return c9_interval_lemma();
      case 10: return c10_harmonic_measure();
      case 11: return c11_exponents();
      default: throw PreconditionViolation("acceptance check id out of range");
    }
  } catch (const Error& e) {
    r.name = strf("check-%d", id);
    r.detail = strf("exception: %s", e.what());
    r.seconds = total.lap();
    return r;
  }
}

std::vector<CriterionResult> run_all_criteria(const ConstantsStore& store) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 11; ++id) out.push_back(run_criterion(id, store));
  return out;
}

CriterionResult run_determinism_criterion(const std::string& cli_path) {
  CriterionResult r{12, "determinism", false, "", 0.0};
  Timer total;
  namespace fs = std::filesystem;
  const fs::path base =
      fs::temp_directory_path() / strf("nodallab-determinism-%d", static_cast<int>(getpid()));
  std::error_code ec;
  fs::remove_all(base, ec);

  auto run_set = [&cli_path](const fs::path& dir) -> bool {
    fs::create_directories(dir);
    const std::string d = dir.string();
    const std::string exe = "\"" + cli_path + "\"";
    const std::vector<std::string> cmds = {
        exe + " spectrum --domain square --resolution 33 --k 3 --out \"" + d +
            "/spec\" > \"" + d + "/spectrum.out\" 2>&1",
        exe + " scaling --bundle \"" + d + "/spec.json\" --csv \"" + d +
            "/scaling.csv\" --svg \"" + d + "/scaling.svg\" > \"" + d + "/scaling.out\" 2>&1",
        exe + " chain --bundle \"" + d + "/spec.json\" --index 0 > \"" + d +
            "/chain.out\" 2>&1",
        exe + " nodal --bundle \"" + d + "/spec.json\" --index 2 --csv \"" + d +
            "/nodal.csv\" --svg \"" + d + "/nodal.svg\" > \"" + d + "/nodal.out\" 2>&1",
        exe + " capacity --shape annulus --r 0.25 --R 0.5 --resolution 65 > \"" + d +
            "/capacity.out\" 2>&1",
        exe + " harmonic --obstacle slit --r0 0.25 --samples 20000 --seed 3 > \"" + d +
            "/harmonic.out\" 2>&1",
    };
    for (const auto& c : cmds)
      if (std::system(c.c_str()) != 0) return false;
    return true;
  };

  // Rerun the identical command set into the identical paths and demand that
  // every produced byte (tables on stdout, bundles, sidecars, CSV, SVG) is
  // reproduced exactly.
  auto snapshot = [&base](std::map<fs::path, std::string>& out) {
    out.clear();
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };
    for (const auto& entry : fs::recursive_directory_iterator(base / "run"))
      if (entry.is_regular_file())
        out[fs::relative(entry.path(), base / "run")] = slurp(entry.path());
  };

  std::map<fs::path, std::string> first, second;
  const bool ok_a = run_set(base / "run");
  if (ok_a) snapshot(first);
  const bool ok_b = ok_a && run_set(base / "run");
  if (ok_b) snapshot(second);

  const int n_files = static_cast<int>(first.size());
  bool identical = ok_a && ok_b && first.size() == second.size();
  if (identical) {
    for (const auto& [p, bytes] : first) {
      const auto it = second.find(p);
      if (it == second.end() || it->second != bytes) {
        identical = false;
        r.detail = strf("mismatch at %s ", p.string().c_str());
        break;
      }
    }
  }
  fs::remove_all(base, ec);
  r.pass = identical && n_files >= 10;
  r.detail += strf("commands_ok=%d files=%d", (ok_a && ok_b) ? 1 : 0, n_files);
  r.seconds = total.lap();
  return r;
}

void fit_constants(ConstantsStore& store) {
  store.set(kConstInradSuiteMax, five_suite_max_product(),
            "max of lambda1 * inner_radius^2 over the five-domain suite at resolution 257");
  store.set(kConstChainBetaC2, chain_beta_c2_sup(),
            "sup of beta_cube / log(1/gamma) over the chain acceptance set");
  const auto cs = mazya_random_suite(50);
  store.set(kConstMazyaCSup, *std::max_element(cs.begin(), cs.end()),
            "sup of the smallest admissible constant over the randomized capacity suite");
}

std::string format_criterion_line(const CriterionResult& r) {
  return strf("%s %2d  %-26s [%8.2f s]  %s", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
              r.seconds, r.detail.c_str());
}

}  // namespace nodallab
