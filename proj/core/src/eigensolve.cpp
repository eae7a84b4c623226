#include "nodallab/eigensolve.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <json.hpp>

#include "nodallab/errors.hpp"
#include "nodallab/rng.hpp"

namespace nodallab {

namespace {

// ||L x - theta M x||_{M^{-1}}
double pair_residual(const SparseSymOp& op, const Eigen::VectorXd& lx, double theta,
                     const Eigen::VectorXd& x) {
  Eigen::VectorXd r = lx - theta * op.mass.cwiseProduct(x);
  return std::sqrt(r.cwiseQuotient(op.mass).dot(r));
}

void flip_sign_canonical(Eigen::VectorXd& v) {
  Eigen::Index at = 0;
  double best = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      at = i;
    }
  }
  if (v[at] < 0) v = -v;
}

// In-place mass-orthonormalization by Gram Cholesky; deterministically
// re-perturbs near-dependent columns and retries.
void mass_orthonormalize(const SparseSymOp& op, Eigen::MatrixXd& x, std::uint64_t seed,
                         std::uint64_t& perturb_counter) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::MatrixXd mx = op.mass.asDiagonal() * x;
    Eigen::MatrixXd g = x.transpose() * mx;
    g = 0.5 * (g + g.transpose()).eval();
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() == Eigen::Success) {
      // x <- x R^{-1} with g = R^T R
      Eigen::MatrixXd r = llt.matrixU();
      x = r.transpose().triangularView<Eigen::Lower>().solve(x.transpose()).transpose();
      return;
    }
    // rank loss: refresh with a deterministic perturbation and try again
    const double scale = std::sqrt(1.0 / op.mass.sum());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      CounterRng rng(seed ^ 0x706572747572ull, ++perturb_counter);
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        x(i, c) += 1e-8 * scale * (2.0 * rng.next_double() - 1.0);
    }
  }
  throw NonConvergence("mass orthonormalization failed: block is numerically degenerate");
}

std::vector<EigenPair> dense_eigenpairs(const SparseSymOp& op, int k) {
  const Eigen::Index n = op.n();
  Eigen::MatrixXd l = Eigen::MatrixXd(op.stiffness);
  Eigen::VectorXd mhalf = op.mass.cwiseSqrt();
  Eigen::MatrixXd b = mhalf.cwiseInverse().asDiagonal() * l * mhalf.cwiseInverse().asDiagonal();
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  if (es.info() != Eigen::Success) throw NonConvergence("dense eigensolve failed");
  std::vector<EigenPair> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    EigenPair p;
    p.phi = mhalf.cwiseInverse().asDiagonal() * es.eigenvectors().col(j);
    p.phi /= std::sqrt(op.mass_norm_sq(p.phi));
    flip_sign_canonical(p.phi);
    p.lambda = es.eigenvalues()[j];
    p.residual = pair_residual(op, op.stiffness * p.phi, p.lambda, p.phi);
    out.push_back(std::move(p));
  }
  (void)n;
  return out;
}

}  // namespace

std::vector<EigenPair> smallest_eigenpairs(const SparseSymOp& op, int k,
                                           const EigenOptions& opts) {
  const Eigen::Index n = op.n();
  if (k < 1) throw PreconditionViolation("smallest_eigenpairs: k must be >= 1");
  if (k > n) throw PreconditionViolation("smallest_eigenpairs: k exceeds active node count");
  if (!(opts.tol > 0)) throw PreconditionViolation("smallest_eigenpairs: tol must be > 0");

  if (n <= 192) return dense_eigenpairs(op, k);

  // Shift so the factorized matrix is definite even when constants are in
  // the kernel (torus / free box); Ritz values still come from L itself.
  double sigma = 0.0;
  if (!op.has_dirichlet_closure)
    sigma = 1e-3 * op.stiffness.diagonal().sum() / op.mass.sum();

  Eigen::SparseMatrix<double> kmat = op.stiffness;
  if (sigma != 0.0) {
    Eigen::VectorXd shift = sigma * op.mass;
    for (Eigen::Index i = 0; i < n; ++i) kmat.coeffRef(i, i) += shift[i];
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(kmat);
  if (ldlt.info() != Eigen::Success)
    throw NonConvergence("sparse factorization of the stiffness failed");

  const int b = static_cast<int>(std::min<Eigen::Index>(n, k + std::max(8, k / 2)));
  Eigen::MatrixXd x(n, b);
  for (int c = 0; c < b; ++c) {
    CounterRng rng(opts.seed, static_cast<std::uint64_t>(c));
    for (Eigen::Index i = 0; i < n; ++i) x(i, c) = 2.0 * rng.next_double() - 1.0;
  }
  std::uint64_t perturb_counter = 0;
  mass_orthonormalize(op, x, opts.seed, perturb_counter);

  Eigen::VectorXd ritz(b);
  Eigen::MatrixXd lx;
  bool done = false;
  for (int outer = 0; outer < opts.max_outer && !done; ++outer) {
    Eigen::MatrixXd y = ldlt.solve(op.mass.asDiagonal() * x);
    mass_orthonormalize(op, y, opts.seed, perturb_counter);
    Eigen::MatrixXd ly = op.stiffness * y;
    Eigen::MatrixXd s = y.transpose() * ly;
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    if (es.info() != Eigen::Success) throw NonConvergence("Rayleigh-Ritz eigensolve failed");
    x = y * es.eigenvectors();
    lx = ly * es.eigenvectors();
    ritz = es.eigenvalues();

    done = true;
    for (int j = 0; j < k; ++j) {
      const double res = pair_residual(op, lx.col(j), ritz[j], x.col(j));
      if (res > opts.tol * std::max(ritz[j], 1.0)) {
        done = false;
        break;
      }
    }
  }
  if (!done)
    throw NonConvergence("eigensolver: residual tolerance not reached within iteration budget");

  std::vector<EigenPair> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    EigenPair p;
    p.phi = x.col(j);
    p.phi /= std::sqrt(op.mass_norm_sq(p.phi));
    flip_sign_canonical(p.phi);
    p.lambda = ritz[j];
    p.residual = pair_residual(op, op.stiffness * p.phi, p.lambda, p.phi);
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// bundle io

static_assert(std::endian::native == std::endian::little,
              "eigenvector sidecars are raw little-endian float64");

namespace {

std::string sidecar_name(const std::string& stem, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, ".phi%03d.f64", index);
  return stem + buf;
}

}  // namespace

void save_bundle(const std::string& prefix, const GridDomain& d,
                 const std::vector<EigenPair>& pairs) {
  namespace fs = std::filesystem;
  const fs::path p(prefix);
  const std::string stem = p.filename().string();
  const fs::path dir = p.parent_path();

  d.save((dir / (stem + ".domain.json")).string());

  nlohmann::json j;
  j["domain_hash"] = d.hash_hex();
  j["domain_file"] = stem + ".domain.json";
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string phi_file = sidecar_name(stem, static_cast<int>(i));
    nlohmann::json e;
    e["lambda"] = pairs[i].lambda;
    e["residual"] = pairs[i].residual;
    e["phi_file"] = phi_file;
    arr.push_back(e);
    std::ofstream out(dir / phi_file, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + (dir / phi_file).string());
    out.write(reinterpret_cast<const char*>(pairs[i].phi.data()),
              static_cast<std::streamsize>(sizeof(double) * pairs[i].phi.size()));
  }
  j["pairs"] = arr;
  std::ofstream out(p.string() + ".json", std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + p.string() + ".json");
  out << j.dump(2) << "\n";
}

EigenBundle load_bundle(const std::string& json_path) {
  namespace fs = std::filesystem;
  std::ifstream in(json_path, std::ios::binary);
  if (!in) throw Error("cannot open for reading: " + json_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bundle JSON parse error: ") + e.what());
  }
  const fs::path dir = fs::path(json_path).parent_path();

  EigenBundle bundle;
  bundle.domain = GridDomain::load((dir / j.at("domain_file").get<std::string>()).string());
  if (bundle.domain.hash_hex() != j.at("domain_hash").get<std::string>())
    throw Error("bundle domain hash mismatch: file does not match manifest");

  const std::int64_t n = bundle.domain.n_active();
  for (const auto& e : j.at("pairs")) {
    EigenPair p;
    p.lambda = e.at("lambda").get<double>();
    p.residual = e.at("residual").get<double>();
    const std::string phi_file = e.at("phi_file").get<std::string>();
    std::ifstream pin(dir / phi_file, std::ios::binary);
    if (!pin) throw Error("cannot open sidecar: " + (dir / phi_file).string());
    p.phi.resize(n);
    pin.read(reinterpret_cast<char*>(p.phi.data()),
             static_cast<std::streamsize>(sizeof(double) * n));
    if (pin.gcount() != static_cast<std::streamsize>(sizeof(double) * n))
      throw Error("sidecar too short: " + phi_file);
    char extra;
    if (pin.read(&extra, 1)) throw Error("sidecar too long: " + phi_file);
    bundle.pairs.push_back(std::move(p));
  }
  return bundle;
}

}  // namespace nodallab
