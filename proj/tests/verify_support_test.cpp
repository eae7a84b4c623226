// Support pieces of the acceptance suite: fits, csv writers, constants.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "nodallab/eigensolve.hpp"
#include "nodallab/grid.hpp"
#include "nodallab/laplacian.hpp"
#include "nodallab/nodal.hpp"
#include "nodallab/verify.hpp"

using namespace nodallab;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("least-squares line recovers exact affine data") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y{-2.0, 1.0, 4.0, 7.0, 10.0};
  const LinearFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK_THROWS_AS((void)fit_line({1.0}, {2.0}), PreconditionViolation);
  CHECK_THROWS_AS((void)fit_line({1.0, 1.0}, {2.0, 3.0}), PreconditionViolation);
  CHECK_THROWS_AS((void)fit_line({1.0, 2.0}, {2.0}), PreconditionViolation);
}

TEST_CASE("constants store: set, save, load, resolve") {
  namespace fs = std::filesystem;
  const fs::path p = fs::temp_directory_path() / "nodallab_constants_test.json";
  ConstantsStore store;
  CHECK(!store.has("alpha"));
  CHECK_THROWS_AS((void)store.get("alpha"), PreconditionViolation);
  store.set("alpha", 1.25, "test note");
  store.set("beta", -3.5, "second");
  store.save(p.string());

  const ConstantsStore loaded = ConstantsStore::load(p.string());
  CHECK(loaded.has("alpha"));
  CHECK(loaded.get("alpha") == 1.25);
  CHECK(loaded.get("beta") == -3.5);
  const auto found = loaded.find("alpha");
  REQUIRE(found.has_value());
  CHECK(found->note == "test note");
  CHECK(!loaded.find("gamma").has_value());

  // resolution order: explicit beats the environment beats the default
  CHECK(ConstantsStore::resolve_path(p.string()) == p.string());
  setenv("NODAL_LAB_CONSTANTS", "/tmp/env_override.json", 1);
  CHECK(ConstantsStore::resolve_path() == "/tmp/env_override.json");
  CHECK(ConstantsStore::resolve_path(p.string()) == p.string());
  unsetenv("NODAL_LAB_CONSTANTS");
  CHECK(ConstantsStore::resolve_path() == default_constants_path());

  // a missing file is an empty store, not an error
  const ConstantsStore none = ConstantsStore::load("/nonexistent/constants.json");
  CHECK(none.all().empty());
  fs::remove(p);
}

TEST_CASE("scaling rows measure each eigenpair of a bundle") {
  const GridDomain d = build_domain(DomainKind::square, 33);
  const SparseSymOp op = assemble_laplacian(d);
  EigenBundle bundle;
  bundle.domain = d;
  bundle.pairs = smallest_eigenpairs(op, 4);
  const auto rows = scaling_rows(d, bundle);
  REQUIRE(rows.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(rows[i].index == i);
    CHECK(rows[i].lambda == bundle.pairs[static_cast<std::size_t>(i)].lambda);
    CHECK(rows[i].n_domains >= 1);
    CHECK(rows[i].r_min > 0.0);
    CHECK(rows[i].r_min_sqrt_lambda ==
          doctest::Approx(rows[i].r_min * std::sqrt(rows[i].lambda)).epsilon(1e-12));
  }
  // ground state: one cell spanning the square
  CHECK(rows[0].n_domains == 1);
  const auto dec = extract_nodal_domains(d, to_std(bundle.pairs[0].phi), 1e-9);
  CHECK(rows[0].r_min == doctest::Approx(dec.domains[0].inner_radius).epsilon(1e-12));
}

TEST_CASE("scaling csv format") {
  namespace fs = std::filesystem;
  std::vector<ScalingRow> rows(2);
  rows[0] = {0, 19.5, 1, 0.46875, 2.0700228, 0.1};
  rows[1] = {1, 49.25, 2, 0.234, 1.642, 0.05};
  const fs::path p = fs::temp_directory_path() / "nodallab_scaling.csv";
  write_scaling_csv(p.string(), rows);
  std::ifstream in(p.string());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "index,lambda,n_domains,r_min,r_min_sqrt_lambda,r_bound");
  REQUIRE(std::getline(in, line));
  CHECK(line == "0,19.5,1,0.46875,2.0700228,0.1");
  REQUIRE(std::getline(in, line));
  CHECK(line == "1,49.25,2,0.234,1.642,0.05");
  fs::remove(p);
}

TEST_CASE("scaling svg is drawable") {
  namespace fs = std::filesystem;
  const GridDomain d = build_domain(DomainKind::square, 33);
  const SparseSymOp op = assemble_laplacian(d);
  EigenBundle bundle;
  bundle.domain = d;
  bundle.pairs = smallest_eigenpairs(op, 6);
  const auto rows = scaling_rows(d, bundle);
  const fs::path p = fs::temp_directory_path() / "nodallab_scaling.svg";
  write_scaling_svg(p.string(), {"square"}, {rows});
  const std::string text = slurp(p.string());
  CHECK(text.find("<svg") != std::string::npos);
  CHECK(text.find("fit slope") != std::string::npos);
  fs::remove(p);
}

TEST_CASE("chain summary rows and csv format") {
  namespace fs = std::filesystem;
  const GridDomain d = build_domain(DomainKind::square, 65);
  const SparseSymOp op = assemble_laplacian(d);
  const auto pairs = smallest_eigenpairs(op, 6);
  std::vector<ChainSummaryRow> rows;
  for (int i = 0; i < 6; ++i)
    rows.push_back(chain_summary_row(d, pairs[static_cast<std::size_t>(i)], i));
  for (const auto& row : rows) {
    CHECK(row.all_ok);
    CHECK(row.lambda > 0.0);
    if (row.r_bound > 0.0) {
      CHECK(row.r_bound <= row.r_min);
      CHECK(row.beta_max > 0.0);
      CHECK(row.gamma_min > 0.0);
    }
  }
  // the excited modes are testable at this resolution
  CHECK(rows[5].r_bound > 0.0);
  const fs::path p = fs::temp_directory_path() / "nodallab_chain.csv";
  write_chain_csv(p.string(), rows);
  std::ifstream in(p.string());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "lambda,n_domains,r_min,r_bound,beta_max,gamma_min,all_ok");
  int n = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  CHECK(n == 6);
  fs::remove(p);
}

TEST_CASE("criterion lines format PASS and FAIL uniformly") {
  CriterionResult r;
  r.id = 3;
  r.name = "inner-radius-upper-bound";
  r.pass = true;
  r.detail = "max 5.78";
  r.seconds = 1.234;
  const std::string line = format_criterion_line(r);
  CHECK(line.rfind("PASS", 0) == 0);
  CHECK(line.find("inner-radius-upper-bound") != std::string::npos);
  CHECK(line.find("max 5.78") != std::string::npos);
  r.pass = false;
  CHECK(format_criterion_line(r).rfind("FAIL", 0) == 0);
}

TEST_CASE("random admissible-function suite is deterministic") {
  const auto a = mazya_random_suite(10, 7);
  const auto b = mazya_random_suite(10, 7);
  CHECK(a == b);
  const auto c = mazya_random_suite(10, 8);
  CHECK(a != c);
}
