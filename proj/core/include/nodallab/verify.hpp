#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nodallab/chain.hpp"
#include "nodallab/constants_store.hpp"
#include "nodallab/eigensolve.hpp"
#include "nodallab/grid.hpp"
#include "nodallab/poincare.hpp"

namespace nodallab {

/// Keys of the fitted suite constants frozen in the constants file.
inline constexpr const char* kConstInradSuiteMax = "inrad_lambda_suite_max";
inline constexpr const char* kConstChainBetaC2 = "chain_beta_log_c2";
inline constexpr const char* kConstMazyaCSup = "mazya_c_required_sup";

/// One row of the wavelength-scaling experiment: an eigenpair, its nodal
/// decomposition, the smallest inner radius over the nodal domains, and the
/// cube-chain lower bound for the domain realizing that minimum.
struct ScalingRow {
  int index = 0;             ///< position in the bundle
  double lambda = 0.0;
  int n_domains = 0;
  double r_min = 0.0;
  double r_min_sqrt_lambda = 0.0;
  double r_bound = 0.0;      ///< 1/(4 sqrt(lambda beta_max)); 0 when untestable
};

/// Decompose every eigenpair of the bundle and measure the scaling data.
/// The chain runs on the domain with the smallest inner radius among those
/// with radius > spacing; rows with no such domain carry r_bound = 0.
std::vector<ScalingRow> scaling_rows(const GridDomain& d, const EigenBundle& bundle);

/// Header: index,lambda,n_domains,r_min,r_min_sqrt_lambda,r_bound
void write_scaling_csv(const std::string& path, const std::vector<ScalingRow>& rows);

/// Log-log plot of r_min against lambda, one colour per series, with the
/// least-squares power-law fit over all points drawn as a reference line.
void write_scaling_svg(const std::string& path,
                       const std::vector<std::string>& series_names,
                       const std::vector<std::vector<ScalingRow>>& series);

/// One row of the per-eigenfunction chain summary.
struct ChainSummaryRow {
  int index = 0;
  double lambda = 0.0;
  int n_domains = 0;
  double r_min = 0.0;
  double r_bound = 0.0;
  double beta_max = 0.0;
  double gamma_min = 0.0;
  bool all_ok = true;  ///< vacuously true when r_bound = 0 (chain skipped)
};

/// Run the chain on the smallest-radius testable domain of one eigenpair.
ChainSummaryRow chain_summary_row(const GridDomain& d, const EigenPair& pair, int index);

/// Header: lambda,n_domains,r_min,r_bound,beta_max,gamma_min,all_ok
void write_chain_csv(const std::string& path, const std::vector<ChainSummaryRow>& rows);

/// Least-squares line through (x, y).
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Outcome of one acceptance check.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;   ///< key measured quantities, fixed formatting
  double seconds = 0.0;
};

/// Randomized capacity-weighted Poincare suite shared by the property tests
/// and the constant-fitting pass: deterministic trials of random obstacles
/// and random admissible functions; returns the per-trial smallest
/// admissible constants.
std::vector<double> mazya_random_suite(int n_trials, std::uint64_t seed = 1);

/// Acceptance checks 1..11 (12, byte-identical reruns, needs the command
/// line binary and lives next to it).  `store` supplies the frozen fitted
/// constants; missing constants fail the checks that need them.
CriterionResult run_criterion(int id, const ConstantsStore& store);
std::vector<CriterionResult> run_all_criteria(const ConstantsStore& store);

/// Acceptance check 12: rerun a fixed set of commands twice through the
/// actual binary at `cli_path` and require byte-identical artifacts.
CriterionResult run_determinism_criterion(const std::string& cli_path);

/// Recompute the fitted suite constants (deterministic) and store them.
void fit_constants(ConstantsStore& store);

/// "PASS  3  inner-radius-upper-bound  [1.23 s]  detail..." formatting used
/// by the acceptance binary and the umbrella verification command.
std::string format_criterion_line(const CriterionResult& r);

}  // namespace nodallab
