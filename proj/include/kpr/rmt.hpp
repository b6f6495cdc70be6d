#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>

namespace kpr {

// Result of one empirical lemma verification. For bound-style checks the
// verdict compares the violation rate against exp(log_failure_bound) plus a
// 3-sigma Monte Carlo slack; a vacuous bound (>= 1) always passes. For
// limit-style checks (order statistics, expectation oracle) statistic/target/
// tolerance carry the comparison instead.
struct LemmaReport {
  std::string name;
  std::string params;
  long trials = 0;
  long violations = 0;
  double log_failure_bound = -std::numeric_limits<double>::infinity();
  double empirical_rate = 0.0;
  double statistic = std::numeric_limits<double>::quiet_NaN();
  double target = std::numeric_limits<double>::quiet_NaN();
  double tolerance = std::numeric_limits<double>::quiet_NaN();
  bool pass = false;
};

// verdict rule shared by the bound-style checks
bool bound_verdict(double empirical_rate, long trials, double log_failure_bound);

// Lemma: |  ||a||^2 / n - 1 | < eps fails with probability at most
// 2 exp(-n (eps^2/4 - eps^3/6)) for a standard Gaussian n-vector.
LemmaReport check_norm_concentration(long n, long trials, double eps,
                                     std::uint64_t seed);

// Extreme eigenvalues of Sigma = (1/p) sum of p Gaussian outer products, via
// singular values of the n x p stack. Fixed index set per trial; the
// union-over-subsets combinatorial factor is evaluated analytically in the
// theory module, not sampled. Returns (lambda_max report, lambda_min report);
// the min side requires p >= n and is vacuous when 1 - sqrt(n/p) - eps < 0.
std::pair<LemmaReport, LemmaReport> check_extremal_eigs(long n, long p, long trials,
                                                        double eps,
                                                        std::uint64_t seed);

// Mean of the smallest floor(t m) squared Gaussians out of m, against the
// truncated second-moment limit; band 3/sqrt(m) + 3/sqrt(trials).
LemmaReport check_order_stats(long m, double t, long trials, std::uint64_t seed);

// Per-step identities on random instances: the squared-error recursion, the
// mismatch subset condition, and agreement of the enumerated index expectation
// with the mean of per-index outcomes.
LemmaReport check_step_identities(long n, double alpha, long trials,
                                  std::uint64_t seed);

// Empirical mean of `draws` independent single-step squared errors against the
// exact enumerated expectation, per instance; an instance violates when the
// mean falls outside 4 standard errors. Passes when at most 1 in 20 violates.
LemmaReport check_expectation_oracle(long n, long m, long instances, long draws,
                                     std::uint64_t seed);

}  // namespace kpr
