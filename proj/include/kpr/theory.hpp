#pragma once

#include <vector>

#include "kpr/model.hpp"

namespace kpr {

struct MismatchReport {
  std::vector<std::uint32_t> indices;  // S = {k : sgn(a_k^T x*) != sgn(a_k^T x)}
  double beta = 0.0;                   // |S| / n
  bool subset_ok = true;               // S subset of {k : |a_k^T x*| <= |a_k^T e|}
  long ties = 0;                       // exact |a_k^T x*| == |a_k^T e| occurrences
};

MismatchReport mismatch_set(const SensingPool& pool, const Signal& x_star,
                            const Signal& x);

// Exact conditional expectation over the uniformly random index, with the pool
// and x_prev held fixed (no independence assumption): enumerates all m indices
// of the squared-error recursion. O(mn).
double expected_step_sq_error(const SensingPool& pool, const MeasurementSet& meas,
                              const Signal& x_star, const Signal& x_prev);

// Standard Gaussian tail probability Q(tau) = P(Z > tau)
double q_function(double tau);

// The tau with 1 - 2 Q(tau) = t, i.e. P(|Z| <= tau) = t; 0 < t < 1
double tau_from_mass(double t);

// Limit of the mean of the smallest t-fraction of squared standard Gaussians:
// 1 - (1/t)(2 tau / sqrt(2 pi)) exp(-tau^2 / 2), equal to
// (1/t) * integral of x^2 phi(x) over (-tau, tau). t in (0, 1]; 1 at t = 1.
double truncated_square_mean_limit(double t);

struct Beta0Result {
  double beta0 = 0.0;
  bool bracketed = true;  // false when the root equation has no sign change on (0, alpha)
};

// Root of the asymptotic mismatch-fraction fixed point
//   1 - (alpha/beta)(2 tau / sqrt(2 pi)) e^{-tau^2/2}
//     = (1 + 1/sqrt(beta) + sqrt(2 ln(e alpha / beta)))^2 * rho^2
// with tau = tau_from_mass(beta / alpha) and rho = ||e|| / ||x*||.
// Bisection on (0, alpha); the left side is increasing and the right side
// decreasing in beta. rho = 0 gives beta0 = 0.
Beta0Result solve_beta0(double alpha, double err_ratio);

// Asymptotic contraction constant; continuous at beta0 -> 0 where it reduces
// to c2_small_error(alpha).
double c2_asymptotic(double alpha, double beta0);

// Small-error approximation -3/alpha + (1 - 1/sqrt(alpha))^2
double c2_small_error(double alpha);

// Unique positive root of c2_small_error: (1 + sqrt(3))^2 = 4 + 2 sqrt(3)
double alpha0();

// Asymptotic per-iteration floor 1 - (1 + 1/sqrt(alpha))^2 / n
double lower_bound_rate(double alpha, long n);

double log_binomial(long m, long k);  // ln C(m, k) via lgamma

// ln of each failure term of the success-probability bound, all in log domain:
//   ln(2m) - n (e1^2/4 - e1^3/6)
//   ln C(m, beta0 n) - beta0 n e2^2 / 2      (+ the relaxed binomial form)
//   ln C(m, (alpha-beta0) n) - (alpha-beta0) n e3^2 / 2
struct FailureTerms {
  double log_norm_term = 0.0;
  double log_mismatch_term = 0.0;
  double log_match_term = 0.0;
  // binomial coefficient relaxed to (e alpha / beta0)^{beta0 n}
  double relaxed_log_mismatch_term = 0.0;
  double relaxed_log_match_term = 0.0;
};

FailureTerms failure_probability_terms(double alpha, long n, double beta0,
                                       double eps1, double eps2, double eps3);

struct TheoryBounds {
  double alpha = 0.0;
  long n = 0;
  double err_ratio = 0.0;
  double beta0 = 0.0;
  double c2_asym = 0.0;
  double c2_small_err = 0.0;
  double alpha0 = 0.0;
  double upper_rate = 0.0;  // 1 - c2_asym / n
  double lower_rate = 0.0;  // 1 - (1 + 1/sqrt(alpha))^2 / n
  FailureTerms log_failure_terms;
};

TheoryBounds compute_bounds(double alpha, long n, double err_ratio,
                            double eps1 = 0.5, double eps2 = 1.0, double eps3 = 1.0);

}  // namespace kpr
