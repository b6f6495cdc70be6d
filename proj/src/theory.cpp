#include "kpr/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kpr {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kSqrtTwoPi = 2.5066282746310005024157652848110;
}  // namespace

MismatchReport mismatch_set(const SensingPool& pool, const Signal& x_star,
                            const Signal& x) {
  if (pool.n() != static_cast<long>(x_star.size()) || x_star.size() != x.size())
    throw dimension_error("mismatch_set: dimension mismatch");

  // e = x - x*; when the signs differ, |a^T e| = |a^T x| + |a^T x*| >= |a^T x*|,
  // so the subset condition is exact algebra (ties exactly when a^T x = 0).
  Signal e(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) e[i] = x[i] - x_star[i];

  MismatchReport rep;
  for (long k = 0; k < pool.m(); ++k) {
    const auto a = pool.row(k);
    const double axs = dot(a, x_star);
    const double ax = dot(a, x);
    if (sgn(axs) != sgn(ax)) {
      rep.indices.push_back(static_cast<std::uint32_t>(k));
      const double lhs = std::abs(axs);
      const double rhs = std::abs(dot(a, e));
      if (lhs == rhs) ++rep.ties;  // measure-zero tie, tracked separately
      else if (lhs > rhs) rep.subset_ok = false;
    }
  }
  rep.beta = static_cast<double>(rep.indices.size()) / static_cast<double>(pool.n());
  return rep;
}

double expected_step_sq_error(const SensingPool& pool, const MeasurementSet& meas,
                              const Signal& x_star, const Signal& x_prev) {
  if (pool.n() != static_cast<long>(x_star.size()) || x_star.size() != x_prev.size())
    throw dimension_error("expected_step_sq_error: dimension mismatch");
  if (static_cast<long>(meas.values.size()) != pool.m())
    throw dimension_error("expected_step_sq_error: measurement count != pool size");

  const double branch = closer_branch(x_prev, x_star);
  Signal e(x_prev.size());
  for (std::size_t i = 0; i < x_prev.size(); ++i)
    e[i] = x_prev[i] - branch * x_star[i];
  const double e_sq = sq_norm(e);

  const long m = pool.m();
  double proj_sum = 0.0, mismatch_sum = 0.0;
  for (long k = 0; k < m; ++k) {
    const auto a = pool.row(k);
    const double sq = pool.sq_norm_of(k);
    const double ae = dot(a, e);
    const double axs = branch * dot(a, x_star);
    const double b = sgn(axs) * sgn(dot(a, x_prev)) - 1.0;
    proj_sum += ae * ae / sq;
    mismatch_sum += axs * axs * b * b / sq;
  }
  return e_sq - proj_sum / m + mismatch_sum / m;
}

double q_function(double tau) { return 0.5 * std::erfc(tau / std::sqrt(2.0)); }

double tau_from_mass(double t) {
  if (!(t > 0.0 && t < 1.0))
    throw std::domain_error("tau_from_mass: t must be in (0, 1)");
  // f(tau) = 1 - 2Q(tau) - t is increasing; Newton with bisection safeguard
  double lo = 0.0, hi = 1.0;
  while (1.0 - 2.0 * q_function(hi) < t) hi *= 2.0;
  double tau = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = 1.0 - 2.0 * q_function(tau) - t;
    if (std::abs(f) < 1e-14) break;
    if (f < 0.0) lo = tau; else hi = tau;
    const double deriv = 2.0 / kSqrtTwoPi * std::exp(-0.5 * tau * tau);
    double next = tau - f / deriv;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    tau = next;
  }
  return tau;
}

double truncated_square_mean_limit(double t) {
  if (!(t > 0.0 && t <= 1.0))
    throw std::domain_error("truncated_square_mean_limit: t must be in (0, 1]");
  if (t == 1.0) return 1.0;  // tau = infinity: full second moment
  const double tau = tau_from_mass(t);
  return 1.0 - (1.0 / t) * (2.0 * tau / kSqrtTwoPi) * std::exp(-0.5 * tau * tau);
}

namespace {

double beta0_lhs(double alpha, double beta) {
  const double tau = tau_from_mass(beta / alpha);
  return 1.0 - (alpha / beta) * (2.0 * tau / kSqrtTwoPi) * std::exp(-0.5 * tau * tau);
}

double beta0_rhs_factor(double alpha, double beta) {
  const double s = 1.0 + 1.0 / std::sqrt(beta) + std::sqrt(2.0 * std::log(M_E * alpha / beta));
  return s * s;
}

}  // namespace

Beta0Result solve_beta0(double alpha, double err_ratio) {
  if (!(alpha > 0.0)) throw std::domain_error("solve_beta0: alpha must be positive");
  if (err_ratio < 0.0) throw std::domain_error("solve_beta0: err_ratio must be nonnegative");
  if (err_ratio == 0.0) return {0.0, true};

  const double rho_sq = err_ratio * err_ratio;
  auto f = [&](double beta) {
    return beta0_lhs(alpha, beta) - rho_sq * beta0_rhs_factor(alpha, beta);
  };

  double lo = 1e-12 * alpha;
  double hi = alpha * (1.0 - 1e-12);
  const double flo = f(lo), fhi = f(hi);
  if (flo > 0.0 && fhi > 0.0) return {0.0, false};     // root below the bracket
  if (flo < 0.0 && fhi < 0.0) return {alpha, false};   // root above the bracket

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) lo = mid; else hi = mid;
  }
  return {0.5 * (lo + hi), true};
}

double c2_small_error(double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("c2_small_error: alpha must be positive");
  const double s = 1.0 - 1.0 / std::sqrt(alpha);
  return -3.0 / alpha + s * s;
}

double alpha0() { return 4.0 + 2.0 * std::sqrt(3.0); }

double c2_asymptotic(double alpha, double beta0) {
  if (!(alpha > 0.0)) throw std::domain_error("c2_asymptotic: alpha must be positive");
  if (beta0 < 0.0 || beta0 >= alpha)
    throw std::domain_error("c2_asymptotic: need 0 <= beta0 < alpha");
  if (beta0 < 1e-12) return c2_small_error(alpha);

  const double d = alpha - beta0;
  const double log_term = std::log(M_E * alpha / beta0);
  const double contraction = 1.0 - 1.0 / std::sqrt(d) - std::sqrt(2.0 * beta0 / d * log_term);
  const double expansion = 1.0 + 1.0 / std::sqrt(beta0) + std::sqrt(2.0 * log_term);
  return (d / alpha) * contraction * contraction -
         (3.0 * beta0 / alpha) * expansion * expansion;
}

double lower_bound_rate(double alpha, long n) {
  if (!(alpha > 0.0)) throw std::domain_error("lower_bound_rate: alpha must be positive");
  if (n < 1) throw std::domain_error("lower_bound_rate: n must be >= 1");
  const double s = 1.0 + 1.0 / std::sqrt(alpha);
  return 1.0 - s * s / static_cast<double>(n);
}

double log_binomial(long m, long k) {
  if (k < 0 || k > m) throw std::domain_error("log_binomial: need 0 <= k <= m");
  return std::lgamma(static_cast<double>(m) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(m - k) + 1.0);
}

FailureTerms failure_probability_terms(double alpha, long n, double beta0,
                                       double eps1, double eps2, double eps3) {
  if (!(eps1 > 0.0 && eps1 <= 1.0))
    throw std::domain_error("failure_probability_terms: need 0 < eps1 <= 1");
  if (!(eps2 > 0.0) || !(eps3 > 0.0))
    throw std::domain_error("failure_probability_terms: need eps2, eps3 > 0");
  if (!(beta0 >= 0.0 && beta0 < alpha))
    throw std::domain_error("failure_probability_terms: need 0 <= beta0 < alpha");
  if (n < 1) throw std::domain_error("failure_probability_terms: n must be >= 1");

  const long m = std::lround(alpha * static_cast<double>(n));
  const long k = std::lround(beta0 * static_cast<double>(n));
  const double nd = static_cast<double>(n);
  const double mismatch_count = beta0 * nd;
  const double match_count = (alpha - beta0) * nd;

  FailureTerms terms;
  terms.log_norm_term =
      std::log(2.0 * static_cast<double>(m)) - nd * (eps1 * eps1 / 4.0 - eps1 * eps1 * eps1 / 6.0);

  const double log_binom = log_binomial(m, k);
  // beta0 ln(e alpha / beta0) -> 0 as beta0 -> 0
  const double relaxed_log_binom =
      k == 0 ? 0.0 : mismatch_count * std::log(M_E * alpha / beta0);

  terms.log_mismatch_term = log_binom - mismatch_count * eps2 * eps2 / 2.0;
  terms.relaxed_log_mismatch_term = relaxed_log_binom - mismatch_count * eps2 * eps2 / 2.0;
  terms.log_match_term = log_binom - match_count * eps3 * eps3 / 2.0;
  terms.relaxed_log_match_term = relaxed_log_binom - match_count * eps3 * eps3 / 2.0;
  return terms;
}

TheoryBounds compute_bounds(double alpha, long n, double err_ratio, double eps1,
                            double eps2, double eps3) {
  TheoryBounds tb;
  tb.alpha = alpha;
  tb.n = n;
  tb.err_ratio = err_ratio;
  tb.beta0 = solve_beta0(alpha, err_ratio).beta0;
  tb.c2_small_err = c2_small_error(alpha);
  tb.alpha0 = kpr::alpha0();
  tb.lower_rate = lower_bound_rate(alpha, n);
  if (tb.beta0 < alpha) {
    tb.c2_asym = c2_asymptotic(alpha, tb.beta0);
  } else {
    tb.c2_asym = -std::numeric_limits<double>::infinity();
  }
  tb.upper_rate = 1.0 - tb.c2_asym / static_cast<double>(n);
  tb.log_failure_terms =
      failure_probability_terms(alpha, n, std::min(tb.beta0, alpha * (1.0 - 1e-12)),
                                eps1, eps2, eps3);
  return tb;
}

}  // namespace kpr
