#include "kpr/rmt.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "kpr/kaczmarz.hpp"
#include "kpr/model.hpp"
#include "kpr/rng.hpp"
#include "kpr/theory.hpp"

namespace kpr {

bool bound_verdict(double empirical_rate, long trials, double log_failure_bound) {
  if (log_failure_bound >= 0.0) return true;  // vacuous bound
  const double slack =
      3.0 * std::sqrt(empirical_rate * (1.0 - empirical_rate) / static_cast<double>(trials));
  return empirical_rate <= std::exp(log_failure_bound) + slack;
}

LemmaReport check_norm_concentration(long n, long trials, double eps,
                                     std::uint64_t seed) {
  if (n < 1 || trials < 1)
    throw std::domain_error("check_norm_concentration: n, trials must be >= 1");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("check_norm_concentration: need 0 < eps < 1");

  LemmaReport rep;
  rep.name = "norm_concentration";
  rep.trials = trials;
  {
    std::ostringstream os;
    os << "n=" << n << " eps=" << eps;
    rep.params = os.str();
  }
  for (long t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    double sq = 0.0;
    for (long i = 0; i < n; ++i) {
      const double v = rng.normal();
      sq += v * v;
    }
    if (std::abs(sq / static_cast<double>(n) - 1.0) >= eps) ++rep.violations;
  }
  rep.empirical_rate = static_cast<double>(rep.violations) / trials;
  rep.log_failure_bound =
      std::log(2.0) - static_cast<double>(n) * (eps * eps / 4.0 - eps * eps * eps / 6.0);
  rep.pass = bound_verdict(rep.empirical_rate, trials, rep.log_failure_bound);
  return rep;
}

std::pair<LemmaReport, LemmaReport> check_extremal_eigs(long n, long p, long trials,
                                                        double eps,
                                                        std::uint64_t seed) {
  if (n < 1 || p < 1 || trials < 1)
    throw std::domain_error("check_extremal_eigs: n, p, trials must be >= 1");
  if (!(eps > 0.0)) throw std::domain_error("check_extremal_eigs: need eps > 0");
  if (p < n)
    throw std::domain_error("check_extremal_eigs: min-eigenvalue check needs p >= n");

  const double ratio = std::sqrt(static_cast<double>(n) / static_cast<double>(p));
  const double max_bound = (1.0 + ratio + eps) * (1.0 + ratio + eps);
  const double min_edge = 1.0 - ratio - eps;
  const bool min_vacuous = min_edge < 0.0;  // s_min >= negative is trivially true
  const double min_bound = min_edge * min_edge;

  LemmaReport rep_max, rep_min;
  rep_max.name = "lambda_max";
  rep_min.name = "lambda_min";
  {
    std::ostringstream os;
    os << "n=" << n << " p=" << p << " eps=" << eps;
    rep_max.params = os.str();
    rep_min.params = os.str() + (min_vacuous ? " (vacuous)" : "");
  }
  rep_max.trials = rep_min.trials = trials;

  Eigen::MatrixXd a(n, p);
  for (long t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    for (long j = 0; j < p; ++j)
      for (long i = 0; i < n; ++i) a(i, j) = rng.normal();
    // singular values of the n x p stack; lambda = s^2 / p
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    const double lam_max = s(0) * s(0) / static_cast<double>(p);
    const double lam_min = s(s.size() - 1) * s(s.size() - 1) / static_cast<double>(p);
    if (lam_max > max_bound) ++rep_max.violations;
    if (!min_vacuous && lam_min < min_bound) ++rep_min.violations;
  }

  const double log_per_side = -static_cast<double>(p) * eps * eps / 2.0;
  rep_max.empirical_rate = static_cast<double>(rep_max.violations) / trials;
  rep_max.log_failure_bound = log_per_side;
  rep_max.pass = bound_verdict(rep_max.empirical_rate, trials, rep_max.log_failure_bound);

  rep_min.empirical_rate = static_cast<double>(rep_min.violations) / trials;
  rep_min.log_failure_bound = min_vacuous ? 0.0 : log_per_side;
  rep_min.pass = bound_verdict(rep_min.empirical_rate, trials, rep_min.log_failure_bound);
  return {rep_max, rep_min};
}

LemmaReport check_order_stats(long m, double t, long trials, std::uint64_t seed) {
  if (m < 10) throw std::domain_error("check_order_stats: m must be >= 10");
  if (!(t > 0.0 && t <= 1.0))
    throw std::domain_error("check_order_stats: t must be in (0, 1]");
  if (trials < 1) throw std::domain_error("check_order_stats: trials must be >= 1");

  const long count = std::max<long>(1, static_cast<long>(t * static_cast<double>(m)));
  std::vector<double> sq(m);
  double acc = 0.0;
  for (long trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, trial));
    for (auto& v : sq) {
      const double g = rng.normal();
      v = g * g;
    }
    std::nth_element(sq.begin(), sq.begin() + (count - 1), sq.end());
    double s = 0.0;
    for (long i = 0; i < count; ++i) s += sq[i];
    acc += s / static_cast<double>(count);
  }

  LemmaReport rep;
  rep.name = "order_stats";
  {
    std::ostringstream os;
    os << "m=" << m << " t=" << t;
    rep.params = os.str();
  }
  rep.trials = trials;
  rep.statistic = acc / static_cast<double>(trials);
  rep.target = truncated_square_mean_limit(t);
  rep.tolerance = 3.0 / std::sqrt(static_cast<double>(m)) +
                  3.0 / std::sqrt(static_cast<double>(trials));
  rep.violations = std::abs(rep.statistic - rep.target) > rep.tolerance ? 1 : 0;
  rep.empirical_rate = static_cast<double>(rep.violations);
  rep.pass = rep.violations == 0;
  return rep;
}

LemmaReport check_step_identities(long n, double alpha, long trials,
                                  std::uint64_t seed) {
  if (n < 2) throw std::domain_error("check_step_identities: n must be >= 2");
  if (trials < 1) throw std::domain_error("check_step_identities: trials must be >= 1");
  const long m = std::lround(alpha * static_cast<double>(n));

  LemmaReport rep;
  rep.name = "step_identities";
  {
    std::ostringstream os;
    os << "n=" << n << " alpha=" << alpha;
    rep.params = os.str();
  }
  rep.trials = trials;

  for (long trial = 0; trial < trials; ++trial) {
    const std::uint64_t tseed = derive_seed(seed, trial);
    const auto pool = SensingPool::generate(n, m, derive_seed(tseed, 0));
    Rng rng(derive_seed(tseed, 1));
    Signal x_star(n), x_prev(n);
    for (auto& v : x_star) v = rng.normal();
    for (auto& v : x_prev) v = rng.normal();
    const auto meas = measure(pool, x_star);

    const double branch = closer_branch(x_prev, x_star);
    Signal xs(n), e(n);
    for (long i = 0; i < n; ++i) {
      xs[i] = branch * x_star[i];
      e[i] = x_prev[i] - xs[i];
    }
    const double e_sq = sq_norm(e);

    bool bad = false;
    double sum_actual = 0.0;
    for (long k = 0; k < m; ++k) {
      const auto a = pool.row(k);
      const double sq = pool.sq_norm_of(k);
      const double ae = dot(a, e);
      const double axs = dot(a, xs);
      const double b = sgn(axs) * sgn(dot(a, x_prev)) - 1.0;
      const double predicted = e_sq - ae * ae / sq + axs * axs * b * b / sq;

      const auto x_next = sikm_step(x_prev, a, sq, meas.values[k]);
      double actual = 0.0;
      for (long i = 0; i < n; ++i) {
        const double d = x_next[i] - xs[i];
        actual += d * d;
      }
      sum_actual += actual;

      // (i) squared-error recursion, rounding-only tolerance
      const double scale = std::max({predicted, actual, 1e-300});
      if (std::abs(actual - predicted) / scale > 1e-9) bad = true;
      // (ii) subset condition: sign mismatch implies |a^T x*| <= |a^T e|
      const double e_raw = dot(a, x_prev) - dot(a, x_star);
      if (sgn(dot(a, x_star)) != sgn(dot(a, x_prev)) &&
          std::abs(dot(a, x_star)) > std::abs(e_raw))
        bad = true;
    }
    // (iii) enumerated expectation vs mean of per-index outcomes
    const double expect = expected_step_sq_error(pool, meas, x_star, x_prev);
    const double mean_actual = sum_actual / static_cast<double>(m);
    if (std::abs(expect - mean_actual) / std::max(expect, 1e-300) > 1e-10) bad = true;

    if (bad) ++rep.violations;
  }

  rep.empirical_rate = static_cast<double>(rep.violations) / trials;
  rep.pass = rep.violations == 0;
  return rep;
}

LemmaReport check_expectation_oracle(long n, long m, long instances, long draws,
                                     std::uint64_t seed) {
  if (n < 1 || m < 1 || instances < 1 || draws < 2)
    throw std::domain_error("check_expectation_oracle: bad parameters");

  LemmaReport rep;
  rep.name = "expectation_oracle";
  {
    std::ostringstream os;
    os << "n=" << n << " m=" << m << " draws=" << draws;
    rep.params = os.str();
  }
  rep.trials = instances;

  for (long inst = 0; inst < instances; ++inst) {
    const std::uint64_t iseed = derive_seed(seed, inst);
    const auto pool = SensingPool::generate(n, m, derive_seed(iseed, 0));
    Rng rng(derive_seed(iseed, 1));
    Signal x_star(n), x_prev(n);
    for (auto& v : x_star) v = rng.normal();
    for (auto& v : x_prev) v = rng.normal();
    const auto meas = measure(pool, x_star);

    const double exact = expected_step_sq_error(pool, meas, x_star, x_prev);
    const double branch = closer_branch(x_prev, x_star);
    Signal xs(n);
    for (long i = 0; i < n; ++i) xs[i] = branch * x_star[i];

    Rng draw_rng(derive_seed(iseed, 2));
    double sum = 0.0, sum_sq = 0.0;
    for (long d = 0; d < draws; ++d) {
      const auto r = static_cast<long>(draw_rng.below(static_cast<std::uint64_t>(m)));
      const auto x_next = sikm_step(x_prev, pool.row(r), pool.sq_norm_of(r), meas.values[r]);
      double v = 0.0;
      for (long i = 0; i < n; ++i) {
        const double e = x_next[i] - xs[i];
        v += e * e;
      }
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / static_cast<double>(draws);
    const double var =
        std::max(0.0, sum_sq / static_cast<double>(draws) - mean * mean);
    const double se = std::sqrt(var / static_cast<double>(draws));
    if (std::abs(mean - exact) > 4.0 * se) ++rep.violations;
  }

  rep.empirical_rate = static_cast<double>(rep.violations) / instances;
  rep.pass = rep.violations * 20 <= instances;
  return rep;
}

}  // namespace kpr
