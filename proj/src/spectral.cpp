#include "kpr/spectral.hpp"

#include <cmath>

#include "kpr/errors.hpp"
#include "kpr/rng.hpp"

namespace kpr {

namespace {

// w = D v with D = (1/m) sum_r y_r^2 a_r a_r^T, never materializing D
void apply_weighted_cov(const SensingPool& pool, const MeasurementSet& meas,
                        const std::vector<double>& v, std::vector<double>& w) {
  const long n = pool.n();
  const long m = pool.m();
  w.assign(n, 0.0);
  for (long r = 0; r < m; ++r) {
    const auto a = pool.row(r);
    const double c = meas.values[r] * meas.values[r] * dot(a, v) / static_cast<double>(m);
    for (long i = 0; i < n; ++i) w[i] += c * a[i];
  }
}

void normalize(std::vector<double>& v) {
  const double nrm = std::sqrt(sq_norm(v));
  for (auto& e : v) e /= nrm;
}

}  // namespace

InitResult spectral_init(const SensingPool& pool, const MeasurementSet& meas,
                         const InitConfig& cfg) {
  const long n = pool.n();
  const long m = pool.m();
  if (static_cast<long>(meas.values.size()) != m)
    throw dimension_error("spectral_init: measurement count != pool size");
  if (cfg.max_power_iters < 1 || cfg.tol <= 0.0 || cfg.tol >= 1.0)
    throw std::invalid_argument("spectral_init: bad InitConfig");

  double sum_y2 = 0.0;
  for (double y : meas.values) sum_y2 += y * y;
  if (sum_y2 <= 0.0)
    throw degenerate_input_error("spectral_init: all measurements are zero");

  InitResult res;
  std::vector<double> v(n), w;
  Rng rng(cfg.seed);
  for (auto& e : v) e = rng.normal();
  normalize(v);

  for (int sweep = 0; sweep < cfg.max_power_iters; ++sweep) {
    apply_weighted_cov(pool, meas, v, w);
    const double lambda = dot(w, v);
    double resid = 0.0;
    for (long i = 0; i < n; ++i) {
      const double d = w[i] - lambda * v[i];
      resid += d * d;
    }
    res.residuals.push_back(std::sqrt(resid));

    normalize(w);
    // eigenvector change up to sign
    double dm = 0.0, dp = 0.0;
    for (long i = 0; i < n; ++i) {
      dm += (w[i] - v[i]) * (w[i] - v[i]);
      dp += (w[i] + v[i]) * (w[i] + v[i]);
    }
    const double change = std::sqrt(dm < dp ? dm : dp);
    v = w;
    res.sweeps = sweep + 1;
    if (change < cfg.tol) {
      res.converged = true;
      break;
    }
  }

  const double scale = std::sqrt(sum_y2 / static_cast<double>(m));
  res.x0 = v;
  for (auto& e : res.x0) e *= scale;
  return res;
}

}  // namespace kpr
