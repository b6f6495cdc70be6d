#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "kpr/model.hpp"
#include "kpr/rng.hpp"
#include "kpr/spectral.hpp"

using namespace kpr;

TEST_CASE("basis pool diagonalizes by hand") {
  // rows = standard basis, x* = (3,1,0,0): D = diag(y_i^2)/m, top eigenvector e1,
  // scale sqrt(mean y^2) = sqrt(10/4)
  const auto pool = SensingPool::from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
  const Signal x_star{3.0, 1.0, 0.0, 0.0};
  const auto meas = measure(pool, x_star);
  const auto res = spectral_init(pool, meas, {});
  CHECK(res.converged);
  CHECK(std::abs(res.x0[0]) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-6));
  for (int i = 1; i < 4; ++i) CHECK(std::abs(res.x0[i]) < 1e-4);
}

TEST_CASE("output norm equals sqrt(mean y^2)") {
  const auto pool = SensingPool::generate(12, 60, 3);
  Rng rng(4);
  Signal x_star(12);
  for (auto& v : x_star) v = rng.normal();
  const auto meas = measure(pool, x_star);
  const auto res = spectral_init(pool, meas, {});
  double mean_y2 = 0.0;
  for (double y : meas.values) mean_y2 += y * y;
  mean_y2 /= static_cast<double>(pool.m());
  CHECK(std::sqrt(sq_norm(res.x0)) == doctest::Approx(std::sqrt(mean_y2)).epsilon(1e-12));
}

TEST_CASE("scaling the measurements scales x0") {
  const auto pool = SensingPool::generate(10, 50, 8);
  Rng rng(2);
  Signal x_star(10);
  for (auto& v : x_star) v = rng.normal();
  const auto meas = measure(pool, x_star);
  MeasurementSet scaled2 = meas, scaled15 = meas;
  for (auto& y : scaled2.values) y *= 2.0;
  for (auto& y : scaled15.values) y *= 1.5;

  const auto base = spectral_init(pool, meas, {});
  const auto twice = spectral_init(pool, scaled2, {});
  const auto mid = spectral_init(pool, scaled15, {});
  for (long i = 0; i < 10; ++i) {
    CHECK(twice.x0[i] == 2.0 * base.x0[i]);  // power-of-two scaling is exact
    CHECK(mid.x0[i] == doctest::Approx(1.5 * base.x0[i]).epsilon(1e-12));
  }
}

TEST_CASE("row permutation leaves x0 unchanged up to sign") {
  const auto pool = SensingPool::generate(8, 48, 13);
  Rng rng(6);
  Signal x_star(8);
  for (auto& v : x_star) v = rng.normal();
  const auto meas = measure(pool, x_star);

  std::vector<long> perm(pool.m());
  std::iota(perm.begin(), perm.end(), 0);
  Rng prng(99);
  for (long i = pool.m() - 1; i > 0; --i)
    std::swap(perm[i], perm[prng.below(static_cast<std::uint64_t>(i + 1))]);

  std::vector<std::vector<double>> rows;
  MeasurementSet pmeas;
  for (long r : perm) {
    const auto row = pool.row(r);
    rows.emplace_back(row.begin(), row.end());
    pmeas.values.push_back(meas.values[r]);
  }
  const auto ppool = SensingPool::from_rows(rows);

  const auto a = spectral_init(pool, meas, {});
  const auto b = spectral_init(ppool, pmeas, {});
  CHECK(phase_dist(a.x0, b.x0) < 1e-6 * std::sqrt(sq_norm(a.x0)));
}

TEST_CASE("power iteration drives the residual below tol") {
  const auto pool = SensingPool::generate(16, 160, 21);
  Rng rng(7);
  Signal x_star(16);
  for (auto& v : x_star) v = rng.normal();
  const auto meas = measure(pool, x_star);
  InitConfig cfg;
  const auto res = spectral_init(pool, meas, cfg);
  REQUIRE(res.residuals.size() >= 2);
  CHECK(res.converged);
  CHECK(res.residuals.back() <= 1e-4 * res.residuals.front());
  CHECK(res.sweeps == static_cast<long>(res.residuals.size()));
}

TEST_CASE("median alignment with the target at alpha = 12") {
  const long n = 64, m = 12 * n, trials = 200;
  std::vector<double> corr;
  for (long t = 0; t < trials; ++t) {
    const std::uint64_t seed = derive_seed(1001, t);
    const auto pool = SensingPool::generate(n, m, derive_seed(seed, 0));
    Rng rng(derive_seed(seed, 1));
    Signal x_star(n);
    for (auto& v : x_star) v = rng.normal();
    const auto meas = measure(pool, x_star);
    InitConfig cfg;
    cfg.seed = derive_seed(seed, 2);
    const auto res = spectral_init(pool, meas, cfg);
    corr.push_back(std::abs(dot(res.x0, x_star)) /
                   (std::sqrt(sq_norm(res.x0)) * std::sqrt(sq_norm(x_star))));
  }
  std::nth_element(corr.begin(), corr.begin() + trials / 2, corr.end());
  CHECK(corr[trials / 2] >= 0.8);
}

TEST_CASE("degenerate and non-converged paths") {
  const auto pool = SensingPool::generate(4, 8, 5);
  MeasurementSet zeros;
  zeros.values.assign(8, 0.0);
  CHECK_THROWS_AS(spectral_init(pool, zeros, {}), degenerate_input_error);

  Signal x_star{1.0, -2.0, 0.5, 0.25};
  const auto meas = measure(pool, x_star);
  InitConfig tight;
  tight.max_power_iters = 1;
  tight.tol = 1e-15;
  const auto res = spectral_init(pool, meas, tight);
  CHECK_FALSE(res.converged);
  CHECK(res.sweeps == 1);
  CHECK(res.x0.size() == 4);
}
