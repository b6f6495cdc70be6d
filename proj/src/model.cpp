#include "kpr/model.hpp"

#include <cmath>

#include "kpr/rng.hpp"

namespace kpr {

SensingPool SensingPool::generate(long n, long m, std::uint64_t seed) {
  if (n < 1) throw dimension_error("SensingPool: n must be >= 1");
  if (m < 1) throw dimension_error("SensingPool: m must be >= 1");
  SensingPool pool;
  pool.n_ = n;
  pool.m_ = m;
  pool.seed_ = seed;
  pool.data_.resize(static_cast<std::size_t>(m) * n);
  Rng rng(seed);
  for (auto& v : pool.data_) v = rng.normal();
  pool.sq_norms_.resize(m);
  for (long r = 0; r < m; ++r) pool.sq_norms_[r] = sq_norm(pool.row(r));
  return pool;
}

SensingPool SensingPool::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw dimension_error("SensingPool: need at least one row");
  const long n = static_cast<long>(rows.front().size());
  if (n < 1) throw dimension_error("SensingPool: n must be >= 1");
  SensingPool pool;
  pool.n_ = n;
  pool.m_ = static_cast<long>(rows.size());
  pool.data_.reserve(static_cast<std::size_t>(pool.m_) * n);
  for (const auto& r : rows) {
    if (static_cast<long>(r.size()) != n)
      throw dimension_error("SensingPool: ragged rows");
    pool.data_.insert(pool.data_.end(), r.begin(), r.end());
  }
  pool.sq_norms_.resize(pool.m_);
  for (long r = 0; r < pool.m_; ++r) {
    pool.sq_norms_[r] = sq_norm(pool.row(r));
    if (pool.sq_norms_[r] <= 0.0)
      throw degenerate_input_error("SensingPool: zero-norm sensing vector");
  }
  return pool;
}

MeasurementSet measure(const SensingPool& pool, const Signal& x_star) {
  if (pool.n() != static_cast<long>(x_star.size()))
    throw dimension_error("measure: pool.n != length(x_star)");
  MeasurementSet meas;
  meas.values.resize(pool.m());
  for (long r = 0; r < pool.m(); ++r)
    meas.values[r] = std::abs(dot(pool.row(r), x_star));
  return meas;
}

double phase_sq_dist(const Signal& x, const Signal& x_star) {
  if (x.size() != x_star.size())
    throw dimension_error("phase_dist: length mismatch");
  double minus = 0.0, plus = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dm = x[i] - x_star[i];
    const double dp = x[i] + x_star[i];
    minus += dm * dm;
    plus += dp * dp;
  }
  return minus < plus ? minus : plus;
}

double phase_dist(const Signal& x, const Signal& x_star) {
  return std::sqrt(phase_sq_dist(x, x_star));
}

double closer_branch(const Signal& x, const Signal& x_star) {
  if (x.size() != x_star.size())
    throw dimension_error("closer_branch: length mismatch");
  double minus = 0.0, plus = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dm = x[i] - x_star[i];
    const double dp = x[i] + x_star[i];
    minus += dm * dm;
    plus += dp * dp;
  }
  return minus <= plus ? 1.0 : -1.0;
}

}  // namespace kpr
