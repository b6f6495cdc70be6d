#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kpr/errors.hpp"

namespace kpr {

using Signal = std::vector<double>;

// sgn with the fixed convention sgn(0) := +1
inline double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sq_norm(std::span<const double> v) { return dot(v, v); }

// The m Gaussian sensing vectors a_r, stored row-major with cached squared
// norms. Immutable after construction.
class SensingPool {
 public:
  static SensingPool generate(long n, long m, std::uint64_t seed);
  static SensingPool from_rows(const std::vector<std::vector<double>>& rows);

  long n() const { return n_; }
  long m() const { return m_; }
  double alpha() const { return static_cast<double>(m_) / static_cast<double>(n_); }
  std::uint64_t seed() const { return seed_; }

  std::span<const double> row(long r) const {
    return {data_.data() + static_cast<std::size_t>(r) * n_, static_cast<std::size_t>(n_)};
  }
  double sq_norm_of(long r) const { return sq_norms_[r]; }
  const std::vector<double>& sq_norms() const { return sq_norms_; }

 private:
  SensingPool() = default;

  long n_ = 0;
  long m_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> data_;      // m x n, row-major
  std::vector<double> sq_norms_;  // ||a_r||^2, cached at construction
};

struct MeasurementSet {
  std::vector<double> values;  // y_r = |<a_r, x*>|, all nonnegative
};

MeasurementSet measure(const SensingPool& pool, const Signal& x_star);

// min(||x - x*||, ||x + x*||): error up to the global sign
double phase_dist(const Signal& x, const Signal& x_star);
double phase_sq_dist(const Signal& x, const Signal& x_star);

// The sign branch of x* currently closer to x: +1 if ||x - x*|| <= ||x + x*||,
// else -1. The error-recursion identities use e = x - branch * x*.
double closer_branch(const Signal& x, const Signal& x_star);

}  // namespace kpr
