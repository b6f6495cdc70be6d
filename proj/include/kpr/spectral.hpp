#pragma once

#include <cstdint>
#include <vector>

#include "kpr/model.hpp"

namespace kpr {

struct InitConfig {
  int max_power_iters = 200;
  double tol = 1e-8;        // relative eigenvector change per sweep
  std::uint64_t seed = 0;   // start vector of the power iteration
};

struct InitResult {
  Signal x0;
  bool converged = false;
  int sweeps = 0;
  std::vector<double> residuals;  // ||D v - (v^T D v) v|| after each sweep
};

// x0 = s * v with v the unit top eigenvector of D = (1/m) sum_r y_r^2 a_r a_r^T
// (power iteration, matrix-free) and s = sqrt(mean y^2). The sign of v is
// whatever the iteration produces; the global phase is only resolved in
// evaluation via phase_dist.
InitResult spectral_init(const SensingPool& pool, const MeasurementSet& meas,
                         const InitConfig& cfg);

}  // namespace kpr
