#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kpr/model.hpp"

namespace kpr {

// Fig. 1 sampling regimes: a finite pool sampled with replacement, or fresh
// Gaussian sensing vectors generated per iteration (online).
struct SamplingMode {
  enum class Kind { finite, online };

  Kind kind = Kind::finite;
  const SensingPool* pool = nullptr;      // finite
  const MeasurementSet* meas = nullptr;   // finite
  const Signal* x_star = nullptr;         // online: measured on the fly
  std::uint64_t vector_seed = 0;          // online: stream of fresh vectors

  static SamplingMode finite_pool(const SensingPool& pool, const MeasurementSet& meas);
  static SamplingMode online(const Signal& x_star, std::uint64_t seed);
};

struct RunOptions {
  long trace_stride = 1;
  bool audit = false;           // recompute the squared-error recursion per step
  bool record_indices = false;  // finite mode only
};

struct RunTrace {
  // dist^2(x_t, x*) at iterations 0, stride, 2*stride, ..., T
  std::vector<double> sq_dist;
  long iterations = 0;
  long trace_stride = 1;
  std::uint64_t seed = 0;
  SamplingMode::Kind mode = SamplingMode::Kind::finite;
  std::vector<std::uint32_t> chosen_indices;
  Signal x_final;

  // audit results (only populated when RunOptions::audit is set)
  long audit_violations = 0;
  double max_audit_rel_err = 0.0;
  double max_hyperplane_rel_err = 0.0;

  long iter_of(std::size_t record) const {
    const long it = static_cast<long>(record) * trace_stride;
    return it < iterations ? it : iterations;
  }
};

// One randomized Kaczmarz step for phase retrieval: project x_prev onto the
// hyperplane a^T x = y * sgn(a^T x_prev), with sgn(0) := +1.
Signal sikm_step(const Signal& x_prev, std::span<const double> a, double sq_norm_a,
                 double y);

// in-place variant used by the run loop; O(n)
void sikm_step_inplace(Signal& x, std::span<const double> a, double sq_norm_a,
                       double y);

RunTrace run(const Signal& x0, const Signal& x_star, const SamplingMode& mode,
             long T, std::uint64_t seed, const RunOptions& opts = {});

// Same loop with a caller-supplied index sequence into the pool (audit and
// test hook; also realizes online == finite-with-sequential-indices).
RunTrace run_with_indices(const Signal& x0, const Signal& x_star,
                          const SensingPool& pool, const MeasurementSet& meas,
                          std::span<const std::uint32_t> indices,
                          const RunOptions& opts = {});

}  // namespace kpr
