#include "kpr/kaczmarz.hpp"

#include <cmath>

#include "kpr/errors.hpp"
#include "kpr/rng.hpp"

namespace kpr {

SamplingMode SamplingMode::finite_pool(const SensingPool& pool, const MeasurementSet& meas) {
  if (static_cast<long>(meas.values.size()) != pool.m())
    throw dimension_error("SamplingMode: measurement count != pool size");
  SamplingMode mode;
  mode.kind = Kind::finite;
  mode.pool = &pool;
  mode.meas = &meas;
  return mode;
}

SamplingMode SamplingMode::online(const Signal& x_star, std::uint64_t seed) {
  SamplingMode mode;
  mode.kind = Kind::online;
  mode.x_star = &x_star;
  mode.vector_seed = seed;
  return mode;
}

void sikm_step_inplace(Signal& x, std::span<const double> a, double sq_norm_a, double y) {
  if (sq_norm_a <= 0.0)
    throw degenerate_input_error("sikm_step: sq_norm_a must be positive");
  if (a.size() != x.size()) throw dimension_error("sikm_step: length mismatch");
  const double inner = dot(a, x);
  const double coef = (y * sgn(inner) - inner) / sq_norm_a;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += coef * a[i];
}

Signal sikm_step(const Signal& x_prev, std::span<const double> a, double sq_norm_a,
                 double y) {
  Signal x = x_prev;
  sikm_step_inplace(x, a, sq_norm_a, y);
  return x;
}

namespace {

struct LoopState {
  const Signal* x_star;
  Signal x;
  RunTrace trace;
  const RunOptions* opts;
  Signal x_star_branch;  // scratch for the audit

  void record(long t, long T) {
    if (t == 0 || t == T || (t % opts->trace_stride) == 0)
      trace.sq_dist.push_back(phase_sq_dist(x, *x_star));
  }

  // One step, optionally checking the squared-error recursion
  //   ||e_t||^2 = ||e_{t-1}||^2 - (a^T e / ||a||)^2 + (a^T x*/||a||)^2 b^2
  // with e taken in the sign branch currently closer.
  void step(std::span<const double> a, double sq, double y) {
    double predicted = 0.0;
    if (opts->audit) {
      const double branch = closer_branch(x, *x_star);
      x_star_branch.resize(x.size());
      for (std::size_t i = 0; i < x.size(); ++i)
        x_star_branch[i] = branch * (*x_star)[i];
      double e_sq = 0.0, ae = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = x[i] - x_star_branch[i];
        e_sq += e * e;
        ae += a[i] * e;
      }
      const double axs = dot(a, x_star_branch);
      const double b = sgn(axs) * sgn(dot(a, x)) - 1.0;
      predicted = e_sq - ae * ae / sq + axs * axs * b * b / sq;
    }

    sikm_step_inplace(x, a, sq, y);

    if (opts->audit) {
      double actual = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = x[i] - x_star_branch[i];
        actual += e * e;
      }
      // e is formed by subtraction, so both sides carry rounding noise of order
      // eps * ||x*|| * ||e||; the extra denominator term keeps the relative
      // check meaningful once the iterate is close to x*.
      const double cancel_guard =
          1e-4 * std::sqrt(sq_norm(x_star_branch) * std::max(predicted, actual));
      const double scale = std::max({predicted, actual, cancel_guard, 1e-300});
      const double rel = std::abs(actual - predicted) / scale;
      if (rel > trace.max_audit_rel_err) trace.max_audit_rel_err = rel;
      if (rel > 1e-9) ++trace.audit_violations;

      const double hp = std::abs(std::abs(dot(a, x)) - y) / std::max(y, 1e-300);
      if (hp > trace.max_hyperplane_rel_err) trace.max_hyperplane_rel_err = hp;
    }
  }
};

void check_run_args(const Signal& x0, const Signal& x_star, long T,
                    const RunOptions& opts) {
  if (x0.size() != x_star.size()) throw dimension_error("run: length mismatch");
  if (T < 1) throw std::invalid_argument("run: T must be >= 1");
  if (opts.trace_stride < 1) throw std::invalid_argument("run: trace_stride must be >= 1");
}

}  // namespace

RunTrace run(const Signal& x0, const Signal& x_star, const SamplingMode& mode,
             long T, std::uint64_t seed, const RunOptions& opts) {
  check_run_args(x0, x_star, T, opts);

  LoopState st;
  st.x_star = &x_star;
  st.x = x0;
  st.opts = &opts;
  st.trace.iterations = T;
  st.trace.trace_stride = opts.trace_stride;
  st.trace.seed = seed;
  st.trace.mode = mode.kind;
  st.record(0, T);

  if (mode.kind == SamplingMode::Kind::finite) {
    const SensingPool& pool = *mode.pool;
    if (pool.n() != static_cast<long>(x0.size()))
      throw dimension_error("run: pool dimension mismatch");
    const auto& y = mode.meas->values;
    Rng idx_rng(seed);
    const auto m = static_cast<std::uint64_t>(pool.m());
    for (long t = 1; t <= T; ++t) {
      const auto r = static_cast<long>(idx_rng.below(m));
      if (opts.record_indices)
        st.trace.chosen_indices.push_back(static_cast<std::uint32_t>(r));
      st.step(pool.row(r), pool.sq_norm_of(r), y[r]);
      st.record(t, T);
    }
  } else {
    Rng vec_rng(mode.vector_seed);
    Signal a(x0.size());
    for (long t = 1; t <= T; ++t) {
      for (auto& e : a) e = vec_rng.normal();
      const double sq = sq_norm(a);
      const double y = std::abs(dot(a, *mode.x_star));
      st.step(a, sq, y);
      st.record(t, T);
    }
  }

  st.trace.x_final = std::move(st.x);
  return st.trace;
}

RunTrace run_with_indices(const Signal& x0, const Signal& x_star,
                          const SensingPool& pool, const MeasurementSet& meas,
                          std::span<const std::uint32_t> indices,
                          const RunOptions& opts) {
  const long T = static_cast<long>(indices.size());
  check_run_args(x0, x_star, T, opts);
  if (pool.n() != static_cast<long>(x0.size()))
    throw dimension_error("run_with_indices: pool dimension mismatch");

  LoopState st;
  st.x_star = &x_star;
  st.x = x0;
  st.opts = &opts;
  st.trace.iterations = T;
  st.trace.trace_stride = opts.trace_stride;
  st.trace.mode = SamplingMode::Kind::finite;
  st.record(0, T);

  for (long t = 1; t <= T; ++t) {
    const long r = indices[t - 1];
    st.step(pool.row(r), pool.sq_norm_of(r), meas.values[r]);
    st.record(t, T);
  }
  st.trace.x_final = std::move(st.x);
  return st.trace;
}

}  // namespace kpr
