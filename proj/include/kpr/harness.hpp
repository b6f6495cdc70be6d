#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kpr/kaczmarz.hpp"
#include "kpr/rmt.hpp"
#include "kpr/theory.hpp"

namespace kpr {

enum class InitKind { spectral, zero, given };

struct ExperimentConfig {
  long n = 256;
  double alpha = 6.0;       // m = round(alpha * n) unless m set explicitly
  long m = 0;               // 0: derive from alpha
  SamplingMode::Kind mode = SamplingMode::Kind::finite;
  long T = 0;               // 0: default 40 * n
  long trials = 1;
  std::uint64_t master_seed = 0;
  InitKind init = InitKind::spectral;
  std::string init_file;    // raw little-endian doubles, n of them
  long trace_stride = 1;
  int threads = 1;

  long effective_m() const;
  long effective_T() const { return T > 0 ? T : 40 * n; }
  void validate() const;
};

// Per-iteration aggregates of dist^2(x_t, x*) across trials.
struct RunSummary {
  std::vector<long> iters;
  std::vector<double> mean_sq_dist;
  std::vector<double> median_sq_dist;
  std::vector<double> p10_sq_dist;
  std::vector<double> p90_sq_dist;
  long n = 0;
  double alpha = 0.0;
  SamplingMode::Kind mode = SamplingMode::Kind::finite;
  long trials = 0;
  std::uint64_t master_seed = 0;
};

// Runs `trials` seeded independent runs; deterministic given (cfg, seed)
// regardless of cfg.threads. x* is drawn uniformly from the unit sphere per
// trial; online runs still build a pool of effective_m() measurements when the
// spectral initializer is requested.
RunSummary simulate(const ExperimentConfig& cfg);

// shortest round-trip decimal form
std::string format_double(double v);

// header: iter,t_norm,mean_sq_dist,median_sq_dist,p10_sq_dist,p90_sq_dist
void write_csv(const RunSummary& summary, std::ostream& out);

// combined sweep CSV with leading alpha,mode columns; runs both modes per alpha
struct SweepResult {
  std::vector<RunSummary> summaries;
  std::string csv;
};
SweepResult sweep(const std::vector<double>& alphas, const ExperimentConfig& base);

// TheoryBounds rendered as schema-stable JSON text (documented field order)
std::string bounds_json(const TheoryBounds& tb);

// interpolated quantile of an unsorted sample, q in [0, 1]
double quantile(std::vector<double> values, double q);

void print_report(const LemmaReport& rep, std::ostream& out);

}  // namespace kpr
