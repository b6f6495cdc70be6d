#include "kpr/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "kpr/rng.hpp"
#include "kpr/spectral.hpp"

namespace kpr {

long ExperimentConfig::effective_m() const {
  return m > 0 ? m : std::lround(alpha * static_cast<double>(n));
}

void ExperimentConfig::validate() const {
  if (n < 1) throw std::invalid_argument("config: n must be >= 1");
  if (effective_m() < 1) throw std::invalid_argument("config: m must be >= 1");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (trace_stride < 1) throw std::invalid_argument("config: trace_stride must be >= 1");
  if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  if (init == InitKind::given && init_file.empty())
    throw std::invalid_argument("config: given init requires an init file");
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

Signal load_init_file(const std::string& path, long n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open init file: " + path);
  Signal x(n);
  in.read(reinterpret_cast<char*>(x.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (in.gcount() != static_cast<std::streamsize>(n * sizeof(double)))
    throw std::ios_base::failure("init file too short: " + path);
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("init file has non-finite entries");
  return x;
}

// Per-trial stream layout: sub-seeds of derive_seed(master, trial).
RunTrace run_one_trial(const ExperimentConfig& cfg, long trial) {
  const std::uint64_t tseed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(trial));
  const std::uint64_t signal_seed = derive_seed(tseed, 1);
  const std::uint64_t pool_seed = derive_seed(tseed, 2);
  const std::uint64_t init_seed = derive_seed(tseed, 3);
  const std::uint64_t run_seed = derive_seed(tseed, 4);
  const std::uint64_t online_seed = derive_seed(tseed, 5);

  // x* uniform on the unit sphere
  Signal x_star(cfg.n);
  Rng srng(signal_seed);
  for (auto& v : x_star) v = srng.normal();
  const double nrm = std::sqrt(sq_norm(x_star));
  for (auto& v : x_star) v /= nrm;

  const long m = cfg.effective_m();
  const bool need_pool =
      cfg.mode == SamplingMode::Kind::finite || cfg.init == InitKind::spectral;
  SensingPool pool = need_pool ? SensingPool::generate(cfg.n, m, pool_seed)
                               : SensingPool::generate(1, 1, 0);
  MeasurementSet meas;
  if (need_pool) meas = measure(pool, x_star);

  Signal x0;
  switch (cfg.init) {
    case InitKind::spectral: {
      InitConfig icfg;
      icfg.seed = init_seed;
      x0 = spectral_init(pool, meas, icfg).x0;
      break;
    }
    case InitKind::zero:
      x0.assign(cfg.n, 0.0);
      break;
    case InitKind::given:
      x0 = load_init_file(cfg.init_file, cfg.n);
      break;
  }

  RunOptions opts;
  opts.trace_stride = cfg.trace_stride;
  const SamplingMode mode = cfg.mode == SamplingMode::Kind::finite
                                ? SamplingMode::finite_pool(pool, meas)
                                : SamplingMode::online(x_star, online_seed);
  return run(x0, x_star, mode, cfg.effective_T(), run_seed, opts);
}

}  // namespace

RunSummary simulate(const ExperimentConfig& cfg) {
  cfg.validate();
  const long trials = cfg.trials;
  std::vector<RunTrace> traces(trials);

  const int workers = static_cast<int>(std::min<long>(cfg.threads, trials));
  if (workers <= 1) {
    for (long t = 0; t < trials; ++t) traces[t] = run_one_trial(cfg, t);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (long t = w; t < trials; t += workers) traces[t] = run_one_trial(cfg, t);
      });
    }
    for (auto& th : pool) th.join();
  }

  RunSummary summary;
  summary.n = cfg.n;
  summary.alpha = static_cast<double>(cfg.effective_m()) / static_cast<double>(cfg.n);
  summary.mode = cfg.mode;
  summary.trials = trials;
  summary.master_seed = cfg.master_seed;

  const std::size_t records = traces.front().sq_dist.size();
  std::vector<double> column(trials);
  for (std::size_t j = 0; j < records; ++j) {
    for (long t = 0; t < trials; ++t) column[t] = traces[t].sq_dist[j];
    double mean = 0.0;
    for (double v : column) mean += v;
    summary.iters.push_back(traces.front().iter_of(j));
    summary.mean_sq_dist.push_back(mean / static_cast<double>(trials));
    summary.median_sq_dist.push_back(quantile(column, 0.5));
    summary.p10_sq_dist.push_back(quantile(column, 0.1));
    summary.p90_sq_dist.push_back(quantile(column, 0.9));
  }
  return summary;
}

void write_csv(const RunSummary& s, std::ostream& out) {
  out << "iter,t_norm,mean_sq_dist,median_sq_dist,p10_sq_dist,p90_sq_dist\n";
  for (std::size_t j = 0; j < s.iters.size(); ++j) {
    const double t_norm = static_cast<double>(s.iters[j]) / static_cast<double>(s.n);
    out << s.iters[j] << ',' << format_double(t_norm) << ','
        << format_double(s.mean_sq_dist[j]) << ',' << format_double(s.median_sq_dist[j])
        << ',' << format_double(s.p10_sq_dist[j]) << ','
        << format_double(s.p90_sq_dist[j]) << '\n';
  }
}

SweepResult sweep(const std::vector<double>& alphas, const ExperimentConfig& base) {
  if (alphas.empty()) throw std::invalid_argument("sweep: alpha list is empty");
  SweepResult result;
  std::ostringstream csv;
  csv << "alpha,mode,iter,t_norm,mean_sq_dist,median_sq_dist,p10_sq_dist,p90_sq_dist\n";
  for (double alpha : alphas) {
    for (auto kind : {SamplingMode::Kind::finite, SamplingMode::Kind::online}) {
      ExperimentConfig cfg = base;
      cfg.alpha = alpha;
      cfg.m = 0;
      cfg.mode = kind;
      const RunSummary s = simulate(cfg);
      const char* mode_tag = kind == SamplingMode::Kind::finite ? "finite" : "online";
      for (std::size_t j = 0; j < s.iters.size(); ++j) {
        const double t_norm = static_cast<double>(s.iters[j]) / static_cast<double>(s.n);
        csv << format_double(alpha) << ',' << mode_tag << ',' << s.iters[j] << ','
            << format_double(t_norm) << ',' << format_double(s.mean_sq_dist[j]) << ','
            << format_double(s.median_sq_dist[j]) << ',' << format_double(s.p10_sq_dist[j])
            << ',' << format_double(s.p90_sq_dist[j]) << '\n';
      }
      result.summaries.push_back(std::move(s));
    }
  }
  result.csv = csv.str();
  return result;
}

std::string bounds_json(const TheoryBounds& tb) {
  nlohmann::ordered_json j;
  j["alpha"] = tb.alpha;
  j["n"] = tb.n;
  j["err_ratio"] = tb.err_ratio;
  j["beta0"] = tb.beta0;
  j["c2_asym"] = tb.c2_asym;
  j["c2_small_err"] = tb.c2_small_err;
  j["alpha0"] = tb.alpha0;
  j["upper_rate"] = tb.upper_rate;
  j["lower_rate"] = tb.lower_rate;
  j["log_failure_terms"] = {tb.log_failure_terms.log_norm_term,
                            tb.log_failure_terms.log_mismatch_term,
                            tb.log_failure_terms.log_match_term};
  return j.dump(2);
}

void print_report(const LemmaReport& rep, std::ostream& out) {
  out << (rep.pass ? "PASS " : "FAIL ") << rep.name << " [" << rep.params << "]"
      << " trials=" << rep.trials << " violations=" << rep.violations;
  if (!std::isnan(rep.statistic))
    out << " statistic=" << rep.statistic << " target=" << rep.target
        << " tolerance=" << rep.tolerance;
  else
    out << " empirical_rate=" << rep.empirical_rate
        << " log_bound=" << rep.log_failure_bound;
  out << '\n';
}

}  // namespace kpr
