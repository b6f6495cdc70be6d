// Acceptance gate: runs every release criterion against the library and the
// CLI binary (path passed as argv[1]) and prints one PASS/FAIL line each.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "kpr/harness.hpp"
#include "kpr/kaczmarz.hpp"
#include "kpr/model.hpp"
#include "kpr/rmt.hpp"
#include "kpr/rng.hpp"
#include "kpr/theory.hpp"

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL")
            << " (" << detail << ")\n"
            << std::flush;
  if (!pass) ++g_failures;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

double ls_slope(const std::vector<long>& xs, const std::vector<double>& ys) {
  const double k = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = static_cast<double>(xs[i]);
    sx += x;
    sy += ys[i];
    sxx += x * x;
    sxy += x * ys[i];
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

kpr::Signal random_unit(kpr::Rng& rng, long n) {
  kpr::Signal v(n);
  for (auto& x : v) x = rng.normal();
  const double nrm = std::sqrt(kpr::sq_norm(v));
  for (auto& x : v) x /= nrm;
  return v;
}

// exact step identities on 1e4 random instances
void criterion1() {
  const auto rep = kpr::check_step_identities(16, 6.0, 10000, 101);
  std::ostringstream os;
  os << "violations=" << rep.violations << "/" << rep.trials;
  report(1, rep.pass && rep.violations == 0, os.str());
}

// empirical single-step mean vs the enumerated expectation
void criterion2() {
  const auto rep = kpr::check_expectation_oracle(8, 40, 20, 100000, 102);
  std::ostringstream os;
  os << "instances outside 4 SE: " << rep.violations << "/" << rep.trials;
  report(2, rep.pass, os.str());
}

// linear convergence with data reuse
void criterion3() {
  kpr::ExperimentConfig cfg;
  cfg.n = 128;
  cfg.alpha = 8.0;
  cfg.mode = kpr::SamplingMode::Kind::finite;
  cfg.T = 40 * cfg.n;
  cfg.trials = 50;
  cfg.master_seed = 103;
  cfg.threads = 4;
  const auto s = kpr::simulate(cfg);

  const double initial = s.median_sq_dist.front();
  const double last = s.median_sq_dist.back();
  const bool decayed = last <= 1e-6 * initial;

  std::vector<long> xs;
  std::vector<double> ys;
  for (std::size_t i = s.iters.size() / 2; i < s.iters.size(); ++i) {
    xs.push_back(s.iters[i]);
    ys.push_back(std::log(std::max(s.median_sq_dist[i], 1e-300)));
  }
  const double slope = ls_slope(xs, ys);
  const double c = -slope * static_cast<double>(cfg.n);
  std::ostringstream os;
  os << "median sq_dist " << initial << " -> " << last << ", measured c=" << c;
  report(3, decayed && c > 0.0, os.str());
}

// one-step contraction ratio sits inside the theory sandwich
void criterion4() {
  const long n = 256, pools = 200;
  const double alpha = 12.0, rho = 1e-3;
  const long m = std::lround(alpha * n);
  const double beta0 = kpr::solve_beta0(alpha, rho).beta0;
  const double upper = 1.0 - kpr::c2_asymptotic(alpha, beta0) / (2.0 * n);
  const double lower = kpr::lower_bound_rate(alpha, n) - 2.0 / n;

  long in_range = 0;
  for (long t = 0; t < pools; ++t) {
    const std::uint64_t seed = kpr::derive_seed(104, t);
    const auto pool = kpr::SensingPool::generate(n, m, kpr::derive_seed(seed, 0));
    kpr::Rng rng(kpr::derive_seed(seed, 1));
    const auto x_star = random_unit(rng, n);
    const auto u = random_unit(rng, n);
    kpr::Signal x_prev(n);
    for (long i = 0; i < n; ++i) x_prev[i] = x_star[i] + rho * u[i];
    const auto meas = kpr::measure(pool, x_star);
    const double ratio =
        kpr::expected_step_sq_error(pool, meas, x_star, x_prev) / (rho * rho);
    if (ratio >= lower && ratio <= upper) ++in_range;
  }
  std::ostringstream os;
  os << in_range << "/" << pools << " ratios in [" << lower << ", " << upper << "]";
  report(4, in_range >= 190, os.str());
}

// finite-pool reuse converges no faster than fresh online measurements
void criterion5() {
  long ordered = 0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    kpr::ExperimentConfig cfg;
    cfg.n = 256;
    cfg.alpha = 6.0;
    cfg.T = 12 * cfg.n;
    cfg.trials = 20;
    cfg.master_seed = 10500 + s;
    cfg.trace_stride = cfg.T;
    cfg.threads = 4;

    cfg.mode = kpr::SamplingMode::Kind::finite;
    const double fin = kpr::simulate(cfg).median_sq_dist.back();
    cfg.mode = kpr::SamplingMode::Kind::online;
    const double onl = kpr::simulate(cfg).median_sq_dist.back();
    if (fin >= onl) ++ordered;
  }
  std::ostringstream os;
  os << "finite >= online for " << ordered << "/" << seeds << " master seeds";
  report(5, ordered >= 9, os.str());
}

// CLI bounds output carries the derived theory constants
void criterion6(const std::string& cli) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto out = dir / "kpr_acc_bounds.json";
  const auto err = dir / "kpr_acc_bounds.err";

  bool pass = true;
  std::ostringstream os;
  int rc = std::system(("\"" + cli + "\" bounds --alpha 12 > \"" + out.string() +
                        "\" 2> \"" + err.string() + "\"")
                           .c_str());
  if (rc != 0) {
    pass = false;
    os << "bounds --alpha 12 exited " << rc;
  } else {
    const auto j = nlohmann::json::parse(slurp(out));
    const double c2 = j.at("c2_small_err").get<double>();
    const double a0 = j.at("alpha0").get<double>();
    const double lr = j.at("lower_rate").get<double>();
    pass = std::abs(c2 - 0.2560) <= 1e-3 && std::abs(a0 - 7.4641) <= 1e-3 &&
           std::abs(lr - 0.993513) <= 1e-5;
    os << "c2_small_err=" << c2 << " alpha0=" << a0 << " lower_rate=" << lr;
  }

  rc = std::system(("\"" + cli + "\" bounds --alpha 4 > \"" + out.string() +
                    "\" 2> \"" + err.string() + "\"")
                       .c_str());
  if (rc != 0) {
    pass = false;
    os << "; bounds --alpha 4 exited " << rc;
  } else {
    const auto j = nlohmann::json::parse(slurp(out));
    const bool negative = j.at("c2_small_err").get<double>() < 0.0;
    const bool warned = slurp(err).find("warning") != std::string::npos;
    pass = pass && negative && warned;
    os << "; alpha=4 c2_small_err<0=" << negative << " warning=" << warned;
  }
  report(6, pass, os.str());
  std::filesystem::remove(out);
  std::filesystem::remove(err);
}

// empirical lemma suites
void criterion7() {
  bool pass = true;
  std::ostringstream os;

  const auto l2 = kpr::check_norm_concentration(10000, 10000, 0.5, 107);
  pass = pass && l2.pass && l2.violations == 0;
  os << "lemma2 violations=" << l2.violations;

  const auto [l3_max, l3_min] = kpr::check_extremal_eigs(64, 512, 2000, 0.5, 108);
  pass = pass && l3_max.pass && l3_min.pass;
  os << "; lemma3 rates=" << l3_max.empirical_rate << "/" << l3_min.empirical_rate;

  for (double t : {0.1, 0.5, 1.0}) {
    const auto l4 = kpr::check_order_stats(100000, t, 50, 109);
    pass = pass && l4.pass;
    if (t == 0.5) {
      pass = pass && std::abs(l4.statistic - 0.1425) < 0.01;
      os << "; lemma4 t=0.5 statistic=" << l4.statistic;
    }
  }

  const auto step = kpr::check_step_identities(16, 6.0, 2000, 110);
  const auto expc = kpr::check_expectation_oracle(8, 40, 20, 50000, 111);
  pass = pass && step.pass && expc.pass;
  os << "; step=" << (step.pass ? "ok" : "fail") << " expectation="
     << (expc.pass ? "ok" : "fail");
  report(7, pass, os.str());
}

// CLI CSV output is byte-identical across reruns and worker counts
void criterion8(const std::string& cli) {
  const auto dir = std::filesystem::temp_directory_path();
  bool pass = true;
  std::ostringstream os;

  const std::vector<std::string> configs = {
      "simulate --n 128 --alpha 8 --mode finite --T 5120 --trials 50 --seed 103",
      "simulate --n 256 --alpha 6 --mode finite --T 3072 --trials 20 --seed 10500 "
      "--trace-stride 3072",
      "simulate --n 256 --alpha 6 --mode online --T 3072 --trials 20 --seed 10500 "
      "--trace-stride 3072",
  };
  for (std::size_t i = 0; i < configs.size() && pass; ++i) {
    const auto a = dir / ("kpr_acc_det_" + std::to_string(i) + "_a.csv");
    const auto b = dir / ("kpr_acc_det_" + std::to_string(i) + "_b.csv");
    const std::string base = "\"" + cli + "\" " + configs[i];
    if (std::system((base + " --threads 1 --out \"" + a.string() + "\" 2>/dev/null").c_str()) != 0 ||
        std::system((base + " --threads 4 --out \"" + b.string() + "\" 2>/dev/null").c_str()) != 0) {
      pass = false;
      os << "config " << i << " failed to run";
      break;
    }
    const std::string ca = slurp(a), cb = slurp(b);
    if (ca.empty() || ca != cb) {
      pass = false;
      os << "config " << i << " outputs differ across worker counts";
    }
    std::filesystem::remove(a);
    std::filesystem::remove(b);
  }
  if (pass) os << configs.size() << " configs byte-identical for 1 vs 4 workers";
  report(8, pass, os.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-cli>\n";
    return 2;
  }
  const std::string cli = argv[1];

  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6(cli);
  criterion7();
  criterion8(cli);

  if (g_failures == 0) {
    std::cout << "acceptance: all criteria passed\n";
    return 0;
  }
  std::cout << "acceptance: " << g_failures << " criteria failed\n";
  return 1;
}
