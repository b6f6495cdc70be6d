#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kpr/harness.hpp"
#include "kpr/rmt.hpp"
#include "kpr/theory.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitIo = 2;
constexpr int kExitUsage = 64;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("KPR_SEED")) return std::strtoull(env, nullptr, 10);
  return 0;
}

kpr::SamplingMode::Kind parse_mode(const std::string& mode) {
  if (mode == "finite") return kpr::SamplingMode::Kind::finite;
  if (mode == "online") return kpr::SamplingMode::Kind::online;
  throw CLI::ValidationError("--mode must be finite or online");
}

kpr::InitKind parse_init(const std::string& init) {
  if (init == "spectral") return kpr::InitKind::spectral;
  if (init == "zero") return kpr::InitKind::zero;
  if (init == "given") return kpr::InitKind::given;
  throw CLI::ValidationError("--init must be spectral, zero, or given");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open output file: " + path);
  out << content;
  if (!out) throw std::ios_base::failure("write failed: " + path);
}

int run_verify(const std::string& suite, long n, long p, long m, double t, double eps,
               double alpha, long trials, std::uint64_t seed) {
  std::vector<kpr::LemmaReport> reports;
  const bool all = suite == "all";

  if (all || suite == "lemma2") {
    reports.push_back(kpr::check_norm_concentration(n > 0 ? n : 10000,
                                                    trials > 0 ? trials : 10000,
                                                    eps, seed));
  }
  if (all || suite == "lemma3") {
    auto [rep_max, rep_min] = kpr::check_extremal_eigs(
        n > 0 && suite == "lemma3" ? n : 64, p > 0 ? p : 512,
        trials > 0 ? trials : 2000, eps, seed);
    reports.push_back(rep_max);
    reports.push_back(rep_min);
  }
  if (all || suite == "lemma4") {
    const long mm = m > 0 ? m : 100000;
    const long tr = trials > 0 ? trials : 50;
    if (suite == "lemma4" && t > 0.0) {
      reports.push_back(kpr::check_order_stats(mm, t, tr, seed));
    } else {
      for (double tt : {0.1, 0.5, 1.0})
        reports.push_back(kpr::check_order_stats(mm, tt, tr, seed));
    }
  }
  if (all || suite == "step") {
    reports.push_back(kpr::check_step_identities(suite == "step" && n > 0 ? n : 16,
                                                 alpha, trials > 0 ? trials : 10000,
                                                 seed));
  }
  if (all || suite == "expectation") {
    reports.push_back(kpr::check_expectation_oracle(
        suite == "expectation" && n > 0 ? n : 8, suite == "expectation" && m > 0 ? m : 40,
        20, 100000, seed));
  }
  if (reports.empty()) {
    std::cerr << "unknown suite: " << suite << '\n';
    return kExitUsage;
  }

  bool all_pass = true;
  for (const auto& rep : reports) {
    kpr::print_report(rep, std::cout);
    all_pass = all_pass && rep.pass;
  }
  return all_pass ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase retrieval via the randomized Kaczmarz method: simulation, "
               "convergence bounds, and Monte Carlo verification"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run seeded trials and write a learning-curve CSV");
  kpr::ExperimentConfig cfg;
  std::string mode_str = "finite", init_str = "spectral", out_path;
  std::uint64_t seed = default_seed();
  sim->add_option("--n", cfg.n, "signal dimension")->check(CLI::PositiveNumber);
  sim->add_option("--alpha", cfg.alpha, "sampling rate m/n");
  sim->add_option("--m", cfg.m, "pool size (overrides --alpha)");
  sim->add_option("--mode", mode_str, "finite|online");
  sim->add_option("--T", cfg.T, "iterations (default 40*n)");
  sim->add_option("--trials", cfg.trials, "independent trials")->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed, "master seed (env KPR_SEED, default 0)");
  sim->add_option("--init", init_str, "spectral|zero|given");
  sim->add_option("--init-file", cfg.init_file, "raw doubles for --init given");
  sim->add_option("--trace-stride", cfg.trace_stride, "record every k-th iteration");
  sim->add_option("--threads", cfg.threads, "worker threads (output is thread-count independent)");
  sim->add_option("--out", out_path, "output CSV path")->required();

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Evaluate the convergence-rate bounds as JSON");
  double b_alpha = 12.0, b_err_ratio = 0.0, b_eps1 = 0.5, b_eps2 = 1.0, b_eps3 = 1.0;
  long b_n = 256;
  bounds->add_option("--alpha", b_alpha, "sampling rate")->required();
  bounds->add_option("--n", b_n, "signal dimension");
  bounds->add_option("--err-ratio", b_err_ratio, "||e|| / ||x*||");
  bounds->add_option("--eps1", b_eps1, "norm-concentration epsilon");
  bounds->add_option("--eps2", b_eps2, "mismatch-eigenvalue epsilon");
  bounds->add_option("--eps3", b_eps3, "matched-eigenvalue epsilon");

  // verify
  auto* verify = app.add_subcommand("verify", "Run the empirical lemma/identity suites");
  std::string suite = "all";
  long v_n = 0, v_p = 0, v_m = 0, v_trials = 0;
  double v_t = 0.0, v_eps = 0.5, v_alpha = 6.0;
  std::uint64_t v_seed = default_seed();
  verify->add_option("--suite", suite, "lemma2|lemma3|lemma4|step|expectation|all");
  verify->add_option("--n", v_n, "dimension");
  verify->add_option("--p", v_p, "subset size (lemma3)");
  verify->add_option("--m", v_m, "sample count (lemma4/expectation)");
  verify->add_option("--t", v_t, "order-statistics mass (lemma4)");
  verify->add_option("--eps", v_eps, "bound epsilon");
  verify->add_option("--alpha", v_alpha, "sampling rate (step suite)");
  verify->add_option("--trials", v_trials, "trial count");
  verify->add_option("--seed", v_seed, "seed");

  // sweep
  auto* sw = app.add_subcommand("sweep", "Run simulate for several alphas, both modes");
  std::vector<double> alphas;
  std::string sweep_out;
  kpr::ExperimentConfig sweep_cfg;
  std::string sweep_init = "spectral";
  std::uint64_t sweep_seed = default_seed();
  sw->add_option("--alphas", alphas, "alpha values")->required()->expected(-1);
  sw->add_option("--n", sweep_cfg.n, "signal dimension");
  sw->add_option("--T", sweep_cfg.T, "iterations (default 40*n)");
  sw->add_option("--trials", sweep_cfg.trials, "independent trials");
  sw->add_option("--seed", sweep_seed, "master seed");
  sw->add_option("--init", sweep_init, "spectral|zero|given");
  sw->add_option("--init-file", sweep_cfg.init_file, "raw doubles for --init given");
  sw->add_option("--trace-stride", sweep_cfg.trace_stride, "record every k-th iteration");
  sw->add_option("--threads", sweep_cfg.threads, "worker threads");
  sw->add_option("--out", sweep_out, "combined CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sim) {
      cfg.mode = parse_mode(mode_str);
      cfg.init = parse_init(init_str);
      cfg.master_seed = seed;
      const kpr::RunSummary summary = kpr::simulate(cfg);
      std::ostringstream csv;
      kpr::write_csv(summary, csv);
      write_file(out_path, csv.str());
      std::cerr << "wrote " << out_path << " (" << summary.iters.size() << " rows, "
                << cfg.trials << " trials)\n";
    } else if (*bounds) {
      const kpr::TheoryBounds tb =
          kpr::compute_bounds(b_alpha, b_n, b_err_ratio, b_eps1, b_eps2, b_eps3);
      if (tb.c2_small_err <= 0.0)
        std::cerr << "warning: alpha=" << b_alpha << " is at or below alpha0="
                  << tb.alpha0 << "; the guaranteed-contraction regime is not met\n";
      std::cout << kpr::bounds_json(tb) << '\n';
    } else if (*verify) {
      return run_verify(suite, v_n, v_p, v_m, v_t, v_eps, v_alpha, v_trials, v_seed);
    } else if (*sw) {
      sweep_cfg.init = parse_init(sweep_init);
      sweep_cfg.master_seed = sweep_seed;
      const kpr::SweepResult result = kpr::sweep(alphas, sweep_cfg);
      write_file(sweep_out, result.csv);
      // final-error ordering across alphas, per mode
      for (auto kind : {kpr::SamplingMode::Kind::finite, kpr::SamplingMode::Kind::online}) {
        std::cout << (kind == kpr::SamplingMode::Kind::finite ? "finite" : "online")
                  << " final median sq_dist:";
        for (const auto& s : result.summaries)
          if (s.mode == kind)
            std::cout << "  alpha=" << s.alpha << ": "
                      << kpr::format_double(s.median_sq_dist.back());
        std::cout << '\n';
      }
    }
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}
