#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "monotest/acceptance.hpp"
#include "monotest/harness.hpp"
#include "monotest/mollifier.hpp"
#include "monotest/monodist.hpp"

using namespace monotest;

namespace {

constexpr int kOk = 0;
constexpr int kAssertion = 1;
constexpr int kUsage = 2;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> n, d, ell, mu, workers, h;
  std::optional<std::int64_t> samples;
  std::optional<double> eps, c;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config_path, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--seed", f.seed, "RNG seed");
  app->add_option("--out-dir", f.out_dir, "Output directory (the environment variable MONOTEST_OUTPUT_DIR wins)");
}

ExperimentConfig load_config(const CommonFlags& f) {
  ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = ExperimentConfig::from_json(read_json_file(f.config_path));
  if (f.seed) cfg.seed = *f.seed;
  if (f.n) cfg.n = *f.n;
  if (f.d) cfg.d = *f.d;
  if (f.ell) cfg.ell = *f.ell;
  if (f.mu) cfg.mu = *f.mu;
  if (f.h) cfg.h = *f.h;
  if (f.workers) cfg.workers = *f.workers;
  if (f.samples) cfg.samples = *f.samples;
  if (f.eps) cfg.eps = *f.eps;
  if (f.c) cfg.c = *f.c;
  if (f.out_dir) cfg.output_dir = *f.out_dir;
  if (cfg.n < 1 || cfg.d < 1 || cfg.samples < 1 || cfg.workers < 1)
    throw InvalidInput("n, d, samples and workers must be positive");
  return cfg;
}

RunReport base_report(const std::string& name, const ExperimentConfig& cfg) {
  RunReport r;
  r.experiment = name;
  r.config = cfg.to_json();
  return r;
}

int finish(RunReport& rep, const ExperimentConfig& cfg, const json& payload) {
  rep.details["result"] = payload;
  write_report(rep, output_dir(cfg));
  std::cout << payload.dump(2) << std::endl;
  for (const auto& c : rep.checks)
    if (!c.passed) std::cerr << "check failed: " << c.name << ": " << c.detail << std::endl;
  return rep.passed() ? kOk : kAssertion;
}

QueryMatrix queries_or_random(const std::string& path, const ExperimentConfig& cfg) {
  if (!path.empty()) return query_matrix_from_json(read_json_file(path));
  Rng rng(cfg.seed, 0x9e3779b9);
  return QueryMatrix::random(cfg.d, cfg.n, rng);
}

ScatterParams scatter_params(const std::string& mode, int n, int h, std::uint64_t seed) {
  if (mode != "desk" && mode != "asymptotic") throw InvalidInput("--scatter must be desk or asymptotic");
  ScatterParams p = mode == "asymptotic" ? ScatterParams::asymptotic(n, h) : ScatterParams::desk(n, h);
  p.seed = seed;
  return p;
}

json scatter_json(const ScatterReport& r) {
  json v = json::array();
  for (const auto& x : r.violations)
    v.push_back(json{{"a", x.a}, {"r", x.r}, {"remove", x.remove}, {"threshold", x.threshold}});
  return json{{"scattered", r.scattered},
              {"mode", r.mode},
              {"subsets_checked", r.subsets_checked},
              {"subsets_total", r.subsets_total},
              {"violations", v}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment-matched LTF hard instances for monotonicity testing"};
  app.require_subcommand(1);
  CommonFlags f;

  auto* build_rv = app.add_subcommand("build-rv", "Build the yes/no coefficient pair");
  add_common(build_rv, f);
  build_rv->add_option("--ell", f.ell, "Odd moment order")->required();
  build_rv->add_option("--mu", f.mu, "Integer mean (default: smallest feasible)");
  std::string rv_out;
  build_rv->add_option("--output", rv_out, "Also write the pair JSON here");

  auto* sample = app.add_subcommand("sample", "Draw an LTF from D_yes or D_no");
  add_common(sample, f);
  sample->add_option("--n", f.n, "Number of variables")->required();
  sample->add_option("--ell", f.ell, "Odd moment order");
  sample->add_option("--mu", f.mu, "Integer mean");
  std::string kind = "yes";
  sample->add_option("--kind", kind, "yes or no")->check(CLI::IsMember({"yes", "no"}));
  int count = 1;
  sample->add_option("--count", count, "Number of functions")->check(CLI::PositiveNumber);

  auto* dist = app.add_subcommand("dist", "Exact distance to monotone of an LTF");
  add_common(dist, f);
  std::string ltf_path;
  dist->add_option("--ltf", ltf_path, "LTF JSON file")->required()->check(CLI::ExistingFile);

  auto* duo = app.add_subcommand("duo", "Union-of-orthants distance between S and T");
  add_common(duo, f);
  duo->add_option("--n", f.n, "Number of variables");
  duo->add_option("--d", f.d, "Number of queries");
  duo->add_option("--ell", f.ell, "Odd moment order");
  duo->add_option("--mu", f.mu, "Integer mean");
  duo->add_option("--samples", f.samples, "Monte Carlo samples");
  duo->add_option("--workers", f.workers, "Worker threads");
  std::string queries_path;
  duo->add_option("--queries", queries_path, "QueryMatrix JSON file")->check(CLI::ExistingFile);
  bool exact = false;
  duo->add_flag("--exact", exact, "Also enumerate exactly and compare with Monte Carlo");

  auto* prune_cmd = app.add_subcommand("prune", "Prune a query set until it is scattered");
  add_common(prune_cmd, f);
  prune_cmd->add_option("--queries", queries_path, "QueryMatrix JSON file")->check(CLI::ExistingFile);
  prune_cmd->add_option("--n", f.n, "Variables for a random query set");
  prune_cmd->add_option("--d", f.d, "Rows for a random query set");
  prune_cmd->add_option("--subset-size", f.h, "Subset size bound h");
  std::string scatter = "desk";
  prune_cmd->add_option("--scatter", scatter, "desk or asymptotic thresholds");
  std::string pruned_out;
  prune_cmd->add_option("--output", pruned_out, "Write the pruned QueryMatrix here");

  auto* scatter_cmd = app.add_subcommand("scatter-check", "Check whether a query set is scattered");
  add_common(scatter_cmd, f);
  scatter_cmd->add_option("--queries", queries_path, "QueryMatrix JSON file")->required()->check(CLI::ExistingFile);
  scatter_cmd->add_option("--subset-size", f.h, "Subset size bound h");
  scatter_cmd->add_option("--scatter", scatter, "desk or asymptotic thresholds");

  auto* moll = app.add_subcommand("moll-check", "Derivative bounds of the 1-D mollifier");
  add_common(moll, f);
  moll->add_option("--eps", f.eps, "Mollifier width");
  int kmax = 3, grid = 2000;
  moll->add_option("--k", kmax, "Largest derivative order (<= 4)");
  moll->add_option("--grid", grid, "Grid size");

  auto* lind = app.add_subcommand("lindeberg", "Lindeberg replacement trend experiment");
  add_common(lind, f);
  lind->add_option("--d", f.d, "Number of queries");
  lind->add_option("--ell", f.ell, "Odd moment order");
  lind->add_option("--eps", f.eps, "Mollifier width");
  lind->add_option("--samples", f.samples, "Samples per column position");
  lind->add_option("--workers", f.workers, "Worker threads");

  auto* sweep = app.add_subcommand("sweep", "d_UO after pruning over a grid of n");
  add_common(sweep, f);
  sweep->add_option("--c", f.c, "Exponent slack c");
  sweep->add_option("--ell", f.ell, "Odd moment order");
  sweep->add_option("--samples", f.samples, "Monte Carlo samples");
  sweep->add_option("--workers", f.workers, "Worker threads");

  auto* verify = app.add_subcommand("verify-all", "Run the acceptance suite");
  add_common(verify, f);
  bool quick = false;
  verify->add_flag("--quick", quick, "Fewer Lindeberg positions");
  verify->add_option("--workers", f.workers, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n" << "run with --help for usage" << std::endl;
    return kUsage;
  }

  try {
    ExperimentConfig cfg = load_config(f);

    if (*build_rv) {
      DerivedParams dp = derive(cfg);
      YesNoPair pair = build_pair(dp.ell, cfg.mu.value_or(0));
      json out = to_json(pair);
      if (!rv_out.empty()) write_json_file(rv_out, out);
      RunReport rep = base_report("build-rv", cfg);
      const double err = out["max_relative_error"].get<double>();
      rep.checks.push_back({"moment match", err <= 1e-9, "max relative error " + std::to_string(err)});
      rep.checks.push_back({"no RV has negative mass", pair.no_rv.negative_mass() > 0, ""});
      return finish(rep, cfg, out);
    }

    if (*sample) {
      DerivedParams dp = derive(cfg);
      YesNoPair pair = build_pair(dp.ell, cfg.mu.value_or(0));
      Rng rng(cfg.seed, 0x5a);
      json out = json::array();
      for (int t = 0; t < count; ++t) out.push_back(to_json(sample_ltf(kind == "yes" ? pair.yes_rv : pair.no_rv, cfg.n, rng)));
      RunReport rep = base_report("sample", cfg);
      return finish(rep, cfg, count == 1 ? out[0] : out);
    }

    if (*dist) {
      LTF fn = ltf_from_json(read_json_file(ltf_path));
      TruthTable tt = TruthTable::from_ltf(fn);
      auto d = exact_distance_to_monotone(tt);
      json out{{"n", fn.n()},
               {"monotone", is_monotone(tt)},
               {"distance", boost::rational_cast<double>(d)},
               {"distance_exact", std::to_string(d.numerator()) + "/" + std::to_string(d.denominator())},
               {"fourier_negative_mass", fourier_negative_mass(tt)},
               {"regularity", regularity(fn)}};
      RunReport rep = base_report("dist", cfg);
      return finish(rep, cfg, out);
    }

    if (*duo) {
      DerivedParams dp = derive(cfg);
      YesNoPair pair = build_pair(dp.ell, dp.mu);
      QueryMatrix qm = queries_or_random(queries_path, cfg);
      MonteCarloOptions mc;
      mc.workers = cfg.workers;
      DuoEstimate est = duo_monte_carlo(qm, pair, cfg.samples, Rng(cfg.seed, 0xd0), mc);
      RunReport rep = base_report("duo", cfg);
      rep.config["derived"] = to_json(dp);
      rep.rows.push_back({qm.n(), qm.d(), dp.ell, double(dp.mu), "monte_carlo", est.value, est.stderr_, est.samples, cfg.seed});
      json out{{"n", qm.n()}, {"d", qm.d()}, {"ell", dp.ell}, {"mu", dp.mu}, {"monte_carlo", to_json(est)}};
      if (exact) {
        DuoEstimate ex = duo_exact_small(qm, pair);
        rep.rows.push_back({qm.n(), qm.d(), dp.ell, double(dp.mu), "exact", ex.value, 0.0, 0, cfg.seed});
        const double tol = 3 * est.stderr_ + est.bias_bound;
        out["exact"] = to_json(ex);
        rep.checks.push_back({"monte carlo agrees with exact", std::abs(ex.value - est.value) <= tol,
                              "difference " + std::to_string(std::abs(ex.value - est.value)) + ", tolerance " +
                                  std::to_string(tol)});
      }
      return finish(rep, cfg, out);
    }

    if (*prune_cmd || *scatter_cmd) {
      QueryMatrix x = queries_or_random(queries_path, cfg);
      DerivedParams dp = derive(cfg);
      const int h = cfg.h.value_or(3);
      ScatterParams sp = scatter_params(scatter, x.n(), h, cfg.seed);
      RunReport rep = base_report(*prune_cmd ? "prune" : "scatter-check", cfg);
      rep.config["derived"] = to_json(dp);
      rep.config["scatter_params"] = json{{"h", h}, {"eps", sp.eps}, {"scatter_log_power", sp.scatter_log_power},
                                          {"sum_check_log_power", sp.sum_check_log_power}};
      if (*scatter_cmd) {
        ScatterReport sr = is_scattered(x, h, sp);
        rep.checks.push_back({"scattered", sr.scattered, std::to_string(sr.violations.size()) + " violating subsets"});
        return finish(rep, cfg, scatter_json(sr));
      }
      PruneOutput po = prune(x, h, sp);
      if (!pruned_out.empty()) write_json_file(pruned_out, to_json(po.pruned));
      ScatterReport sr = is_scattered(po.pruned, h, sp);
      rep.checks.push_back({"pruned set is scattered", sr.scattered, sr.mode});
      json out{{"trace", to_json(po.trace)}, {"pruned", to_json(po.pruned)}, {"scatter_check", scatter_json(sr)}};
      return finish(rep, cfg, out);
    }

    if (*moll) {
      if (kmax < 1 || kmax > 4) throw InvalidInput("--k must be in [1, 4]");
      const double eps = cfg.eps.value_or(0.1);
      if (!(eps > 0)) throw InvalidInput("--eps must be positive");
      RunReport rep = base_report("moll-check", cfg);
      json out = json::array();
      for (int k = 1; k <= kmax; ++k) {
        DerivativeReport dr = derivative_bound_check(eps, k, grid);
        out.push_back(json{{"k", k}, {"eps", eps}, {"max_abs", dr.max_abs}, {"bound", dr.bound}, {"holds", dr.holds}});
        rep.checks.push_back({"derivative bound k=" + std::to_string(k), dr.holds, ""});
      }
      return finish(rep, cfg, json{{"bump_normalization", Bump::instance().normalization()}, {"derivatives", out}});
    }

    if (*lind || *sweep) {
      RunReport rep = *lind ? experiment_lindeberg(cfg) : experiment_lowerbound_sweep(cfg);
      write_report(rep, output_dir(cfg));
      std::cout << rep.to_json().dump(2) << std::endl;
      for (const auto& c : rep.checks)
        if (!c.passed) std::cerr << "check failed: " << c.name << ": " << c.detail << std::endl;
      return rep.passed() ? kOk : kAssertion;
    }

    if (*verify) {
      AcceptanceOptions opt;
      opt.quick = quick;
      opt.seed = cfg.seed;
      opt.workers = cfg.workers;
      RunReport rep = base_report("verify-all", cfg);
      run_acceptance(opt, [&](const CriterionResult& r) {
        std::cout << format_result(r) << std::endl;
        rep.checks.push_back({"criterion " + std::to_string(r.id) + " " + r.title, r.passed, r.detail});
        rep.rows.push_back({0, 0, 0, 0.0, "criterion_" + std::to_string(r.id), r.passed ? 1.0 : 0.0, 0.0, 0, cfg.seed});
      });
      write_report(rep, output_dir(cfg));
      return rep.passed() ? kOk : kAssertion;
    }
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << std::endl;
    return kUsage;
  } catch (const ResourceGuard& e) {
    std::cerr << "resource guard: " << e.what() << std::endl;
    return kUsage;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return kAssertion;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kAssertion;
  }
  return kUsage;
}
