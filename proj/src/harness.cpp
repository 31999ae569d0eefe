#include "monotest/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "monotest/geometry.hpp"
#include "monotest/mollifier.hpp"

namespace monotest {

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: bad value for \"") + key + "\": " + e.what());
  }
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  read_field(j, key, v);
  out = v;
}

template <typename T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  static const std::set<std::string> known{"seed",    "n",     "d",          "ell",       "mu",
                                           "c",       "h",     "eps",        "delta",     "samples",
                                           "workers", "quick", "exact",      "scatter",   "n_grid",
                                           "gammas",  "positions", "output_dir"};
  if (!j.is_object()) throw InvalidInput("config: expected a JSON object");
  for (const auto& item : j.items())
    if (!known.count(item.key())) throw InvalidInput("config: unknown key \"" + item.key() + "\"");
  ExperimentConfig c;
  read_field(j, "seed", c.seed);
  read_field(j, "n", c.n);
  read_field(j, "d", c.d);
  read_optional(j, "ell", c.ell);
  read_optional(j, "mu", c.mu);
  read_field(j, "c", c.c);
  read_optional(j, "h", c.h);
  read_optional(j, "eps", c.eps);
  read_optional(j, "delta", c.delta);
  read_field(j, "samples", c.samples);
  read_field(j, "workers", c.workers);
  read_field(j, "quick", c.quick);
  read_field(j, "exact", c.exact);
  read_field(j, "scatter", c.scatter);
  read_field(j, "n_grid", c.n_grid);
  read_field(j, "gammas", c.gammas);
  read_field(j, "positions", c.positions);
  read_field(j, "output_dir", c.output_dir);
  if (c.n < 1 || c.d < 1) throw InvalidInput("config: n and d must be positive");
  if (c.samples < 1) throw InvalidInput("config: samples must be positive");
  if (c.workers < 1) throw InvalidInput("config: workers must be positive");
  if (c.positions < 1) throw InvalidInput("config: positions must be positive");
  if (c.scatter != "desk" && c.scatter != "asymptotic") throw InvalidInput("config: scatter must be \"desk\" or \"asymptotic\"");
  return c;
}

json ExperimentConfig::to_json() const {
  return json{{"seed", seed},       {"n", n},
              {"d", d},             {"ell", opt_json(ell)},
              {"mu", opt_json(mu)}, {"c", c},
              {"h", opt_json(h)},   {"eps", opt_json(eps)},
              {"delta", opt_json(delta)}, {"samples", samples},
              {"workers", workers}, {"quick", quick},
              {"exact", exact},     {"scatter", scatter},
              {"n_grid", n_grid},   {"gammas", gammas},
              {"positions", positions}, {"output_dir", output_dir}};
}

DerivedParams derive(const ExperimentConfig& cfg) {
  DerivedParams p;
  p.h = cfg.h.value_or(choose_h(cfg.c));
  if (p.h < 1) throw InvalidInput("config: h must be positive");
  const double n = cfg.n;
  p.eps = cfg.eps.value_or(std::pow(n, 4.0 / p.h - 0.5));
  p.delta = cfg.delta.value_or(1.0 / std::sqrt(n));
  if (cfg.ell) {
    p.ell = *cfg.ell;
    p.ell_source = "config";
  } else if (p.h * p.h * p.h <= kMaxMomentOrder) {
    p.ell = p.h * p.h * p.h;
    p.ell_source = "h^3";
  } else {
    p.ell = 3;
    p.ell_source = "default (h^3 exceeds the moment order cap)";
  }
  if (p.ell < 1 || p.ell % 2 == 0 || p.ell > kMaxMomentOrder)
    throw InvalidInput("config: ell must be odd and in [1, " + std::to_string(kMaxMomentOrder) + "]");
  p.mu = cfg.mu.value_or(find_mu(p.ell));
  return p;
}

json to_json(const DerivedParams& p) {
  return json{{"h", p.h},   {"eps", p.eps}, {"delta", p.delta},
              {"ell", p.ell}, {"mu", p.mu}, {"ell_source", p.ell_source}};
}

std::filesystem::path output_dir(const ExperimentConfig& cfg) {
  const char* env = std::getenv(kOutputDirEnv);
  if (env && *env) return env;
  return cfg.output_dir;
}

bool RunReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

json RunReport::to_json() const {
  json checks_json = json::array();
  for (const auto& c : checks) checks_json.push_back(json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  json rows_json = json::array();
  for (const auto& r : rows)
    rows_json.push_back(json{{"n", r.n},
                             {"d", r.d},
                             {"ell", r.ell},
                             {"mu", r.mu},
                             {"method", r.method},
                             {"value", r.value},
                             {"stderr", r.stderr_},
                             {"samples", r.samples},
                             {"seed", r.seed}});
  return json{{"experiment", experiment},
              {"versions", {{"monotest", kVersion}, {"metrics_schema", kCsvSchemaVersion}}},
              {"config", config},
              {"passed", passed()},
              {"checks", checks_json},
              {"rows", rows_json},
              {"details", details},
              {"wall_seconds", wall_seconds}};
}

void write_report(const RunReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_json_file(dir / "report.json", report.to_json());
  std::ofstream csv(dir / "metrics.csv");
  if (!csv) throw InvalidInput("cannot write " + (dir / "metrics.csv").string());
  csv << metrics_csv(report.rows);
}

RunReport experiment_lindeberg(const ExperimentConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  const DerivedParams dp = derive(cfg);
  std::vector<int> grid = cfg.n_grid;
  if (grid.empty()) grid = cfg.quick ? std::vector<int>{256, 1024} : std::vector<int>{256, 1024, 4096};
  const YesNoPair pair = build_pair(dp.ell, dp.mu);
  const Rng root(cfg.seed);

  RunReport rep;
  rep.experiment = "lindeberg";
  rep.config = cfg.to_json();
  rep.config["derived"] = to_json(dp);
  json per_n = json::array();
  double prev_mean = -1, prev_se = 0;
  int prev_n = 0;
  for (int n : grid) {
    Rng rng = root.split(static_cast<std::uint64_t>(n));
    QueryMatrix qm = QueryMatrix::random(cfg.d, n, rng);
    std::vector<std::uint64_t> keys = pilot_union(qm, pair, std::max<std::int64_t>(cfg.samples / 4, 1000), rng.split(1));
    if (keys.empty()) keys.push_back((std::uint64_t{1} << cfg.d) - 1);
    OrthantMollifier psi(cfg.d, keys, dp.eps);

    const int positions = std::min(cfg.positions, n);
    double sum = 0, var = 0;
    for (int k = 0; k < positions; ++k) {
      int i = positions == 1 ? 1 : 1 + static_cast<int>(std::llround(static_cast<double>(k) * (n - 1) / (positions - 1)));
      Estimate g = lindeberg_step_gap(qm, pair, psi, i, cfg.samples, rng.split(100 + k), cfg.workers);
      sum += g.value;
      var += g.stderr_ * g.stderr_;
    }
    const double mean = sum / positions, mean_se = std::sqrt(var) / positions;
    Estimate es = psi_expectation(qm, pair.yes_rv, psi, cfg.samples, rng.split(2), cfg.workers);
    Estimate et = psi_expectation(qm, pair.no_rv, psi, cfg.samples, rng.split(3), cfg.workers);
    const double direct = std::abs(es.value - et.value);
    const double direct_se = std::hypot(es.stderr_, et.stderr_);
    const double summed = n * mean, summed_se = n * mean_se;

    auto row = [&](const std::string& method, double v, double se, std::int64_t samples) {
      rep.rows.push_back({n, cfg.d, dp.ell, static_cast<double>(dp.mu), method, v, se, samples, cfg.seed});
    };
    row("lindeberg_mean_step_gap", mean, mean_se, cfg.samples * positions);
    row("lindeberg_summed_gap", summed, summed_se, cfg.samples * positions);
    row("psi_direct_gap", direct, direct_se, 2 * cfg.samples);
    per_n.push_back(json{{"n", n},
                         {"union_size", keys.size()},
                         {"positions", positions},
                         {"mean_step_gap", mean},
                         {"mean_step_gap_stderr", mean_se},
                         {"summed_gap", summed},
                         {"direct_gap", direct},
                         {"direct_gap_stderr", direct_se}});

    rep.checks.push_back({"summed gaps dominate direct gap at n=" + std::to_string(n),
                          summed >= direct - 3 * direct_se,
                          "summed " + fmt(summed) + " vs direct " + fmt(direct) + " - 3*" + fmt(direct_se)});
    if (prev_mean >= 0) {
      const double tol = 2 * std::hypot(prev_se, mean_se);
      rep.checks.push_back({"mean step gap non-increasing " + std::to_string(prev_n) + " -> " + std::to_string(n),
                            mean <= prev_mean + tol,
                            fmt(prev_mean) + " -> " + fmt(mean) + " (tolerance " + fmt(tol) + ")"});
    }
    prev_mean = mean;
    prev_se = mean_se;
    prev_n = n;
  }
  rep.details["per_n"] = per_n;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

RunReport experiment_lowerbound_sweep(const ExperimentConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  const DerivedParams dp = derive(cfg);
  std::vector<int> grid = cfg.n_grid;
  if (grid.empty()) grid = cfg.quick ? std::vector<int>{64, 256} : std::vector<int>{64, 256, 1024};
  const YesNoPair pair = build_pair(dp.ell, dp.mu);
  const Rng root(cfg.seed);
  MonteCarloOptions mc;
  mc.workers = cfg.workers;

  RunReport rep;
  rep.experiment = "lowerbound_sweep";
  rep.config = cfg.to_json();
  rep.config["derived"] = to_json(dp);
  json per_run = json::array();

  for (int n : grid) {
    for (size_t g = 0; g < cfg.gammas.size(); ++g) {
      const double gamma = cfg.gammas[g];
      const int d = std::max(1, static_cast<int>(std::floor(std::pow(static_cast<double>(n), gamma) + 1e-12)));
      Rng rng = root.split(static_cast<std::uint64_t>(n) * 16 + g);
      QueryMatrix x = QueryMatrix::random(d, n, rng);
      const int h = std::max(1, std::min(dp.h, d));
      ScatterParams sp = cfg.scatter == "asymptotic" ? ScatterParams::asymptotic(n, dp.h) : ScatterParams::desk(n, dp.h);
      sp.seed = cfg.seed;
      PruneOutput pr = prune(x, h, sp);
      DriftResult dr = duo_drift_check(x, pr.pruned, pair, cfg.samples, rng.split(7), mc);
      auto row = [&](const std::string& method, int dd, const DuoEstimate& e) {
        rep.rows.push_back({n, dd, dp.ell, static_cast<double>(dp.mu), method, e.value, e.stderr_, e.samples, cfg.seed});
      };
      row("duo_mc_raw", d, dr.before);
      row("duo_mc_pruned", pr.pruned.d(), dr.after);
      per_run.push_back(json{{"n", n},
                             {"gamma", gamma},
                             {"d", d},
                             {"pruned_d", pr.pruned.d()},
                             {"duo_raw", to_json(dr.before)},
                             {"duo_pruned", to_json(dr.after)},
                             {"prune_trace", to_json(pr.trace)}});
    }
  }

  // Exact cross-checks at a size where enumeration is feasible.
  const int n_small = 8;
  Rng rng = root.split(0xC0FFEE);
  QueryMatrix one = QueryMatrix::random(1, n_small, rng);
  DuoEstimate exact1 = duo_exact_small(one, pair);
  DuoEstimate mc1 = duo_monte_carlo(one, pair, cfg.samples, rng.split(1), mc);
  rep.rows.push_back({n_small, 1, dp.ell, static_cast<double>(dp.mu), "duo_exact", exact1.value, 0.0, 0, cfg.seed});
  rep.rows.push_back({n_small, 1, dp.ell, static_cast<double>(dp.mu), "duo_mc", mc1.value, mc1.stderr_, mc1.samples, cfg.seed});
  const double tol = 3 * mc1.stderr_ + mc1.bias_bound;
  rep.checks.push_back({"d=1 Monte Carlo matches exact", std::abs(mc1.value - exact1.value) <= tol,
                        "exact " + fmt(exact1.value) + ", mc " + fmt(mc1.value) + ", tolerance " + fmt(tol)});
  const int copies = cfg.quick ? 3 : 5;
  Eigen::MatrixXi dup = one.signs().replicate(copies, 1);
  DuoEstimate exact_dup = duo_exact_small(QueryMatrix(dup), pair);
  rep.checks.push_back({"duplicated rows leave exact d_UO unchanged", exact_dup.value == exact1.value,
                        "d=1 " + fmt(exact1.value) + ", d=" + std::to_string(copies) + " " + fmt(exact_dup.value)});
  rep.details["runs"] = per_run;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

}  // namespace monotest
