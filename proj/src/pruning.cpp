#include "monotest/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

namespace monotest {

ScatterParams ScatterParams::asymptotic(int n, int h) {
  ScatterParams p;
  p.h = h;
  p.eps = std::pow(static_cast<double>(n), 4.0 / h - 0.5);
  return p;
}

ScatterParams ScatterParams::desk(int n, int h) {
  ScatterParams p = asymptotic(n, h);
  p.scatter_log_power = 0.0;
  return p;
}

CubePointSet deduplicate(const CubePointSet& x, std::vector<int>* kept) {
  std::set<std::vector<int>> seen;
  std::vector<int> idx;
  for (int i = 0; i < x.d(); ++i) {
    Eigen::VectorXi row = x.signs().row(i).transpose();
    if (seen.emplace(row.data(), row.data() + row.size()).second) idx.push_back(i);
  }
  if (kept) *kept = idx;
  return x.select_rows(idx);
}

namespace {

constexpr double kDistTol = 1e-12;

int hamming(const Eigen::MatrixXi& a, int i, const Eigen::MatrixXi& b, int j) {
  return static_cast<int>((a.row(i).array() != b.row(j).array()).count());
}

// Per-subset analysis: distances of every candidate point to span(A), the
// scan prefilter radius, and lazily computed compatibility / cover patterns.
class SubsetEngine {
 public:
  SubsetEngine(const CubePointSet& x, const CubePointSet& a, const std::vector<bool>& excluded,
               const ScatterParams& params)
      : x_(x), a_(a), params_(params), proj_(a.entries()) {
    const int m = x.d();
    dist_.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
      if (excluded[i]) continue;
      dist_[i] = proj_.dist(x.row(i));
      order_.push_back(i);
    }
    std::sort(order_.begin(), order_.end(), [&](int p, int q) {
      return dist_[p] < dist_[q] || (dist_[p] == dist_[q] && p < q);
    });
    const double L = std::pow(log_n(x.n()), params.scatter_log_power);
    scale_ = static_cast<double>(m) * L;
    r_star_ = -1;
    for (size_t j = 0; j < order_.size(); ++j) {
      double rho = dist_[order_[j]];
      size_t count = j + 1;
      while (count < order_.size() && dist_[order_[count]] <= rho + kDistTol) ++count;
      if (static_cast<double>(count) > rho * scale_) r_star_ = rho;
    }
    classified_.assign(m, false);
    compatible_.assign(m, false);
    pattern_.assign(m, -1);
  }

  double r_star() const { return r_star_; }

  std::optional<ScatterViolation> max_violation() {
    if (r_star_ < 0) return std::nullopt;
    prepare(r_star_);
    std::optional<ScatterViolation> best;
    std::set<int> patterns;
    int compat = 0;
    size_t j = 0;
    while (j < order_.size() && dist_[order_[j]] <= r_star_ + kDistTol) {
      double rho = dist_[order_[j]];
      while (j < order_.size() && dist_[order_[j]] <= rho + kDistTol) {
        int i = order_[j++];
        classify(i);
        if (compatible_[i]) {
          ++compat;
          patterns.insert(pattern_[i]);
        }
      }
      int remove = compat - static_cast<int>(patterns.size());
      double thr = rho * scale_;
      if (remove > thr) best = ScatterViolation{{}, rho, remove, thr};
    }
    return best;
  }

  PartitionResult partition(double r) {
    prepare(std::max(r, r_star_));
    PartitionResult out;
    out.r = r;
    out.gamma1 = gamma1_;
    out.a = a_;
    std::map<int, int> rep;  // pattern -> representative
    std::vector<int> compat_pts;
    for (int i : order_) {
      if (dist_[i] > r + kDistTol) break;
      classify(i);
      if (!compatible_[i]) {
        out.incomp.push_back(i);
        continue;
      }
      compat_pts.push_back(i);
      auto it = rep.find(pattern_[i]);
      if (it == rep.end()) rep[pattern_[i]] = i;  // order_ is sorted by (dist, index)
    }
    std::set<int> cover_set_idx;
    for (const auto& kv : rep) cover_set_idx.insert(kv.second);
    for (int i : compat_pts)
      if (!cover_set_idx.count(i)) out.remove.push_back(i);
    out.cover.assign(cover_set_idx.begin(), cover_set_idx.end());
    std::sort(out.remove.begin(), out.remove.end());
    std::sort(out.incomp.begin(), out.incomp.end());

    const double cover_cap = std::pow(2.0, params_.h * params_.h);
    if (static_cast<double>(out.cover.size()) > cover_cap)
      throw NumericalFailure("partition: cover size " + std::to_string(out.cover.size()) + " exceeds 2^{h^2}");

    const double ln = log_n(x_.n());
    const double sum_bound = (r + params_.eps) * std::pow(ln, params_.sum_check_log_power);
    for (int w : out.remove) {
      Vec W = x_.row(w);
      int own = rep.at(pattern_[w]);
      if ((x_.row(own) - W).norm() > 4 * r + 1e-9) {
        std::ostringstream msg;
        msg << "partition: point " << w << " is farther than 4r from its cover point " << own << " (r=" << r << ")";
        throw NumericalFailure(msg.str());
      }
      for (int v : out.cover) {
        Vec V = x_.row(v);
        if ((V - W).norm() > 4 * r + 1e-9) continue;
        out.close_pairs.emplace_back(v, w);
        double s = std::abs((V - W).sum());
        if (s > sum_bound + 1e-9) {
          std::ostringstream msg;
          msg << "partition: coordinate-sum check failed for cover " << v << ", remove " << w << ": |sum| = " << s
              << " > " << sum_bound << " (r=" << r << ", eps=" << params_.eps << ")";
          throw NumericalFailure(msg.str());
        }
      }
    }
    return out;
  }

 private:
  void prepare(double pool_radius) {
    if (params_.gamma1_override > 0) {
      gamma1_ = params_.gamma1_override;
    } else if (pool_radius > pool_radius_) {
      for (int i : order_) {
        if (dist_[i] > pool_radius + kDistTol) break;
        if (dist_[i] <= pool_radius_ + kDistTol && pool_radius_ >= 0) continue;
        gamma1_ = std::max(gamma1_, low_weight_rep(x_.row(i), a_).realized_gamma1);
      }
      if (pool_radius_ >= 0 && gamma1_ != gamma1_used_) std::fill(classified_.begin(), classified_.end(), false);
    }
    pool_radius_ = std::max(pool_radius_, pool_radius);
    if (!cover_) cover_ = cover_set(a_);
  }

  void classify(int i) {
    if (classified_[i] && gamma1_used_ == gamma1_) return;
    gamma1_used_ = gamma1_;
    classified_[i] = true;
    compatible_[i] = compatibility(x_.row(i), a_, params_.eps, gamma1_).compatible;
    if (!compatible_[i]) return;
    int best = -1, best_d = 0;
    for (int c = 0; c < cover_->d(); ++c) {
      int hd = hamming(cover_->signs(), c, x_.signs(), i);
      if (best < 0 || hd < best_d) {
        best = c;
        best_d = hd;
      }
    }
    pattern_[i] = best;
  }

  const CubePointSet& x_;
  CubePointSet a_;
  const ScatterParams& params_;
  SpanProjector proj_;
  std::vector<double> dist_;
  std::vector<int> order_;
  double scale_ = 1.0;
  double r_star_ = -1.0;
  double pool_radius_ = -1.0;
  double gamma1_ = 1.0;
  double gamma1_used_ = -1.0;
  std::optional<CubePointSet> cover_;
  std::vector<bool> classified_, compatible_;
  std::vector<int> pattern_;
};

std::vector<bool> exclusion_mask(const CubePointSet& x, const CubePointSet& a) {
  std::vector<bool> ex(x.d(), false);
  for (int i = 0; i < x.d(); ++i)
    for (int j = 0; j < a.d(); ++j)
      if (x.signs().row(i) == a.signs().row(j)) ex[i] = true;
  return ex;
}

double binom(int m, int k) {
  double r = 1;
  for (int i = 0; i < k; ++i) r = r * (m - i) / (i + 1);
  return r;
}

// Calls visit(subset) for subsets of sizes 1..h in the scan order; stops when
// visit returns true. Returns the number of subsets visited.
template <typename Visit>
std::int64_t for_each_subset(int m, int h, const ScatterParams& params, std::string* mode, double* total,
                             Visit&& visit) {
  double count = 0;
  for (int k = 1; k <= std::min(h, m); ++k) count += binom(m, k);
  if (total) *total = count;
  std::int64_t visited = 0;
  if (count <= static_cast<double>(params.exhaustive_budget)) {
    if (mode) *mode = "exhaustive";
    for (int k = 1; k <= std::min(h, m); ++k) {
      std::vector<int> s(k);
      std::iota(s.begin(), s.end(), 0);
      while (true) {
        ++visited;
        if (visit(s)) return visited;
        int i = k - 1;
        while (i >= 0 && s[i] == m - k + i) --i;
        if (i < 0) break;
        ++s[i];
        for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
      }
    }
    return visited;
  }
  if (mode) *mode = "sampled";
  Rng rng(params.seed, 0x5ca77e7ULL);
  for (int k = 1; k <= std::min(h, m); ++k) {
    for (int t = 0; t < params.sampled_per_size; ++t) {
      std::set<int> chosen;  // Floyd's algorithm
      for (int j = m - k; j < m; ++j) {
        int v = static_cast<int>(rng.below(j + 1));
        if (!chosen.insert(v).second) chosen.insert(j);
      }
      std::vector<int> s(chosen.begin(), chosen.end());
      ++visited;
      if (visit(s)) return visited;
    }
  }
  return visited;
}

}  // namespace

PartitionResult partition_r(const CubePointSet& x, const CubePointSet& a, double r, const ScatterParams& params) {
  if (a.d() < 1 || a.d() > params.h) throw InvalidInput("partition_r: need 0 < |A| <= h");
  if (r < 0) throw InvalidInput("partition_r: r must be nonnegative");
  if (x.n() != a.n()) throw InvalidInput("partition_r: dimension mismatch");
  CubePointSet xd = deduplicate(x);
  SubsetEngine engine(xd, a, exclusion_mask(xd, a), params);
  PartitionResult p = engine.partition(r);
  // Report indices against the caller's x (first occurrence of each row).
  std::vector<int> kept;
  deduplicate(x, &kept);
  for (auto* list : {&p.cover, &p.remove, &p.incomp})
    for (int& i : *list) i = kept[i];
  for (auto& pr : p.close_pairs) pr = {kept[pr.first], kept[pr.second]};
  return p;
}

ScatterReport is_scattered(const CubePointSet& x, int h, const ScatterParams& params) {
  if (x.d() < 1) throw InvalidInput("is_scattered: empty query set");
  CubePointSet xd = deduplicate(x);
  ScatterReport report;
  report.subsets_checked =
      for_each_subset(xd.d(), h, params, &report.mode, &report.subsets_total, [&](const std::vector<int>& s) {
        std::vector<bool> ex(xd.d(), false);
        for (int i : s) ex[i] = true;
        SubsetEngine engine(xd, xd.select_rows(s), ex, params);
        if (auto v = engine.max_violation()) {
          v->a = s;
          report.violations.push_back(*v);
        }
        return false;
      });
  report.scattered = report.violations.empty();
  return report;
}

double PruneTrace::radius_sum() const {
  double s = 0;
  for (const auto& st : steps) s += st.r;
  return s;
}

double PruneTrace::telescoping_sum() const {
  double s = 0;
  for (const auto& st : steps) s += static_cast<double>(st.removed.size()) / st.size_before;
  return s;
}

PruneOutput prune(const CubePointSet& x, int h, const ScatterParams& params) {
  if (x.d() < 1) throw InvalidInput("prune: empty query set");
  PruneTrace trace;
  trace.initial_size = x.d();
  std::vector<int> alive;
  deduplicate(x, &alive);
  trace.duplicates_removed = x.d() - static_cast<int>(alive.size());
  while (true) {
    CubePointSet cur = x.select_rows(alive);
    std::optional<PruneStep> step;
    for_each_subset(cur.d(), h, params, nullptr, nullptr, [&](const std::vector<int>& s) {
      std::vector<bool> ex(cur.d(), false);
      for (int i : s) ex[i] = true;
      SubsetEngine engine(cur, cur.select_rows(s), ex, params);
      auto v = engine.max_violation();
      if (!v) return false;
      PartitionResult part = engine.partition(v->r);
      PruneStep st;
      for (int i : s) st.a.push_back(alive[i]);
      st.r = v->r;
      for (int i : part.remove) st.removed.push_back(alive[i]);
      st.size_before = cur.d();
      step = st;
      return true;
    });
    if (!step) break;
    if (step->removed.empty()) throw NumericalFailure("prune: violating step removed nothing");
    std::set<int> gone(step->removed.begin(), step->removed.end());
    std::vector<int> next;
    for (int i : alive)
      if (!gone.count(i)) next.push_back(i);
    alive = std::move(next);
    trace.steps.push_back(std::move(*step));
  }
  trace.final_size = static_cast<int>(alive.size());
  trace.kept = alive;
  return {x.select_rows(alive), trace};
}

DriftResult duo_drift_check(const CubePointSet& x, const CubePointSet& pruned_x, const YesNoPair& pair,
                            std::int64_t samples, Rng rng, const MonteCarloOptions& opt) {
  if (x.n() != pruned_x.n()) throw InvalidInput("duo_drift_check: dimension mismatch");
  if (x.d() > 64) throw ResourceGuard("duo_drift_check: d <= 64 required");
  std::vector<int> pos;
  for (int i = 0; i < pruned_x.d(); ++i) {
    int found = -1;
    for (int j = 0; j < x.d() && found < 0; ++j)
      if (x.signs().row(j) == pruned_x.signs().row(i)) found = j;
    if (found < 0) throw InvalidInput("duo_drift_check: pruned set is not a subset of x");
    pos.push_back(found);
  }
  auto restrict_key = [&](std::uint64_t key) {
    std::uint64_t out = 0;
    for (size_t i = 0; i < pos.size(); ++i)
      if ((key >> pos[i]) & 1) out |= std::uint64_t{1} << i;
    return out;
  };
  auto counts = [&](const DiscreteRV& rv, Rng r, PatternCounts& full, PatternCounts& sub) {
    PatternCounts c = sample_pattern_counts(x, rv, samples, r, opt.workers);
    for (const auto& [k, v] : c) {
      full[k] += v;
      sub[restrict_key(k)] += v;
    }
  };
  PatternCounts sf, ss, tf, ts;
  counts(pair.yes_rv, rng.split(1), sf, ss);
  counts(pair.no_rv, rng.split(2), tf, ts);
  DriftResult r;
  r.before = duo_from_counts(sf, tf, samples, x.d(), rng.split(3), opt);
  r.after = duo_from_counts(ss, ts, samples, pruned_x.d(), rng.split(4), opt);
  r.drift = r.before.value - r.after.value;
  r.combined_stderr = std::hypot(r.before.stderr_, r.after.stderr_);
  return r;
}

Estimate bad_orthant_mass(const CubePointSet& x, const std::vector<std::pair<int, int>>& pairs,
                          const DiscreteRV& rv, std::int64_t samples, Rng rng) {
  CoefficientSampler sampler(x, {{0, x.n(), &rv}});
  std::int64_t hits = 0;
  Vec v(x.d());
  for (std::int64_t s = 0; s < samples; ++s) {
    sampler.draw_unscaled(rng, v);
    for (const auto& [a, b] : pairs)
      if ((v(a) >= -kZeroSnap) != (v(b) >= -kZeroSnap)) {
        ++hits;
        break;
      }
  }
  double p = static_cast<double>(hits) / samples;
  return {p, std::sqrt(p * (1 - p) / samples), samples};
}

}  // namespace monotest
