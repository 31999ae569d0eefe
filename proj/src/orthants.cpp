#include "monotest/orthants.hpp"

#include <algorithm>
#include <cmath>

#include "monotest/parallel.hpp"

namespace monotest {

std::vector<int> sign_pattern(const Eigen::Ref<const Vec>& v) {
  std::vector<int> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = sign_of(v(i));
  return out;
}

std::uint64_t pattern_key(const Eigen::Ref<const Vec>& v, double snap) {
  if (v.size() > 64) throw ResourceGuard("sign-pattern keys are limited to d <= 64");
  std::uint64_t key = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) >= -snap) key |= std::uint64_t{1} << i;
  return key;
}

std::vector<int> key_to_pattern(std::uint64_t key, int d) {
  std::vector<int> p(d);
  for (int i = 0; i < d; ++i) p[i] = ((key >> i) & 1) ? 1 : -1;
  return p;
}

double SignPatternDistribution::total() const {
  double s = 0;
  for (const auto& kv : mass) s += kv.second;
  return s;
}

double total_variation(const SignPatternDistribution& p, const SignPatternDistribution& q) {
  // Summed in sorted order so the result does not depend on key labels.
  std::vector<double> terms;
  for (const auto& [k, v] : p.mass) {
    auto it = q.mass.find(k);
    terms.push_back(std::abs(v - (it == q.mass.end() ? 0.0 : it->second)));
  }
  for (const auto& [k, v] : q.mass)
    if (!p.mass.count(k)) terms.push_back(std::abs(v));
  std::sort(terms.begin(), terms.end());
  double s = 0;
  for (double t : terms) s += t;
  return 0.5 * s;
}

std::string to_string(DuoMethod m) { return m == DuoMethod::Exact ? "exact" : "monte_carlo"; }

SignPatternDistribution exact_pattern_distribution(const QueryMatrix& qm, const DiscreteRV& rv) {
  const int n = qm.n(), d = qm.d();
  if (d > 64) throw ResourceGuard("sign-pattern keys are limited to d <= 64");
  double combos = std::pow(static_cast<double>(rv.support_size()), n);
  if (combos > kExactEnumerationGuard)
    throw ResourceGuard("exact d_UO enumeration needs " + std::to_string(combos) + " > 1e7 combinations");
  Mat cols = qm.signs().cast<double>();
  SignPatternDistribution dist;
  dist.d = d;
  std::vector<Vec> partial(n + 1, Vec::Zero(d));
  std::vector<double> prob(n + 1, 1.0);
  std::vector<int> choice(n, 0);
  // Iterative odometer over all atom assignments.
  int col = 0;
  while (true) {
    if (col == n) {
      dist.mass[pattern_key(partial[n], kZeroSnap)] += prob[n];
      --col;
      while (col >= 0 && ++choice[col] == rv.support_size()) {
        choice[col] = 0;
        --col;
      }
      if (col < 0) break;
    }
    partial[col + 1] = partial[col] + rv.atoms[choice[col]] * cols.col(col);
    prob[col + 1] = prob[col] * rv.probs[choice[col]];
    ++col;
  }
  return dist;
}

DuoEstimate duo_exact_small(const QueryMatrix& qm, const YesNoPair& pair) {
  SignPatternDistribution s = exact_pattern_distribution(qm, pair.yes_rv);
  SignPatternDistribution t = exact_pattern_distribution(qm, pair.no_rv);
  DuoEstimate e;
  e.value = std::clamp(total_variation(s, t), 0.0, 1.0);
  e.method = DuoMethod::Exact;
  return e;
}

PatternCounts sample_pattern_counts(const QueryMatrix& qm, const DiscreteRV& rv, std::int64_t samples, Rng rng,
                                    int workers) {
  if (qm.d() > 64) throw ResourceGuard("sign-pattern keys are limited to d <= 64");
  CoefficientSampler sampler(qm, {{0, qm.n(), &rv}});
  const std::int64_t chunks = (samples + kChunkSize - 1) / kChunkSize;
  std::vector<PatternCounts> parts(chunks);
  for_each_chunk(samples, workers, [&](std::int64_t c, std::int64_t, std::int64_t count) {
    Rng local = rng.split(c);
    Vec v(qm.d());
    PatternCounts& pc = parts[c];
    for (std::int64_t s = 0; s < count; ++s) {
      sampler.draw_unscaled(local, v);
      ++pc[pattern_key(v, kZeroSnap)];
    }
  });
  PatternCounts out = std::move(parts.front());
  for (std::int64_t c = 1; c < chunks; ++c)
    for (const auto& [k, v] : parts[c]) out[k] += v;
  return out;
}

namespace {

// Multinomial resample of a histogram through a binomial chain.
std::vector<std::int64_t> resample(const std::vector<std::int64_t>& counts, std::int64_t total, Rng& rng) {
  std::vector<std::int64_t> out(counts.size(), 0);
  std::int64_t left = total, rest = total;
  for (size_t i = 0; i < counts.size() && left > 0; ++i) {
    if (counts[i] == 0) continue;
    if (counts[i] >= rest) {
      out[i] = left;
      break;
    }
    std::binomial_distribution<std::int64_t> bin(left, static_cast<double>(counts[i]) / rest);
    out[i] = bin(rng);
    left -= out[i];
    rest -= counts[i];
  }
  return out;
}

}  // namespace

DuoEstimate duo_from_counts(const PatternCounts& s, const PatternCounts& t, std::int64_t samples, int d, Rng rng,
                            const MonteCarloOptions& opt) {
  if (samples < 1) throw InvalidInput("duo: samples must be positive");
  std::vector<std::uint64_t> keys;
  for (const auto& kv : s) keys.push_back(kv.first);
  for (const auto& kv : t)
    if (!s.count(kv.first)) keys.push_back(kv.first);
  std::sort(keys.begin(), keys.end());
  std::vector<std::int64_t> cs(keys.size()), ct(keys.size());
  for (size_t i = 0; i < keys.size(); ++i) {
    auto a = s.find(keys[i]);
    auto b = t.find(keys[i]);
    cs[i] = a == s.end() ? 0 : a->second;
    ct[i] = b == t.end() ? 0 : b->second;
  }
  const double N = static_cast<double>(samples);
  auto tv = [&](const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
    double acc = 0;
    for (size_t i = 0; i < x.size(); ++i) acc += std::abs(static_cast<double>(x[i] - y[i]));
    return 0.5 * acc / N;
  };
  DuoEstimate e;
  e.method = DuoMethod::MonteCarlo;
  e.samples = samples;
  e.value = std::clamp(tv(cs, ct), 0.0, 1.0);
  e.bias_bound = std::min(1.0, std::sqrt(std::pow(2.0, d) / N));

  const std::int64_t work = static_cast<std::int64_t>(keys.size()) * opt.bootstrap * 2;
  if (opt.bootstrap >= 2 && work <= opt.bootstrap_budget) {
    double sum = 0, sum2 = 0;
    for (int b = 0; b < opt.bootstrap; ++b) {
      Rng local = rng.split(b);
      double v = tv(resample(cs, samples, local), resample(ct, samples, local));
      sum += v;
      sum2 += v * v;
    }
    double mean = sum / opt.bootstrap;
    e.stderr_ = std::sqrt(std::max(0.0, (sum2 - opt.bootstrap * mean * mean) / (opt.bootstrap - 1)));
    e.stderr_method = "bootstrap";
  } else {
    double vs = 0, ms = 0, vt = 0, mt = 0;
    for (size_t i = 0; i < keys.size(); ++i) {
      double p = cs[i] / N, q = ct[i] / N;
      double g = p > q ? 0.5 : (p < q ? -0.5 : 0.0);
      vs += g * g * p;
      ms += g * p;
      vt += g * g * q;
      mt += g * q;
    }
    e.stderr_ = std::sqrt(std::max(0.0, (vs - ms * ms) / N + (vt - mt * mt) / N));
    e.stderr_method = "delta";
  }
  return e;
}

DuoEstimate duo_monte_carlo(const QueryMatrix& qm, const YesNoPair& pair, std::int64_t samples, Rng rng,
                            const MonteCarloOptions& opt) {
  PatternCounts s = sample_pattern_counts(qm, pair.yes_rv, samples, rng.split(1), opt.workers);
  PatternCounts t = sample_pattern_counts(qm, pair.no_rv, samples, rng.split(2), opt.workers);
  return duo_from_counts(s, t, samples, qm.d(), rng.split(3), opt);
}

std::vector<std::uint64_t> pilot_union(const QueryMatrix& qm, const YesNoPair& pair, std::int64_t samples, Rng rng) {
  PatternCounts s = sample_pattern_counts(qm, pair.yes_rv, samples, rng.split(1));
  PatternCounts t = sample_pattern_counts(qm, pair.no_rv, samples, rng.split(2));
  std::vector<std::uint64_t> keys;
  for (const auto& [k, c] : s) {
    auto it = t.find(k);
    if (c > (it == t.end() ? 0 : it->second)) keys.push_back(k);
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

namespace {

struct Moments {
  double sum = 0, sum2 = 0;
};

Estimate finish(const std::vector<Moments>& parts, std::int64_t samples, bool absolute) {
  double s = 0, s2 = 0;
  for (const auto& p : parts) {
    s += p.sum;
    s2 += p.sum2;
  }
  double mean = s / samples;
  double var = samples > 1 ? std::max(0.0, (s2 - samples * mean * mean) / (samples - 1)) : 0.0;
  return {absolute ? std::abs(mean) : mean, std::sqrt(var / samples), samples};
}

}  // namespace

Estimate psi_expectation(const QueryMatrix& qm, const DiscreteRV& rv, const OrthantMollifier& psi,
                         std::int64_t samples, Rng rng, int workers) {
  if (psi.d() != qm.d()) throw InvalidInput("psi_expectation: mollifier dimension mismatch");
  CoefficientSampler sampler(qm, {{0, qm.n(), &rv}});
  std::vector<Moments> parts((samples + kChunkSize - 1) / kChunkSize);
  for_each_chunk(samples, workers, [&](std::int64_t c, std::int64_t, std::int64_t count) {
    Rng local = rng.split(c);
    Vec v(qm.d());
    for (std::int64_t s = 0; s < count; ++s) {
      sampler.draw_unscaled(local, v);
      double y = psi(v * sampler.scale());
      parts[c].sum += y;
      parts[c].sum2 += y * y;
    }
  });
  return finish(parts, samples, false);
}

Estimate lindeberg_step_gap(const QueryMatrix& qm, const YesNoPair& pair, const OrthantMollifier& psi, int i,
                            std::int64_t samples, Rng rng, int workers) {
  if (i < 1 || i > qm.n()) throw InvalidInput("lindeberg_step_gap: i must be in [1, n]");
  if (psi.d() != qm.d()) throw InvalidInput("lindeberg_step_gap: mollifier dimension mismatch");
  CoefficientSampler sampler(qm, {{0, i - 1, &pair.no_rv}, {i, qm.n(), &pair.yes_rv}});
  const Vec col = qm.signs().col(i - 1).cast<double>();
  const double scale = qm.scale();
  std::vector<Moments> parts((samples + kChunkSize - 1) / kChunkSize);
  for_each_chunk(samples, workers, [&](std::int64_t c, std::int64_t, std::int64_t count) {
    Rng local = rng.split(c);
    Vec r(qm.d()), y(qm.d());
    for (std::int64_t s = 0; s < count; ++s) {
      sampler.draw_unscaled(local, r);
      double diff = 0;
      for (int a = 0; a < pair.yes_rv.support_size(); ++a) {
        y = (r + pair.yes_rv.atoms[a] * col) * scale;
        diff += pair.yes_rv.probs[a] * psi(y);
      }
      for (int a = 0; a < pair.no_rv.support_size(); ++a) {
        y = (r + pair.no_rv.atoms[a] * col) * scale;
        diff -= pair.no_rv.probs[a] * psi(y);
      }
      parts[c].sum += diff;
      parts[c].sum2 += diff * diff;
    }
  });
  return finish(parts, samples, true);
}

AnticoncentrationParams AnticoncentrationParams::defaults(int n, int h, const YesNoPair& pair) {
  AnticoncentrationParams p;
  p.eps = std::pow(static_cast<double>(n), 4.0 / h - 0.5);
  p.delta = 1.0 / std::sqrt(static_cast<double>(n));
  p.beta = std::max(pair.yes_rv.max_abs_atom(), pair.no_rv.max_abs_atom());
  return p;
}

Estimate anticoncentration_probe(const QueryMatrix& qm, const YesNoPair& pair, const std::vector<int>& rows,
                                 const AnticoncentrationParams& params, int i, std::int64_t samples, Rng rng) {
  if (i < 1 || i > qm.n()) throw InvalidInput("anticoncentration_probe: i must be in [1, n]");
  if (rows.empty()) throw InvalidInput("anticoncentration_probe: empty index set");
  for (int r : rows)
    if (r < 0 || r >= qm.d()) throw InvalidInput("anticoncentration_probe: row index out of range");
  QueryMatrix sub = qm.select_rows(rows);
  CoefficientSampler sampler(sub, {{0, i - 1, &pair.no_rv}, {i, sub.n(), &pair.yes_rv}});
  const double half = params.eps + params.beta * params.delta;
  std::int64_t hits = 0;
  Vec v(sub.d());
  for (std::int64_t s = 0; s < samples; ++s) {
    sampler.draw_unscaled(rng, v);
    if ((v * sampler.scale()).cwiseAbs().maxCoeff() <= half) ++hits;
  }
  double p = static_cast<double>(hits) / samples;
  return {p, std::sqrt(p * (1 - p) / samples), samples};
}

Estimate gaussian_box_prob(const Mat& a_rows, double mu, const Vec& lo, const Vec& hi, std::int64_t samples,
                           Rng rng) {
  const int t = static_cast<int>(a_rows.rows());
  if (lo.size() != t || hi.size() != t) throw InvalidInput("gaussian_box_prob: box dimension mismatch");
  Vec mean = mu * a_rows.rowwise().sum();
  Eigen::SelfAdjointEigenSolver<Mat> es(a_rows * a_rows.transpose());
  Mat L = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  std::int64_t hits = 0;
  Vec z(t), g(t);
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int k = 0; k < t; ++k) z(k) = rng.normal();
    g = mean + L * z;
    if ((g.array() >= lo.array()).all() && (g.array() <= hi.array()).all()) ++hits;
  }
  double p = static_cast<double>(hits) / samples;
  return {p, std::sqrt(p * (1 - p) / samples), samples};
}

}  // namespace monotest
