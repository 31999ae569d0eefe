#include "monotest/instances.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace monotest {

QueryMatrix::QueryMatrix(Eigen::MatrixXi signs) : signs_(std::move(signs)) {
  if (signs_.cols() < 1) throw InvalidInput("QueryMatrix: n must be >= 1");
  for (Eigen::Index i = 0; i < signs_.size(); ++i) {
    int v = signs_.data()[i];
    if (v != 1 && v != -1) throw InvalidInput("QueryMatrix: entries must be +1 or -1");
  }
}

Mat QueryMatrix::entries() const { return signs_.cast<double>() * scale(); }

Vec QueryMatrix::row(int i) const { return signs_.row(i).transpose().cast<double>() * scale(); }

QueryMatrix QueryMatrix::select_rows(const std::vector<int>& idx) const {
  Eigen::MatrixXi s(idx.size(), n());
  for (size_t r = 0; r < idx.size(); ++r) s.row(r) = signs_.row(idx[r]);
  return QueryMatrix(std::move(s));
}

QueryMatrix QueryMatrix::random(int d, int n, Rng& rng) {
  Eigen::MatrixXi s(d, n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < n; ++j) s(i, j) = (rng() >> 63) ? 1 : -1;
  return QueryMatrix(std::move(s));
}

int choose_h(double c) {
  if (!(c > 0)) throw InvalidInput("choose_h: c must be positive");
  double x = 5.0 / c;
  long h = static_cast<long>(std::ceil(x - 1e-12));
  if (h < 1) h = 1;
  if (h % 2 == 0) ++h;
  return static_cast<int>(h);
}

HardInstanceFamily make_family(int n, double c, std::optional<int> ell, std::optional<int> mu) {
  if (n < 1) throw InvalidInput("make_family: n must be >= 1");
  HardInstanceFamily f;
  f.n = n;
  f.c = c;
  f.h = choose_h(c);
  f.ell_overridden = ell.has_value();
  f.ell = ell ? *ell : f.h * f.h * f.h;
  if (f.ell % 2 == 0) throw InvalidInput("make_family: ell must be odd");
  f.pair = build_pair(f.ell, mu.value_or(0));
  return f;
}

double draw(const DiscreteRV& rv, Rng& rng) {
  double u = rng.uniform();
  double acc = 0;
  for (size_t i = 0; i + 1 < rv.probs.size(); ++i) {
    acc += rv.probs[i];
    if (u < acc) return rv.atoms[i];
  }
  return rv.atoms.back();
}

LTF sample_ltf(const DiscreteRV& rv, int n, Rng& rng) {
  LTF f;
  f.weights.resize(n);
  for (int i = 0; i < n; ++i) f.weights(i) = draw(rv, rng);
  return f;
}

LTF sample_yes(const HardInstanceFamily& fam, Rng& rng) { return sample_ltf(fam.pair.yes_rv, fam.n, rng); }
LTF sample_no(const HardInstanceFamily& fam, Rng& rng) { return sample_ltf(fam.pair.no_rv, fam.n, rng); }

int eval(const LTF& f, const Eigen::Ref<const Eigen::VectorXi>& x) {
  if (x.size() != f.weights.size()) throw InvalidInput("eval: dimension mismatch");
  return sign_of(f.weights.dot(x.cast<double>()) - f.threshold);
}

int eval_index(const LTF& f, std::uint64_t index) {
  double s = -f.threshold;
  for (int j = 0; j < f.n(); ++j) s += ((index >> j) & 1) ? f.weights(j) : -f.weights(j);
  return sign_of(s);
}

CoefficientSampler::CoefficientSampler(const QueryMatrix& qm, const std::vector<ColumnBlock>& blocks)
    : d_(qm.d()), scale_(qm.scale()) {
  for (const ColumnBlock& b : blocks) {
    if (b.begin < 0 || b.end > qm.n() || b.begin > b.end || b.rv == nullptr)
      throw InvalidInput("CoefficientSampler: bad column block");
    std::map<std::vector<int>, int> types;
    for (int j = b.begin; j < b.end; ++j) {
      std::vector<int> key(qm.signs().col(j).data(), qm.signs().col(j).data() + d_);
      ++types[key];
    }
    for (const auto& [key, count] : types) {
      Group g;
      g.type = Eigen::Map<const Eigen::VectorXi>(key.data(), d_).cast<double>();
      g.count = count;
      g.rv = b.rv;
      groups_.push_back(std::move(g));
    }
  }
}

void CoefficientSampler::draw_unscaled(Rng& rng, Eigen::Ref<Vec> out) const {
  out.setZero();
  for (const Group& g : groups_) {
    // Multinomial split of g.count draws over the atoms, via a binomial chain.
    const auto& atoms = g.rv->atoms;
    const auto& probs = g.rv->probs;
    if (g.count <= 8) {
      double coeff = 0;
      for (int t = 0; t < g.count; ++t) coeff += monotest::draw(*g.rv, rng);
      out += coeff * g.type;
      continue;
    }
    int left = g.count;
    double rest = 1.0;
    double coeff = 0;
    for (size_t a = 0; a < atoms.size() && left > 0; ++a) {
      int k;
      if (a + 1 == atoms.size() || probs[a] >= rest) {
        k = left;
      } else {
        std::binomial_distribution<int> bin(left, std::clamp(probs[a] / rest, 0.0, 1.0));
        k = bin(rng);
      }
      coeff += k * atoms[a];
      left -= k;
      rest -= probs[a];
    }
    out += coeff * g.type;
  }
}

Vec CoefficientSampler::draw(Rng& rng) const {
  Vec v(d_);
  draw_unscaled(rng, v);
  return v * scale_;
}

Vec sample_coeff_vector(const QueryMatrix& qm, const DiscreteRV& rv, Rng& rng) {
  CoefficientSampler s(qm, {{0, qm.n(), &rv}});
  return s.draw(rng);
}

Vec sample_hybrid(const QueryMatrix& qm, const YesNoPair& pair, int i, Rng& rng) {
  if (i < 0 || i > qm.n()) throw InvalidInput("sample_hybrid: index out of range");
  CoefficientSampler s(qm, {{0, i, &pair.no_rv}, {i, qm.n(), &pair.yes_rv}});
  return s.draw(rng);
}

}  // namespace monotest
