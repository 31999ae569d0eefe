#include "monotest/mollifier.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace monotest {

namespace {

constexpr int kKnots = 10000;

double raw_bump(double x) {
  if (!(x > -1.0 && x < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - x * x));
}

double gl_integral(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 10>::integrate(f, a, b);
}

}  // namespace

Bump::Bump() : knots_(kKnots), h_(2.0 / kKnots) {
  boost::math::quadrature::tanh_sinh<double> ts;
  c_ = 1.0 / ts.integrate(raw_bump, -1.0, 1.0);

  auto b = [this](double x) { return (*this)(x); };
  value_.assign(knots_ + 1, 0.0);
  slope_.assign(knots_ + 1, 0.0);
  for (int i = 0; i < knots_; ++i) {
    double a = -1.0 + i * h_;
    value_[i + 1] = value_[i] + gl_integral(b, a, a + h_);
  }
  const double total = value_.back();
  for (double& v : value_) v /= total;
  for (int i = 0; i <= knots_; ++i) slope_[i] = b(-1.0 + i * h_) / total;
  // Fritsch-Carlson limiter.
  for (int i = 0; i < knots_; ++i) {
    double delta = (value_[i + 1] - value_[i]) / h_;
    if (delta <= 0) {
      slope_[i] = slope_[i + 1] = 0;
      continue;
    }
    double a = slope_[i] / delta, c = slope_[i + 1] / delta;
    double r = a * a + c * c;
    if (r > 9) {
      double t = 3 / std::sqrt(r);
      slope_[i] = t * a * delta;
      slope_[i + 1] = t * c * delta;
    }
  }
}

const Bump& Bump::instance() {
  static const Bump bump;
  return bump;
}

double Bump::operator()(double x) const { return c_ * raw_bump(x); }

double Bump::cdf(double x) const {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double pos = (x + 1.0) / h_;
  int i = std::min(knots_ - 1, static_cast<int>(pos));
  double t = pos - i;
  double t2 = t * t, t3 = t2 * t;
  double v = (2 * t3 - 3 * t2 + 1) * value_[i] + (t3 - 2 * t2 + t) * h_ * slope_[i] +
             (-2 * t3 + 3 * t2) * value_[i + 1] + (t3 - t2) * h_ * slope_[i + 1];
  return std::clamp(v, 0.0, 1.0);
}

double Bump::cdf_exact(double x) const {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  int i = std::min(knots_ - 1, static_cast<int>((x + 1.0) / h_));
  double a = -1.0 + i * h_;
  auto b = [this](double y) { return (*this)(y); };
  return std::clamp(value_[i] + gl_integral(b, a, x) , 0.0, 1.0);
}

Mollifier1D::Mollifier1D(double eps) : eps_(eps) {
  if (!(eps > 0)) throw InvalidInput("mollifier width must be positive");
}

double Mollifier1D::operator()(double x) const {
  if (x <= 0) return 0.0;
  if (x >= eps_) return 1.0;
  return Bump::instance().cdf(2 * x / eps_ - 1);
}

double Mollifier1D::value_exact(double x) const {
  if (x <= 0) return 0.0;
  if (x >= eps_) return 1.0;
  return Bump::instance().cdf_exact(2 * x / eps_ - 1);
}

double Mollifier1D::derivative(double x) const { return 2 / eps_ * Bump::instance()(2 * x / eps_ - 1); }

OrthantMollifier::OrthantMollifier(std::vector<std::vector<int>> orthants, double eps) : d_(0), phi_(eps) {
  if (!orthants.empty()) d_ = static_cast<int>(orthants.front().size());
  if (d_ > 64) throw ResourceGuard("orthant mollifier limited to d <= 64");
  for (const auto& o : orthants) {
    if (static_cast<int>(o.size()) != d_) throw InvalidInput("orthant sign vectors differ in length");
    std::uint64_t key = 0;
    for (int i = 0; i < d_; ++i) {
      if (o[i] != 1 && o[i] != -1) throw InvalidInput("orthant entries must be +-1");
      if (o[i] > 0) key |= std::uint64_t{1} << i;
    }
    keys_.push_back(key);
  }
  std::sort(keys_.begin(), keys_.end());
  if (std::adjacent_find(keys_.begin(), keys_.end()) != keys_.end())
    throw InvalidInput("orthant list contains duplicates");
}

OrthantMollifier::OrthantMollifier(int d, const std::vector<std::uint64_t>& keys, double eps)
    : d_(d), phi_(eps), keys_(keys) {
  if (d > 64) throw ResourceGuard("orthant mollifier limited to d <= 64");
  std::sort(keys_.begin(), keys_.end());
  if (std::adjacent_find(keys_.begin(), keys_.end()) != keys_.end())
    throw InvalidInput("orthant list contains duplicates");
}

bool OrthantMollifier::contains_key(std::uint64_t key) const {
  return std::binary_search(keys_.begin(), keys_.end(), key);
}

double OrthantMollifier::operator()(const Eigen::Ref<const Vec>& x) const {
  std::uint64_t key = 0;
  for (int i = 0; i < d_; ++i)
    if (x(i) >= 0) key |= std::uint64_t{1} << i;
  if (!contains_key(key)) return 0.0;
  double p = 1.0;
  for (int i = 0; i < d_ && p > 0; ++i) p *= phi_(std::abs(x(i)));
  return p;
}

double OrthantMollifier::sum_form(const Eigen::Ref<const Vec>& x) const {
  double total = 0;
  for (std::uint64_t key : keys_) {
    double p = 1.0;
    for (int i = 0; i < d_; ++i) p *= phi_(((key >> i) & 1) ? x(i) : -x(i));
    total += p;
  }
  return total;
}

double alpha(int k) {
  if (k < 1) throw InvalidInput("alpha: k must be >= 1");
  long double v = 2.0L * std::exp(1.0L);
  for (int i = 1; i <= k; ++i) v *= 64.0L * i;
  v *= std::pow(static_cast<long double>(k), 2 * k + 2);
  if (!std::isfinite(v) || v > DBL_MAX) throw ResourceGuard("alpha(k) overflows double at k=" + std::to_string(k));
  return static_cast<double>(v);
}

double fd_derivative(const std::function<double(double)>& f, double x, int k, double h) {
  auto central = [&](double step) {
    double s = 0, binom = 1;
    for (int j = 0; j <= k; ++j) {
      s += ((j % 2) ? -binom : binom) * f(x + (0.5 * k - j) * step);
      binom = binom * (k - j) / (j + 1);
    }
    return s / std::pow(step, k);
  };
  if (k == 0) return f(x);
  double table[4];
  for (int i = 0; i < 4; ++i) table[i] = central(h / std::pow(2.0, i));
  for (int level = 1; level < 4; ++level) {
    double w = std::pow(4.0, level);
    for (int i = 3; i >= level; --i) table[i] = (w * table[i] - table[i - 1]) / (w - 1);
  }
  return table[3];
}

DerivativeReport derivative_bound_check(double eps, int k, int grid_size) {
  if (k < 0 || k > 4) throw InvalidInput("derivative_bound_check: k must be in [0, 4]");
  if (grid_size < 2) throw InvalidInput("derivative_bound_check: grid_size must be >= 2");
  Mollifier1D phi(eps);
  double h = 0.02 * eps;
  if (k > 0 && std::pow(h / 8, k) < 1e-300) throw NumericalFailure("finite-difference step underflow");
  auto f = [&](double x) { return phi.value_exact(x); };
  DerivativeReport r;
  r.k = k;
  r.eps = eps;
  for (int i = 0; i < grid_size; ++i) {
    double x = -0.25 * eps + 1.5 * eps * i / (grid_size - 1);
    r.max_abs = std::max(r.max_abs, std::abs(fd_derivative(f, x, k, h)));
  }
  r.bound = k == 0 ? 1.0 : alpha(k) / std::pow(eps, k);
  r.holds = r.max_abs <= r.bound;
  return r;
}

SupportReport psi_support_check(const OrthantMollifier& m, const std::vector<int>& j_support,
                                std::int64_t samples, Rng& rng) {
  if (j_support.empty()) throw InvalidInput("psi_support_check: empty support set");
  const int d = m.d();
  for (int j : j_support)
    if (j < 0 || j >= d) throw InvalidInput("psi_support_check: index out of range");
  const double eps = m.eps();
  const double h = 1e-3 * eps;
  const int J = static_cast<int>(j_support.size());
  SupportReport r;
  r.noise_floor = 1e-6 * std::pow(4.0 / eps, J);
  Vec x(d), y(d);
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int i = 0; i < d; ++i) x(i) = (rng.uniform() * 4 - 2) * eps;
    bool near_edge = false;
    for (int i = 0; i < d; ++i) near_edge |= std::abs(x(i)) < 2 * h;
    for (int j : j_support) near_edge |= std::abs(std::abs(x(j)) - eps) < 2 * h;
    if (near_edge) continue;
    double mixed = 0;
    for (int mask = 0; mask < (1 << J); ++mask) {
      y = x;
      int parity = 0;
      for (int t = 0; t < J; ++t) {
        bool plus = (mask >> t) & 1;
        y(j_support[t]) += plus ? h : -h;
        parity += plus ? 0 : 1;
      }
      mixed += (parity % 2 ? -1.0 : 1.0) * m(y);
    }
    mixed /= std::pow(2 * h, J);
    std::uint64_t key = 0;
    for (int i = 0; i < d; ++i)
      if (x(i) >= 0) key |= std::uint64_t{1} << i;
    bool outside = !m.contains_key(key);
    bool far = false;
    for (int j : j_support) far |= std::abs(x(j)) > eps;
    if (outside || far) {
      ++r.checked;
      r.max_forbidden = std::max(r.max_forbidden, std::abs(mixed));
      if (std::abs(mixed) > r.noise_floor) ++r.violations;
    } else {
      ++r.interior;
      if (std::abs(mixed) > r.noise_floor) ++r.interior_nonzero;
    }
  }
  r.passed = r.violations == 0;
  return r;
}

BoxMollifierPair::BoxMollifierPair(double eps, double xi, int dim) : eps_(eps), xi_(xi), dim_(dim), phi_(xi) {
  if (!(xi > 0 && xi < 2 * eps)) throw InvalidInput("box mollifier requires 0 < xi < 2 eps");
  if (dim < 1) throw InvalidInput("box mollifier dimension must be >= 1");
}

double BoxMollifierPair::psi_in(const Eigen::Ref<const Vec>& x) const {
  double p = 1;
  for (int i = 0; i < dim_ && p > 0; ++i) p *= phi_(-std::abs(x(i)) + 2 * eps_);
  return p;
}

double BoxMollifierPair::psi_out(const Eigen::Ref<const Vec>& x) const {
  double p = 1;
  for (int i = 0; i < dim_ && p > 0; ++i) p *= phi_(-std::abs(x(i)) + 2 * eps_ + xi_);
  return p;
}

bool BoxMollifierPair::in_box(const Eigen::Ref<const Vec>& x) const {
  for (int i = 0; i < dim_; ++i)
    if (std::abs(x(i)) > 2 * eps_) return false;
  return true;
}

}  // namespace monotest
