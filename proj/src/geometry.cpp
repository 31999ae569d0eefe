#include "monotest/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "monotest/lp.hpp"

namespace monotest {

SpanProjector::SpanProjector(const Mat& rows) {
  const Eigen::Index n = rows.cols();
  if (rows.rows() == 0) {
    q_.resize(n, 0);
    return;
  }
  Eigen::ColPivHouseholderQR<Mat> qr(rows.transpose());
  qr.setThreshold(1e-10);
  const Eigen::Index r = qr.rank();
  q_ = qr.householderQ() * Mat::Identity(n, r);
}

Vec SpanProjector::project(const Eigen::Ref<const Vec>& v) const { return q_ * (q_.transpose() * v); }

double SpanProjector::dist(const Eigen::Ref<const Vec>& v) const { return (v - project(v)).norm(); }

double dist_to_span(const Eigen::Ref<const Vec>& v, const CubePointSet& a) {
  if (a.d() == 0) throw InvalidInput("dist_to_span: empty point set");
  if (v.size() != a.n()) throw InvalidInput("dist_to_span: dimension mismatch");
  return SpanProjector(a.entries()).dist(v);
}

ColumnDirections column_directions(const CubePointSet& a) {
  ColumnDirections cd;
  std::map<std::vector<int>, int> index;
  for (int j = 0; j < a.n(); ++j) {
    Eigen::VectorXi p = a.signs().col(j);
    int o = p(0) > 0 ? 1 : -1;
    p *= o;
    std::vector<int> key(p.data(), p.data() + p.size());
    auto [it, inserted] = index.emplace(key, static_cast<int>(cd.dirs.size()));
    if (inserted) cd.dirs.push_back(p);
    cd.dir_of.push_back(it->second);
    cd.orient.push_back(o);
  }
  return cd;
}

namespace {

// Largest t <= 1 with sigma_j <N_j, alpha> >= t for all j and |alpha|_inf <= 1.
bool open_cell_feasible(const std::vector<Eigen::VectorXi>& normals, const std::vector<int>& sigma) {
  const int k = static_cast<int>(normals.front().size());
  const int J = static_cast<int>(sigma.size());
  // columns: a+ (k), a- (k), t, s (J), w (k), wt
  const int cols = 2 * k + 1 + J + k + 1;
  const int rows = J + k + 1;
  Mat A = Mat::Zero(rows, cols);
  Vec b = Vec::Zero(rows), c = Vec::Zero(cols);
  for (int j = 0; j < J; ++j) {
    for (int i = 0; i < k; ++i) {
      A(j, i) = sigma[j] * normals[j](i);
      A(j, k + i) = -sigma[j] * normals[j](i);
    }
    A(j, 2 * k) = -1;
    A(j, 2 * k + 1 + j) = -1;
  }
  for (int i = 0; i < k; ++i) {
    A(J + i, i) = 1;
    A(J + i, k + i) = 1;
    A(J + i, 2 * k + 1 + J + i) = 1;
    b(J + i) = 1;
  }
  A(J + k, 2 * k) = 1;
  A(J + k, cols - 1) = 1;
  b(J + k) = 1;
  c(2 * k) = 1;
  LpResult<double> r = simplex_standard<double>(A, b, c, 1e-12);
  return r.status == LpStatus::Optimal && r.objective > 1e-9;
}

std::mutex cell_cache_mutex;
std::map<std::vector<std::vector<int>>, std::vector<std::vector<int>>> cell_cache;

}  // namespace

std::vector<std::vector<int>> arrangement_cells(const std::vector<Eigen::VectorXi>& normals) {
  if (normals.empty()) return {{}};
  std::vector<std::vector<int>> key;
  for (const auto& v : normals) key.emplace_back(v.data(), v.data() + v.size());
  {
    std::lock_guard<std::mutex> lock(cell_cache_mutex);
    auto it = cell_cache.find(key);
    if (it != cell_cache.end()) return it->second;
  }
  std::vector<std::vector<int>> cells{{1}, {-1}};
  for (size_t j = 1; j < normals.size(); ++j) {
    std::vector<Eigen::VectorXi> prefix(normals.begin(), normals.begin() + j + 1);
    std::vector<std::vector<int>> next;
    for (const auto& cell : cells)
      for (int s : {1, -1}) {
        std::vector<int> sigma = cell;
        sigma.push_back(s);
        if (open_cell_feasible(prefix, sigma)) next.push_back(std::move(sigma));
      }
    cells = std::move(next);
  }
  std::lock_guard<std::mutex> lock(cell_cache_mutex);
  cell_cache.emplace(key, cells);
  return cells;
}

long general_position_cell_count(int m, int k) {
  long total = 0, binom = 1;
  for (int i = 0; i < k && i <= m - 1; ++i) {
    total += binom;
    binom = binom * (m - 1 - i) / (i + 1);
  }
  return 2 * total;
}

CubePointSet cover_set(const CubePointSet& a) {
  if (a.d() < 1) throw InvalidInput("cover_set: empty point set");
  if (a.d() > 6) throw ResourceGuard("cover_set: arrangement enumeration limited to k <= 6");
  ColumnDirections cd = column_directions(a);
  auto cells = arrangement_cells(cd.dirs);
  Eigen::MatrixXi out(cells.size(), a.n());
  for (size_t c = 0; c < cells.size(); ++c)
    for (int j = 0; j < a.n(); ++j) out(c, j) = cells[c][cd.dir_of[j]] * cd.orient[j];
  return CubePointSet(std::move(out));
}

std::vector<int> cube_points_near_span(const CubePointSet& x, const CubePointSet& a, double r) {
  if (x.n() != a.n()) throw InvalidInput("cube_points_near_span: dimension mismatch");
  SpanProjector proj(a.entries());
  std::vector<int> out;
  for (int i = 0; i < x.d(); ++i)
    if (proj.dist(x.row(i)) <= r + 1e-12) out.push_back(i);
  return out;
}

LowWeightRep low_weight_rep(const Eigen::Ref<const Vec>& v, const CubePointSet& a) {
  const int k = a.d(), n = a.n();
  if (k < 1) throw InvalidInput("low_weight_rep: empty point set");
  if (v.size() != n) throw InvalidInput("low_weight_rep: dimension mismatch");
  const Mat A = a.entries();
  LowWeightRep rep;
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(A.transpose());
  Vec beta = cod.solve(v);
  Vec u = A.transpose() * beta;
  rep.dist = (v - u).norm();

  // Distinct column types whose U-coordinate is small.
  std::map<std::vector<int>, int> seen;
  std::vector<Eigen::VectorXi> small;
  const double cut = 2.0 / std::sqrt(static_cast<double>(n)) + 1e-12;
  for (int j = 0; j < n; ++j) {
    std::vector<int> key(a.signs().col(j).data(), a.signs().col(j).data() + k);
    if (seen.count(key)) continue;
    seen[key] = j;
    if (std::abs(u(j)) <= cut) small.push_back(a.signs().col(j));
  }
  Mat M(0, k);
  Vec rhs(0);
  auto try_add = [&](const Vec& row, double value) {
    Mat M2(M.rows() + 1, k);
    M2 << M, row.transpose();
    Eigen::FullPivLU<Mat> lu(M2);
    lu.setThreshold(1e-10);
    if (lu.rank() <= M.rows()) return false;
    Vec r2(rhs.size() + 1);
    r2 << rhs, value;
    M = std::move(M2);
    rhs = std::move(r2);
    return true;
  };
  for (const auto& p : small) {
    if (M.rows() == k) break;
    Vec pd = p.cast<double>();
    try_add(pd, pd.dot(beta));
  }
  Vec coeffs;
  if (M.rows() == k) {
    rep.case_used = 1;
    coeffs = beta;
  } else {
    rep.case_used = 2;
    // Complete with +-1 vectors in R^k, taken in binary-counting order.
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k) && M.rows() < k; ++mask) {
      Vec t(k);
      for (int i = 0; i < k; ++i) t(i) = ((mask >> i) & 1) ? -1.0 : 1.0;
      try_add(t, 0.0);
    }
    if (M.rows() < k) throw NumericalFailure("low_weight_rep: augmented system is singular");
    coeffs = M.fullPivLu().solve(rhs);
    if ((M * coeffs - rhs).cwiseAbs().maxCoeff() > 1e-8) throw NumericalFailure("low_weight_rep: solve failed");
  }
  rep.betas = coeffs;
  rep.u = A.transpose() * coeffs;
  rep.realized_gamma1 = coeffs.cwiseAbs().maxCoeff();
  double resid = (v - rep.u).norm();
  rep.realized_gamma2_ratio = rep.dist <= 1e-12 ? 1.0 : resid / rep.dist;
  return rep;
}

double compatibility_objective(const Eigen::Ref<const Vec>& v, const CubePointSet& a, const Vec& beta, double eps) {
  const double c = log_n(a.n());
  Vec diff = v - a.entries().transpose() * beta;
  return std::abs(diff.sum()) - (diff.norm() + eps) * c;
}

CompatibilityVerdict compatibility(const Eigen::Ref<const Vec>& v, const CubePointSet& a, double eps,
                                   double gamma1) {
  const int k = a.d(), n = a.n();
  if (k < 1) throw InvalidInput("compatibility: empty point set");
  if (!(gamma1 > 0)) throw InvalidInput("compatibility: gamma1 must be positive");
  if (v.size() != n) throw InvalidInput("compatibility: dimension mismatch");
  const double c = log_n(n);
  CompatibilityVerdict verdict;
  // |sum(V-U)| <= sqrt(n) |V-U| and |V-U| <= 1 + k gamma1.
  const double upper = std::max(0.0, std::sqrt(static_cast<double>(n)) - c) * (1 + k * gamma1) - eps * c;
  if (upper <= 0) {
    verdict.compatible = true;
    verdict.margin = upper;
    verdict.shortcut = true;
    return verdict;
  }
  const Mat A = a.entries();
  const Mat G = A * A.transpose();
  const Vec g = A * v;
  const Vec s = A.rowwise().sum();
  const double sigma = v.sum();
  const double vv = v.squaredNorm();

  auto objective = [&](const Vec& beta, int sign) {
    double q = std::max(0.0, vv - 2 * g.dot(beta) + beta.dot(G * beta));
    return sign * (sigma - s.dot(beta)) - c * std::sqrt(q) - eps * c;
  };

  double best = -std::numeric_limits<double>::infinity();
  Vec best_beta = Vec::Zero(k);
  std::vector<int> state(k, 0);  // 0 free, 1 at -gamma1, 2 at +gamma1
  long faces = 1;
  for (int i = 0; i < k; ++i) faces *= 3;
  for (long f = 0; f < faces; ++f) {
    long code = f;
    std::vector<int> free_idx;
    Vec b0 = Vec::Zero(k);
    for (int i = 0; i < k; ++i) {
      state[i] = code % 3;
      code /= 3;
      if (state[i] == 0)
        free_idx.push_back(i);
      else
        b0(i) = state[i] == 1 ? -gamma1 : gamma1;
    }
    const int m = static_cast<int>(free_idx.size());
    for (int sign : {1, -1}) {
      if (m == 0) {
        double val = objective(b0, sign);
        if (val > best) {
          best = val;
          best_beta = b0;
        }
        continue;
      }
      Mat H(m, m);
      Vec hvec(m), p(m);
      Vec Gb0 = G * b0;
      for (int r = 0; r < m; ++r) {
        for (int t = 0; t < m; ++t) H(r, t) = G(free_idx[r], free_idx[t]);
        hvec(r) = Gb0(free_idx[r]) - g(free_idx[r]);
        p(r) = -sign * s(free_idx[r]);
      }
      Eigen::LDLT<Mat> ldlt(H);
      if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-12 * std::max(1.0, H.norm())) continue;
      Vec z0 = -ldlt.solve(hvec);
      double q0 = std::max(0.0, vv - 2 * g.dot(b0) + b0.dot(Gb0));
      double delta2 = std::max(0.0, q0 + hvec.dot(z0));
      Vec Hp = ldlt.solve(p);
      double pi = p.dot(Hp);
      if (c * c <= pi) continue;
      double t = std::sqrt(delta2) / std::sqrt(c * c - pi);
      Vec z = z0 + t * Hp;
      bool inside = true;
      for (int r = 0; r < m; ++r) inside &= std::abs(z(r)) <= gamma1 + 1e-12;
      if (!inside) continue;
      Vec beta = b0;
      for (int r = 0; r < m; ++r) beta(free_idx[r]) = std::clamp(z(r), -gamma1, gamma1);
      double val = objective(beta, sign);
      if (val > best) {
        best = val;
        best_beta = beta;
      }
    }
  }
  verdict.margin = best;
  verdict.compatible = !(best > 0);
  if (!verdict.compatible) verdict.witness_betas = best_beta;
  return verdict;
}

Estimate incompatibility_box_probe(const CubePointSet& a, const Eigen::Ref<const Eigen::VectorXi>& v_signs,
                                   const DiscreteRV& rv, double eps, double gamma1, std::int64_t samples, Rng rng,
                                   double half_width) {
  if (v_signs.size() != a.n()) throw InvalidInput("incompatibility_box_probe: dimension mismatch");
  Vec v = v_signs.cast<double>() * a.scale();
  if (compatibility(v, a, eps, gamma1).compatible)
    throw InvalidInput("incompatibility_box_probe: V is compatible with A");
  Eigen::MatrixXi stacked(a.d() + 1, a.n());
  stacked << a.signs(), v_signs.transpose();
  QueryMatrix qm(stacked);
  CoefficientSampler sampler(qm, {{0, qm.n(), &rv}});
  const double half = half_width > 0 ? half_width : 2 * eps;
  std::int64_t hits = 0;
  Vec y(qm.d());
  for (std::int64_t s = 0; s < samples; ++s) {
    sampler.draw_unscaled(rng, y);
    if ((y * qm.scale()).cwiseAbs().maxCoeff() <= half) ++hits;
  }
  double p = static_cast<double>(hits) / samples;
  return {p, std::sqrt(p * (1 - p) / samples), samples};
}

ConcentrationReport concentration_probe(const Vec& w, const DiscreteRV& rv, std::int64_t samples, Rng rng) {
  ConcentrationReport r;
  r.samples = samples;
  const double norm = w.norm();
  if (norm == 0) return r;
  const int n = static_cast<int>(w.size());
  const double L = std::log(std::max(2, n));
  r.threshold = norm * std::pow(L, 0.75);
  double mean = 0;
  for (int a = 0; a < rv.support_size(); ++a) mean += rv.probs[a] * rv.atoms[a];
  const double range = rv.atoms.back() - rv.atoms.front();
  r.hoeffding_ceiling = range > 0 ? std::min(1.0, 2 * std::exp(-2 * std::pow(L, 1.5) / (range * range))) : 0.0;
  const double center = mean * w.sum();
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    double acc = 0;
    for (int i = 0; i < n; ++i)
      if (w(i) != 0) acc += w(i) * draw(rv, rng);
    if (std::abs(acc - center) >= r.threshold) ++hits;
  }
  r.probability = static_cast<double>(hits) / samples;
  r.stderr_ = std::sqrt(r.probability * (1 - r.probability) / samples);
  return r;
}

GramCheck gram_det_check(const Mat& rows) {
  const int t = static_cast<int>(rows.rows());
  if (t < 1) throw InvalidInput("gram_det_check: empty matrix");
  GramCheck g;
  Mat basis(rows.cols(), 0);
  g.product_of_residuals_sq = 1;
  for (int i = 0; i < t; ++i) {
    Vec r = rows.row(i).transpose();
    for (int pass = 0; pass < 2; ++pass) r -= basis * (basis.transpose() * r);
    double norm = r.norm();
    if (norm <= 1e-12 * std::max(1.0, rows.row(i).norm())) throw InvalidInput("gram_det_check: rows are dependent");
    g.residuals.push_back(norm);
    g.product_of_residuals_sq *= norm * norm;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    basis.col(basis.cols() - 1) = r / norm;
  }
  g.det = (rows * rows.transpose()).fullPivLu().determinant();
  return g;
}

}  // namespace monotest
