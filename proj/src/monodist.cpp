#include "monotest/monodist.hpp"

#include <cmath>
#include <limits>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boykov_kolmogorov_max_flow.hpp>

namespace monotest {

namespace {

void check_table(const TruthTable& t) {
  if (t.n < 0 || t.n > 30 || t.values.size() != (std::size_t{1} << t.n))
    throw InvalidInput("TruthTable: length must be 2^n");
}

}  // namespace

TruthTable TruthTable::from_function(int n, const std::function<int(std::uint64_t)>& f) {
  if (n < 0 || n > kMaxExactDimension) throw ResourceGuard("truth table dimension exceeds 20");
  TruthTable t;
  t.n = n;
  t.values.resize(std::size_t{1} << n);
  for (std::uint64_t x = 0; x < t.values.size(); ++x) t.values[x] = f(x) >= 0 ? 1 : -1;
  return t;
}

TruthTable TruthTable::from_ltf(const LTF& f) {
  return from_function(f.n(), [&](std::uint64_t x) { return eval_index(f, x); });
}

bool is_monotone(const TruthTable& t) {
  check_table(t);
  for (std::uint64_t x = 0; x < t.values.size(); ++x)
    for (int j = 0; j < t.n; ++j)
      if (!((x >> j) & 1) && t.values[x] > t.values[x | (std::uint64_t{1} << j)]) return false;
  return true;
}

boost::rational<std::int64_t> exact_distance_to_monotone(const TruthTable& t) {
  check_table(t);
  if (t.n > kMaxExactDimension) throw ResourceGuard("exact distance limited to n <= 20");
  using namespace boost;
  using Traits = adjacency_list_traits<vecS, vecS, directedS>;
  using Graph = adjacency_list<
      vecS, vecS, directedS,
      property<vertex_name_t, std::string,
               property<vertex_index_t, long,
                        property<vertex_color_t, default_color_type,
                                 property<vertex_distance_t, long,
                                          property<vertex_predecessor_t, Traits::edge_descriptor>>>>>,
      property<edge_capacity_t, long,
               property<edge_residual_capacity_t, long, property<edge_reverse_t, Traits::edge_descriptor>>>>;

  const std::size_t N = t.values.size();
  Graph g(N + 2);
  const auto src = N, sink = N + 1;
  auto cap = get(edge_capacity, g);
  auto rev = get(edge_reverse, g);
  const long inf = static_cast<long>(N) + 1;
  auto add = [&](std::size_t u, std::size_t v, long c) {
    auto e = add_edge(u, v, g).first;
    auto r = add_edge(v, u, g).first;
    cap[e] = c;
    cap[r] = 0;
    rev[e] = r;
    rev[r] = e;
  };
  // Source side = label +1. Cutting s->x flips a +1 to -1; cutting x->t flips a -1 to +1.
  for (std::size_t x = 0; x < N; ++x) {
    if (t.values[x] > 0)
      add(src, x, 1);
    else
      add(x, sink, 1);
    for (int j = 0; j < t.n; ++j)
      if (!((x >> j) & 1)) add(x, x | (std::size_t{1} << j), inf);
  }
  long flow = boykov_kolmogorov_max_flow(g, src, sink);
  return {flow, static_cast<std::int64_t>(N)};
}

Vec fourier_degree1(const TruthTable& t) {
  check_table(t);
  Vec f = Vec::Zero(t.n);
  for (std::uint64_t x = 0; x < t.values.size(); ++x)
    for (int j = 0; j < t.n; ++j) f(j) += ((x >> j) & 1) ? t.values[x] : -t.values[x];
  return f / static_cast<double>(t.values.size());
}

std::vector<Estimate> fourier_degree1_sampled(const LTF& f, std::int64_t samples, Rng& rng) {
  const int n = f.n();
  Vec sum = Vec::Zero(n);
  Eigen::VectorXi x(n);
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int j = 0; j < n; ++j) x(j) = (rng() >> 63) ? 1 : -1;
    int v = eval(f, x);
    sum += (v * x).cast<double>();
  }
  std::vector<Estimate> out(n);
  for (int j = 0; j < n; ++j) {
    double m = sum(j) / samples;
    out[j] = {m, std::sqrt(std::max(0.0, 1 - m * m) / samples), samples};
  }
  return out;
}

Vec hermite_degree1(const LTF& f) {
  double norm = f.weights.norm();
  if (!(norm > 0)) throw InvalidInput("hermite_degree1: zero weight vector");
  return std::sqrt(2.0 / M_PI) * f.weights / norm;
}

double regularity(const LTF& f) {
  double norm = f.weights.norm();
  if (!(norm > 0)) throw InvalidInput("regularity: zero weight vector");
  return f.weights.cwiseAbs().maxCoeff() / norm;
}

double fourier_negative_mass(const Vec& fourier1) {
  double s = 0;
  for (Eigen::Index i = 0; i < fourier1.size(); ++i)
    if (fourier1(i) < 0) s += fourier1(i) * fourier1(i);
  return s;
}

double fourier_negative_mass(const TruthTable& t) { return fourier_negative_mass(fourier_degree1(t)); }

SpectralSummary spectral_summary(const TruthTable& t, const LTF& f) {
  return {fourier_degree1(t), hermite_degree1(f), regularity(f)};
}

EdgeTestResult edge_tester(const CubeOracle& oracle, int n, std::int64_t q, Rng& rng) {
  if (q < 1 || n < 1) throw InvalidInput("edge_tester: need q >= 1 and n >= 1");
  EdgeTestResult r;
  r.rounds = q;
  Eigen::VectorXi x(n);
  for (std::int64_t round = 0; round < q; ++round) {
    for (int j = 0; j < n; ++j) x(j) = (rng() >> 63) ? 1 : -1;
    int j = static_cast<int>(rng.below(n));
    x(j) = -1;
    int lo = oracle(x);
    x(j) = 1;
    int hi = oracle(x);
    if (lo > hi) {
      ++r.violations;
      if (r.first_hit < 0) r.first_hit = round;
      r.accept = false;
    }
  }
  return r;
}

}  // namespace monotest
