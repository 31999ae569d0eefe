#include "monotest/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace monotest {

namespace {

std::vector<double> vec_to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

Vec std_to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

// Shortest decimal that round-trips.
std::string fmt(double x) {
  char buf[32];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

template <typename T>
T required(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key)) throw InvalidInput(std::string(what) + ": missing field \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string(what) + ": bad field \"" + key + "\": " + e.what());
  }
}

}  // namespace

json to_json(const DiscreteRV& rv) { return json{{"atoms", rv.atoms}, {"probs", rv.probs}}; }

DiscreteRV rv_from_json(const json& j) {
  DiscreteRV rv{required<std::vector<double>>(j, "atoms", "DiscreteRV"),
                required<std::vector<double>>(j, "probs", "DiscreteRV")};
  rv.validate(1e-9);
  return rv;
}

json to_json(const YesNoPair& pair) {
  MomentVector m = gaussian_raw_moments(pair.mu, pair.ell);
  auto residuals = [&](const DiscreteRV& rv) {
    std::vector<double> r;
    for (int k = 1; k <= pair.ell; ++k) r.push_back(rv.moment(k) - m.at(k));
    return r;
  };
  return json{{"ell", pair.ell},
              {"mu", pair.mu},
              {"yes", to_json(pair.yes_rv)},
              {"no", to_json(pair.no_rv)},
              {"yes_residuals", residuals(pair.yes_rv)},
              {"no_residuals", residuals(pair.no_rv)},
              {"max_relative_error",
               std::max(max_relative_moment_error(pair.yes_rv, m), max_relative_moment_error(pair.no_rv, m))},
              {"no_negative_mass", pair.no_rv.negative_mass()}};
}

YesNoPair pair_from_json(const json& j) {
  YesNoPair p;
  p.ell = required<int>(j, "ell", "YesNoPair");
  p.mu = required<int>(j, "mu", "YesNoPair");
  if (!j.contains("yes") || !j.contains("no")) throw InvalidInput("YesNoPair: missing \"yes\" or \"no\"");
  p.yes_rv = rv_from_json(j.at("yes"));
  p.no_rv = rv_from_json(j.at("no"));
  return p;
}

json to_json(const LTF& f) {
  json j{{"weights", vec_to_std(f.weights)}};
  if (f.threshold != 0.0) j["threshold"] = f.threshold;
  return j;
}

LTF ltf_from_json(const json& j) {
  LTF f;
  f.weights = std_to_vec(required<std::vector<double>>(j, "weights", "LTF"));
  if (f.weights.size() == 0) throw InvalidInput("LTF: empty weight vector");
  if (j.contains("threshold")) f.threshold = required<double>(j, "threshold", "LTF");
  return f;
}

json to_json(const QueryMatrix& qm) {
  json rows = json::array();
  for (int i = 0; i < qm.d(); ++i) {
    json row = json::array();
    for (int j = 0; j < qm.n(); ++j) row.push_back(qm.signs()(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"n", qm.n()}, {"rows", rows}};
}

QueryMatrix query_matrix_from_json(const json& j) {
  const int n = required<int>(j, "n", "QueryMatrix");
  const auto rows = required<std::vector<std::vector<int>>>(j, "rows", "QueryMatrix");
  if (n < 1) throw InvalidInput("QueryMatrix: n must be positive");
  if (rows.empty()) throw InvalidInput("QueryMatrix: no rows");
  Eigen::MatrixXi s(static_cast<Eigen::Index>(rows.size()), n);
  for (size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw InvalidInput("QueryMatrix: row " + std::to_string(i) + " has length " + std::to_string(rows[i].size()));
    for (int c = 0; c < n; ++c) {
      if (rows[i][c] != 1 && rows[i][c] != -1) throw InvalidInput("QueryMatrix: entries must be +1 or -1");
      s(static_cast<Eigen::Index>(i), c) = rows[i][c];
    }
  }
  return QueryMatrix(std::move(s));
}

json to_json(const PruneTrace& t) {
  json steps = json::array();
  for (const auto& st : t.steps)
    steps.push_back(json{{"a", st.a}, {"r", st.r}, {"removed", st.removed}, {"size_before", st.size_before}});
  return json{{"initial_size", t.initial_size},
              {"duplicates_removed", t.duplicates_removed},
              {"final_size", t.final_size},
              {"radius_sum", t.radius_sum()},
              {"telescoping_sum", t.telescoping_sum()},
              {"kept", t.kept},
              {"steps", steps}};
}

json to_json(const DuoEstimate& e) {
  return json{{"value", e.value},       {"stderr", e.stderr_},
              {"method", to_string(e.method)}, {"samples", e.samples},
              {"bias_bound", e.bias_bound}, {"stderr_method", e.stderr_method}};
}

json to_json(const Estimate& e) { return json{{"value", e.value}, {"stderr", e.stderr_}, {"samples", e.samples}}; }

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
  std::ostringstream out;
  out << "# schema_version=" << kCsvSchemaVersion << '\n' << "n,d,ell,mu,method,value,stderr,samples,seed\n";
  for (const auto& r : rows)
    out << r.n << ',' << r.d << ',' << r.ell << ',' << fmt(r.mu) << ',' << r.method << ',' << fmt(r.value) << ','
        << fmt(r.stderr_) << ',' << r.samples << ',' << r.seed << '\n';
  return out.str();
}

std::vector<MetricRow> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "# schema_version=" + std::to_string(kCsvSchemaVersion))
    throw InvalidInput("metrics CSV: unsupported schema header");
  if (!std::getline(in, line) || line != "n,d,ell,mu,method,value,stderr,samples,seed")
    throw InvalidInput("metrics CSV: unexpected column header");
  std::vector<MetricRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 9) throw InvalidInput("metrics CSV: expected 9 fields in \"" + line + "\"");
    MetricRow r;
    r.n = std::stoi(f[0]);
    r.d = std::stoi(f[1]);
    r.ell = std::stoi(f[2]);
    r.mu = std::stod(f[3]);
    r.method = f[4];
    r.value = std::stod(f[5]);
    r.stderr_ = std::stod(f[6]);
    r.samples = std::stoll(f[7]);
    r.seed = std::stoull(f[8]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace monotest
