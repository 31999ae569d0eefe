#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "monotest/instances.hpp"
#include "monotest/momentlab.hpp"
#include "monotest/orthants.hpp"
#include "monotest/pruning.hpp"

namespace monotest {

using json = nlohmann::ordered_json;

json to_json(const DiscreteRV& rv);
DiscreteRV rv_from_json(const json& j);

/// Includes the per-side moment residuals against N(mu, 1).
json to_json(const YesNoPair& pair);
YesNoPair pair_from_json(const json& j);

json to_json(const LTF& f);
LTF ltf_from_json(const json& j);

/// {"n": n, "rows": [[+-1, ...], ...]} with unscaled entries.
json to_json(const QueryMatrix& qm);
QueryMatrix query_matrix_from_json(const json& j);

json to_json(const PruneTrace& t);
json to_json(const DuoEstimate& e);
json to_json(const Estimate& e);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

constexpr int kCsvSchemaVersion = 1;

struct MetricRow {
  int n = 0;
  int d = 0;
  int ell = 0;
  double mu = 0.0;
  std::string method;
  double value = 0.0;
  double stderr_ = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

/// First line "# schema_version=1", then the column names
/// n,d,ell,mu,method,value,stderr,samples,seed, then one line per row.
std::string metrics_csv(const std::vector<MetricRow>& rows);
std::vector<MetricRow> parse_metrics_csv(const std::string& text);

}  // namespace monotest
