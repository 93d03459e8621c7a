#pragma once

// JSON and CSV serialization of reports, and the JSON configuration format
// (expressions as infix strings).

#include <json.hpp>
#include <optional>
#include <string>

#include "subcurv/catalog.hpp"
#include "subcurv/curvature.hpp"
#include "subcurv/schedule.hpp"
#include "subcurv/verify.hpp"

namespace subcurv {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

Json to_json(const PSDReport& r);
Json to_json(const CompactReport& r);
Json to_json(const CbResult& r);
Json to_json(const RateReport& r);
Json to_json(const ThetaResult& r);
Json to_json(const InequalityCase& c);
Json schedule_summary(const Schedule& s);
Json to_json(const Display& d);
Json to_json(const Expected& e);

/// Catalog entry (or a variant) as a configuration document.
Json export_config(const CatalogEntry& e);

/// Parsed configuration: a spec plus an optional catalog entry it is based on.
struct LoadedConfig {
  CatalogEntry entry;  // base entry with the spec replaced
  bool has_base = false;
  Json raw;
};

/// Parses a configuration document; errors name the offending field (and line for JSON syntax).
LoadedConfig parse_config(const std::string& text);
LoadedConfig load_config(const std::string& path);

void write_text(const std::string& path, const std::string& text);
std::string cases_csv(const std::vector<InequalityCase>& cases);
std::string psd_cells_csv(const PSDReport& r, const std::vector<std::vector<double>>& points,
                          const std::vector<std::vector<double>>& rs);
/// s, b_0..b_l, and the c_b integrand b_0' + 2 b_0 K_0(b/b_0) on n + 1 points.
std::string schedule_csv(const Schedule& s, std::size_t n = 200);

}  // namespace subcurv
