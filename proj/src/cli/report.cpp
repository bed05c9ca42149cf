#include <sstream>

#include <json.hpp>

#include "quelab/cli.hpp"
#include "quelab/errors.hpp"

namespace quelab::cli {

using json = nlohmann::ordered_json;

Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  throw DomainError("format must be json or csv");
}

namespace {

json fields(const verify::Fields& f) {
  json o = json::object();
  for (const auto& [k, v] : f) o[k] = v;
  return o;
}

std::string csv_report(const verify::ScenarioReport& r) {
  std::ostringstream os;
  os << "k,index";
  for (const auto& c : r.columns) os << ',' << c;
  os << '\n';
  for (const auto& row : r.rows) {
    os << row.k << ',' << row.index;
    for (const auto& v : row.values) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

}  // namespace

std::string emit_report(const verify::ScenarioReport& r, Format format, bool include_timing) {
  if (format == Format::Csv) return csv_report(r);
  json doc;
  doc["scenario"] = r.scenario;
  doc["params"] = fields(r.params);
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr;
    jr["k"] = row.k;
    jr["index"] = row.index;
    for (size_t i = 0; i < r.columns.size(); ++i) {
      const std::string& v = row.values.at(i);
      if (v.empty()) jr[r.columns[i]] = nullptr;
      else jr[r.columns[i]] = v;
    }
    rows.push_back(std::move(jr));
  }
  doc["rows"] = std::move(rows);
  doc["verdict"] = verify::to_string(r.verdict);
  doc["detail"] = r.detail;
  doc["tolerances"] = fields(r.tolerances);
  if (include_timing) doc["runtime_s"] = r.runtime_s;
  else doc["runtime_s"] = nullptr;
  return doc.dump(2) + "\n";
}

std::string emit_plot_data(const verify::ScenarioReport& r) {
  std::ostringstream os;
  os << "x,y\n";
  for (const auto& row : r.rows) {
    const std::string& y = r.value(row, r.plot_column);
    if (!y.empty()) os << row.k << ',' << y << '\n';
  }
  return os.str();
}

}  // namespace quelab::cli
