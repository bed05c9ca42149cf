#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "quelab/verify.hpp"

namespace quelab::cli {

enum class Format { Json, Csv };
Format parse_format(const std::string& s);

struct RunConfig {
  int precision_bits = 256;
  std::filesystem::path cache_dir;  // empty: no cache
  int k_min = 12, k_max = 120, k_step = 2;
  std::vector<int> k_list;  // overrides the range when non-empty
  double T = 1.0;
  std::optional<double> siegel_T;
  double delta = 0.1;
  double eps = 0.0795774715459476678844418816862571810;  // 1/(4 pi)
  double a = 0.0, b = 0.25, t1 = 1.0;
  std::optional<double> t2;
  int prime = 2;
  std::vector<long> gamma_ks{100, 1000, 10000, 100000};
  Format format = Format::Json;
  int threads = 1;
  bool timing = false;

  void validate() const;
  std::vector<int> weights() const;
};

/// Cache directory: $QUELAB_CACHE_DIR if set, else `fallback`.
std::filesystem::path resolve_cache_dir(const std::filesystem::path& fallback);

/// On-disk store of eigenbases and profiles, one JSON file per
/// (k, ncoeffs, precision_bits, schema_version) with a SHA-256 content digest.
class Cache : public verify::BasisStore {
 public:
  static constexpr int kSchemaVersion = 1;

  explicit Cache(std::filesystem::path dir);

  std::filesystem::path entry_path(int k, int ncoeffs, int bits) const;
  /// nullopt on a miss; throws CorruptEntry when the file fails validation.
  std::optional<verify::WeightData> get(int k, int ncoeffs, int bits) const;
  void put(const verify::WeightData& data, int bits) const;

  std::optional<verify::WeightData> load(int k, int ncoeffs, int bits) override;
  void save(const verify::WeightData& data, int bits) override;

  const std::vector<std::string>& warnings() const { return warnings_; }
  long hits() const { return hits_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> warnings_;
  long hits_ = 0;
};

std::string sha256_hex(const std::string& bytes);

std::string emit_report(const verify::ScenarioReport& report, Format format, bool include_timing = false);
/// Two columns x = k, y = the report's plot statistic.
std::string emit_plot_data(const verify::ScenarioReport& report);

verify::ScenarioReport run_scenario(const std::string& scenario, const RunConfig& cfg, verify::Workspace& ws);

/// Exit codes: 0 PASS or TREND-ONLY, 1 FAIL, 2 usage error, 3 numeric or runtime error.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace quelab::cli
