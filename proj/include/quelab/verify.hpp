#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quelab/massmeasure.hpp"

namespace quelab::verify {

using massmeasure::MassProfile;
using massmeasure::Rectangle;

enum class Verdict { Pass, Fail, TrendOnly };
std::string to_string(Verdict v);

using Fields = std::vector<std::pair<std::string, std::string>>;

struct ReportRow {
  int k = 0;
  int index = 0;
  std::vector<std::string> values;  // aligned with ScenarioReport::columns
};

struct ScenarioReport {
  std::string scenario;
  Fields params;
  std::vector<std::string> columns;  // value columns after k, index
  std::vector<ReportRow> rows;
  Verdict verdict = Verdict::TrendOnly;
  std::string detail;  // failing grid point, or the outcome of a trend
  Fields tolerances;
  std::string plot_column;  // statistic plotted against k
  double runtime_s = 0;

  const std::string& value(const ReportRow& row, const std::string& column) const;
};

/// Eigenbasis of one weight plus a profile per form.
struct WeightData {
  eigenforms::EigenBasis basis;
  std::vector<MassProfile> profiles;
  int ncoeffs = 0;
};

/// Persistent storage for WeightData keyed by (k, ncoeffs, bits).
class BasisStore {
 public:
  virtual ~BasisStore() = default;
  virtual std::optional<WeightData> load(int k, int ncoeffs, int bits) = 0;
  virtual void save(const WeightData& data, int bits) = 0;
};

/// Split height and tolerance used for every profile norm.
inline constexpr double kProfileY = 2.0;
inline constexpr double kProfileQuadTol = 1e-12;

/// Memoizes eigenbases and profiles across scenarios. Not thread-safe.
class Workspace {
 public:
  explicit Workspace(int precision_bits = 256, BasisStore* store = nullptr);

  /// Weight data with at least max(default_coeffs(k), min_coeffs) coefficients.
  const WeightData& weight(int k, long min_coeffs = 0);
  long default_coeffs(int k) const;
  int bits() const { return bits_; }
  /// Eigen decompositions actually computed (store hits excluded).
  long decompositions() const { return decompositions_; }

 private:
  int bits_;
  BasisStore* store_;
  std::map<int, WeightData> data_;
  long decompositions_ = 0;
};

MassProfile compute_profile(const eigenforms::Eigenform& form);

/// Even weights in [k_min, k_max] with a nonzero cusp space.
std::vector<int> weight_grid(int k_min, int k_max, int step = 2);

struct TrendSummary {
  std::vector<int> bottom_weights, top_weights;
  double bottom_median = 0, top_median = 0;
  Verdict verdict = Verdict::TrendOnly;
};

/// Quartile-median comparison: bottom/top quartile are the first/last ceil(w/4)
/// distinct weights; the median is over all rows of those weights. PASS when the
/// top median is strictly smaller (or the bottom median is already below 2^-90),
/// FAIL otherwise, TREND-ONLY with fewer than two weights.
TrendSummary quartile_trend(const std::vector<std::pair<int, double>>& stat);

ScenarioReport run_vertical(Workspace& ws, int k_min, int k_max, double T);
ScenarioReport run_horizontal(Workspace& ws, const std::vector<int>& ks, double a, double b, double T);
/// T = ceil(4 k ln k) unless T_override is given; rows below 4 k ln k are marked out of hypothesis.
ScenarioReport run_siegel_bound(Workspace& ws, const std::vector<int>& ks,
                                std::optional<double> T_override = std::nullopt);
ScenarioReport run_mean_values(Workspace& ws, const std::vector<int>& ks, double eps);
ScenarioReport run_lehmer_scan(Workspace& ws, int p, int k_max);
ScenarioReport run_orthogonality(Workspace& ws, const std::vector<int>& ks, const Rectangle& R);
ScenarioReport run_gamma_lemma(double delta, const std::vector<long>& ks);
ScenarioReport run_main_error(Workspace& ws, const std::vector<int>& ks, double T, double delta);

/// Convergence gate for the mean-value ratios: a convention converges when its
/// top-quartile median |rho - 1| is below both its bottom-quartile median and this value.
inline constexpr double kMeanValueGate = 0.196;

}  // namespace quelab::verify
