#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "quelab/errors.hpp"
#include "quelab/verify.hpp"

using namespace quelab;
using namespace quelab::verify;
using boost::multiprecision::abs;

namespace {

Real at(const ScenarioReport& r, const ReportRow& row, const std::string& col) { return Real(r.value(row, col)); }

Workspace& shared() {
  static Workspace ws(256);
  return ws;
}

}  // namespace

TEST_CASE("quartile trend") {
  std::vector<std::pair<int, double>> down, up;
  for (int k = 12; k <= 26; k += 2) {
    down.emplace_back(k, 1.0 / k);
    down.emplace_back(k, 2.0 / k);
    up.emplace_back(k, k);
  }
  TrendSummary t = quartile_trend(down);
  CHECK(t.verdict == Verdict::Pass);
  CHECK(t.bottom_weights == std::vector<int>{12, 14});
  CHECK(t.top_weights == std::vector<int>{24, 26});
  // four rows per quartile: 1/12, 2/12, 1/14, 2/14
  CHECK(t.bottom_median == doctest::Approx((1.0 / 12 + 2.0 / 14) / 2));
  CHECK(quartile_trend(up).verdict == Verdict::Fail);

  // five weights: ceil(5/4) = 2 per quartile
  std::vector<std::pair<int, double>> five{{12, 5}, {14, 4}, {16, 3}, {18, 2}, {20, 1}};
  t = quartile_trend(five);
  CHECK(t.bottom_weights.size() == 2);
  CHECK(t.top_median == doctest::Approx(1.5));

  CHECK(quartile_trend({{12, 0.3}, {12, 0.1}}).verdict == Verdict::TrendOnly);
  // both quartiles already at the noise floor
  CHECK(quartile_trend({{12, 0x1p-100}, {14, 0x1p-99}}).verdict == Verdict::Pass);
  CHECK(quartile_trend({{12, 0.5}, {14, 0.5}}).verdict == Verdict::Fail);
}

TEST_CASE("weight grid skips empty cusp spaces") {
  CHECK(weight_grid(12, 30) == std::vector<int>{12, 16, 18, 20, 22, 24, 26, 28, 30});
  CHECK(weight_grid(24, 72, 4).front() == 24);
  CHECK(weight_grid(13, 14).empty());
  CHECK_THROWS_AS(weight_grid(12, 30, 3), DomainError);
}

TEST_CASE("vertical scenario") {
  auto& ws = shared();
  ScenarioReport one = run_vertical(ws, 12, 12, 1.0);
  CHECK(one.verdict == Verdict::TrendOnly);
  REQUIRE(one.rows.size() == 1);

  ScenarioReport r = run_vertical(ws, 12, 30, 1.0);
  CHECK(r.columns == std::vector<std::string>{"I", "e_k"});
  size_t forms = 0;
  for (int k : weight_grid(12, 30)) forms += static_cast<size_t>(qseries::cusp_dim(k));
  CHECK(r.rows.size() == forms);
  WorkingPrecision wp(256);
  const Real pi = boost::math::constants::pi<Real>();
  for (const auto& row : r.rows) {
    Real I = at(r, row, "I");
    CHECK(I > 0);
    CHECK(I < 1);
    CHECK(abs(at(r, row, "e_k") - abs(I * pi / 3 - 1)) < Real(1e-20));
  }
  CHECK_THROWS_AS(run_vertical(ws, 12, 30, 0.0), DomainError);
  CHECK_THROWS_AS(run_vertical(ws, 2, 10, 1.0), DomainError);
}

TEST_CASE("scenarios reuse the workspace without recomputing bases") {
  auto& ws = shared();
  run_vertical(ws, 12, 24, 1.0);
  const long before = ws.decompositions();
  run_vertical(ws, 12, 24, 2.0);
  run_horizontal(ws, weight_grid(12, 24), 0.0, 0.25, 1.0);
  run_main_error(ws, weight_grid(12, 24), 1.0, 0.1);
  CHECK(ws.decompositions() == before);
}

TEST_CASE("horizontal scenario over the full period reproduces the vertical mass") {
  auto& ws = shared();
  WorkingPrecision wp(256);
  ScenarioReport h = run_horizontal(ws, weight_grid(12, 24), -0.5, 0.5, 1.0);
  ScenarioReport v = run_vertical(ws, 12, 24, 1.0);
  REQUIRE(h.rows.size() == v.rows.size());
  for (size_t i = 0; i < h.rows.size(); ++i) {
    CHECK(abs(at(h, h.rows[i], "mu") / at(v, v.rows[i], "I") - 1) < Real(1e-22));
    CHECK(abs(at(h, h.rows[i], "r") - 1) < Real(1e-22));
    CHECK(abs(at(h, h.rows[i], "deviation")) < Real(1e-22));
  }
  CHECK_THROWS_AS(run_horizontal(ws, {12}, 0.25, 0.25, 1.0), DomainError);
  CHECK_THROWS_AS(run_horizontal(ws, {12}, -0.6, 0.2, 1.0), DomainError);
}

TEST_CASE("horizontal windows of equal width carry comparable mass") {
  auto& ws = shared();
  WorkingPrecision wp(256);
  ScenarioReport left = run_horizontal(ws, {24}, -0.5, -0.25, 1.0);
  ScenarioReport right = run_horizontal(ws, {24}, 0.0, 0.25, 1.0);
  for (size_t i = 0; i < left.rows.size(); ++i) {
    Real rl = at(left, left.rows[i], "r"), rr = at(right, right.rows[i], "r");
    CHECK(rl > 0);
    CHECK(rr > 0);
    CHECK(abs(rl - rr) < Real(0.25));
  }
}

TEST_CASE("Siegel scenario inside and outside the hypothesis") {
  auto& ws = shared();
  ScenarioReport r = run_siegel_bound(ws, {12, 16});
  CHECK(r.verdict == Verdict::Pass);
  for (const auto& row : r.rows) CHECK(r.value(row, "in_hypothesis") == "true");

  ScenarioReport low = run_siegel_bound(ws, {12}, 10.0);
  CHECK(low.verdict == Verdict::TrendOnly);
  CHECK(low.value(low.rows[0], "in_hypothesis") == "false");
}

TEST_CASE("mean values") {
  auto& ws = shared();
  CHECK_THROWS_AS(run_mean_values(ws, {12, 16, 20}, 0.01), InsufficientRange);

  WorkingPrecision wp(256);
  ScenarioReport r = run_mean_values(ws, weight_grid(12, 40), 1 / (4 * M_PI));
  int out_of_range = 0;
  for (const auto& row : r.rows) {
    if (r.value(row, "in_range") == "false") {
      ++out_of_range;
      CHECK(r.value(row, "S").empty());
      continue;
    }
    const auto& wd = ws.weight(row.k);
    const auto& f = wd.basis.forms.at(static_cast<size_t>(row.index - 1));
    Real S = 0;
    for (long n = 1; n <= std::stol(r.value(row, "n_max")); ++n) S += f(n) * f(n);
    CHECK(abs(at(r, row, "S") / S - 1) < Real(1e-22));
    CHECK(abs(at(r, row, "L") / at(r, row, "R") - boost::math::constants::pi<Real>() *
                                                     boost::math::constants::pi<Real>() / 6) < Real(1e-20));
  }
  CHECK(out_of_range > 0);  // eps k < 2 below k = 26
  ScenarioReport single = run_mean_values(ws, {40}, 1 / (4 * M_PI));
  CHECK(single.verdict == Verdict::TrendOnly);
}

TEST_CASE("Lehmer scan at weight 12") {
  auto& ws = shared();
  WorkingPrecision wp(256);
  ScenarioReport r = run_lehmer_scan(ws, 2, 12);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.value(r.rows[0], "charpoly_constant") == "24");
  Real expect = Real(-24) / pow(Real(2), Real(5.5));
  CHECK(abs(at(r, r.rows[0], "lambda_p") - expect) < Real(1e-22));
  CHECK(abs(at(r, r.rows[0], "a_p") + 24) < Real(1e-20));
  CHECK_THROWS_AS(run_lehmer_scan(ws, 4, 12), DomainError);

  ScenarioReport wide = run_lehmer_scan(ws, 3, 40);
  CHECK(wide.verdict == Verdict::Pass);
  for (const auto& row : wide.rows) CHECK(wide.value(row, "suspect") == "false");
}

TEST_CASE("orthogonality scenario") {
  auto& ws = shared();
  Rectangle R{Real(0), Real(0.25), Real(1), std::nullopt};
  CHECK_THROWS_AS(run_orthogonality(ws, {26}, R), DimensionTooSmall);
  ScenarioReport r = run_orthogonality(ws, {24}, R);
  REQUIRE(r.rows.size() == 1);  // one unordered pair, no self-pairs
  CHECK(r.rows[0].index != std::stoi(r.value(r.rows[0], "index2")));
  CHECK(r.verdict != Verdict::Fail);
  ScenarioReport three = run_orthogonality(ws, {36}, R);
  CHECK(three.rows.size() == 3);
}

TEST_CASE("gamma lemma: wider deficit decays faster") {
  WorkingPrecision wp(256);
  ScenarioReport a = run_gamma_lemma(0.1, {100, 1000, 10000});
  ScenarioReport b = run_gamma_lemma(0.49, {100, 1000, 10000});
  CHECK(a.verdict == Verdict::Pass);
  CHECK(b.verdict == Verdict::Pass);
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(at(b, b.rows[i], "gap") > 0);  // about 1e-1000 at k = 1e4, no cancellation to zero
    CHECK(at(b, b.rows[i], "gap") < at(a, a.rows[i], "gap"));
  }
  CHECK(!a.value(a.rows[2], "cf_difference").empty());
  CHECK_THROWS_AS(run_gamma_lemma(0.5, {100}), DomainError);
  CHECK_THROWS_AS(run_gamma_lemma(0.0, {100}), DomainError);
}

TEST_CASE("main/error scenario rebuilds I") {
  auto& ws = shared();
  WorkingPrecision wp(256);
  ScenarioReport r = run_main_error(ws, weight_grid(12, 30), 1.0, 0.1);
  for (const auto& row : r.rows) {
    Real M = at(r, row, "M"), E = at(r, row, "E"), I = at(r, row, "I");
    CHECK(abs(M + E - I) < Real(1e-22));
    CHECK(E >= 0);
    CHECK(E <= at(r, row, "certificate"));
  }
}

TEST_CASE("fresh workspaces give identical reports") {
  Workspace a(256), b(256);
  ScenarioReport x = run_vertical(a, 12, 20, 1.0), y = run_vertical(b, 12, 20, 1.0);
  REQUIRE(x.rows.size() == y.rows.size());
  for (size_t i = 0; i < x.rows.size(); ++i) CHECK(x.rows[i].values == y.rows[i].values);
  CHECK(x.detail == y.detail);
}
