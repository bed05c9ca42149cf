#include "quelab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>

#include "quelab/errors.hpp"

namespace quelab::verify {

namespace {

using Clock = std::chrono::steady_clock;
using massmeasure::quadrature_coefficients;

std::string num(const Real& x) { return to_report_string(x, 25); }
std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", x);
  return buf;
}
std::string flag(bool b) { return b ? "true" : "false"; }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Fields base_tolerances(const Workspace& ws) {
  return {{"precision_bits", std::to_string(ws.bits())},
          {"norm_quad_tol", num(kProfileQuadTol)},
          {"norm_split_Y", num(kProfileY)}};
}

// Runs f on the weight data, growing the coefficient count while f runs short.
template <class F>
auto with_coeffs(Workspace& ws, int k, long need, F&& f) {
  for (;;) {
    const WeightData& wd = ws.weight(k, need);
    try {
      return f(wd);
    } catch (const InsufficientCoeffs&) {
      need = 2L * wd.ncoeffs;
      if (need > (1L << 20)) throw;
    }
  }
}

void require_weights(const std::vector<int>& ks) {
  if (ks.empty()) throw DomainError("empty weight grid");
  for (int k : ks)
    if (k < 12 || k % 2 != 0) throw DomainError("weights must be even and at least 12, got " + std::to_string(k));
}

std::string trend_detail(const TrendSummary& t, const std::string& what) {
  return what + ": bottom-quartile median " + num(t.bottom_median) + " (k " + std::to_string(t.bottom_weights.front()) +
         ".." + std::to_string(t.bottom_weights.back()) + "), top-quartile median " + num(t.top_median) + " (k " +
         std::to_string(t.top_weights.front()) + ".." + std::to_string(t.top_weights.back()) + ")";
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::TrendOnly: return "TREND-ONLY";
  }
  return "?";
}

const std::string& ScenarioReport::value(const ReportRow& row, const std::string& column) const {
  auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw DomainError("no column " + column + " in " + scenario);
  return row.values.at(static_cast<size_t>(it - columns.begin()));
}

MassProfile compute_profile(const eigenforms::Eigenform& form) {
  return massmeasure::make_profile(form, massmeasure::petersson_norm_sq(form, Real(kProfileY), kProfileQuadTol));
}

Workspace::Workspace(int precision_bits, BasisStore* store) : bits_(precision_bits), store_(store) {
  if (precision_bits < 128) throw DomainError("precision must be at least 128 bits");
}

long Workspace::default_coeffs(int k) const { return std::max<long>(400, quadrature_coefficients(k) + 8); }

const WeightData& Workspace::weight(int k, long min_coeffs) {
  const long need = std::max(default_coeffs(k), min_coeffs);
  auto it = data_.find(k);
  if (it != data_.end() && it->second.ncoeffs >= need) return it->second;
  WorkingPrecision wp(bits_);
  std::optional<WeightData> loaded;
  if (store_) loaded = store_->load(k, static_cast<int>(need), bits_);
  if (!loaded) {
    WeightData d;
    d.basis = eigenforms::eigen_decompose(k, static_cast<int>(need), bits_);
    ++decompositions_;
    d.ncoeffs = static_cast<int>(need);
    for (const auto& f : d.basis.forms) {
      MassProfile p = compute_profile(f);
      // same bits a cache reload would give
      p.norm_sq = specfun::LogReal::from_log(with_bits(p.norm_sq.logmag(), bits_), p.norm_sq.sign());
      p.scaled_norm = with_bits(p.scaled_norm, bits_);
      p.sym2_l = with_bits(p.sym2_l, bits_);
      p.sym2_r = with_bits(p.sym2_r, bits_);
      d.profiles.push_back(std::move(p));
    }
    if (store_) store_->save(d, bits_);
    loaded = std::move(d);
  }
  data_[k] = std::move(*loaded);
  return data_[k];
}

std::vector<int> weight_grid(int k_min, int k_max, int step) {
  if (step <= 0 || step % 2) throw DomainError("weight step must be a positive even number");
  std::vector<int> ks;
  int k0 = std::max(k_min, 12);
  if (k0 % 2) ++k0;
  for (int k = k0; k <= k_max; k += step)
    if (qseries::cusp_dim(k) > 0) ks.push_back(k);
  return ks;
}

TrendSummary quartile_trend(const std::vector<std::pair<int, double>>& stat) {
  TrendSummary t;
  std::set<int> ws;
  for (auto& [k, v] : stat) ws.insert(k);
  std::vector<int> w(ws.begin(), ws.end());
  if (w.empty()) return t;
  const size_t q = (w.size() + 3) / 4;
  t.bottom_weights.assign(w.begin(), w.begin() + static_cast<long>(q));
  t.top_weights.assign(w.end() - static_cast<long>(q), w.end());
  auto med = [&](const std::vector<int>& sel) {
    std::vector<double> v;
    for (auto& [k, x] : stat)
      if (std::binary_search(sel.begin(), sel.end(), k)) v.push_back(x);
    return median(v);
  };
  t.bottom_median = med(t.bottom_weights);
  t.top_median = med(t.top_weights);
  if (w.size() < 2) t.verdict = Verdict::TrendOnly;
  else if (t.top_median < t.bottom_median || t.top_median <= std::ldexp(1.0, -90)) t.verdict = Verdict::Pass;
  else t.verdict = Verdict::Fail;
  return t;
}

ScenarioReport run_vertical(Workspace& ws, int k_min, int k_max, double T) {
  auto t0 = Clock::now();
  if (!(T > 0)) throw DomainError("T must be positive");
  std::vector<int> ks = weight_grid(k_min, k_max);
  if (ks.empty()) throw DomainError("no weight in range has cusp forms");
  WorkingPrecision wp(ws.bits());
  ScenarioReport rep;
  rep.scenario = "vertical";
  rep.params = {{"k_min", std::to_string(k_min)}, {"k_max", std::to_string(k_max)}, {"T", num(T)}};
  rep.columns = {"I", "e_k"};
  rep.plot_column = "e_k";
  rep.tolerances = base_tolerances(ws);
  std::vector<std::pair<int, double>> stat;
  const Real limit = 3 / (pi() * T);
  for (int k : ks) {
    const WeightData& wd = ws.weight(k, massmeasure::vertical_coefficients(k, Real(T)));
    for (size_t i = 0; i < wd.basis.forms.size(); ++i) {
      auto v = massmeasure::vertical_mass(wd.basis.forms[i], Real(T), wd.profiles[i]);
      Real e = abs(v.value / limit - 1);
      rep.rows.push_back({k, wd.basis.forms[i].index, {num(v.value), num(e)}});
      stat.emplace_back(k, e.convert_to<double>());
    }
  }
  TrendSummary t = quartile_trend(stat);
  rep.verdict = t.verdict;
  rep.detail = trend_detail(t, "|I_k(T) pi T / 3 - 1|");
  rep.runtime_s = seconds_since(t0);
  return rep;
}

ScenarioReport run_horizontal(Workspace& ws, const std::vector<int>& ks, double a, double b, double T) {
  auto t0 = Clock::now();
  require_weights(ks);
  if (!(a >= -0.5 && a < b && b <= 0.5)) throw DomainError("window needs -1/2 <= a < b <= 1/2");
  if (!(T > 0)) throw DomainError("T must be positive");
  WorkingPrecision wp(ws.bits());
  ScenarioReport rep;
  rep.scenario = "horizontal";
  rep.params = {{"a", num(a)}, {"b", num(b)}, {"T", num(T)}, {"k_min", std::to_string(ks.front())},
                {"k_max", std::to_string(ks.back())}};
  rep.columns = {"mu", "I", "r", "deviation"};
  rep.plot_column = "deviation";
  rep.tolerances = base_tolerances(ws);
  rep.tolerances.emplace_back("rect_remainder", "2^-(precision_bits+16) relative");
  const Rectangle R{Real(a), Real(b), Real(T), std::nullopt};
  const Real width = Real(b) - Real(a);
  std::vector<std::pair<int, double>> stat;
  for (int k : ks) {
    with_coeffs(ws, k, massmeasure::vertical_coefficients(k, Real(T)), [&](const WeightData& wd) {
      std::vector<ReportRow> rows;
      std::vector<std::pair<int, double>> st;
      for (size_t i = 0; i < wd.basis.forms.size(); ++i) {
        const auto& f = wd.basis.forms[i];
        Real mu = massmeasure::rect_mass(f, R, wd.profiles[i]).value;
        Real I = massmeasure::vertical_mass(f, Real(T), wd.profiles[i]).value;
        Real r = mu / I, dev = abs(r - width);
        rows.push_back({k, f.index, {num(mu), num(I), num(r), num(dev)}});
        st.emplace_back(k, dev.convert_to<double>());
      }
      rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
      stat.insert(stat.end(), st.begin(), st.end());
      return 0;
    });
  }
  TrendSummary t = quartile_trend(stat);
  rep.verdict = t.verdict;
  rep.detail = trend_detail(t, "|mu_k / I_k - (b - a)|");
  rep.runtime_s = seconds_since(t0);
  return rep;
}

ScenarioReport run_siegel_bound(Workspace& ws, const std::vector<int>& ks, std::optional<double> T_override) {
  auto t0 = Clock::now();
  require_weights(ks);
  WorkingPrecision wp(ws.bits());
  ScenarioReport rep;
  rep.scenario = "siegel";
  rep.params = {{"k_min", std::to_string(ks.front())}, {"k_max", std::to_string(ks.back())},
                {"T", T_override ? num(*T_override) : "ceil(4 k ln k)"}};
  rep.columns = {"T", "log_mu", "log_bound", "slack", "in_hypothesis"};
  rep.plot_column = "slack";
  rep.tolerances = base_tolerances(ws);
  rep.tolerances.emplace_back("comparison", "exact, in log space");
  bool any = false, fail = false;
  Real min_slack;
  std::string where;
  for (int k : ks) {
    const double threshold = 4.0 * k * std::log(static_cast<double>(k));
    const double T = T_override ? *T_override : std::ceil(threshold);
    const bool hyp = T >= threshold;
    with_coeffs(ws, k, 0, [&](const WeightData& wd) {
      std::vector<ReportRow> rows;
      for (size_t i = 0; i < wd.basis.forms.size(); ++i) {
        const auto& f = wd.basis.forms[i];
        if (!hyp) {
          rows.push_back({k, f.index, {num(T), "", "", "", flag(false)}});
          continue;
        }
        auto s = massmeasure::siegel_mass(f, {Real(-0.5), Real(0.5), Real(T)}, wd.profiles[i]);
        Real lm = s.mass.log_value.logmag();
        Real slack = s.log_bound - lm;
        rows.push_back({k, f.index, {num(T), num(lm), num(s.log_bound), num(slack), flag(true)}});
        if (!any || slack < min_slack) min_slack = slack;
        any = true;
        if (slack < 0 && !fail) {
          fail = true;
          where = "k=" + std::to_string(k) + " index=" + std::to_string(f.index) + " T=" + num(T);
        }
      }
      rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
      return 0;
    });
  }
  if (fail) {
    rep.verdict = Verdict::Fail;
    rep.detail = "bound violated at " + where;
  } else if (!any) {
    rep.verdict = Verdict::TrendOnly;
    rep.detail = "no grid point satisfies T >= 4 k ln k";
  } else {
    rep.verdict = Verdict::Pass;
    rep.detail = "log mu <= -2 pi T - ln(2 pi T) at every grid point; smallest slack " + num(min_slack);
  }
  rep.runtime_s = seconds_since(t0);
  return rep;
}

ScenarioReport run_mean_values(Workspace& ws, const std::vector<int>& ks, double eps) {
  auto t0 = Clock::now();
  require_weights(ks);
  if (!(eps > 0)) throw DomainError("eps must be positive");
  WorkingPrecision wp(ws.bits());
  ScenarioReport rep;
  rep.scenario = "meanvalues";
  rep.params = {{"eps", num(eps)}, {"k_min", std::to_string(ks.front())}, {"k_max", std::to_string(ks.back())}};
  rep.columns = {"eps_k", "n_max", "S", "L", "R", "rho_L", "rho_R", "in_range"};
  rep.plot_column = "rho_R";
  rep.tolerances = base_tolerances(ws);
  rep.tolerances.emplace_back("min_eps_k", "2");
  rep.tolerances.emplace_back("convergence_gate", num(kMeanValueGate));
  std::vector<std::pair<int, double>> dev_l, dev_r;
  for (int k : ks) {
    const double ek = eps * k;
    const long nmax = static_cast<long>(std::floor(ek));
    const WeightData& wd = ws.weight(k, nmax);
    for (size_t i = 0; i < wd.basis.forms.size(); ++i) {
      const auto& f = wd.basis.forms[i];
      const auto& p = wd.profiles[i];
      if (ek < 2) {
        rep.rows.push_back({k, f.index, {num(ek), std::to_string(nmax), "", num(p.sym2_l), num(p.sym2_r), "", "", flag(false)}});
        continue;
      }
      Real S = 0;
      for (long n = 1; n <= nmax; ++n) S += f(n) * f(n);
      Real rl = S / (Real(ek) * p.sym2_l), rr = S / (Real(ek) * p.sym2_r);
      rep.rows.push_back({k, f.index, {num(ek), std::to_string(nmax), num(S), num(p.sym2_l), num(p.sym2_r), num(rl), num(rr), flag(true)}});
      dev_l.emplace_back(k, abs(rl - 1).convert_to<double>());
      dev_r.emplace_back(k, abs(rr - 1).convert_to<double>());
    }
  }
  if (dev_l.empty()) throw InsufficientRange("eps k < 2 at every weight in the grid");
  TrendSummary tl = quartile_trend(dev_l), tr = quartile_trend(dev_r);
  auto converges = [](const TrendSummary& t) { return t.verdict == Verdict::Pass && t.top_median < kMeanValueGate; };
  const bool cl = converges(tl), cr = converges(tr);
  rep.detail = trend_detail(tl, "|rho_L - 1|") + "; " + trend_detail(tr, "|rho_R - 1|") + "; ";
  if (tl.verdict == Verdict::TrendOnly) {
    rep.verdict = Verdict::TrendOnly;
    rep.detail += "single weight, no trend";
  } else if (cl != cr) {
    rep.verdict = Verdict::TrendOnly;
    rep.detail += std::string("converging convention: ") + (cr ? "R = L / zeta(2)" : "L");
  } else {
    rep.verdict = Verdict::Fail;
    rep.detail += cl ? "both conventions converge" : "neither convention converges";
  }
  rep.runtime_s = seconds_since(t0);
  return rep;
}

ScenarioReport run_lehmer_scan(Workspace& ws, int p, int k_max) {
  auto t0 = Clock::now();
  if (!qseries::is_prime(p)) throw DomainError("p must be prime");
  std::vector<int> ks = weight_grid(12, k_max);
  if (ks.empty()) throw DomainError("no weight in range has cusp forms");
  WorkingPrecision wp(ws.bits());
  ScenarioReport rep;
  rep.scenario = "lehmer";
  rep.params = {{"p", std::to_string(p)}, {"k_max", std::to_string(k_max)}};
  rep.columns = {"lambda_p", "a_p", "suspect", "charpoly_constant", "exact_zero"};
  rep.plot_column = "lambda_p";
  rep.tolerances = base_tolerances(ws);
  rep.tolerances.emplace_back("suspect_below", "2^-(precision_bits/2)");
  rep.tolerances.emplace_back("zero_test", "exact integer charpoly of T_p");
  const Real suspect_below = pow2(-ws.bits() / 2);
  bool found = false;
  std::string where;
  Real min_abs;
  std::string min_at;
  for (int k : ks) {
    const WeightData& wd = ws.weight(k, p);
    const int d = qseries::cusp_dim(k);
    auto vm = qseries::victor_miller_basis(k, p * (d + 1));
    Integer c0 = qseries::charpoly(qseries::hecke_matrix(p, vm).entries)[0];
    // With a zero constant term, the form whose a(p) is closest to 0 carries the root.
    size_t zero_form = wd.basis.forms.size();
    if (c0 == 0) {
      Real best;
      for (size_t i = 0; i < wd.basis.forms.size(); ++i) {
        Real v = abs(wd.basis.forms[i](p));
        if (zero_form == wd.basis.forms.size() || v < best) {
          best = v;
          zero_form = i;
        }
      }
    }
    const Real scale = pow(Real(p), Real(k - 1) / 2);
    for (size_t i = 0; i < wd.basis.forms.size(); ++i) {
      const auto& f = wd.basis.forms[i];
      Real lp = f(p), ap = lp * scale;
      bool zero = i == zero_form;
      rep.rows.push_back({k, f.index, {num(lp), num(ap), flag(abs(lp) < suspect_below), c0.get_str(), flag(zero)}});
      if (zero && !found) {
        found = true;
        where = "k=" + std::to_string(k) + " index=" + std::to_string(f.index);
      }
      if (min_at.empty() || abs(lp) < min_abs) {
        min_abs = abs(lp);
        min_at = "k=" + std::to_string(k) + " index=" + std::to_string(f.index);
      }
    }
  }
  rep.verdict = found ? Verdict::Fail : Verdict::Pass;
  rep.detail = found ? "a(p) = 0 at " + where
                     : "no a(p) vanishes; min |lambda(p)| = " + num(min_abs) + " at " + min_at;
  rep.runtime_s = seconds_since(t0);
  return rep;
}

ScenarioReport run_orthogonality(Workspace& ws, const std::vector<int>& ks, const Rectangle& R) {
  auto t0 = Clock::now();
  require_weights(ks);
  R.validate();
  for (int k : ks)
    if (qseries::cusp_dim(k) < 2) throw DimensionTooSmall("weight " + std::to_string(k) + " has fewer than two eigenforms");
  WorkingPrecision wp(ws.bits());
  ScenarioReport rep;
  rep.scenario = "orthogonality";
  rep.params = {{"a", num(R.a)}, {"b", num(R.b)}, {"t1", num(R.t1)}, {"t2", R.t2 ? num(*R.t2) : "inf"},
                {"k_min", std::to_string(ks.front())}, {"k_max", std::to_string(ks.back())}};
  rep.columns = {"index2", "cross_re", "cross_im", "cross_abs", "mu_1", "mu_2", "ratio"};
  rep.plot_column = "cross_abs";
  rep.tolerances = base_tolerances(ws);
  rep.tolerances.emplace_back("k24_gate", "ratio <= 0.5");
  std::vector<std::pair<int, double>> stat;
  bool gate_fail = false;
  std::string gate_detail;
  for (int k : ks) {
    with_coeffs(ws, k, 0, [&](const WeightData& wd) {
      std::vector<ReportRow> rows;
      std::vector<std::pair<int, double>> st;
      const auto& fs = wd.basis.forms;
      std::vector<Real> mu;
      for (size_t i = 0; i < fs.size(); ++i) mu.push_back(massmeasure::rect_mass(fs[i], R, wd.profiles[i]).value);
      for (size_t i = 0; i < fs.size(); ++i)
        for (size_t j = i + 1; j < fs.size(); ++j) {
          auto c = massmeasure::cross_mass(fs[i], wd.profiles[i], fs[j], wd.profiles[j], R);
          Real mod = sqrt(c.re * c.re + c.im * c.im);
          Real ratio = mod / std::min(mu[i], mu[j]);
          rows.push_back({k, fs[i].index,
                          {std::to_string(fs[j].index), num(c.re), num(c.im), num(mod), num(mu[i]), num(mu[j]), num(ratio)}});
          st.emplace_back(k, mod.convert_to<double>());
          if (k == 24 && ratio > Real(0.5) && !gate_fail) {
            gate_fail = true;
            gate_detail = "k=24 pair (" + std::to_string(fs[i].index) + "," + std::to_string(fs[j].index) +
                          ") ratio " + num(ratio) + " > 0.5";
          }
        }
      rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
      stat.insert(stat.end(), st.begin(), st.end());
      return 0;
    });
  }
  TrendSummary t = quartile_trend(stat);
  rep.detail = trend_detail(t, "|normalized cross mass|");
  if (gate_fail) {
    rep.verdict = Verdict::Fail;
    rep.detail = gate_detail + "; " + rep.detail;
  } else {
    rep.verdict = t.verdict;
  }
  rep.runtime_s = seconds_since(t0);
  return rep;
}

ScenarioReport run_gamma_lemma(double delta, const std::vector<long>& ks_in) {
  auto t0 = Clock::now();
  if (!(delta > 0 && delta < 0.5)) throw DomainError("delta must lie in (0, 1/2)");
  if (ks_in.empty()) throw DomainError("empty k grid");
  std::vector<long> ks = ks_in;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  const int bits = 256;
  WorkingPrecision wp(bits);
  ScenarioReport rep;
  rep.scenario = "gammalemma";
  rep.params = {{"delta", num(delta)}, {"k_min", std::to_string(ks.front())}, {"k_max", std::to_string(ks.back())}};
  rep.columns = {"gap", "gap_k_delta", "gap_cf", "cf_difference"};
  rep.plot_column = "gap_k_delta";
  rep.tolerances = {{"precision_bits", std::to_string(bits)}, {"bounded_factor", "4"}, {"cf_agreement", "2^-100"}};
  const Real d(delta);
  std::vector<Real> gaps, scaled;
  std::string fail;
  for (long k : ks) {
    Real g = specfun::gamma_lemma_gap(k, d);
    Real s = g * pow(Real(k), d);
    std::string cf, diff;
    if (k == 10000) {
      Real x = Real(k) - pow(Real(k), Real(0.5) + d);
      Real alt = specfun::oracle::reg_inc_gamma_p_cf(Real(k - 1), x);
      Real e = abs(alt - g);
      cf = num(alt);
      diff = num(e);
      if (e > pow2(-100) && fail.empty()) fail = "continued fraction disagrees at k=10000 by " + num(e);
    }
    rep.rows.push_back({static_cast<int>(std::min<long>(k, 2147483647L)), 0, {num(g), num(s), cf, diff}});
    if (!gaps.empty() && !(g < gaps.back()) && fail.empty()) fail = "gap not decreasing at k=" + std::to_string(k);
    gaps.push_back(g);
    scaled.push_back(s);
  }
  Real mx = *std::max_element(scaled.begin(), scaled.end());
  if (mx > 4 * scaled.front() && fail.empty()) fail = "gap k^delta exceeds 4x its value at the smallest k";
  rep.verdict = fail.empty() ? Verdict::Pass : Verdict::Fail;
  rep.detail = fail.empty() ? "gap strictly decreasing; max gap k^delta / first = " + num(Real(mx / scaled.front()))
                            : fail;
  rep.runtime_s = seconds_since(t0);
  return rep;
}

ScenarioReport run_main_error(Workspace& ws, const std::vector<int>& ks, double T, double delta) {
  auto t0 = Clock::now();
  require_weights(ks);
  if (!(T > 0)) throw DomainError("T must be positive");
  if (!(delta > 0 && delta < 0.5)) throw DomainError("delta must lie in (0, 1/2)");
  WorkingPrecision wp(ws.bits());
  ScenarioReport rep;
  rep.scenario = "mainerror";
  rep.params = {{"T", num(T)}, {"delta", num(delta)}, {"k_min", std::to_string(ks.front())},
                {"k_max", std::to_string(ks.back())}};
  rep.columns = {"cut", "M", "E", "I", "residual", "certificate"};
  rep.plot_column = "E";
  rep.tolerances = base_tolerances(ws);
  rep.tolerances.emplace_back("reconstruction", "2^-100");
  std::vector<std::pair<int, double>> stat;
  std::string fail;
  const Real tol = pow2(-100);
  for (int k : ks) {
    with_coeffs(ws, k, massmeasure::vertical_coefficients(k, Real(T)), [&](const WeightData& wd) {
      std::vector<ReportRow> rows;
      std::vector<std::pair<int, double>> st;
      for (size_t i = 0; i < wd.basis.forms.size(); ++i) {
        const auto& f = wd.basis.forms[i];
        auto s = massmeasure::main_error_split(f, Real(T), Real(delta), wd.profiles[i]);
        Real I = massmeasure::vertical_mass(f, Real(T), wd.profiles[i]).value;
        Real res = abs(s.main + s.error - I);
        Real cert = s.error_certificate.to_real_or_zero();
        rows.push_back({k, f.index, {std::to_string(s.cut), num(s.main), num(s.error), num(I), num(res), num(cert)}});
        st.emplace_back(k, s.error.convert_to<double>());
        std::string at = " at k=" + std::to_string(k) + " index=" + std::to_string(f.index);
        if (res > tol && fail.empty()) fail = "M + E differs from I by " + num(res) + at;
        if (s.error > cert && fail.empty()) fail = "E exceeds its certificate" + at;
      }
      rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
      stat.insert(stat.end(), st.begin(), st.end());
      return 0;
    });
  }
  TrendSummary t = quartile_trend(stat);
  rep.detail = trend_detail(t, "E_k(T)");
  if (!fail.empty()) {
    rep.verdict = Verdict::Fail;
    rep.detail = fail + "; " + rep.detail;
  } else {
    rep.verdict = t.verdict;
  }
  rep.runtime_s = seconds_since(t0);
  return rep;
}

}  // namespace quelab::verify
