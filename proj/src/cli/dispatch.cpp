#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>
#include <omp.h>

#include "quelab/cli.hpp"
#include "quelab/errors.hpp"

namespace quelab::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kScenarios{"vertical", "horizontal", "siegel",        "meanvalues",
                                          "lehmer",   "orthogonality", "gammalemma", "mainerror"};

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw DomainError("bad number for " + key + ": '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw DomainError("bad integer for " + key + ": '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw DomainError("bad boolean for " + key + ": '" + v + "'");
}

template <class T>
std::vector<T> to_list(const std::string& key, const std::string& v) {
  std::vector<T> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(static_cast<T>(to_long(key, item)));
  }
  return out;
}

// Keys shared by INI sections and scenario flags.
void apply_key(RunConfig& c, const std::string& key, const std::string& v) {
  if (key == "k_min") c.k_min = static_cast<int>(to_long(key, v));
  else if (key == "k_max") c.k_max = static_cast<int>(to_long(key, v));
  else if (key == "k_step") c.k_step = static_cast<int>(to_long(key, v));
  else if (key == "k_list") c.k_list = to_list<int>(key, v);
  else if (key == "T") c.T = to_double(key, v);
  else if (key == "siegel_T") c.siegel_T = to_double(key, v);
  else if (key == "delta") c.delta = to_double(key, v);
  else if (key == "eps") c.eps = to_double(key, v);
  else if (key == "a") c.a = to_double(key, v);
  else if (key == "b") c.b = to_double(key, v);
  else if (key == "t1") c.t1 = to_double(key, v);
  else if (key == "t2") c.t2 = to_double(key, v);
  else if (key == "p") c.prime = static_cast<int>(to_long(key, v));
  else if (key == "k_grid") c.gamma_ks = to_list<long>(key, v);
  else if (key == "format") c.format = parse_format(v);
  else if (key == "timing") c.timing = to_bool(key, v);
  else throw DomainError("unknown key '" + key + "'");
}

std::vector<int> orthogonality_default() {
  std::vector<int> ks;
  for (int k = 24; k <= 72; k += 4) ks.push_back(k);
  return ks;
}

void write_file(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << bytes;
  if (!out) throw Error("cannot write " + path.string());
}

int exit_code(verify::Verdict v) { return v == verify::Verdict::Fail ? 1 : 0; }

std::string extension(Format f) { return f == Format::Json ? "json" : "csv"; }

const eigenforms::Eigenform& pick_form(const verify::WeightData& wd, int index, const verify::MassProfile** profile) {
  if (index < 1 || index > static_cast<int>(wd.basis.forms.size()))
    throw DomainError("index must lie in 1.." + std::to_string(wd.basis.forms.size()));
  *profile = &wd.profiles[static_cast<size_t>(index - 1)];
  return wd.basis.forms[static_cast<size_t>(index - 1)];
}

std::string single_record(const std::vector<std::pair<std::string, json>>& fields, Format f) {
  if (f == Format::Json) {
    json o = json::object();
    for (const auto& [k, v] : fields) o[k] = v;
    return o.dump(2) + "\n";
  }
  std::string head, row;
  for (const auto& [k, v] : fields) {
    head += (head.empty() ? "" : ",") + k;
    row += (row.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.is_null() ? "" : v.dump());
  }
  return head + "\n" + row + "\n";
}

}  // namespace

void RunConfig::validate() const {
  if (precision_bits < 128) throw DomainError("precision_bits must be at least 128");
  if (threads < 1) throw DomainError("threads must be at least 1");
  for (int k : weights())
    if (k < 12 || k % 2) throw DomainError("weights must be even and at least 12");
}

std::vector<int> RunConfig::weights() const {
  if (!k_list.empty()) return k_list;
  if (k_min < 12 || k_min % 2 || k_max < k_min) throw DomainError("weight range needs even k_min >= 12 and k_max >= k_min");
  return verify::weight_grid(k_min, k_max, k_step);
}

verify::ScenarioReport run_scenario(const std::string& s, const RunConfig& c, verify::Workspace& ws) {
  if (s == "vertical") {
    if (!c.k_list.empty()) throw DomainError("vertical takes --k-min/--k-max");
    return verify::run_vertical(ws, c.k_min, c.k_max, c.T);
  }
  if (s == "horizontal") return verify::run_horizontal(ws, c.weights(), c.a, c.b, c.T);
  if (s == "siegel") return verify::run_siegel_bound(ws, c.weights(), c.siegel_T);
  if (s == "meanvalues") return verify::run_mean_values(ws, c.weights(), c.eps);
  if (s == "lehmer") return verify::run_lehmer_scan(ws, c.prime, c.k_max);
  if (s == "orthogonality") {
    verify::Rectangle R{Real(c.a), Real(c.b), Real(c.t1), std::nullopt};
    if (c.t2) R.t2 = Real(*c.t2);
    return verify::run_orthogonality(ws, c.k_list.empty() ? orthogonality_default() : c.k_list, R);
  }
  if (s == "gammalemma") return verify::run_gamma_lemma(c.delta, c.gamma_ks);
  if (s == "mainerror") return verify::run_main_error(ws, c.weights(), c.T, c.delta);
  throw DomainError("unknown scenario '" + s + "'");
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"quelab: mass equidistribution laboratory for level-one Hecke eigenforms"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string cache_dir = ".quelab-cache", format = "json";
  bool no_cache = false;
  app.add_option("--precision", cfg.precision_bits, "working precision in bits (>= 128)")->check(CLI::Range(128, 65536));
  app.add_option("--cache-dir", cache_dir, "eigenform cache directory (QUELAB_CACHE_DIR overrides)");
  app.add_flag("--no-cache", no_cache, "do not read or write the cache");
  app.add_option("--threads", cfg.threads, "threads for exact series products")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--timing", cfg.timing, "record wall time in reports");

  auto* eig = app.add_subcommand("eigenforms", "normalized eigenform coefficients lambda(n)");
  int weight = 0, ncoeffs = 0, index = 1;
  eig->add_option("--weight", weight)->required();
  eig->add_option("--ncoeffs", ncoeffs)->required()->check(CLI::Range(2, 1 << 22));

  auto* norm = app.add_subcommand("norm", "Petersson norm and symmetric-square value");
  double Y = 2.0, quad_tol = 1e-12;
  norm->add_option("--weight", weight)->required();
  norm->add_option("--index", index)->required();
  norm->add_option("--Y", Y, "split height");
  norm->add_option("--quad-tol", quad_tol);

  auto* mass = app.add_subcommand("mass", "mass of a rectangle or a Siegel domain");
  mass->require_subcommand(1);
  double a = -0.5, b = 0.5, t1 = 1.0, T = 1.0;
  std::optional<double> t2;
  auto* rect = mass->add_subcommand("rect");
  rect->add_option("--weight", weight)->required();
  rect->add_option("--index", index)->required();
  rect->add_option("--a", a)->required();
  rect->add_option("--b", b)->required();
  rect->add_option("--t1", t1)->required();
  rect->add_option("--t2", t2);
  auto* siegel = mass->add_subcommand("siegel");
  siegel->add_option("--weight", weight)->required();
  siegel->add_option("--index", index)->required();
  siegel->add_option("--a", a);
  siegel->add_option("--b", b);
  siegel->add_option("--T", T)->required();

  auto* ver = app.add_subcommand("verify", "run a verification scenario");
  std::string scenario, output, plot;
  std::vector<int> k_list;
  std::vector<long> k_grid;
  std::optional<double> v_T, v_a, v_b, v_t1, v_t2, v_eps, v_delta;
  std::optional<int> v_kmin, v_kmax, v_kstep, v_p;
  ver->add_option("scenario", scenario)->required()->check(CLI::IsMember(kScenarios));
  ver->add_option("--k-min", v_kmin);
  ver->add_option("--k-max", v_kmax);
  ver->add_option("--k-step", v_kstep);
  ver->add_option("--k-list", k_list)->delimiter(',');
  ver->add_option("--T", v_T);
  ver->add_option("--a", v_a);
  ver->add_option("--b", v_b);
  ver->add_option("--t1", v_t1);
  ver->add_option("--t2", v_t2);
  ver->add_option("--eps", v_eps);
  ver->add_option("--delta", v_delta);
  ver->add_option("--p", v_p);
  ver->add_option("--k-grid", k_grid, "weights for gammalemma")->delimiter(',');
  ver->add_option("--output", output, "write the report here instead of stdout");
  ver->add_option("--plot", plot, "also write x,y plot data here");

  auto* sweep = app.add_subcommand("sweep", "run the scenarios of an INI config file");
  std::string config;
  sweep->add_option("--config", config)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    cfg.format = parse_format(format);
    omp_set_num_threads(cfg.threads);
    std::unique_ptr<Cache> cache;
    if (!no_cache) cache = std::make_unique<Cache>(resolve_cache_dir(cache_dir));
    auto flush_warnings = [&] {
      if (cache)
        for (const auto& w : cache->warnings()) err << "warning: " << w << "\n";
    };

    if (*sweep) {
      boost::property_tree::ptree tree;
      boost::property_tree::read_ini(config, tree);
      fs::path out_dir = ".";
      RunConfig base = cfg;
      std::vector<std::pair<std::string, const boost::property_tree::ptree*>> sections;
      for (const auto& [key, node] : tree) {
        if (!node.empty()) {
          sections.emplace_back(key, &node);
          continue;
        }
        const std::string v = node.data();
        if (key == "precision_bits") base.precision_bits = static_cast<int>(to_long(key, v));
        else if (key == "cache_dir") {
          if (!no_cache) cache = std::make_unique<Cache>(resolve_cache_dir(v));
        } else if (key == "output_dir") out_dir = v;
        else if (key == "threads") base.threads = static_cast<int>(to_long(key, v));
        else apply_key(base, key, v);
      }
      base.validate();
      omp_set_num_threads(base.threads);
      verify::Workspace ws(base.precision_bits, cache.get());
      int code = 0;
      for (const auto& [name, node] : sections) {
        RunConfig c = base;
        std::string kind = name;
        bool want_plot = false;
        for (const auto& [key, leaf] : *node) {
          if (key == "scenario") kind = leaf.data();
          else if (key == "plot") want_plot = to_bool(key, leaf.data());
          else apply_key(c, key, leaf.data());
        }
        c.validate();
        auto rep = run_scenario(kind, c, ws);
        write_file(out_dir / (name + "." + extension(c.format)), emit_report(rep, c.format, c.timing));
        if (want_plot) write_file(out_dir / (name + ".plot.csv"), emit_plot_data(rep));
        out << name << ": " << verify::to_string(rep.verdict) << "\n";
        code = std::max(code, exit_code(rep.verdict));
      }
      flush_warnings();
      return code;
    }

    cfg.validate();
    verify::Workspace ws(cfg.precision_bits, cache.get());
    WorkingPrecision wp(cfg.precision_bits);

    if (*eig) {
      const auto& wd = ws.weight(weight, ncoeffs);
      if (cfg.format == Format::Json) {
        json o;
        o["weight"] = weight;
        o["dim"] = wd.basis.forms.size();
        json cp = json::array();
        for (const auto& c : wd.basis.t2_charpoly) cp.push_back(c.get_str());
        o["t2_charpoly"] = cp;
        json forms = json::array();
        for (const auto& f : wd.basis.forms) {
          json jf;
          jf["index"] = f.index;
          jf["t2_eigenvalue"] = to_report_string(f.t2_eigenvalue);
          json lam = json::array();
          for (int n = 1; n <= ncoeffs; ++n) lam.push_back(to_report_string(f(n)));
          jf["lambda"] = lam;
          forms.push_back(jf);
        }
        o["forms"] = forms;
        out << o.dump(2) << "\n";
      } else {
        out << "k,index,n,lambda\n";
        for (const auto& f : wd.basis.forms)
          for (int n = 1; n <= ncoeffs; ++n) out << weight << ',' << f.index << ',' << n << ',' << to_report_string(f(n)) << '\n';
      }
      flush_warnings();
      return 0;
    }

    if (*norm) {
      const verify::MassProfile* p = nullptr;
      const auto& f = pick_form(ws.weight(weight), index, &p);
      auto r = massmeasure::petersson_norm_sq(f, Real(Y), quad_tol);
      auto s = massmeasure::sym2_l_value(weight, r.norm_sq);
      out << single_record({{"weight", weight},
                            {"index", index},
                            {"Y", to_report_string(Real(Y))},
                            {"norm_sq", to_report_string(r.norm_sq.to_real())},
                            {"log_norm_sq", to_report_string(r.norm_sq.logmag())},
                            {"L", to_report_string(s.L)},
                            {"R", to_report_string(s.R)},
                            {"quad_error", r.quad_error},
                            {"panels", r.panels}},
                           cfg.format);
      flush_warnings();
      return 0;
    }

    if (*rect || *siegel) {
      const verify::MassProfile* p = nullptr;
      const bool is_rect = static_cast<bool>(*rect);
      // Retry with more coefficients when the truncation runs past the stored ones.
      long need = 0;
      for (;;) {
        const auto& wd = ws.weight(weight, need);
        const auto& f = pick_form(wd, index, &p);
        try {
          if (is_rect) {
            verify::Rectangle R{Real(a), Real(b), Real(t1), std::nullopt};
            if (t2) R.t2 = Real(*t2);
            auto r = massmeasure::rect_mass(f, R, *p);
            out << single_record({{"weight", weight},
                                  {"index", index},
                                  {"a", to_report_string(Real(a))},
                                  {"b", to_report_string(Real(b))},
                                  {"t1", to_report_string(Real(t1))},
                                  {"t2", t2 ? json(to_report_string(Real(*t2))) : json(nullptr)},
                                  {"mu", to_report_string(r.value)},
                                  {"log_mu", to_report_string(r.log_value.logmag())},
                                  {"truncation", r.truncation},
                                  {"band", r.band},
                                  {"log_remainder_bound", to_report_string(r.remainder_bound.logmag())}},
                                 cfg.format);
          } else {
            auto s = massmeasure::siegel_mass(f, {Real(a), Real(b), Real(T)}, *p);
            out << single_record({{"weight", weight},
                                  {"index", index},
                                  {"a", to_report_string(Real(a))},
                                  {"b", to_report_string(Real(b))},
                                  {"T", to_report_string(Real(T))},
                                  {"mu", to_report_string(s.mass.value)},
                                  {"log_mu", to_report_string(s.mass.log_value.logmag())},
                                  {"log_bound", to_report_string(s.log_bound)},
                                  {"in_hypothesis", s.in_hypothesis},
                                  {"bound_holds", s.mass.log_value.logmag() <= s.log_bound}},
                                 cfg.format);
          }
          break;
        } catch (const InsufficientCoeffs&) {
          need = 2L * wd.ncoeffs;
          if (need > (1L << 20)) throw;
        }
      }
      flush_warnings();
      return 0;
    }

    if (*ver) {
      RunConfig c = cfg;
      if (v_kmin) c.k_min = *v_kmin;
      if (v_kmax) c.k_max = *v_kmax;
      if (v_kstep) c.k_step = *v_kstep;
      if (!k_list.empty()) c.k_list = k_list;
      if (v_T) c.T = *v_T;
      if (scenario == "siegel" && v_T) c.siegel_T = *v_T;
      if (v_a) c.a = *v_a;
      if (v_b) c.b = *v_b;
      if (v_t1) c.t1 = *v_t1;
      if (v_t2) c.t2 = *v_t2;
      if (v_eps) c.eps = *v_eps;
      if (v_delta) c.delta = *v_delta;
      if (v_p) c.prime = *v_p;
      if (!k_grid.empty()) c.gamma_ks = k_grid;
      c.validate();
      auto rep = run_scenario(scenario, c, ws);
      std::string bytes = emit_report(rep, c.format, c.timing);
      if (output.empty()) out << bytes;
      else write_file(output, bytes);
      if (!plot.empty()) write_file(plot, emit_plot_data(rep));
      flush_warnings();
      return exit_code(rep.verdict);
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const boost::property_tree::ini_parser_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace quelab::cli
