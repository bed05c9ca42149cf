#include <memory>
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "quelab/cli.hpp"
#include "quelab/errors.hpp"

namespace py = pybind11;
using namespace quelab;

namespace {

py::int_ to_py(const Integer& z) { return py::int_(py::module_::import("builtins").attr("int")(z.get_str())); }

std::vector<py::int_> to_py(const std::vector<Integer>& v) {
  std::vector<py::int_> out;
  for (const auto& z : v) out.push_back(to_py(z));
  return out;
}

class Session {
  const eigenforms::Eigenform& form(int k, int index, long need = 0, const verify::MassProfile** p = nullptr) {
    const auto& wd = ws_->weight(k, need);
    if (index < 1 || index > static_cast<int>(wd.basis.forms.size()))
      throw DomainError("index must lie in 1.." + std::to_string(wd.basis.forms.size()));
    if (p) *p = &wd.profiles[static_cast<size_t>(index - 1)];
    return wd.basis.forms[static_cast<size_t>(index - 1)];
  }

  template <class F>
  auto retry(int k, int index, F&& f) {
    WorkingPrecision wp(bits_);
    long need = 0;
    for (;;) {
      const verify::MassProfile* p = nullptr;
      const auto& form_ref = form(k, index, need, &p);
      try {
        return f(form_ref, *p);
      } catch (const InsufficientCoeffs&) {
        need = 2L * form_ref.ncoeffs;
        if (need > (1L << 20)) throw;
      }
    }
  }

 public:
  Session(int bits, std::optional<std::filesystem::path> cache_dir) : bits_(bits) {
    if (cache_dir) cache_ = std::make_unique<cli::Cache>(*cache_dir);
    ws_ = std::make_unique<verify::Workspace>(bits, cache_.get());
  }

  int bits() const { return bits_; }
  long decompositions() const { return ws_->decompositions(); }

  std::vector<std::vector<std::string>> lambdas(int k, int ncoeffs) {
    WorkingPrecision wp(bits_);
    const auto& wd = ws_->weight(k, ncoeffs);
    std::vector<std::vector<std::string>> out;
    for (const auto& f : wd.basis.forms) {
      std::vector<std::string> row;
      for (int n = 1; n <= ncoeffs; ++n) row.push_back(to_decimal(f(n)));
      out.push_back(std::move(row));
    }
    return out;
  }

  std::vector<py::int_> t2_charpoly(int k) { return to_py(ws_->weight(k).basis.t2_charpoly); }

  py::dict norm(int k, int index, double Y, double quad_tol) {
    WorkingPrecision wp(bits_);
    const auto& f = form(k, index);
    auto r = massmeasure::petersson_norm_sq(f, Real(Y), quad_tol);
    auto s = massmeasure::sym2_l_value(k, r.norm_sq);
    py::dict d;
    d["norm_sq"] = to_decimal(r.norm_sq.to_real());
    d["log_norm_sq"] = to_decimal(r.norm_sq.logmag());
    d["L"] = to_decimal(s.L);
    d["R"] = to_decimal(s.R);
    d["quad_error"] = r.quad_error;
    return d;
  }

  std::string vertical_mass(int k, int index, double T) {
    return retry(k, index, [&](const eigenforms::Eigenform& f, const verify::MassProfile& p) {
      return to_decimal(massmeasure::vertical_mass(f, Real(T), p).value);
    });
  }

  std::string rect_mass(int k, int index, double a, double b, double t1, std::optional<double> t2) {
    return retry(k, index, [&](const eigenforms::Eigenform& f, const verify::MassProfile& p) {
      verify::Rectangle R{Real(a), Real(b), Real(t1), std::nullopt};
      if (t2) R.t2 = Real(*t2);
      return to_decimal(massmeasure::rect_mass(f, R, p).value);
    });
  }

  py::dict siegel_mass(int k, int index, double T, double a, double b) {
    return retry(k, index, [&](const eigenforms::Eigenform& f, const verify::MassProfile& p) {
      auto s = massmeasure::siegel_mass(f, {Real(a), Real(b), Real(T)}, p);
      py::dict d;
      d["log_mu"] = to_decimal(s.mass.log_value.logmag());
      d["log_bound"] = to_decimal(s.log_bound);
      d["in_hypothesis"] = s.in_hypothesis;
      return d;
    });
  }

  std::string verify(const std::string& scenario, const cli::RunConfig& cfg) {
    cfg.validate();
    if (cfg.precision_bits != bits_) throw DomainError("config precision differs from the session precision");
    return cli::emit_report(cli::run_scenario(scenario, cfg, *ws_), cli::Format::Json, cfg.timing);
  }

 private:
  int bits_;
  std::unique_ptr<cli::Cache> cache_;
  std::unique_ptr<verify::Workspace> ws_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Level-one Hecke eigenforms, Petersson norms and mass measures";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<CorruptEntry>(m, "CorruptEntry", base.ptr());

  m.def("delta_series", [](int N) { return to_py(qseries::delta_series(N).coeffs()); }, py::arg("N"));
  m.def("cusp_dim", &qseries::cusp_dim, py::arg("k"));
  m.def("weight_grid", &verify::weight_grid, py::arg("k_min"), py::arg("k_max"), py::arg("step") = 2);
  m.def(
      "gamma_lemma_gap",
      [](long k, double delta, int bits) {
        WorkingPrecision wp(bits);
        return to_decimal(specfun::gamma_lemma_gap(k, Real(delta)));
      },
      py::arg("k"), py::arg("delta"), py::arg("precision_bits") = 256);
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"quelab"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));

  py::class_<cli::RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("precision_bits", &cli::RunConfig::precision_bits)
      .def_readwrite("k_min", &cli::RunConfig::k_min)
      .def_readwrite("k_max", &cli::RunConfig::k_max)
      .def_readwrite("k_step", &cli::RunConfig::k_step)
      .def_readwrite("k_list", &cli::RunConfig::k_list)
      .def_readwrite("T", &cli::RunConfig::T)
      .def_readwrite("siegel_T", &cli::RunConfig::siegel_T)
      .def_readwrite("delta", &cli::RunConfig::delta)
      .def_readwrite("eps", &cli::RunConfig::eps)
      .def_readwrite("a", &cli::RunConfig::a)
      .def_readwrite("b", &cli::RunConfig::b)
      .def_readwrite("t1", &cli::RunConfig::t1)
      .def_readwrite("t2", &cli::RunConfig::t2)
      .def_readwrite("p", &cli::RunConfig::prime)
      .def_readwrite("k_grid", &cli::RunConfig::gamma_ks)
      .def_readwrite("timing", &cli::RunConfig::timing);

  py::class_<Session>(m, "Session")
      .def(py::init<int, std::optional<std::filesystem::path>>(), py::arg("precision_bits") = 256,
           py::arg("cache_dir") = py::none())
      .def_property_readonly("precision_bits", &Session::bits)
      .def_property_readonly("decompositions", &Session::decompositions)
      .def("lambdas", &Session::lambdas, py::arg("k"), py::arg("ncoeffs"))
      .def("t2_charpoly", &Session::t2_charpoly, py::arg("k"))
      .def("norm", &Session::norm, py::arg("k"), py::arg("index"), py::arg("Y") = 2.0, py::arg("quad_tol") = 1e-12)
      .def("vertical_mass", &Session::vertical_mass, py::arg("k"), py::arg("index"), py::arg("T"))
      .def("rect_mass", &Session::rect_mass, py::arg("k"), py::arg("index"), py::arg("a"), py::arg("b"), py::arg("t1"),
           py::arg("t2") = py::none())
      .def("siegel_mass", &Session::siegel_mass, py::arg("k"), py::arg("index"), py::arg("T"), py::arg("a") = -0.5,
           py::arg("b") = 0.5)
      .def("_verify_json", &Session::verify, py::arg("scenario"), py::arg("config"));
}
