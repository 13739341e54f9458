#include <iostream>
#include <map>
#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dfindex/cli_runner.hpp"
#include "dfindex/distance_field.hpp"
#include "dfindex/domain_zoo.hpp"
#include "dfindex/levi_analysis.hpp"
#include "dfindex/index_certifier.hpp"

namespace py = pybind11;
using namespace dfindex;

namespace {

using Params = std::map<std::string, double>;

RVec point(const std::vector<double>& x) {
  RVec out(static_cast<Eigen::Index>(x.size()));
  for (size_t i = 0; i < x.size(); ++i) out(static_cast<Eigen::Index>(i)) = x[i];
  return out;
}

std::vector<double> to_list(const RVec& x) { return {x.data(), x.data() + x.size()}; }

py::tuple cli(const std::vector<std::string>& args) {
  std::vector<std::string> all{"dfindex"};
  all.insert(all.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (auto& a : all) argv.push_back(a.c_str());
  std::ostringstream buf;
  int code;
  {
    py::gil_scoped_release release;
    auto* old = std::cout.rdbuf(buf.rdbuf());
    try {
      code = run_cli(static_cast<int>(argv.size()), argv.data());
    } catch (...) {
      std::cout.rdbuf(old);
      throw;
    }
    std::cout.rdbuf(old);
  }
  return py::make_tuple(code, buf.str());
}

py::dict levi_at(const std::string& id, const std::vector<double>& x, const Params& params) {
  ZooEntry z = make_zoo_entry(id, params);
  auto ld = levi_decompose(boundary_point(z.domain, point(x), 2));
  py::dict d;
  d["eigenvalues"] = ld.eigenvalues;
  d["min"] = ld.min_eig();
  return d;
}

py::dict sigma_summary(const std::string& id, size_t mesh, const Params& params) {
  ZooEntry z = make_zoo_entry(id, params);
  auto m = z.boundary_mesh(mesh);
  auto s = detect_sigma(z.domain, m, std::nullopt);
  py::dict d;
  d["mesh"] = m.size();
  d["members"] = s.members.size();
  d["threshold"] = s.threshold;
  d["kind"] = sigma_kind_name(z.sigma_kind);
  std::vector<std::vector<double>> pts;
  for (const auto& p : s.positions()) pts.push_back(to_list(p));
  d["positions"] = pts;
  return d;
}

py::dict periods(const std::string& id, const Params& params) {
  CohomologyVerdict v = sigma_periods(make_zoo_entry(id, params));
  py::dict d;
  py::dict p;
  for (const auto& e : v.periods) p[py::str(e.loop)] = e.value;
  d["periods"] = p;
  d["classification"] = v.classification();
  d["tolerance"] = v.tolerance;
  return d;
}

py::dict estimate(const std::string& id, const std::vector<double>& etas, size_t mesh, const Params& params) {
  EstimateOptions o;
  if (!etas.empty()) o.eta_grid = etas;
  o.mesh_points = mesh;
  IndexCertificate c;
  {
    py::gil_scoped_release release;
    c = estimate_index(make_zoo_entry(id, params), o);
  }
  py::dict d;
  d["bound"] = c.bound;
  d["has_certificate"] = c.has_certificate;
  d["verdict"] = c.verdict;
  d["diagnostics"] = c.diagnostics;
  py::list per;
  for (const auto& r : c.results) {
    py::dict e;
    e["eta"] = r.eta;
    e["certified"] = r.certified;
    e["max_lhs"] = r.criterion.max_lhs;
    if (r.oracle) e["oracle_min_eig"] = r.oracle->min_eigenvalue;
    per.append(e);
  }
  d["per_eta"] = per;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Diederich-Fornaess index toolkit";
  // leaked on purpose: the translator may run during interpreter shutdown
  static PyObject* err = PyErr_NewException("dfindex._core.DfindexError", PyExc_RuntimeError, nullptr);
  m.attr("DfindexError") = py::handle(err);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object ex = py::handle(err)(e.what());
      ex.attr("kind") = kind_name(e.kind());
      PyErr_SetObject(err, ex.ptr());
    }
  });
  m.def("zoo_ids", &zoo_ids);
  m.def("git_blob_sha1", [](py::bytes b) { return git_blob_sha1(std::string(b)); });
  m.def("cli", &cli, py::arg("args"), "run the command-line front end; returns (exit code, JSON text)");
  m.def("levi_at", &levi_at, py::arg("domain"), py::arg("point"), py::arg("params") = Params{});
  m.def("sigma_summary", &sigma_summary, py::arg("domain"), py::arg("mesh") = 4000,
        py::arg("params") = Params{});
  m.def("periods", &periods, py::arg("domain"), py::arg("params") = Params{});
  m.def("estimate", &estimate, py::arg("domain"), py::arg("etas") = std::vector<double>{},
        py::arg("mesh") = 4000, py::arg("params") = Params{});
  m.def("signed_distance", [](const std::string& id, const std::vector<double>& x, const Params& params) {
    return signed_distance(make_zoo_entry(id, params).domain, point(x));
  }, py::arg("domain"), py::arg("point"), py::arg("params") = Params{});
}
