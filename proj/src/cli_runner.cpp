#include "dfindex/cli_runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "dfindex/index_certifier.hpp"
#include "dfindex/parallel.hpp"

namespace dfindex {

using nlohmann::json;

namespace {

const std::vector<std::string> kDomainParams = {"amplitude", "beta", "power", "r", "radius"};

double parse_double(const std::string& key, const std::string& v) {
  const char* s = v.c_str();
  char* end = nullptr;
  double x = std::strtod(s, &end);
  while (end && *end == ' ') ++end;
  if (v.empty() || end == s || *end != '\0' || !std::isfinite(x))
    throw Error(ErrorKind::ConfigInvalid, "bad number for " + key + ": '" + v + "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  double x = parse_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 9e15) throw Error(ErrorKind::ConfigInvalid, key + " must be an integer");
  return static_cast<long long>(x);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json rvec_json(const RVec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

json periods_json(const CohomologyVerdict& v) {
  json ps = json::array();
  for (const auto& p : v.periods) ps.push_back({{"loop", p.loop}, {"value", num(p.value)}});
  return {{"periods", ps}, {"tolerance", num(v.tolerance)}, {"classification", v.classification()}};
}

}  // namespace

const std::vector<std::string>& pipeline_commands() {
  static const std::vector<std::string> c = {"scan",     "sigma",   "theta",       "period", "potential",
                                             "certify", "estimate", "caccioppoli", "curve",  "zoo"};
  return c;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  std::string v = trim(raw);
  if (key == "command") command = v;
  else if (key == "domain") domain = v;
  else if (std::find(kDomainParams.begin(), kDomainParams.end(), key) != kDomainParams.end())
    domain_params[key] = parse_double(key, v);
  else if (key == "mesh") {
    long long m = parse_int(key, v);
    if (m < 16) throw Error(ErrorKind::ConfigInvalid, "mesh must be at least 16");
    mesh = static_cast<size_t>(m);
  } else if (key == "eta") {
    eta.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) eta.push_back(parse_double(key, trim(item)));
  } else if (key == "threshold") threshold = parse_double(key, v);
  else if (key == "slack") slack = parse_double(key, v);
  else if (key == "loop") loop = v;
  else if (key == "chart") chart = v;
  else if (key == "out") out = v;
  else if (key == "seed") {
    long long s = parse_int(key, v);
    if (s < 0) throw Error(ErrorKind::ConfigInvalid, "seed must be nonnegative");
    seed = static_cast<std::uint64_t>(s);
  } else if (key == "resolution") resolution = static_cast<int>(parse_int(key, v));
  else if (key == "leaves") leaves = static_cast<int>(parse_int(key, v));
  else if (key == "n") n = static_cast<int>(parse_int(key, v));
  else if (key == "function") function = v;
  else if (key == "zoo_id") zoo_id = v;
  else throw Error(ErrorKind::ConfigInvalid, "unknown key '" + key + "'");
}

void RunConfig::validate() const {
  const auto& cmds = pipeline_commands();
  if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
    throw Error(ErrorKind::ConfigInvalid, "unknown command '" + command + "'");
  if (threshold && !(*threshold > 0)) throw Error(ErrorKind::ConfigInvalid, "threshold must be positive");
  if (slack && !(*slack > 0)) throw Error(ErrorKind::ConfigInvalid, "slack must be positive");
  for (double e : eta)
    if (!(e > 0 && e < 1)) throw Error(ErrorKind::ConfigInvalid, "eta must lie in (0,1), got " + fmt(e));
  if (resolution < 2) throw Error(ErrorKind::ConfigInvalid, "resolution must be at least 2");
  if (leaves < 2) throw Error(ErrorKind::ConfigInvalid, "leaves must be at least 2");
  if (n < 1) throw Error(ErrorKind::ConfigInvalid, "n must be positive");
  if (function != "neg_square" && function != "pos_square" && function != "const")
    throw Error(ErrorKind::ConfigInvalid, "function must be neg_square, pos_square or const");
}

json RunConfig::to_json() const {
  json j;
  j["command"] = command;
  j["domain"] = domain;
  json p = json::object();
  for (const auto& [k, v] : domain_params) p[k] = num(v);
  j["domain_params"] = p;
  j["mesh"] = mesh;
  json e = json::array();
  for (double x : eta) e.push_back(num(x));
  j["eta"] = e;
  j["threshold"] = threshold ? num(*threshold) : json(nullptr);
  j["slack"] = slack ? num(*slack) : json(nullptr);
  j["loop"] = loop;
  j["chart"] = chart;
  j["seed"] = seed;
  j["resolution"] = resolution;
  j["leaves"] = leaves;
  j["n"] = n;
  j["function"] = function;
  j["zoo_id"] = zoo_id;
  return j;
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["command"] = command;
  kv["domain"] = domain;
  for (const auto& [k, v] : domain_params) kv[k] = fmt(v);
  kv["mesh"] = std::to_string(mesh);
  std::string e;
  for (size_t i = 0; i < eta.size(); ++i) e += (i ? "," : "") + fmt(eta[i]);
  kv["eta"] = e;
  kv["threshold"] = threshold ? fmt(*threshold) : "";
  kv["slack"] = slack ? fmt(*slack) : "";
  kv["loop"] = loop;
  kv["chart"] = chart;
  kv["seed"] = std::to_string(seed);
  kv["resolution"] = std::to_string(resolution);
  kv["leaves"] = std::to_string(leaves);
  kv["n"] = std::to_string(n);
  kv["function"] = function;
  kv["zoo_id"] = zoo_id;
  std::string s;
  for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
  return s;
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ConfigInvalid, "line " + std::to_string(lineno) + ": expected key=value");
    base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::ConfigInvalid, "cannot read config " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  RunConfig c = parse_config_text(ss.str(), std::move(base));
  c.config_text = ss.str();
  c.config_path = path;
  return c;
}

std::string git_blob_sha1(const std::string& bytes) {
  std::string msg = "blob " + std::to_string(bytes.size());
  msg.push_back('\0');
  msg += bytes;
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(msg.data(), msg.size(), md, &len, EVP_sha1(), nullptr) != 1)
    throw Error(ErrorKind::IoFailure, "SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

// serialization ------------------------------------------------------------------------------

namespace {

void dump_rec(const json& j, std::string& out, int indent) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: keys already sorted
        if (!first) out += ",\n";
        first = false;
        out += pad + "  " + json(it.key()).dump() + ": ";
        dump_rec(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      if (flat) {
        out += "[";
        for (size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump_rec(j[i], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad + "  ";
        dump_rec(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.10e", v == 0.0 ? 0.0 : v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const json& j) {
  std::string out;
  dump_rec(j, out, 0);
  out += "\n";
  return out;
}

// pipelines --------------------------------------------------------------------------------

namespace {

EstimateOptions options_from(const RunConfig& c, const std::vector<double>& default_eta) {
  EstimateOptions o;
  o.mesh_points = c.mesh;
  o.eta_grid = c.eta.empty() ? default_eta : c.eta;
  o.sigma_threshold = c.threshold;
  o.boundary_slack = c.slack;
  o.leaf_count = c.leaves;
  o.seed = c.seed;
  return o;
}

SigmaChart pick_chart(const ZooEntry& e, const std::string& id) {
  if (e.curve && (id.empty() || id == e.curve->id)) return *e.curve;
  if (e.foliation) {
    const auto& fa = *e.foliation;
    SigmaChart c = fa.leaf_chart(fa.leaf_range.lo);
    if (id.empty() || id == c.id) return c;
  }
  if (!e.charts.empty()) return id.empty() ? e.charts.front() : e.chart(id);
  throw Error(ErrorKind::ConfigInvalid, "domain " + e.domain.id + " has no Sigma chart" +
                                            (id.empty() ? std::string() : " named " + id));
}

json certificate_json(const IndexCertificate& c) {
  json j;
  j["domain"] = c.domain_id;
  json grid = json::array();
  for (double e : c.eta_grid) grid.push_back(num(e));
  j["eta_grid"] = grid;
  json per = json::array();
  for (const auto& r : c.results) {
    json e;
    e["eta"] = num(r.eta);
    e["certified"] = r.certified;
    e["criterion_certified"] = r.criterion.certified;
    e["vacuous"] = r.criterion.vacuous;
    e["max_lhs"] = num(r.criterion.max_lhs);
    e["slack"] = num(r.criterion.slack);
    e["samples"] = r.criterion.lhs.size();
    if (r.criterion.C_eta) e["C_eta"] = num(*r.criterion.C_eta);
    if (r.oracle) {
      e["oracle_min_eig"] = num(r.oracle->min_eigenvalue);
      e["oracle_min_normalized"] = num(r.oracle->min_normalized);
      e["oracle_points"] = r.oracle->points;
      e["oracle_certified"] = r.oracle->certified;
    } else {
      e["oracle_min_eig"] = nullptr;
    }
    per.push_back(e);
  }
  j["per_eta"] = per;
  j["bound"] = num(c.bound);
  j["has_certificate"] = c.has_certificate;
  j["monotone"] = c.monotone;
  j["verdict"] = c.verdict;
  j["psi_provenance"] = c.psi_provenance;
  json sizes = json::object(), tol = json::object();
  for (const auto& [k, v] : c.sizes) sizes[k] = static_cast<long long>(v);
  for (const auto& [k, v] : c.tolerances) tol[k] = num(v);
  j["meshes"] = sizes;
  j["tolerances"] = tol;
  j["diagnostics"] = c.diagnostics;
  json ps = json::array();
  for (const auto& p : c.periods) ps.push_back({{"loop", p.loop}, {"value", num(p.value)}});
  j["periods"] = ps;
  return j;
}

std::function<void(const std::string&)> lhs_writer(const IndexCertificate& c) {
  return [c](const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path);
    out << std::setprecision(17) << "eta,sample,";
    size_t dim = 0;
    for (const auto& r : c.results)
      if (!r.criterion.positions.empty()) dim = static_cast<size_t>(r.criterion.positions[0].size());
    for (size_t k = 0; k < dim; ++k) out << "x" << k << ",";
    out << "lhs\n";
    for (const auto& r : c.results)
      for (size_t i = 0; i < r.criterion.lhs.size(); ++i) {
        out << r.eta << "," << i << ",";
        for (size_t k = 0; k < dim; ++k)
          out << (i < r.criterion.positions.size() ? r.criterion.positions[i](static_cast<Eigen::Index>(k)) : 0.0)
              << ",";
        out << r.criterion.lhs[i] << "\n";
      }
    if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path);
  };
}

std::function<void(const std::string&)> points_writer(std::vector<RVec> pts, std::vector<double> vals,
                                                      std::string value_name) {
  return [pts = std::move(pts), vals = std::move(vals), value_name](const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path);
    out << std::setprecision(17);
    size_t dim = pts.empty() ? 0 : static_cast<size_t>(pts[0].size());
    for (size_t k = 0; k < dim; ++k) out << "x" << k << ",";
    out << value_name << "\n";
    for (size_t i = 0; i < pts.size(); ++i) {
      for (size_t k = 0; k < dim; ++k) out << pts[i](static_cast<Eigen::Index>(k)) << ",";
      out << vals[i] << "\n";
    }
    if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path);
  };
}

void run_scan(const RunConfig& c, const ZooEntry& e, RunResult& r) {
  const DomainSpec& d = e.domain;
  auto mesh = e.boundary_mesh(c.mesh);
  struct Row {
    double eig, nd, sum, unit, tangent;
  };
  auto rows = parallel_map(mesh.size(), [&](size_t i) {
    BoundaryPoint bp = boundary_point_at_foot(d, mesh[i], 2);
    LeviDecomposition ld = levi_decompose(bp);
    Row row;
    row.eig = ld.min_eig();
    CVec dz = bp.jet.dz();
    cplx nd = 0.0;
    for (Eigen::Index j = 0; j < dz.size(); ++j) nd += bp.N(j) * dz(j);
    row.nd = std::abs(nd - 0.5);
    CVec rep = coeff_to_real_rep(bp.N);
    row.sum = (2.0 * rep.real() - bp.jet.grad()).cwiseAbs().maxCoeff();
    row.unit = std::abs(bp.N.norm() - 1.0);
    row.tangent = std::abs((2.0 * rep.imag()).dot(bp.jet.grad()));
    return row;
  });
  double mn = std::numeric_limits<double>::infinity(), mx = -std::numeric_limits<double>::infinity(), nd = 0, sum = 0, unit = 0, tan = 0;
  std::vector<double> eigs, pos;
  for (const auto& row : rows) {
    mn = std::min(mn, row.eig);
    mx = std::max(mx, row.eig);
    nd = std::max(nd, row.nd);
    sum = std::max(sum, row.sum);
    unit = std::max(unit, row.unit);
    tan = std::max(tan, row.tangent);
    eigs.push_back(row.eig);
  }
  const double neg_tol = 1e-8 * e.levi_scale;
  size_t negatives = static_cast<size_t>(std::count_if(eigs.begin(), eigs.end(), [&](double v) { return v < -neg_tol; }));
  json& j = r.report;
  j["mesh_points"] = mesh.size();
  j["min_eigenvalue"] = num(mn);
  j["max_eigenvalue"] = num(mx);
  j["negative_count"] = negatives;
  j["pseudoconvex"] = negatives == 0;
  j["n_properties"] = {{"n_delta_half", num(nd)}, {"n_plus_nbar_grad", num(sum)}, {"sqrt2_n_unit", num(unit)}};
  j["nu_tangency"] = num(tan);
  r.grids.emplace_back("scan_mesh.csv", points_writer(mesh, eigs, "min_eig"));
}

void run_sigma(const RunConfig& c, const ZooEntry& e, RunResult& r) {
  const DomainSpec& d = e.domain;
  auto mesh = e.boundary_mesh(c.mesh);
  SigmaPointSet s = detect_sigma(d, mesh, c.threshold);
  json& j = r.report;
  j["sigma_kind"] = sigma_kind_name(e.sigma_kind);
  j["mesh_points"] = mesh.size();
  j["members"] = s.members.size();
  j["threshold"] = num(s.threshold);
  j["negative_count"] = s.negative_count;
  j["min_eigenvalue"] = num(s.min_eigenvalue);
  j["median_positive"] = num(s.median_positive);
  double pitch = mesh_pitch(mesh);
  j["mesh_pitch"] = num(pitch);
  auto basic2 = parallel_map(s.members.size(), [&](size_t i) {
    const auto& m = s.members[i];
    BoundaryPoint bp = boundary_point_at_foot(d, m.position, 2);
    return basic2_residual(bp, m.L, m.frame, s.threshold);
  });
  double b2 = 0.0;
  for (double v : basic2) b2 = std::max(b2, v);
  j["basic2_max"] = s.members.empty() ? json(nullptr) : num(b2);
  if (!s.members.empty() && e.sigma_samples) {
    double to_true = 0.0, to_detected = 0.0;
    for (const auto& m : s.members) to_true = std::max(to_true, e.sigma_distance(m.position));
    for (const RVec& t : e.sigma_samples(400)) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& m : s.members) best = std::min(best, (m.position - t).norm());
      to_detected = std::max(to_detected, best);
    }
    j["hausdorff"] = num(std::max(to_true, to_detected));
    j["hausdorff_within_2_pitch"] = std::max(to_true, to_detected) <= 2 * pitch;
  } else {
    j["hausdorff"] = nullptr;
  }
  std::vector<RVec> pts;
  std::vector<double> vals;
  for (const auto& m : s.members) {
    pts.push_back(m.position);
    vals.push_back(m.eigenvalue);
  }
  r.grids.emplace_back("sigma_points.csv", points_writer(pts, vals, "eigenvalue"));
}

void run_theta(const RunConfig& c, const ZooEntry& e, RunResult& r) {
  SigmaChart chart = pick_chart(e, c.chart);
  FormKind kind = chart.kind == ChartKind::Complex ? FormKind::Theta : FormKind::Real;
  OneFormSample s = sample_form(e.domain, chart, kind, c.resolution);
  double mx = 0.0, cell = 0.0;
  size_t points = 0;
  for (const auto& comp : s.components) {
    if (comp.empty()) continue;
    ++points;
    for (double v : comp) mx = std::max(mx, std::abs(v));
  }
  for (double v : s.cell_residuals)
    if (std::isfinite(v)) cell = std::max(cell, v);
  json& j = r.report;
  j["chart"] = chart.id;
  j["form"] = kind == FormKind::Theta ? "theta" : "real";
  j["dims"] = s.dims;
  j["points"] = points;
  j["max_abs_component"] = num(mx);
  j["max_cell_residual"] = s.dims.size() >= 2 ? num(cell) : json(nullptr);
  r.grids.emplace_back("theta_grid.csv", [s](const std::string& p) { s.write_csv(p); });
}

void run_period(const RunConfig& c, const ZooEntry& e, RunResult& r) {
  CohomologyVerdict v = sigma_periods(e);
  if (!c.loop.empty()) {
    std::vector<PeriodEntry> kept;
    for (const auto& p : v.periods)
      if (p.loop == c.loop || p.loop.rfind(c.loop + "@", 0) == 0) kept.push_back(p);
    if (kept.empty()) throw Error(ErrorKind::ConfigInvalid, "no loop named '" + c.loop + "' on " + e.domain.id);
    v = classify(kept, v.tolerance);
  }
  r.report["verdict"] = periods_json(v);
}

void run_potential(const RunConfig& c, const ZooEntry& e, RunResult& r) {
  if (e.sigma_kind != SigmaKind::ComplexSubmanifold && e.sigma_kind != SigmaKind::Foliation)
    throw Error(ErrorKind::ConfigInvalid, "potential needs complex Sigma charts; " + e.domain.id + " has " +
                                              sigma_kind_name(e.sigma_kind));
  SigmaPotential sp = sigma_potential(e, options_from(c, {}));
  if (!sp.verdict.exact)
    throw Error(ErrorKind::ObstructedClass, "theta has nonzero periods on " + e.domain.id + "; no potential");
  std::vector<const PotentialField*> fields;
  if (sp.field) fields.push_back(&*sp.field);
  if (sp.leaves)
    for (const auto& f : sp.leaves->fields()) fields.push_back(&f);
  double grad = 0.0, path = 0.0, mx = 0.0;
  for (const auto* f : fields) {
    grad = std::max(grad, f->gradient_residual());
    path = std::max(path, f->path_disagreement());
    for (double v : f->values()) mx = std::max(mx, std::abs(v));
  }
  json& j = r.report;
  j["verdict"] = periods_json(sp.verdict);
  j["fields"] = fields.size();
  j["gradient_residual"] = num(grad);
  j["path_disagreement"] = num(path);
  j["max_abs_phi"] = num(mx);
  j["psi_provenance"] = sp.psi.provenance();
  // potentials are built from 2 theta, so the stored values are -psi on Sigma
  j["note"] = "grids hold 2 phi = -psi on Sigma";
  for (size_t k = 0; k < fields.size(); ++k) {
    const PotentialField* f = fields[k];
    PotentialField copy = *f;
    r.grids.emplace_back("potential_" + std::to_string(k) + ".csv",
                         [copy](const std::string& p) { copy.write_csv(p); });
  }
}

void run_certify(const RunConfig& c, const ZooEntry& e, RunResult& r, bool estimate) {
  EstimateOptions o = options_from(c, estimate ? EstimateOptions{}.eta_grid : std::vector<double>{0.99});
  IndexCertificate cert = estimate_index(e, o);
  r.report["certificate"] = certificate_json(cert);
  bool ok;
  if (estimate) {
    ok = cert.has_certificate;
  } else {
    ok = !cert.results.empty() &&
         std::all_of(cert.results.begin(), cert.results.end(), [](const EtaResult& x) { return x.certified; });
  }
  if (!ok) {
    r.exit_code = 2;
    std::string why = cert.verdict == "Obstructed" ? "Obstructed: theta has a nonzero period, no potential exists"
                                                   : "not certified (" + cert.verdict + ")";
    r.report["diagnostic"] = why;
  }
  r.grids.emplace_back(std::string(estimate ? "estimate" : "certify") + "_lhs.csv", lhs_writer(cert));
}

void run_caccioppoli(const RunConfig& c, RunResult& r) {
  PatchSpec p;
  p.shape = PatchShape::Disc;
  p.center = RVec::Zero(2);
  p.radius_U = 1.0 / std::sqrt(static_cast<double>(c.n));
  p.radius_V = 0.75 * p.radius_U;
  p.radius_W = 0.5 * p.radius_U;
  std::function<double(const RVec&)> f;
  if (c.function == "neg_square") f = [](const RVec& x) { return -x.squaredNorm(); };
  else if (c.function == "pos_square") f = [](const RVec& x) { return x.squaredNorm(); };
  else f = [](const RVec&) { return 0.0; };
  CaccioppoliReport rep = caccioppoli_check(p, f, c.n);
  json& j = r.report;
  j["function"] = c.function;
  j["n"] = c.n;
  j["radius_U"] = num(p.radius_U);
  j["radius_W"] = num(p.radius_W);
  j["left"] = num(rep.left);
  j["C"] = num(rep.C);
  j["bound"] = num(rep.bound);
  j["hypothesis_max"] = num(rep.hypothesis_max);
  j["holds"] = rep.holds;
  if (!rep.holds) r.exit_code = 2;
}

void run_curve(const RunConfig& c, const ZooEntry& e, RunResult& r) {
  std::vector<double> etas = c.eta.empty() ? std::vector<double>{0.5, 0.99} : c.eta;
  double slack = c.slack ? *c.slack : 1e-4 * e.levi_scale;
  json per = json::array();
  bool all = true;
  for (double eta : etas) {
    CriterionReport rep = real_curve_certify(e, eta, slack);
    json q;
    q["eta"] = num(eta);
    q["certified"] = rep.certified;
    q["max_lhs"] = num(rep.max_lhs);
    q["C_eta"] = rep.C_eta ? num(*rep.C_eta) : json(nullptr);
    q["curve_case"] = rep.curve_case;
    q["samples"] = rep.lhs.size();
    double bmax = 0.0, amax = 0.0;
    for (double b : rep.b_values) bmax = std::max(bmax, std::abs(b));
    for (double a : rep.a_values) amax = std::max(amax, std::abs(a));
    q["max_abs_b"] = num(bmax);
    q["max_abs_a"] = num(amax);
    bool bound_ok = rep.C_eta && rep.max_lhs <= -*rep.C_eta + slack;
    q["lhs_below_minus_C_eta"] = bound_ok;
    per.push_back(q);
    all = all && rep.certified;
  }
  r.report["slack"] = num(slack);
  r.report["per_eta"] = per;
  if (!all) r.exit_code = 2;
}

json describe(const ZooEntry& e) {
  json j;
  j["id"] = e.domain.id;
  j["n"] = e.domain.n;
  json p = json::object();
  for (const auto& [k, v] : e.parameters) p[k] = num(v);
  j["parameters"] = p;
  j["sigma_kind"] = sigma_kind_name(e.sigma_kind);
  json charts = json::array();
  auto chart_json = [](const SigmaChart& c) {
    return json{{"id", c.id}, {"kind", c.kind == ChartKind::Complex ? "complex" : "real"}, {"m", c.m}};
  };
  for (const auto& c : e.charts) charts.push_back(chart_json(c));
  if (e.foliation) charts.push_back(chart_json(e.foliation->leaf_chart(e.foliation->leaf_range.lo)));
  if (e.curve) charts.push_back(chart_json(*e.curve));
  j["charts"] = charts;
  json loops = json::array();
  for (const auto& l : e.loops) loops.push_back(l.name);
  j["loops"] = loops;
  json ex = json::array();
  for (const auto& b : e.expected) ex.push_back({{"statement", b.statement}, {"basis", b.basis}});
  j["expected"] = ex;
  j["levi_scale"] = num(e.levi_scale);
  j["box_lo"] = rvec_json(e.domain.box_lo);
  j["box_hi"] = rvec_json(e.domain.box_hi);
  j["diameter"] = num(e.domain.diameter);
  return j;
}

void run_zoo(const RunConfig& c, RunResult& r) {
  if (c.zoo_id.empty()) {
    json list = json::array();
    for (const auto& id : zoo_ids()) {
      ZooEntry e = make_zoo_entry(id);
      list.push_back({{"id", id}, {"sigma_kind", sigma_kind_name(e.sigma_kind)}, {"n", e.domain.n}});
    }
    r.report["zoo"] = list;
  } else {
    r.report["entry"] = describe(make_zoo_entry(c.zoo_id, c.domain_params));
  }
}

}  // namespace

RunResult run_pipeline(const RunConfig& config) {
  RunResult r;
  config.validate();
  r.report["command"] = config.command;
  r.report["seed"] = config.seed;
  r.report["config"] = config.to_json();
  r.report["effective_config_hash"] = git_blob_sha1(config.canonical());
  if (!config.config_path.empty()) {
    r.report["config_hash"] = git_blob_sha1(config.config_text);
    r.report["config_hash_source"] = "file";
  } else {
    r.report["config_hash"] = r.report["effective_config_hash"];
    r.report["config_hash_source"] = "canonical";
  }
  const std::string& cmd = config.command;
  if (cmd == "zoo") {
    run_zoo(config, r);
  } else if (cmd == "caccioppoli") {
    run_caccioppoli(config, r);
  } else {
    ZooEntry e = make_zoo_entry(config.domain, config.domain_params);
    r.report["domain"] = e.domain.id;
    if (cmd == "scan") run_scan(config, e, r);
    else if (cmd == "sigma") run_sigma(config, e, r);
    else if (cmd == "theta") run_theta(config, e, r);
    else if (cmd == "period") run_period(config, e, r);
    else if (cmd == "potential") run_potential(config, e, r);
    else if (cmd == "certify") run_certify(config, e, r, false);
    else if (cmd == "estimate") run_certify(config, e, r, true);
    else if (cmd == "curve") run_curve(config, e, r);
  }
  r.report["status"] = r.exit_code == 0 ? "ok" : "not_certified";
  r.report["exit_code"] = r.exit_code;
  return r;
}

void emit_report(const RunConfig& config, const RunResult& result) {
  if (config.out.empty()) return;
  namespace fs = std::filesystem;
  fs::path dir(config.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorKind::IoFailure, "cannot use output directory " + config.out);
  std::string name = config.command.empty() ? "report" : config.command;
  fs::path jp = dir / (name + ".json");
  {
    std::ofstream out(jp, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + jp.string());
    out << dump_json(result.report);
    if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + jp.string());
  }
  for (const auto& [file, writer] : result.grids) writer((dir / file).string());
}

namespace {

json error_report(const RunConfig& c, const std::string& kind, const std::string& message) {
  json j;
  j["command"] = c.command;
  j["seed"] = c.seed;
  j["status"] = "error";
  j["exit_code"] = 1;
  j["error"] = {{"kind", kind}, {"message", message}};
  return j;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Diederich-Fornaess index toolkit"};
  std::vector<std::string> positional;
  std::string config_path;
  std::map<std::string, std::string> flags;
  std::vector<std::string> sets;
  app.add_option("command", positional, "command [args]: " + [] {
    std::string s;
    for (const auto& c : pipeline_commands()) s += c + " ";
    return s;
  }())->required();
  app.add_option("--config", config_path, "flat key=value configuration file");
  for (const char* k : {"domain", "beta", "mesh", "eta", "threshold", "slack", "loop", "chart", "out", "seed",
                        "resolution", "leaves", "n", "function", "r", "radius", "power", "amplitude"})
    app.add_option(std::string("--") + k, flags[k]);
  app.add_option("--set", sets, "extra key=value override (repeatable)");
  RunConfig cfg;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cout << dump_json(error_report(cfg, "ConfigInvalid", e.what()));
    return 1;
  }
  RunResult res;
  try {
    if (!config_path.empty()) cfg = load_config_file(config_path);
    cfg.command = positional.front();
    if (cfg.command == "zoo") {
      if (positional.size() >= 2 && positional[1] == "describe") {
        if (positional.size() < 3) throw Error(ErrorKind::ConfigInvalid, "zoo describe needs an id");
        cfg.zoo_id = positional[2];
      } else if (positional.size() >= 2 && positional[1] != "list") {
        throw Error(ErrorKind::ConfigInvalid, "zoo expects list or describe <id>");
      }
    } else if (positional.size() > 1) {
      throw Error(ErrorKind::ConfigInvalid, "unexpected argument '" + positional[1] + "'");
    }
    for (const auto& [k, v] : flags)
      if (app.count("--" + k)) cfg.set(k, v);
    for (const auto& s : sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos) throw Error(ErrorKind::ConfigInvalid, "--set expects key=value");
      cfg.set(trim(s.substr(0, eq)), s.substr(eq + 1));
    }
    res = run_pipeline(cfg);
  } catch (const Error& e) {
    res.exit_code = 1;
    res.report = error_report(cfg, kind_name(e.kind()), e.what());
    res.grids.clear();
  } catch (const std::exception& e) {
    res.exit_code = 1;
    res.report = error_report(cfg, "Internal", e.what());
    res.grids.clear();
  }
  try {
    emit_report(cfg, res);
  } catch (const Error& e) {
    res.exit_code = 1;
    res.report = error_report(cfg, kind_name(e.kind()), e.what());
  }
  std::cout << dump_json(res.report);
  return res.exit_code;
}

}  // namespace dfindex
