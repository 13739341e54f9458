#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "dfindex/cli_runner.hpp"
#include "dfindex/index_certifier.hpp"
#include "dfindex/parallel.hpp"

using namespace dfindex;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string g(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.3g", v);
  return b;
}

// frozen symbolic-oracle value of the worm core-circle period
constexpr double kWormCorePeriod = -3.14159265358979;

struct OrderCheck {
  bool ok;
  std::string text;
};

OrderCheck converged(const std::vector<double>& h, const std::vector<double>& r) {
  bool floor = true;
  for (size_t i = 0; i < r.size(); ++i) floor = floor && r[i] < 1e-9 / h[i];
  if (floor) return {true, "noise floor " + g(*std::max_element(r.begin(), r.end()))};
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = double(h.size());
  for (size_t i = 0; i < h.size(); ++i) {
    double x = std::log(h[i]), y = std::log(std::max(r[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {order >= 1.9, "order " + g(order)};
}

GridCell square_cell(const DomainSpec& d, const SigmaChart& c, const Param& u, double h) {
  GridCell cell;
  cell.corners = {Param{u[0] - h / 2, u[1] - h / 2}, Param{u[0] + h / 2, u[1] - h / 2},
                  Param{u[0] + h / 2, u[1] + h / 2}, Param{u[0] - h / 2, u[1] + h / 2}};
  for (int q = 0; q < 4; ++q) cell.forms[q] = theta_at(d, c, cell.corners[q]);
  return cell;
}

int cli(std::vector<std::string> args, std::string* out) {
  args.insert(args.begin(), "dfindex");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream buf;
  auto* old = std::cout.rdbuf(buf.rdbuf());
  int code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old);
  *out = buf.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// estimates shared by the certification and cross-validation criteria
std::map<std::string, IndexCertificate>& estimates() {
  static std::map<std::string, IndexCertificate> cache;
  return cache;
}
const IndexCertificate& estimate(const std::string& id) {
  auto& c = estimates();
  auto it = c.find(id);
  if (it == c.end()) it = c.emplace(id, estimate_index(make_zoo_entry(id))).first;
  return it->second;
}

Outcome ac1() {
  Outcome o;
  ZooEntry b = make_ball();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-1, 1);
  double worst = 0.0;
  const double collar = DistanceConfig{}.collar(b.domain);
  for (int i = 0; i < 1000; ++i) {
    RVec x(4);
    for (int k = 0; k < 4; ++k) x(k) = U(rng);
    x *= (1.0 + collar * 0.9 * U(rng)) / x.norm();
    worst = std::max(worst, jet_mismatch(delta_jet(b.domain, x, 2), b.exact_delta(x, 2), 2));
  }
  o.require(worst < 1e-6, "ball jets " + g(worst));
  for (const auto& id : zoo_ids()) {
    ZooEntry z = make_zoo_entry(id);
    auto mesh = z.boundary_mesh(10000);
    auto props = parallel_map(mesh.size(), [&](size_t i) {
      BoundaryPoint bp = boundary_point_at_foot(z.domain, mesh[i], 1);
      CVec dz = bp.jet.dz();
      cplx nd = 0.0;
      for (Eigen::Index j = 0; j < dz.size(); ++j) nd += bp.N(j) * dz(j);
      CVec rep = coeff_to_real_rep(bp.N);
      return std::max({std::abs(nd - 0.5), (2.0 * rep.real() - bp.grad_delta).cwiseAbs().maxCoeff(),
                       std::abs(std::sqrt(2.0) * rep.norm() - 1.0)});
    });
    double w = *std::max_element(props.begin(), props.end());
    o.require(w < 1e-6 && mesh.size() >= 10000, id + " N " + g(w) + " on " + std::to_string(mesh.size()));
  }
  return o;
}

Outcome ac2() {
  Outcome o;
  const auto& c = estimate("ball");
  o.require(c.has_certificate && c.bound >= 0.99, "bound " + g(c.bound));
  for (const auto& r : c.results)
    if (std::abs(r.eta - 0.99) < 1e-12) {
      bool ok = r.oracle && r.oracle->min_eigenvalue >= -1e-9 && r.oracle->points >= 10000;
      o.require(ok, "oracle min " + g(r.oracle ? r.oracle->min_eigenvalue : NAN) + " at " +
                        std::to_string(r.oracle ? r.oracle->points : 0) + " points");
    }
  return o;
}

Outcome ac3() {
  Outcome o;
  const std::vector<double> h = {0.08, 0.04, 0.02};
  ZooEntry w = make_worm(), b = make_fattened_bidisc();
  struct Site {
    std::string name;
    const DomainSpec* d;
    const SigmaChart* c;
    Param u;
  };
  std::vector<Site> sites = {{"annulus", &w.domain, &w.chart("annulus"), {0.1, 1.0}},
                             {"w_patch", &w.domain, &w.chart("w_patch"), {1.1, 0.1}},
                             {"bidisc leaf", &b.domain, &b.charts[0], {0.05, 0.1}}};
  for (const auto& s : sites) {
    std::vector<double> l1, l2, bn, dt, nre, nim, nd;
    for (double hh : h) {
      auto l = lem1_residuals(*s.d, *s.c, s.u, hh);
      l1.push_back(l.identity1);
      l2.push_back(l.identity2);
      bn.push_back(basicnoc_check(sample_h_field(*s.d, *s.c, s.u, hh)));
      dt.push_back(dtheta_residual(square_cell(*s.d, *s.c, s.u, hh)));
      auto nu = nu_identity_residuals(*s.d, *s.c, s.u, hh, 1e-6);
      nre.push_back(nu.re);
      nim.push_back(nu.im);
      nd.push_back(nu.derivative);
    }
    for (auto [name, r] : std::vector<std::pair<std::string, std::vector<double>>>{
             {"lem1.1", l1}, {"lem1.2", l2}, {"basicnoc", bn}, {"dtheta", dt},
             {"nu.re", nre}, {"nu.im", nim}, {"nu.d", nd}}) {
      auto c = converged(h, r);
      o.require(c.ok, s.name + " " + name + " " + c.text);
    }
  }
  for (ZooEntry* z : {&b, &w}) {
    auto sigma = detect_sigma(z->domain, z->boundary_mesh(4000), std::nullopt);
    auto res = parallel_map(sigma.members.size(), [&](size_t i) {
      const auto& m = sigma.members[i];
      return basic2_residual(boundary_point_at_foot(z->domain, m.position, 2), m.L, m.frame, sigma.threshold);
    });
    double worst = res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
    o.require(worst < 1e-6 && !res.empty(),
              z->domain.id + " basic2 " + g(worst) + " at " + std::to_string(res.size()) + " points");
  }
  return o;
}

Outcome ac4() {
  Outcome o;
  SigmaChart c;
  c.id = "square";
  c.m = 1;
  c.box = {{-0.5, 0.5, false}, {-0.5, 0.5, false}};
  c.embed = [](const Param& u) { return rvec({u[0], u[1], 1.0, 0.0}); };
  OneFormSource f{"x^2 y - y^3/3 + x", c,
                  [](const Param& u) { return std::vector<double>{2 * u[0] * u[1] + 1, u[0] * u[0] - u[1] * u[1]}; }};
  auto gen = [](const Param& u) { return u[0] * u[0] * u[1] - u[1] * u[1] * u[1] / 3 + u[0]; };
  Param base{0.0, 0.0};
  auto pf = build_potential(f, base, classify({}, 1e-6), 12);
  double worst = 0.0;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  for (int i = 0; i < 200; ++i) {
    Param u{U(rng), U(rng)};
    worst = std::max(worst, std::abs(pf.value_at(u) - (gen(u) - gen(base))));
  }
  o.require(worst < 1e-6, "synthetic potential " + g(worst));
  o.require(pf.path_disagreement() < 1e-6, "synthetic paths " + g(pf.path_disagreement()));

  ZooEntry b = make_fattened_bidisc();
  auto sp = sigma_potential(b);
  o.require(sp.verdict.exact && sp.leaves.has_value(), "bidisc " + sp.verdict.classification());
  double pd = 0.0, mx = 0.0;
  if (sp.leaves) {
    for (const auto& fld : sp.leaves->fields()) pd = std::max(pd, fld.path_disagreement());
    mx = sp.leaves->max_abs();
  }
  o.require(pd < 1e-6 && mx < 1e-6, "bidisc phi " + g(mx) + ", paths " + g(pd));
  auto sigma = detect_sigma(b.domain, b.boundary_mesh(4000), std::nullopt);
  auto rep = boundary_criterion(b.domain, sigma, sp.psi, 0.99, 1e-4 * b.levi_scale);
  o.require(rep.certified && rep.max_lhs <= 1e-4, "eta 0.99 max LHS " + g(rep.max_lhs));
  return o;
}

Outcome ac5() {
  Outcome o;
  ZooEntry w = make_worm(kPi);
  auto v = sigma_periods(w);
  double p = v.periods.empty() ? 0.0 : v.periods.front().value;
  o.require(std::abs(p - kWormCorePeriod) <= 0.01 * std::abs(kWormCorePeriod), "core period " + g(p));
  o.require(std::abs(p) > v.tolerance, "nonzero beyond tolerance " + g(v.tolerance));
  o.require(!v.exact, "classify " + v.classification());
  std::string out;
  int code = cli({"certify", "--domain", "worm", "--eta", "0.99"}, &out);
  o.require(code == 2 && out.find("Obstructed") != std::string::npos, "certify exit " + std::to_string(code));
  return o;
}

Outcome ac6() {
  Outcome o;
  auto neg = [](const RVec& x) { return -(x(0) * x(0) + x(1) * x(1)); };
  for (int n : {1, 4, 16}) {
    PatchSpec p;
    p.center = RVec::Zero(4);
    p.radius_U = 1.0 / std::sqrt(double(n));
    p.radius_V = 0.75 * p.radius_U;
    p.radius_W = 0.5 * p.radius_U;
    auto r = caccioppoli_check(p, neg, n);
    double exact = kPi * std::pow(p.radius_W, 4) / 2;
    bool ok = r.left <= 0.99 * r.bound && std::abs(r.left - exact) <= 1e-4 * exact;
    o.require(ok, "n=" + std::to_string(n) + " " + g(r.left) + " <= " + g(r.bound));
  }
  bool fail = false;
  try {
    PatchSpec p;
    p.center = RVec::Zero(4);
    caccioppoli_check(p, [](const RVec& x) { return x(0) * x(0) + x(1) * x(1); }, 4);
  } catch (const Error& e) {
    fail = e.kind() == ErrorKind::HypothesisFail;
  }
  o.require(fail, "HypothesisFail on +|z|^2");
  return o;
}

Outcome ac7() {
  Outcome o;
  ZooEntry b = make_fattened_bidisc();
  auto sp = sigma_potential(b);
  const std::vector<double> etas = EstimateOptions{}.eta_grid;
  auto r = residual_sequence(b.domain, b.charts[0], etas, [&](size_t, double) { return sp.psi; });
  double mx = *std::max_element(r.residuals.begin(), r.residuals.end());
  o.require(mx < 1e-4, "max residual " + g(mx));
  auto s = residual_sequence(b.domain, b.charts[0], etas,
                             [&](size_t n, double) { return shifted_psi(b.domain, sp.psi, double(n)); });
  double diff = 0.0;
  for (size_t i = 0; i < etas.size(); ++i) diff = std::max(diff, std::abs(s.residuals[i] - r.residuals[i]));
  // identical up to rounding in the stencil sums
  o.require(diff <= 1e-12, "shifted family difference " + g(diff));
  return o;
}

Outcome ac8() {
  Outcome o;
  ZooEntry q = make_quartic_circle();
  const double slack = 1e-4 * q.levi_scale;
  for (double eta : {0.5, 0.99}) {
    auto r = real_curve_certify(q, eta, slack);
    double gap = -1e300;
    for (double v : r.lhs) gap = std::max(gap, v + *r.C_eta);
    o.require(r.certified && gap <= slack, "eta " + g(eta) + " max LHS + C_eta " + g(gap));
  }
  return o;
}

Outcome ac9() {
  Outcome o;
  for (const char* id : {"ball", "fattened_bidisc", "quartic_circle"}) {
    const auto& c = estimate(id);
    int checked = 0;
    for (const auto& r : c.results) {
      if (!r.criterion.certified) continue;
      ++checked;
      bool ok = r.oracle && r.oracle->certified;
      o.require(ok, std::string(id) + " eta " + g(r.eta) + " oracle " +
                        g(r.oracle ? r.oracle->min_normalized : NAN));
    }
    o.require(checked > 0, std::string(id) + " " + std::to_string(checked) + " certified etas, d0 " +
                               g(c.tolerances.count("d0") ? c.tolerances.at("d0") : NAN));
  }
  return o;
}

Outcome ac10() {
  Outcome o;
  for (std::vector<std::string> args : {std::vector<std::string>{"certify", "--domain", "ball", "--eta", "0.99"},
                                        std::vector<std::string>{"period", "--domain", "worm", "--loop", "core"}}) {
    fs::path d1 = fs::temp_directory_path() / "dfindex_acc_a", d2 = fs::temp_directory_path() / "dfindex_acc_b";
    fs::remove_all(d1);
    fs::remove_all(d2);
    auto a1 = args, a2 = args;
    a1.insert(a1.end(), {"--out", d1.string()});
    a2.insert(a2.end(), {"--out", d2.string()});
    std::string o1, o2;
    cli(a1, &o1);
    cli(a2, &o2);
    std::string j1 = slurp(d1 / (args[0] + ".json")), j2 = slurp(d2 / (args[0] + ".json"));
    o.require(!j1.empty() && j1 == j2 && o1 == o2, args[0] + " " + std::to_string(j1.size()) + " bytes");
    fs::remove_all(d1);
    fs::remove_all(d2);
  }
  return o;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 ball jets and N properties", ac1},        {"AC2 ball certification", ac2},
      {"AC3 identity suites", ac3},                   {"AC4 potential round trip", ac4},
      {"AC5 worm obstruction", ac5},                  {"AC6 Caccioppoli", ac6},
      {"AC7 residual sequence", ac7},                 {"AC8 real-curve certificate", ac8},
      {"AC9 boundary criterion implies oracle", ac9}, {"AC10 determinism", ac10},
  };
  int failed = 0;
  for (auto& [name, fn] : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), s, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
