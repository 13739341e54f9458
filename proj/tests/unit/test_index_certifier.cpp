#include <cmath>

#include "doctest.h"
#include "dfindex/index_certifier.hpp"
#include "support.hpp"

using namespace dfindex;
using testing_support::throws_kind;

namespace {

SigmaPointSet thinned(const SigmaPointSet& s, size_t keep) {
  SigmaPointSet out = s;
  out.members.clear();
  size_t stride = std::max<size_t>(1, s.members.size() / keep);
  for (size_t i = 0; i < s.members.size(); i += stride) out.members.push_back(s.members[i]);
  return out;
}

std::vector<RVec> every(const std::vector<RVec>& v, size_t stride) {
  std::vector<RVec> out;
  for (size_t i = 0; i < v.size(); i += stride) out.push_back(v[i]);
  return out;
}

EstimateOptions quick(std::vector<double> etas) {
  EstimateOptions o;
  o.eta_grid = std::move(etas);
  o.mesh_points = 2000;
  o.max_criterion_samples = 48;
  o.interior_base_points = 300;
  return o;
}

}  // namespace

TEST_CASE("criterion formula and monotonicity in eta") {
  CriterionSample s;
  s.h = cplx(0.3, 0.1);
  s.T3 = 0.2;
  PsiDerivatives d{cplx(0.2, -0.4), -0.6};
  // (1/(1-eta) - 1)|Lbar psi/2 + h|^2 + (Hess_psi/2 + T3)/2 at eta = 3/4
  CHECK(criterion_lhs(0.75, s, d) == doctest::Approx(3 * 0.17 - 0.05).epsilon(1e-12));
  CHECK(criterion_lhs(0.5, s, d) <= criterion_lhs(0.75, s, d));

  auto vac = evaluate_criterion({}, {}, 0.99, 1e-4);
  CHECK(vac.vacuous);
  CHECK(vac.certified);
  CHECK(std::isnan(vac.max_lhs));

  auto rep = evaluate_criterion({s}, {d}, 0.75, 1e-4);
  CHECK(!rep.certified);
  CHECK(rep.max_lhs == doctest::Approx(0.46));
}

TEST_CASE("boundary criterion on the zoo") {
  ZooEntry ball = make_ball();
  auto sb = detect_sigma(ball.domain, ball.boundary_mesh(1000), 1e-6);
  auto rb = boundary_criterion(ball.domain, sb, zero_psi(), 0.99, 1e-4);
  CHECK(rb.vacuous);
  CHECK(rb.certified);

  ZooEntry b = make_fattened_bidisc();
  auto sig = thinned(detect_sigma(b.domain, b.boundary_mesh(3000), std::nullopt), 40);
  auto sp = sigma_potential(b);
  CHECK(sp.verdict.exact);
  auto samples = criterion_geometry(b.domain, sig);
  std::vector<PsiDerivatives> ders;
  for (const auto& s : samples) ders.push_back(psi_derivatives(sp.psi, s, 4e-3));
  auto r99 = evaluate_criterion(samples, ders, 0.99, 1e-4 * b.levi_scale);
  CHECK(r99.certified);
  CHECK(r99.max_lhs <= 1e-4);
  auto r50 = evaluate_criterion(samples, ders, 0.5, 1e-4 * b.levi_scale);
  for (size_t i = 0; i < r50.lhs.size(); ++i) CHECK(r50.lhs[i] <= r99.lhs[i] + 1e-15);

  ZooEntry w = make_worm();
  auto sw = thinned(detect_sigma(w.domain, w.boundary_mesh(3000), std::nullopt), 30);
  auto rw = boundary_criterion(w.domain, sw, zero_psi(), 0.9, 1e-4 * w.levi_scale);
  CHECK(!rw.certified);
  CHECK(rw.max_lhs > 0);
  CHECK(throws_kind([&] { boundary_criterion(w.domain, sw, zero_psi(), 1.0, 1e-4); }, ErrorKind::ConfigInvalid));
}

TEST_CASE("interior oracle") {
  ZooEntry ball = make_ball();
  auto bmesh = every(ball.boundary_mesh(2000), 4);
  auto deep = interior_shell(ball.domain, bmesh, {0.01, 0.1, 0.5});
  auto ob = interior_psh_oracle(ball.domain, zero_psi(), 0.99, deep, 1e-9, ball.rho_override);
  CHECK(ob.certified);
  CHECK(ob.min_eigenvalue >= -1e-10);
  CHECK(ob.points == deep.size());

  // small eta with psi = 0 on convex domains
  for (const char* id : {"ball", "quartic_circle", "fattened_bidisc"}) {
    ZooEntry z = make_zoo_entry(id);
    auto shell = interior_shell(z.domain, every(z.boundary_mesh(1500), 5), {0.01, 0.05});
    auto o = interior_psh_oracle(z.domain, zero_psi(), 0.05, shell);
    INFO(id);
    CHECK(o.certified);
  }

  ZooEntry w = make_worm();
  const double d0 = 1e-4 * w.domain.diameter;
  auto ws = interior_shell(w.domain, every(w.boundary_mesh(2000), 4), {d0, 2 * d0});
  auto ow = interior_psh_oracle(w.domain, zero_psi(), 0.99, ws);
  CHECK(!ow.certified);
  CHECK(ow.min_eigenvalue < 0);

  std::vector<RVec> outside{rvec({1.05, 0, 0, 0})};
  CHECK(throws_kind([&] { interior_psh_oracle(ball.domain, zero_psi(), 0.5, outside); }, ErrorKind::MeshOutside));
}

TEST_CASE("estimate_index on the ball and the worm") {
  auto cb = estimate_index(make_ball(), quick({0.5, 0.99}));
  CHECK(cb.has_certificate);
  CHECK(cb.bound >= 0.99);
  CHECK(cb.verdict == "Vacuous");
  CHECK(cb.monotone);
  for (const auto& r : cb.results) {
    REQUIRE(r.oracle.has_value());
    CHECK(r.oracle->min_eigenvalue >= -1e-9);
  }
  CHECK_NOTHROW(cb.require_certificate());

  auto cw = estimate_index(make_worm(), quick({0.9, 0.99}));
  CHECK(cw.bound < 1.0);
  CHECK(cw.verdict == "Obstructed");
  CHECK(!cw.diagnostics.empty());
  if (!cw.has_certificate) CHECK(throws_kind([&] { cw.require_certificate(); }, ErrorKind::NoCertificate));
}

TEST_CASE("Caccioppoli estimate") {
  PatchSpec p;
  p.center = RVec::Zero(4);
  auto neg = [](const RVec& x) { return -(x(0) * x(0) + x(1) * x(1)); };
  for (int n : {1, 4, 16}) {
    p.radius_U = 1.0 / std::sqrt(double(n));
    p.radius_V = 0.75 * p.radius_U;
    p.radius_W = 0.5 * p.radius_U;
    auto r = caccioppoli_check(p, neg, n);
    const double W = p.radius_W;
    CHECK(std::abs(r.left - kPi * std::pow(W, 4) / 2) < 1e-4 * kPi * std::pow(W, 4) / 2);
    CHECK(r.holds);
    CHECK(r.left <= 0.99 * r.bound);
    CHECK(r.bound == doctest::Approx(r.C / (n * n)));
    CHECK(r.hypothesis_max <= 1e-8);
  }
  p.radius_U = 1.0;
  p.radius_V = 0.75;
  p.radius_W = 0.5;
  auto c = caccioppoli_check(p, [](const RVec&) { return 2.5; }, 3);
  CHECK(c.left == doctest::Approx(0.0));
  CHECK(c.holds);
  CHECK(throws_kind([&] { caccioppoli_check(p, [](const RVec& x) { return x.squaredNorm(); }, 4); },
                    ErrorKind::HypothesisFail));

  PatchSpec box = p;
  box.shape = PatchShape::Box;
  box.radius_U = 0.5;
  box.radius_V = 0.4;
  box.radius_W = 0.25;
  auto rb = caccioppoli_check(box, neg, 2);
  CHECK(rb.left == doctest::Approx(8 * std::pow(0.25, 4) / 3).epsilon(1e-4));
  CHECK(rb.holds);
  PatchSpec bad = p;
  bad.radius_W = 0.9;
  CHECK(throws_kind([&] { caccioppoli_check(bad, neg, 1); }, ErrorKind::ConfigInvalid));
}

TEST_CASE("residual sequence") {
  ZooEntry b = make_fattened_bidisc();
  auto sp = sigma_potential(b);
  std::vector<double> etas = {0.5, 0.75, 0.9, 0.95, 0.99};
  auto rr = residual_sequence(b.domain, b.charts[0], etas, [&](size_t, double) { return sp.psi; });
  REQUIRE(rr.residuals.size() == etas.size());
  for (double v : rr.residuals) CHECK(v < 1e-4);
  auto shifted = residual_sequence(b.domain, b.charts[0], etas,
                                   [&](size_t n, double) { return shifted_psi(b.domain, sp.psi, double(n)); });
  for (size_t i = 0; i < etas.size(); ++i) CHECK(std::abs(shifted.residuals[i] - rr.residuals[i]) < 1e-12);
  CHECK(!rr.note.empty());

  ZooEntry w = make_worm();
  auto rw = residual_sequence(w.domain, w.chart("annulus"), {0.5, 0.9}, [](size_t, double) { return zero_psi(); });
  for (double v : rw.residuals) CHECK(v > 0.1);
}

TEST_CASE("real-curve certificate") {
  ZooEntry q = make_quartic_circle();
  const double slack = 1e-4 * q.levi_scale;
  for (double eta : {0.5, 0.99}) {
    auto r = real_curve_certify(q, eta, slack);
    CHECK(r.certified);
    REQUIRE(r.C_eta.has_value());
    for (double v : r.lhs) CHECK(v <= -*r.C_eta + slack);
    CHECK(r.b_values.size() == r.lhs.size());
  }
  CHECK(throws_kind([&] { real_curve_certify(make_ball(), 0.9, slack); }, ErrorKind::NotACurve));
}
