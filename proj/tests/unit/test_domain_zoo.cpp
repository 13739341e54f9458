#include <random>

#include "doctest.h"
#include "dfindex/domain_zoo.hpp"
#include "support.hpp"

using namespace dfindex;
using testing_support::throws_kind;

namespace {

double hausdorff(const ZooEntry& z, const SigmaPointSet& s) {
  double a = 0.0, b = 0.0;
  for (const auto& m : s.members) a = std::max(a, z.sigma_distance(m.position));
  for (const RVec& t : z.sigma_samples(400)) {
    double best = 1e300;
    for (const auto& m : s.members) best = std::min(best, (m.position - t).norm());
    b = std::max(b, best);
  }
  return std::max(a, b);
}

}  // namespace

TEST_CASE("ball Levi eigenvalue scales with the radius") {
  for (double r : {1.0, 2.0}) {
    ZooEntry b = make_ball(r);
    auto mesh = b.boundary_mesh(200);
    for (size_t i = 0; i < mesh.size(); i += 25) {
      auto ld = levi_decompose(boundary_point_at_foot(b.domain, mesh[i], 2));
      CHECK(ld.min_eig() == doctest::Approx(0.5 / r).epsilon(1e-6));
    }
    CHECK(b.sigma_kind == SigmaKind::Empty);
  }
  CHECK(throws_kind([] { make_ball(-1.0); }, ErrorKind::ConfigInvalid));
}

TEST_CASE("bidisc defining function has PSD complex Hessian") {
  ZooEntry b = make_fattened_bidisc();
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    RVec x = testing_support::random_point(rng, b.domain.box_lo, b.domain.box_hi);
    CHECK(hermitian_min_eig(wirtinger_jet(b.domain, x, 2).mixed()) >= -1e-12);
  }
  auto ld = levi_decompose(boundary_point_at_foot(b.domain, rvec({0, 0, std::cos(0.4), std::sin(0.4)}), 2));
  CHECK(std::abs(ld.min_eig()) < 1e-10);
}

TEST_CASE("worm parameters") {
  CHECK(throws_kind([] { make_worm(1.5); }, ErrorKind::BetaTooSmall));
  CHECK(throws_kind([] { make_zoo_entry("worm", {{"beta", 1.0}}); }, ErrorKind::BetaTooSmall));
  ZooEntry w = make_worm();
  CHECK(std::abs(w.domain.eval(rvec({0, 0, 1, 0}))) < 1e-14);
  auto ld = levi_decompose(boundary_point_at_foot(w.domain, rvec({0, 0, 1, 0}), 2));
  CHECK(std::abs(ld.min_eig()) < 1e-8);
  CHECK(w.sigma_kind == SigmaKind::ComplexSubmanifold);
  CHECK(w.loop("core").closed);
}

TEST_CASE("quartic Levi matrix is diag(4|z1|^2, 1)") {
  ZooEntry q = make_quartic_circle();
  for (RVec x : {rvec({0.3, 0.2, 0.5, -0.1}), rvec({0.0, 0.0, 1.0, 0.0}), rvec({-0.6, 0.1, 0.2, 0.7})}) {
    CMat H = wirtinger_jet(q.domain, x, 2).mixed();
    double m = x(0) * x(0) + x(1) * x(1);
    CHECK(std::abs(H(0, 0) - 4 * m) < 1e-12);
    CHECK(std::abs(H(1, 1) - 1.0) < 1e-12);
    CHECK(std::abs(H(0, 1)) < 1e-12);
  }
  CHECK(q.sigma_kind == SigmaKind::RealCurve);
  CHECK(q.curve.has_value());
}

TEST_CASE("analytic oracles agree with the automatic jets at 1000 random points") {
  std::mt19937_64 rng(2024);
  for (const auto& id : zoo_ids()) {
    ZooEntry z = make_zoo_entry(id);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      RVec x = testing_support::random_point(rng, z.domain.box_lo, z.domain.box_hi);
      if (id == "worm") {
        double s = std::hypot(x(2), x(3));
        if (s < 0.4) x.segment(2, 2) *= (0.4 + s) / std::max(s, 1e-12);
      }
      worst = std::max(worst, jet_mismatch(wirtinger_jet(z.domain, x, 3), z.domain.analytic_oracle(x, 3), 3));
    }
    INFO(id);
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("registry and aliases") {
  CHECK(zoo_ids().size() == 5);
  CHECK(make_zoo_entry("bidisc").domain.id == make_zoo_entry("fattened_bidisc").domain.id);
  CHECK(make_zoo_entry("quartic").domain.id == make_zoo_entry("quartic_circle").domain.id);
  CHECK(make_zoo_entry("ball", {{"radius", 2.0}}).parameters.at("radius") == 2.0);
  CHECK(throws_kind([] { make_zoo_entry("torus"); }, ErrorKind::ConfigInvalid));
  CHECK(throws_kind([] { make_zoo_entry("ball", {{"radius", std::nan("")}}); }, ErrorKind::ConfigInvalid));
  for (const auto& id : zoo_ids()) {
    ZooEntry z = make_zoo_entry(id);
    CHECK(!z.expected.empty());
    for (const RVec& p : z.boundary_mesh(300)) CHECK(std::abs(z.domain.eval(p)) < 1e-9);
  }
}

TEST_CASE("documented Sigma descriptions are detected within two mesh pitches") {
  for (auto [id, count] : {std::pair{"quartic_circle", 10000}, std::pair{"fattened_ball3", 6000}}) {
    ZooEntry z = make_zoo_entry(id);
    auto mesh = z.boundary_mesh(count);
    auto s = detect_sigma(z.domain, mesh, std::nullopt);
    INFO(id);
    REQUIRE(!s.empty());
    CHECK(hausdorff(z, s) <= 2 * mesh_pitch(mesh));
  }
}
