#include <random>

#include "doctest.h"
#include "dfindex/domain_zoo.hpp"
#include "dfindex/levi_analysis.hpp"
#include "support.hpp"

using namespace dfindex;
using testing_support::throws_kind;

namespace {

double hausdorff(const ZooEntry& z, const SigmaPointSet& s) {
  double to_true = 0.0, to_detected = 0.0;
  for (const auto& m : s.members) to_true = std::max(to_true, z.sigma_distance(m.position));
  for (const RVec& t : z.sigma_samples(400)) {
    double best = 1e300;
    for (const auto& m : s.members) best = std::min(best, (m.position - t).norm());
    to_detected = std::max(to_detected, best);
  }
  return std::max(to_true, to_detected);
}

CVec e(int n, int j) {
  CVec v = CVec::Zero(n);
  v(j) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("ball Levi decomposition and unitary equivariance") {
  ZooEntry b = make_ball();
  auto ld = levi_decompose(boundary_point(b.domain, rvec({1, 0, 0, 0}), 2));
  REQUIRE(ld.levi.rows() == 1);
  CHECK(std::abs(ld.levi(0, 0) - cplx(0.5, 0)) < 1e-6);
  CHECK(ld.min_eig() == doctest::Approx(0.5).epsilon(1e-6));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 5; ++t) {
    CMat U = testing_support::random_unitary(rng, 2);
    CVec z = U * e(2, 0);
    auto lr = levi_decompose(boundary_point(b.domain, to_real(z), 2));
    CHECK(std::abs(lr.min_eig() - ld.min_eig()) < 1e-6);
  }
  auto ld2 = levi_decompose(boundary_point_at_foot(b.domain, rvec({0, 0, 1, 0}), 2));
  CHECK(std::abs(ld2.min_eig() - ld.min_eig()) < 1e-10);
}

TEST_CASE("exact distance jets give unitary-invariant eigenvalues to 1e-10") {
  ZooEntry b = make_ball();
  std::mt19937_64 rng(9);
  RVec p = rvec({1, 0, 0, 0});
  auto ref = levi_decompose(b.exact_delta(p, 2), normal_N(b.exact_delta(p, 2)));
  for (int t = 0; t < 20; ++t) {
    RVec q = to_real(CVec(testing_support::random_unitary(rng, 2) * to_complex(p)));
    auto j = b.exact_delta(q, 2);
    auto ld = levi_decompose(j, normal_N(j));
    CHECK(std::abs(ld.eigenvalues[0] - ref.eigenvalues[0]) < 1e-10);
  }
}

TEST_CASE("frames are orthonormal and orthogonal to N") {
  for (const char* id : {"worm", "fattened_ball3", "quartic_circle"}) {
    ZooEntry z = make_zoo_entry(id);
    auto mesh = z.boundary_mesh(300);
    for (size_t i = 0; i < mesh.size(); i += 7) {
      auto bp = boundary_point_at_foot(z.domain, mesh[i], 2);
      auto ld = levi_decompose(bp);
      for (size_t a = 0; a < ld.frame.size(); ++a) {
        CHECK(std::abs(herm(ld.frame[a], bp.N)) < 1e-10);
        for (size_t c = 0; c < ld.frame.size(); ++c)
          CHECK(std::abs(herm(ld.frame[a], ld.frame[c]) - (a == c ? 1.0 : 0.0)) < 1e-10);
      }
      CHECK((ld.levi - ld.levi.adjoint()).norm() < 1e-10);
    }
  }
}

TEST_CASE("bidisc Levi form degenerates along d/dz1 on the flat part") {
  ZooEntry b = make_fattened_bidisc();
  for (double t : {0.0, 1.3, -2.2}) {
    auto ld = levi_decompose(boundary_point_at_foot(b.domain, rvec({0, 0, std::cos(t), std::sin(t)}), 2));
    CHECK(std::abs(ld.min_eig()) < 1e-10);
    CHECK(std::abs(std::abs(ld.L(0)) - 1.0) < 1e-8);
  }
}

TEST_CASE("detect_sigma: ball empty, bidisc and worm within two mesh pitches") {
  ZooEntry b = make_ball();
  auto sb = detect_sigma(b.domain, b.boundary_mesh(2000), 1e-6);
  CHECK(sb.empty());
  CHECK(sb.negative_count == 0);

  for (const char* id : {"fattened_bidisc", "worm"}) {
    ZooEntry z = make_zoo_entry(id);
    auto mesh = z.boundary_mesh(10000);
    auto s = detect_sigma(z.domain, mesh, std::nullopt);
    INFO(id);
    REQUIRE(!s.empty());
    CHECK(s.negative_count == 0);
    CHECK(hausdorff(z, s) <= 2 * mesh_pitch(mesh));
    for (const auto& m : s.members) CHECK(m.eigenvalue < s.threshold);
  }
}

TEST_CASE("detect_sigma is monotone in the threshold") {
  ZooEntry q = make_quartic_circle();
  auto mesh = q.boundary_mesh(3000);
  auto scan = levi_scan(q.domain, mesh);
  size_t prev = 0;
  for (double th : {1e-8, 1e-4, 1e-2, 1e-1}) {
    auto s = detect_sigma(mesh, scan, th);
    CHECK(s.members.size() >= prev);
    prev = s.members.size();
  }
  CHECK(prev > 0);
}

TEST_CASE("non-pseudoconvex shell raises NotPseudoconvex") {
  auto shell = make_domain(
      "shell", 2,
      [](auto x) {
        auto s = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] - 0.625;
        return s * s - 0.140625;
      },
      rvec({-1.2, -1.2, -1.2, -1.2}), rvec({1.2, 1.2, 1.2, 1.2}), 1.0, 2.0);
  std::vector<RVec> mesh;
  for (double r : {0.5, 1.0})
    for (int k = 0; k < 8; ++k) mesh.push_back(rvec({r * std::cos(k * 0.7), r * std::sin(k * 0.7), 0, 0}));
  CHECK(throws_kind([&] { detect_sigma(shell, mesh, 1e-6); }, ErrorKind::NotPseudoconvex));
  auto s = detect_sigma(shell, mesh, 1e-6, {}, true);
  CHECK(s.negative_count == 8);
}

TEST_CASE("mixed and third terms") {
  ZooEntry b = make_ball();
  std::mt19937_64 rng(4);
  auto mesh = b.boundary_mesh(200);
  for (size_t i = 0; i < mesh.size(); i += 20) {
    auto bp = boundary_point_at_foot(b.domain, mesh[i], 2);
    auto ld = levi_decompose(bp);
    CHECK(std::abs(mixed_term(bp, ld.frame[0])) < 1e-6);
  }
  ZooEntry bd = make_fattened_bidisc();
  auto bpb = boundary_point_at_foot(bd.domain, rvec({0.1, 0.2, 0.6, 0.8}), 2);
  CHECK(std::abs(mixed_term(bpb, e(2, 0))) < 1e-10);

  ZooEntry w = make_worm();
  auto bw = boundary_point_at_foot(w.domain, rvec({0, 0, 1, 0}), 3);
  // symbolic oracle: -0.5 i at (0, 1), third term 0
  CHECK(std::abs(mixed_term(bw, e(2, 1)) - cplx(0, -0.5)) < 1e-6);
  CHECK(std::abs(third_term(bw, e(2, 1))) < 1e-4);
  RVec p2 = rvec({0, 0, 1.3 * std::cos(0.7), 1.3 * std::sin(0.7)});
  auto bw2 = boundary_point_at_foot(w.domain, p2, 3);
  CHECK(std::abs(mixed_term(bw2, e(2, 1)) - cplx(0.2477760335529581, -0.29417007203249557)) < 1e-6);
  CHECK(std::abs(third_term(bw2, e(2, 1))) < 1e-4);
  CHECK(throws_kind([&] { third_term(bpb, e(2, 0)); }, ErrorKind::OrderTooLow));
}

TEST_CASE("ball third term: closed form and scaling") {
  ZooEntry b1 = make_ball(1.0), b2 = make_ball(2.0);
  RVec p = rvec({1, 0, 0, 0});
  auto bp = boundary_point_at_foot(b1.domain, p, 3);
  BoundaryPoint exact = bp;
  exact.jet = b1.exact_delta(p, 3);
  exact.N = normal_N(exact.jet);
  CVec L = e(2, 1);
  cplx fd = third_term(bp, L), ex = third_term(exact, L);
  CHECK(std::abs(fd - ex) < 1e-4 * std::max(1.0, std::abs(ex)));
  cplx big = third_term(boundary_point_at_foot(b2.domain, RVec(2.0 * p), 3), L);
  CHECK(std::abs(big - ex / 4.0) < 1e-4 * std::max(1.0, std::abs(ex)));
}

TEST_CASE("basic2 residual on Sigma") {
  ZooEntry b = make_fattened_bidisc();
  auto mesh = b.boundary_mesh(2000);
  auto s = detect_sigma(b.domain, mesh, std::nullopt);
  double worst = 0.0;
  for (const auto& m : s.members)
    worst = std::max(worst, basic2_residual(boundary_point_at_foot(b.domain, m.position, 2), m.L, m.frame, s.threshold));
  CHECK(worst < 1e-8);

  ZooEntry w = make_worm();
  auto bw = boundary_point_at_foot(w.domain, rvec({0, 0, 1, 0}), 2);
  auto ld = levi_decompose(bw);
  CHECK(basic2_residual(bw, ld.L, ld.frame, 1e-6) < 1e-6);

  ZooEntry f3 = make_fattened_ball3();
  auto b3 = boundary_point_at_foot(f3.domain, rvec({0.1, 0, 0.05, 0.1, 0, 1}), 2);
  auto l3 = levi_decompose(b3);
  CHECK(l3.near_null(1e-6).size() == 2);
  CHECK(basic2_residual(b3, l3.L, l3.frame, 1e-6) < 1e-6);

  ZooEntry ball = make_ball();
  auto bb = boundary_point_at_foot(ball.domain, rvec({1, 0, 0, 0}), 2);
  auto lb = levi_decompose(bb);
  CHECK(throws_kind([&] { basic2_residual(bb, lb.L, lb.frame, 1e-6); }, ErrorKind::NotDegenerate));
}

TEST_CASE("numerical pseudoconvexity on every zoo domain") {
  for (const auto& id : zoo_ids()) {
    ZooEntry z = make_zoo_entry(id);
    auto mesh = z.boundary_mesh(1500);
    auto scan = levi_scan(z.domain, mesh);
    double mn = 1e300;
    for (const auto& d : scan) mn = std::min(mn, d.min_eig());
    INFO(id);
    CHECK(mn >= -1e-8);
  }
}
