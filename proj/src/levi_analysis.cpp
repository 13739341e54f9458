#include "dfindex/levi_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dfindex/parallel.hpp"

namespace dfindex {

std::vector<CVec> LeviDecomposition::near_null(double threshold) const {
  std::vector<CVec> out;
  for (size_t k = 0; k < eigenvalues.size(); ++k) {
    if (k > 0 && eigenvalues[k] >= threshold) break;
    CVec v = CVec::Zero(frame.front().size());
    for (size_t a = 0; a < frame.size(); ++a) v += eigenvectors(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(k)) * frame[a];
    out.push_back(v.normalized());
  }
  return out;
}

namespace {

// fix the phase so the largest component is real positive
CVec canonical_phase(CVec v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(best)) + 1e-12) best = i;
  if (std::abs(v(best)) > 0) v *= std::conj(v(best)) / std::abs(v(best));
  return v;
}

}  // namespace

LeviDecomposition levi_decompose(const WirtingerJet& jet, const CVec& N) {
  if (jet.order() < 2) throw Error(ErrorKind::OrderTooLow, "Levi form needs an order-2 jet");
  const int n = jet.n();
  std::vector<int> axes(n);
  std::iota(axes.begin(), axes.end(), 0);
  std::stable_sort(axes.begin(), axes.end(), [&](int a, int b) { return std::abs(N(a)) > std::abs(N(b)); });
  LeviDecomposition d;
  for (int k = 1; k < n; ++k) {
    CVec t = CVec::Zero(n);
    t(axes[k]) = 1.0;
    t -= herm(t, N) * N;
    for (const CVec& f : d.frame) t -= herm(t, f) * f;
    double nt = t.norm();
    if (!(nt > 1e-8)) throw Error(ErrorKind::DegenerateGradient, "tangent frame collapsed");
    d.frame.push_back(t / nt);
  }
  const int m = n - 1;
  d.levi = CMat(m, m);
  std::vector<CVec> reps;
  for (const CVec& f : d.frame) reps.push_back(coeff_to_real_rep(f));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) d.levi(a, b) = jet.hess_form(reps[a], reps[b]);
  d.levi = 0.5 * (d.levi + d.levi.adjoint()).eval();
  HermitianEigen e = hermitian_eig(d.levi);
  d.eigenvalues = e.values;
  d.eigenvectors = e.vectors;
  CVec L = CVec::Zero(n);
  for (int a = 0; a < m; ++a) L += e.vectors(a, 0) * d.frame[a];
  d.L = canonical_phase(L.normalized());
  return d;
}

LeviDecomposition levi_decompose(const BoundaryPoint& bp) { return levi_decompose(bp.jet, bp.N); }

std::vector<RVec> SigmaPointSet::positions() const {
  std::vector<RVec> out;
  for (const auto& m : members) out.push_back(m.position);
  return out;
}

double default_sigma_threshold(const std::vector<double>& min_eigs) {
  std::vector<double> pos;
  for (double v : min_eigs)
    if (v > 0) pos.push_back(v);
  if (pos.empty()) return 1e-6;
  std::sort(pos.begin(), pos.end());
  double med = pos.size() % 2 ? pos[pos.size() / 2] : 0.5 * (pos[pos.size() / 2 - 1] + pos[pos.size() / 2]);
  return 1e-6 * med;
}

std::vector<LeviDecomposition> levi_scan(const DomainSpec& domain, const std::vector<RVec>& mesh,
                                         const DistanceConfig& cfg) {
  return parallel_map(mesh.size(), [&](size_t i) {
    BoundaryPoint bp = boundary_point_at_foot(domain, mesh[i], 2, cfg);
    return levi_decompose(bp);
  });
}

SigmaPointSet detect_sigma(const std::vector<RVec>& mesh, const std::vector<LeviDecomposition>& scan,
                           std::optional<double> threshold, bool allow_violations) {
  std::vector<double> mins;
  for (const auto& d : scan) mins.push_back(d.min_eig());
  SigmaPointSet s;
  s.mesh_size = mesh.size();
  s.threshold = threshold ? *threshold : default_sigma_threshold(mins);
  {
    std::vector<double> pos;
    for (double v : mins)
      if (v > 0) pos.push_back(v);
    std::sort(pos.begin(), pos.end());
    s.median_positive = pos.empty() ? 0.0 : pos[pos.size() / 2];
  }
  s.min_eigenvalue = mins.empty() ? 0.0 : *std::min_element(mins.begin(), mins.end());
  for (size_t i = 0; i < scan.size(); ++i) {
    if (mins[i] < -s.threshold) ++s.negative_count;
    if (mins[i] < s.threshold) {
      SigmaMember m;
      m.mesh_index = i;
      m.position = mesh[i];
      m.eigenvalue = mins[i];
      m.L = scan[i].L;
      m.near_null = scan[i].near_null(s.threshold);
      m.frame = scan[i].frame;
      s.members.push_back(std::move(m));
    }
  }
  if (s.negative_count > 0 && !allow_violations)
    throw Error(ErrorKind::NotPseudoconvex,
                std::to_string(s.negative_count) + " mesh points have Levi eigenvalue below -threshold");
  return s;
}

SigmaPointSet detect_sigma(const DomainSpec& domain, const std::vector<RVec>& mesh, std::optional<double> threshold,
                           const DistanceConfig& cfg, bool allow_violations) {
  return detect_sigma(mesh, levi_scan(domain, mesh, cfg), threshold, allow_violations);
}

cplx mixed_term(const BoundaryPoint& bp, const CVec& L) {
  return bp.jet.hess_form(normal_real_rep(bp), coeff_to_real_rep(L));
}

cplx third_term(const BoundaryPoint& bp, const CVec& L) {
  if (bp.jet.order() < 3) throw Error(ErrorKind::OrderTooLow, "third term needs an order-3 jet");
  const int D = 2 * bp.jet.n();
  CVec Lr = coeff_to_real_rep(L);
  CVec Nr = normal_real_rep(bp);
  cplx pure = bp.jet.third_form(Lr, Nr, Lr);
  // derivative of the normal field along L; N_R = (n - iJn)/2 with n = grad delta / |grad delta|
  const RMat& H = bp.jet.hess();
  double g = bp.grad_delta.norm();
  RVec n = bp.grad_delta / g;
  RMat P = RMat::Identity(D, D) - n * n.transpose();
  CVec dn = (P * H).cast<cplx>() * Lr / g;
  CVec dN = 0.5 * (dn - cplx(0, 1) * apply_J(dn));
  cplx moving = 0.0;
  CVec HLbar = H.cast<cplx>() * Lr.conjugate();
  for (int a = 0; a < D; ++a) moving += dN(a) * HLbar(a);
  return pure + moving;
}

double basic2_residual(const BoundaryPoint& bp, const CVec& L, const std::vector<CVec>& frame, double threshold) {
  LeviDecomposition d = levi_decompose(bp);
  if (d.min_eig() >= threshold) throw Error(ErrorKind::NotDegenerate, "point is not in the degenerate set");
  CVec Lr = coeff_to_real_rep(L);
  double worst = 0.0;
  for (const CVec& t : frame) {
    CVec tp = t - herm(t, L) * L;
    if (tp.norm() < 1e-12) continue;
    worst = std::max(worst, std::abs(bp.jet.hess_form(Lr, coeff_to_real_rep(tp))));
  }
  return worst;
}

}  // namespace dfindex
