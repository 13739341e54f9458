#include "dfindex/distance_field.hpp"

#include <cmath>

namespace dfindex {

namespace {

struct RhoLocal {
  double value;
  RVec grad;
  RMat hess;
};

RhoLocal rho_local(const DomainSpec& d, const RVec& p) {
  WirtingerJet j = wirtinger_jet(d, p, 2);
  return {j.value(), j.grad(), j.hess()};
}

// closest-point Newton on p + lambda grad rho(p) = z, rho(p) = 0
FootPoint correct(const DomainSpec& d, const RVec& z, RVec p, const DistanceConfig& cfg) {
  const int D = d.real_dim();
  RhoLocal r = rho_local(d, p);
  double lambda = (z - p).dot(r.grad) / r.grad.squaredNorm();
  const double tol = 1e-13 * std::max(1.0, d.scale);
  for (int it = 0; it < cfg.max_newton; ++it) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(D + 1, D + 1);
    Eigen::VectorXd F(D + 1);
    A.topLeftCorner(D, D) = Eigen::MatrixXd::Identity(D, D) + lambda * r.hess;
    A.block(0, D, D, 1) = r.grad;
    A.block(D, 0, 1, D) = r.grad.transpose();
    F.head(D) = p + lambda * r.grad - z;
    F(D) = r.value;
    Eigen::VectorXd step = A.partialPivLu().solve(-F);
    if (!step.allFinite()) break;
    double len = step.head(D).norm();
    double cap = 0.25 * d.diameter;
    if (len > cap) step *= cap / len;
    p += step.head(D);
    lambda += step(D);
    if (!d.in_box(p)) break;
    r = rho_local(d, p);
    if (len <= tol) {
      FootPoint fp;
      fp.foot = p;
      double gap = (z - p).norm();
      fp.delta = lambda >= 0 ? gap : -gap;
      fp.residual = (p + lambda * r.grad - z).norm() + std::abs(r.value) / r.grad.norm();
      fp.iterations = it + 1;
      return fp;
    }
  }
  throw Error(ErrorKind::NoConvergence, "foot-point iteration did not converge for " + d.id);
}

RVec gradient_flow(const DomainSpec& d, RVec p, int max_iter) {
  for (int it = 0; it < max_iter; ++it) {
    WirtingerJet j = wirtinger_jet(d, p, 1);
    double g2 = j.grad().squaredNorm();
    if (g2 <= 0.0) throw Error(ErrorKind::DegenerateGradient, "vanishing gradient in predictor");
    RVec step = -j.value() * j.grad() / g2;
    double len = step.norm();
    double cap = 0.25 * d.diameter;
    if (len > cap) step *= cap / len;
    p += step;
    if (!d.in_box(p)) throw Error(ErrorKind::NoConvergence, "predictor left the bounding box");
    if (len <= 1e-10 * std::max(1.0, d.scale)) break;
  }
  return p;
}

RVec ray_predictor(const DomainSpec& d, const RVec& z) {
  WirtingerJet j = wirtinger_jet(d, z, 1);
  RVec n = j.grad().normalized();
  double t = j.value() / j.grad().norm();
  for (int it = 0; it < 40; ++it) {
    RVec q = z - t * n;
    if (!d.in_box(q)) throw Error(ErrorKind::NoConvergence, "ray predictor left the bounding box");
    WirtingerJet jq = wirtinger_jet(d, q, 1);
    double slope = -jq.grad().dot(n);
    if (slope == 0.0) break;
    double dt = -jq.value() / slope;
    t += dt;
    if (std::abs(dt) <= 1e-12 * std::max(1.0, d.scale)) break;
  }
  return z - t * n;
}

}  // namespace

FootPoint project_to_boundary(const DomainSpec& domain, const RVec& z, const DistanceConfig& cfg) {
  if (!domain.in_box(z)) throw Error(ErrorKind::EvaluationDomain, "query point outside bounding box of " + domain.id);
  FootPoint a = correct(domain, z, gradient_flow(domain, z, 60), cfg);
  if (cfg.check_ambiguity) {
    FootPoint b = correct(domain, z, ray_predictor(domain, z), cfg);
    if ((a.foot - b.foot).norm() > cfg.ambiguity_tol * std::max(1.0, domain.scale))
      throw Error(ErrorKind::AmbiguousFoot, "restarts disagree; point likely on the cut locus");
  }
  return a;
}

double signed_distance(const DomainSpec& domain, const RVec& z, const DistanceConfig& cfg) {
  DistanceConfig c = cfg;
  c.check_ambiguity = false;
  return project_to_boundary(domain, z, c).delta;
}

WirtingerJet delta_jet(const DomainSpec& domain, const RVec& z, int order, const DistanceConfig& cfg) {
  if (order < 1 || order > 3) throw Error(ErrorKind::OrderTooLow, "jet order must be 1, 2 or 3");
  const double collar = cfg.collar(domain);
  FootPoint centre = project_to_boundary(domain, z, cfg);
  if (std::abs(centre.delta) > collar) throw Error(ErrorKind::StencilLeak, "point outside the collar");
  if (cfg.method == JetMethod::ShapeOperator) {
    if (order > 2) throw Error(ErrorKind::OrderTooLow, "shape-operator jets stop at order 2");
    WirtingerJet rj = wirtinger_jet(domain, centre.foot, 2);
    const int D = domain.real_dim();
    double gn = rj.grad().norm();
    RVec nrm = rj.grad() / gn;
    RMat P = RMat::Identity(D, D) - nrm * nrm.transpose();
    RMat W = P * rj.hess() * P / gn;
    RMat M = RMat::Identity(D, D) + centre.delta * W;
    RMat H = W * M.inverse();
    WirtingerJet out(domain.n, order);
    out.set_value(centre.delta);
    out.grad() = nrm;
    if (order >= 2) out.hess() = 0.5 * (H + H.transpose());
    return out;
  }
  DistanceConfig quiet = cfg;
  quiet.check_ambiguity = false;
  std::function<double(const RVec&)> f = [&](const RVec& y) {
    double v = project_to_boundary(domain, y, quiet).delta;
    if (std::abs(v) > collar) throw Error(ErrorKind::StencilLeak, "stencil point leaves the collar");
    return v;
  };
  return fd_jet(f, z, domain.n, order, cfg.step(domain));
}

CVec normal_N(const WirtingerJet& jet) {
  CVec dz = jet.dz();
  double norm = dz.norm();
  if (!(norm > 1e-12)) throw Error(ErrorKind::DegenerateGradient, "delta gradient vanishes");
  return dz.conjugate() / norm;
}

BoundaryPoint boundary_point_at_foot(const DomainSpec& domain, const RVec& foot, int order, const DistanceConfig& cfg) {
  BoundaryPoint bp;
  bp.position = foot;
  bp.jet = delta_jet(domain, foot, order, cfg);
  bp.N = normal_N(bp.jet);
  bp.grad_delta = bp.jet.grad();
  WirtingerJet rj = wirtinger_jet(domain, foot, 1);
  bp.residual = std::abs(rj.value()) / rj.grad().norm();
  return bp;
}

BoundaryPoint boundary_point(const DomainSpec& domain, const RVec& z, int order, const DistanceConfig& cfg) {
  FootPoint fp = project_to_boundary(domain, z, cfg);
  BoundaryPoint bp = boundary_point_at_foot(domain, fp.foot, order, cfg);
  bp.residual = std::max(bp.residual, fp.residual);
  return bp;
}

CVec normal_real_rep(const BoundaryPoint& bp) { return coeff_to_real_rep(bp.N); }

TransversalField transversal(const BoundaryPoint& bp) {
  CVec nr = normal_real_rep(bp);
  TransversalField t;
  t.nu = 2.0 * nr.imag();
  t.J_grad = apply_J(RVec(bp.grad_delta));
  return t;
}

}  // namespace dfindex
