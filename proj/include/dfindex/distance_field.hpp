#pragma once

#include "dfindex/geometry_core.hpp"

namespace dfindex {

enum class JetMethod {
  FiniteDifference,  // centered differences of the foot-point distance
  ShapeOperator,     // exact order <= 2 from the Weingarten map of the foot point
};

struct DistanceConfig {
  double collar_fraction = 0.05;  // collar half-width as a fraction of the diameter
  double step_fraction = 1e-3;    // finite-difference step as a fraction of the domain scale
  int max_newton = 50;
  double ambiguity_tol = 1e-6;
  bool check_ambiguity = true;
  JetMethod method = JetMethod::FiniteDifference;

  double collar(const DomainSpec& d) const { return d.collar_width > 0 ? d.collar_width : collar_fraction * d.diameter; }
  double step(const DomainSpec& d) const { return step_fraction * d.scale; }
};

struct FootPoint {
  RVec foot;
  double delta = 0.0;  // signed distance of the query point
  double residual = 0.0;
  int iterations = 0;
};

struct BoundaryPoint {
  RVec position;
  WirtingerJet jet;  // delta jet at position
  CVec N;            // (1,0) coefficients
  RVec grad_delta;   // real unit normal
  double residual = 0.0;
};

struct TransversalField {
  RVec nu;      // real vector with N - conj(N) = i nu
  RVec J_grad;  // J(grad delta)
};

FootPoint project_to_boundary(const DomainSpec& domain, const RVec& z, const DistanceConfig& cfg = {});
double signed_distance(const DomainSpec& domain, const RVec& z, const DistanceConfig& cfg = {});

WirtingerJet delta_jet(const DomainSpec& domain, const RVec& z, int order, const DistanceConfig& cfg = {});

CVec normal_N(const WirtingerJet& jet);

// projects z, then builds the delta jet at the foot point
BoundaryPoint boundary_point(const DomainSpec& domain, const RVec& z, int order, const DistanceConfig& cfg = {});
// builds the jet at a point already on the boundary (no projection of the centre)
BoundaryPoint boundary_point_at_foot(const DomainSpec& domain, const RVec& foot, int order,
                                     const DistanceConfig& cfg = {});

TransversalField transversal(const BoundaryPoint& bp);

// real representative of sum N_j d/dz_j
CVec normal_real_rep(const BoundaryPoint& bp);

}  // namespace dfindex
