#pragma once

#include <optional>
#include <vector>

#include "dfindex/distance_field.hpp"

namespace dfindex {

struct LeviDecomposition {
  std::vector<CVec> frame;  // (1,0) coefficient vectors, orthonormal, orthogonal to N
  CMat levi;                // Hess_delta(T_a, T_b)
  std::vector<double> eigenvalues;
  CMat eigenvectors;  // frame coordinates, columns match eigenvalues
  CVec L;             // unit null direction

  double min_eig() const { return eigenvalues.front(); }
  std::vector<CVec> near_null(double threshold) const;
};

LeviDecomposition levi_decompose(const BoundaryPoint& bp);
LeviDecomposition levi_decompose(const WirtingerJet& jet, const CVec& N);

struct SigmaMember {
  size_t mesh_index = 0;
  RVec position;
  double eigenvalue = 0.0;
  CVec L;
  std::vector<CVec> near_null;
  std::vector<CVec> frame;
};

struct SigmaPointSet {
  std::vector<SigmaMember> members;
  double threshold = 0.0;
  size_t negative_count = 0;
  size_t mesh_size = 0;
  double min_eigenvalue = 0.0;
  double median_positive = 0.0;

  bool empty() const { return members.empty(); }
  std::vector<RVec> positions() const;
};

// 1e-6 x median positive eigenvalue
double default_sigma_threshold(const std::vector<double>& min_eigs);

std::vector<LeviDecomposition> levi_scan(const DomainSpec& domain, const std::vector<RVec>& mesh,
                                         const DistanceConfig& cfg = {});

SigmaPointSet detect_sigma(const DomainSpec& domain, const std::vector<RVec>& mesh, std::optional<double> threshold,
                           const DistanceConfig& cfg = {}, bool allow_violations = false);
SigmaPointSet detect_sigma(const std::vector<RVec>& mesh, const std::vector<LeviDecomposition>& scan,
                           std::optional<double> threshold, bool allow_violations = false);

cplx mixed_term(const BoundaryPoint& bp, const CVec& L);
cplx third_term(const BoundaryPoint& bp, const CVec& L);
double basic2_residual(const BoundaryPoint& bp, const CVec& L, const std::vector<CVec>& frame, double threshold);

}  // namespace dfindex
