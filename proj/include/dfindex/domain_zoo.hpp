#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dfindex/cohomology.hpp"

namespace dfindex {

enum class SigmaKind { Empty, PointSet, ComplexSubmanifold, Foliation, RealCurve };
std::string sigma_kind_name(SigmaKind k);

struct ExpectedBehavior {
  std::string statement;
  std::string basis;
};

struct ZooEntry {
  DomainSpec domain;
  std::map<std::string, double> parameters;
  SigmaKind sigma_kind = SigmaKind::Empty;
  std::vector<SigmaChart> charts;          // complex submanifold charts
  std::optional<FoliationAtlas> foliation;  // leaf charts for Foliation
  std::optional<SigmaChart> curve;          // RealCurve
  std::vector<PathInSigma> loops;           // vertices index into charts
  std::vector<ExpectedBehavior> expected;
  double levi_scale = 1.0;  // typical positive Levi eigenvalue off Sigma
  std::optional<CollarSpec> collar;  // overrides the default psi collar

  // roughly `count` points on the boundary
  std::function<std::vector<RVec>(size_t count)> boundary_mesh;
  // points exactly on Sigma (empty for Empty)
  std::function<std::vector<RVec>(size_t count)> sigma_samples;
  // distance from a boundary point to the true Sigma (infinity for Empty)
  std::function<double(const RVec&)> sigma_distance;
  // an alternative defining function, order-2 jets; used by the interior oracle when set
  std::function<WirtingerJet(const RVec&)> rho_override;
  // closed-form signed distance jets, where known
  std::function<WirtingerJet(const RVec&, int)> exact_delta;

  const SigmaChart& chart(const std::string& id) const;
  const PathInSigma& loop(const std::string& name) const;
};

ZooEntry make_ball(double radius = 1.0);
ZooEntry make_fattened_bidisc(double r = 0.5, double smoothing_power = 4.0);
struct WormProfile {
  double amplitude = 2.0;  // M in M s^2 exp(-1/s)
};
ZooEntry make_worm(double beta = kPi, WormProfile profile = {});
ZooEntry make_quartic_circle();
// Sigma = {|z3| = 1, |z1|^2 + |z2|^2 <= r^2}, leaves of complex dimension 2
ZooEntry make_fattened_ball3(double r = 0.5);

std::vector<std::string> zoo_ids();
ZooEntry make_zoo_entry(const std::string& id, const std::map<std::string, double>& params = {});

// maximum nearest-neighbour distance
double mesh_pitch(const std::vector<RVec>& mesh);

}  // namespace dfindex
