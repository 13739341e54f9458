#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dfindex/sigma_geometry.hpp"

namespace dfindex {

// a 1-form on a chart's parameter space; components pair with du_k
struct OneFormSource {
  std::string id;
  SigmaChart chart;
  std::function<std::vector<double>(const Param&)> eval;
};

OneFormSource theta_source(const DomainSpec& domain, const SigmaChart& chart, const DistanceConfig& cfg = {});
OneFormSource real_form_source(const DomainSpec& domain, const SigmaChart& chart, const DistanceConfig& cfg = {});
OneFormSource scaled_source(const OneFormSource& src, double factor);

struct PathVertex {
  int chart = 0;
  Param u;
};

struct PathInSigma {
  std::string name;
  std::vector<PathVertex> vertices;
  bool closed = false;
};

PathInSigma polyline(int chart, const std::vector<Param>& points, bool closed, std::string name = "");
PathInSigma reversed(const PathInSigma& p);
PathInSigma rotated(const PathInSigma& p, size_t shift);  // closed loops: start at another vertex

using Atlas = std::vector<OneFormSource>;

double integrate_theta(const Atlas& atlas, const PathInSigma& path, double tol = 1e-8);
double integrate_theta(const OneFormSource& form, const PathInSigma& path, double tol = 1e-8);
double period(const Atlas& atlas, const PathInSigma& loop, double tol = 1e-8);
double period(const OneFormSource& form, const PathInSigma& loop, double tol = 1e-8);

struct PeriodEntry {
  std::string loop;
  double value = 0.0;
};

struct CohomologyVerdict {
  std::vector<PeriodEntry> periods;
  bool exact = true;
  double tolerance = 0.0;
  std::string classification() const { return exact ? "Exact" : "Obstructed"; }
};

CohomologyVerdict classify(const std::vector<PeriodEntry>& periods, double tol);
double default_exact_tolerance(double max_theta, double diameter);

enum class PotentialStrategy { SpanningTree, LeafSegment };

// phi on a tensor grid (Chebyshev-Lobatto, or uniform on periodic axes) with a smooth interpolant
class PotentialField {
 public:
  const SigmaChart& chart() const { return source_.chart; }
  const OneFormSource& source() const { return source_; }
  const Param& basepoint() const { return base_; }
  const std::vector<std::vector<double>>& axes() const { return axes_; }
  const std::vector<double>& values() const { return values_; }
  double gradient_residual() const { return gradient_residual_; }
  double path_disagreement() const { return path_disagreement_; }
  bool identically_zero(double tol = 1e-12) const;

  double value_at(const Param& u) const;
  void write_csv(const std::string& path) const;

 private:
  friend PotentialField build_potential(const OneFormSource&, const Param&, const CohomologyVerdict&, int,
                                        std::uint64_t, PotentialStrategy);
  OneFormSource source_;
  Param base_;
  std::vector<std::vector<double>> axes_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> values_;
  double gradient_residual_ = 0.0;
  double path_disagreement_ = 0.0;
};

PotentialField build_potential(const OneFormSource& form, const Param& basepoint, const CohomologyVerdict& verdict,
                               int resolution = 12, std::uint64_t seed = 1,
                               PotentialStrategy strategy = PotentialStrategy::SpanningTree);

// leafwise potentials on a trivially foliated Sigma, interpolated in the leaf label
struct FoliationAtlas {
  std::function<SigmaChart(double)> leaf_chart;
  std::function<double(const RVec&)> leaf_of;  // boundary point -> leaf label
  ParamRange leaf_range;
};

class FoliationPotential {
 public:
  FoliationPotential(FoliationAtlas atlas, std::vector<double> leaves, std::vector<PotentialField> fields)
      : atlas_(std::move(atlas)), leaves_(std::move(leaves)), fields_(std::move(fields)) {}
  const std::vector<PotentialField>& fields() const { return fields_; }
  const std::vector<double>& leaves() const { return leaves_; }
  const FoliationAtlas& atlas() const { return atlas_; }
  double value_at(const Param& u, double leaf) const;
  double max_abs() const;

 private:
  FoliationAtlas atlas_;
  std::vector<double> leaves_;
  std::vector<PotentialField> fields_;
};

FoliationPotential build_leaf_potentials(const DomainSpec& domain, const FoliationAtlas& atlas, int leaf_count,
                                         const CohomologyVerdict& verdict, int resolution = 12,
                                         std::uint64_t seed = 1, const DistanceConfig& cfg = {});

struct CollarSpec {
  double tube_width = 0.1;    // tangential reach off the chart inside the boundary
  double collar_width = 0.1;  // reach along the inward normal
};

// C^3 step: 1 on [0, 1/2], 0 on [1, inf)
double collar_bump(double s);

// value of a Sigma-defined function at a boundary point, with the tangential distance to its chart
using SigmaValue = std::function<std::pair<double, double>(const RVec& foot)>;

class PsiEvaluator {
 public:
  PsiEvaluator() = default;
  PsiEvaluator(const DomainSpec& domain, SigmaValue value, CollarSpec collar, std::string provenance,
               DistanceConfig cfg = {});

  double operator()(const RVec& z) const;
  double on_sigma_value(const RVec& foot) const;  // unblended value at a boundary point
  bool is_zero() const { return !value_; }
  // psi vanishes on the ball of this radius around z
  bool vanishes_near(const RVec& z, double radius) const;
  const std::string& provenance() const { return provenance_; }
  const CollarSpec& collar() const { return collar_; }
  const SigmaValue& sigma_value() const { return value_; }
  const DistanceConfig& distance_config() const { return cfg_; }

 private:
  const DomainSpec* domain_ = nullptr;
  SigmaValue value_;
  CollarSpec collar_;
  std::string provenance_ = "zero";
  DistanceConfig cfg_;
};

PsiEvaluator zero_psi();
PsiEvaluator extend_to_collar(const DomainSpec& domain, const PotentialField& phi, const CollarSpec& collar,
                              const DistanceConfig& cfg = {});
PsiEvaluator extend_to_collar(const DomainSpec& domain, const FoliationPotential& phi, const CollarSpec& collar,
                              const DistanceConfig& cfg = {});
// psi + c, for the non-uniqueness family
PsiEvaluator shifted_psi(const DomainSpec& domain, const PsiEvaluator& psi, double c);

}  // namespace dfindex
