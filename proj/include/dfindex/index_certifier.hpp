#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dfindex/domain_zoo.hpp"
#include "dfindex/levi_analysis.hpp"

namespace dfindex {

// geometry at one Sigma sample for one near-null direction; independent of psi
struct CriterionSample {
  RVec position;
  CVec L;       // unit (1,0) coefficients
  cplx h;       // Hess_delta(N, L)
  double T3 = 0.0;
  double T3_imag = 0.0;
  RVec A, B;    // L's real representative = A + iB
};

std::vector<CriterionSample> criterion_geometry(const DomainSpec& domain, const SigmaPointSet& sigma,
                                                const DistanceConfig& cfg = {});

struct PsiDerivatives {
  cplx Lbar;         // Lbar psi
  double hess = 0.0;  // Hess_psi(L, L)
};

// boundary-projected centred differences with one Richardson level
PsiDerivatives psi_derivatives(const PsiEvaluator& psi, const CriterionSample& s, double step);

struct CriterionReport {
  double eta = 0.0;
  double slack = 0.0;
  bool vacuous = false;
  std::vector<double> lhs;  // one per sample/direction
  std::vector<RVec> positions;
  double max_lhs = 0.0;     // NaN when vacuous
  bool certified = false;
  size_t argmax = 0;
  // real-curve extras
  std::optional<double> C_eta;
  std::vector<double> a_values, b_values;
  std::string curve_case;
};

double criterion_lhs(double eta, const CriterionSample& s, const PsiDerivatives& d);
CriterionReport evaluate_criterion(const std::vector<CriterionSample>& samples, const std::vector<PsiDerivatives>& d,
                                   double eta, double slack);
CriterionReport boundary_criterion(const DomainSpec& domain, const SigmaPointSet& sigma, const PsiEvaluator& psi,
                                   double eta, double slack, const DistanceConfig& cfg = {});

struct OracleReport {
  double eta = 0.0;
  double min_eigenvalue = 0.0;
  double min_normalized = 0.0;  // min over points of lambda_min / |M|
  size_t points = 0;
  size_t worst_index = 0;
  bool certified = false;
};

// rho = delta e^psi, or override e^psi when an override is given
OracleReport interior_psh_oracle(const DomainSpec& domain, const PsiEvaluator& psi, double eta,
                                 const std::vector<RVec>& mesh, double slack_rel = 1e-9,
                                 const std::function<WirtingerJet(const RVec&)>& rho_override = {},
                                 const DistanceConfig& cfg = {});

// boundary points pushed inward along the normal by each depth
std::vector<RVec> interior_shell(const DomainSpec& domain, const std::vector<RVec>& boundary,
                                 const std::vector<double>& depths);

struct EtaResult {
  double eta = 0.0;
  CriterionReport criterion;
  std::optional<OracleReport> oracle;
  bool certified = false;
};

struct IndexCertificate {
  std::string domain_id;
  std::vector<double> eta_grid;
  std::vector<EtaResult> results;
  double bound = 0.0;
  bool has_certificate = false;
  bool monotone = true;
  std::string verdict;  // Vacuous, Exact, Obstructed
  std::string psi_provenance;
  std::map<std::string, double> sizes;
  std::map<std::string, double> tolerances;
  std::vector<std::string> diagnostics;
  std::vector<PeriodEntry> periods;

  void require_certificate() const;  // NoCertificate when nothing was certified
};

struct FamilySpec {
  int poly_degree = 2;
  int fourier_modes = 1;
  double coefficient_box = 4.0;
  int sweeps = 3;
  int line_iterations = 30;
};

struct EstimateOptions {
  std::vector<double> eta_grid = {0.5, 0.75, 0.9, 0.95, 0.99};
  size_t mesh_points = 4000;
  size_t max_criterion_samples = 128;
  size_t interior_base_points = 1700;
  std::vector<double> interior_depth_factors = {1.0, 1.5, 2.0};  // multiples of d0
  double d0_fraction = 1e-4;  // d0 as a fraction of the diameter
  std::optional<double> sigma_threshold;
  std::optional<double> boundary_slack;  // default 1e-4 x Levi scale
  double oracle_slack = 1e-9;
  int leaf_count = 8;
  int potential_resolution = 10;
  std::uint64_t seed = 1;
  FamilySpec family;
  DistanceConfig distance;
};

IndexCertificate estimate_index(const ZooEntry& entry, const EstimateOptions& opts = {});

// Sigma-side potential machinery shared by estimate_index and the CLI
struct SigmaPotential {
  CohomologyVerdict verdict;
  PsiEvaluator psi;               // -2 phi extended to the collar; zero when obstructed
  std::optional<FoliationPotential> leaves;
  std::optional<PotentialField> field;
};
SigmaPotential sigma_potential(const ZooEntry& entry, const EstimateOptions& opts = {});
// periods of theta on the entry's generator loops (leafwise for foliations), classified
CohomologyVerdict sigma_periods(const ZooEntry& entry, const DistanceConfig& cfg = {});
CollarSpec default_collar(const DomainSpec& domain, const DistanceConfig& cfg = {});

// residuals of the approximate dbar-equation over a compact part of Sigma
struct ResidualReport {
  std::vector<double> etas;
  std::vector<double> residuals;
  bool decreasing = false;
  std::string note;
};
ResidualReport residual_sequence(const DomainSpec& domain, const SigmaChart& chart, const std::vector<double>& etas,
                                 const std::function<PsiEvaluator(size_t, double)>& producer, double inner_fraction = 0.6,
                                 int quadrature = 8, const DistanceConfig& cfg = {});

// Caccioppoli-type estimate in one complex variable z_j
enum class PatchShape { Disc, Box };
struct PatchSpec {
  PatchShape shape = PatchShape::Disc;
  RVec center;       // real point in C^n
  int coordinate = 0;  // j
  double radius_U = 1.0;  // half-width for boxes
  double radius_V = 0.75;
  double radius_W = 0.5;
};
struct CaccioppoliReport {
  PatchSpec patch;
  int n = 1;
  double left = 0.0;
  double C = 0.0;
  double bound = 0.0;
  double hypothesis_max = 0.0;  // max of n|dbar f|^2 + Hess_f over U
  bool holds = false;
};
CaccioppoliReport caccioppoli_check(const PatchSpec& patch, const std::function<double(const RVec&)>& f, int n,
                                    int quadrature = 48);

CriterionReport real_curve_certify(const DomainSpec& domain, const SigmaChart& curve, double eta, double slack,
                                   size_t samples = 48, const DistanceConfig& cfg = {});
CriterionReport real_curve_certify(const ZooEntry& entry, double eta, double slack, size_t samples = 48,
                                   const DistanceConfig& cfg = {});

}  // namespace dfindex
