#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dfindex/levi_analysis.hpp"

namespace dfindex {

using Param = std::vector<double>;

enum class ChartKind { Complex, Real };

struct ParamRange {
  double lo = 0.0;
  double hi = 1.0;
  bool periodic = false;
};

struct SigmaChart {
  std::string id;
  ChartKind kind = ChartKind::Complex;
  int m = 1;                     // complex dimension, or real dimension for real charts
  std::vector<ParamRange> box;   // (x1, y1, ..., xm, ym) or (x1, ..., xm)
  std::optional<double> leaf;    // leaf label t of a foliation chart
  std::function<bool(const Param&)> contains;  // optional shape inside the box
  std::function<RVec(const Param&)> embed;
  // complex charts: (1,0) coefficient vectors of d/dz_j at u
  std::function<std::vector<CVec>(const Param&)> complex_tangents;
  // real charts: d/dx_j at u as real vectors
  std::function<std::vector<RVec>(const Param&)> real_tangents;
  // boundary point -> nearest parameter; may leave the box where embed stays on the boundary
  std::function<Param(const RVec&)> locate;
  int resolution = 16;

  int param_dim() const { return kind == ChartKind::Complex ? 2 * m : m; }
  bool in_domain(const Param& u) const;
  Param wrap(const Param& u) const;
  double step() const;
  // x_j directions as real vectors (2 Re of the (1,0) representative for complex charts)
  std::vector<RVec> x_directions(const Param& u) const;
};

// the same patch viewed as a real chart with 2m coordinates (x_j, y_j)
SigmaChart as_real_chart(const SigmaChart& chart);

// g(nabla_nu nu, X) at a boundary point
double nu_nu_pairing(const BoundaryPoint& bp, const RVec& X);

std::vector<double> theta_at(const DomainSpec& domain, const SigmaChart& chart, const Param& u,
                             const DistanceConfig& cfg = {});
std::vector<double> real_one_form_at(const DomainSpec& domain, const SigmaChart& chart, const Param& u,
                                     const DistanceConfig& cfg = {});

struct Lem1Residuals {
  double identity1 = 0.0;
  double identity2 = 0.0;
};
Lem1Residuals lem1_residuals(const DomainSpec& domain, const SigmaChart& chart, const Param& u, double h,
                             const DistanceConfig& cfg = {});

struct GridCell {
  int a = 0, b = 1;  // parameter plane
  std::array<Param, 4> corners;  // (0,0), (1,0), (1,1), (0,1)
  std::array<std::vector<double>, 4> forms;
};
double dtheta_residual(const GridCell& cell);

// complex samples h_j on a regular grid over the 2m chart parameters
struct ComplexGridField {
  int m = 1;
  std::vector<int> dims;       // 2m grid sizes
  std::vector<double> lo, step;
  std::vector<std::vector<cplx>> h;  // h[j][flat index], x-fastest ordering of dims
  size_t flat(const std::vector<int>& idx) const;
  size_t size() const;
};
double basicnoc_check(const ComplexGridField& field);
// h_j = Hess_delta(N, d/dz_j) on a (points)^{2m} grid of spacing h centred at u
ComplexGridField sample_h_field(const DomainSpec& domain, const SigmaChart& chart, const Param& u, double h,
                                int points = 3, const DistanceConfig& cfg = {});

struct NuResiduals {
  double re = 0.0;
  double im = 0.0;
  double derivative = 0.0;
};
NuResiduals nu_identity_residuals(const DomainSpec& domain, const SigmaChart& chart, const Param& u, double h,
                                  double threshold, const DistanceConfig& cfg = {});

struct OneFormSample {
  std::string chart_id;
  std::vector<int> dims;
  std::vector<Param> params;
  std::vector<RVec> positions;
  std::vector<std::vector<double>> components;
  std::vector<double> cell_residuals;  // plane (0,1), row-major over cells; NaN outside the chart
  void write_csv(const std::string& path) const;
};

enum class FormKind { Theta, Real };
OneFormSample sample_form(const DomainSpec& domain, const SigmaChart& chart, FormKind kind, int resolution,
                          const DistanceConfig& cfg = {});

}  // namespace dfindex
