#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dfindex/error.hpp"
#include "dfindex/jet.hpp"
#include "dfindex/types.hpp"

namespace dfindex {

class WirtingerJet;

struct DomainSpec {
  std::string id;
  int n = 2;
  std::function<double(std::span<const double>)> rho;
  // forward-mode evaluators; when absent, jets fall back to finite differences
  std::function<Jet2(std::span<const Jet2>)> rho_jet2;
  std::function<Jet3(std::span<const Jet3>)> rho_jet3;
  // independent closed-form jets, used for validation only
  std::function<WirtingerJet(const RVec&, int)> analytic_oracle;
  RVec box_lo, box_hi;
  double scale = 1.0;     // characteristic length for finite-difference steps
  double diameter = 2.0;  // used for the collar width and exactness tolerances
  double collar_width = 0.0;  // distance collar half-width when the default fraction exceeds the reach

  int real_dim() const { return 2 * n; }
  bool in_box(const RVec& x) const;
  double eval(const RVec& x) const;
};

// Builds a DomainSpec from a generic callable f(std::span<const T>) -> T.
template <class F>
DomainSpec make_domain(std::string id, int n, F f, RVec lo, RVec hi, double scale, double diameter) {
  DomainSpec d;
  d.id = std::move(id);
  d.n = n;
  d.rho = [f](std::span<const double> x) { return f(x); };
  d.rho_jet2 = [f](std::span<const Jet2> x) { return f(x); };
  d.rho_jet3 = [f](std::span<const Jet3> x) { return f(x); };
  d.box_lo = std::move(lo);
  d.box_hi = std::move(hi);
  d.scale = scale;
  d.diameter = diameter;
  return d;
}

// Real jets of a real function in R^{2n} with Wirtinger views.
class WirtingerJet {
 public:
  WirtingerJet() = default;
  WirtingerJet(int n, int order) : n_(n), order_(order) {
    int d = 2 * n;
    grad_ = RVec::Zero(d);
    hess_ = RMat::Zero(d, d);
    if (order >= 3) third_.assign(static_cast<size_t>(d * d * d), 0.0);
  }
  template <int O>
  static WirtingerJet from_jet(const Jet<O>& j, int n, int order);

  int n() const { return n_; }
  int order() const { return order_; }
  double value() const { return value_; }
  const RVec& grad() const { return grad_; }
  const RMat& hess() const { return hess_; }
  double third(int a, int b, int c) const { return third_[idx(a, b, c)]; }

  void set_value(double v) { value_ = v; }
  RVec& grad() { return grad_; }
  RMat& hess() { return hess_; }
  void set_third(int a, int b, int c, double v);  // fills all permutations

  CVec dz() const;     // df/dz_j
  CVec dzbar() const;  // df/dzbar_j
  CMat mixed() const;  // d^2 f / dz_i dzbar_j
  CMat pure() const;   // d^2 f / dz_i dz_j

  // contractions on complexified real representatives (see coeff_to_real_rep)
  cplx hess_form(const CVec& X, const CVec& Y) const;  // X^T H conj(Y)
  cplx third_form(const CVec& A, const CVec& B, const CVec& C) const;
  cplx directional(const CVec& X) const;  // X^T grad

 private:
  size_t idx(int a, int b, int c) const {
    int d = 2 * n_;
    return static_cast<size_t>((a * d + b) * d + c);
  }
  int n_ = 0;
  int order_ = 0;
  double value_ = 0.0;
  RVec grad_;
  RMat hess_;
  std::vector<double> third_;
};

template <int O>
WirtingerJet WirtingerJet::from_jet(const Jet<O>& j, int n, int order) {
  WirtingerJet w(n, order);
  int d = 2 * n;
  w.value_ = j.value();
  for (int a = 0; a < d; ++a) w.grad_(a) = j.d(a);
  if (order >= 2)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) w.hess_(a, b) = j.d(a, b);
  if (order >= 3)
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b)
        for (int c = b; c < d; ++c) w.set_third(a, b, c, j.d(a, b, c));
  return w;
}

WirtingerJet wirtinger_jet(const DomainSpec& domain, const RVec& point, int order);

// finite-difference jet of any scalar function, one Richardson level
WirtingerJet fd_jet(const std::function<double(const RVec&)>& f, const RVec& x, int n, int order, double h);

// max relative mismatch between two jets over all entries up to order
double jet_mismatch(const WirtingerJet& a, const WirtingerJet& b, int order);

struct HermitianEigen {
  std::vector<double> values;  // ascending
  CMat vectors;                // columns match values
};

HermitianEigen hermitian_eig(const CMat& H);
double hermitian_min_eig(const CMat& H);

cplx third_contraction(const WirtingerJet& jet, const CVec& A, const CVec& B, const CVec& C);

}  // namespace dfindex
