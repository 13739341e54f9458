#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "dfindex/error.hpp"
#include "dfindex/types.hpp"

namespace testing_support {

// least-squares slope of log(residual) against log(h). Residuals below noise / h at every level
// count as exact: difference quotients amplify jet rounding like 1/h and there is nothing to converge
struct OrderFit {
  double order = 0.0;
  bool at_noise_floor = false;
};

inline OrderFit fit_order(const std::vector<double>& h, const std::vector<double>& r, double noise = 1e-9) {
  OrderFit f;
  bool all_small = true;
  for (size_t i = 0; i < r.size(); ++i) all_small = all_small && r[i] < noise / h[i];
  if (all_small) {
    f.at_noise_floor = true;
    return f;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(h.size());
  for (size_t i = 0; i < h.size(); ++i) {
    double x = std::log(h[i]), y = std::log(std::max(r[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  f.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return f;
}

inline bool converges(const OrderFit& f, double min_order = 1.9) { return f.at_noise_floor || f.order >= min_order; }

inline dfindex::RVec random_point(std::mt19937_64& rng, const dfindex::RVec& lo, const dfindex::RVec& hi) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  dfindex::RVec x(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) x(i) = lo(i) + (hi(i) - lo(i)) * U(rng);
  return x;
}

inline dfindex::CMat random_unitary(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> G;
  dfindex::CMat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = dfindex::cplx(G(rng), G(rng));
  Eigen::HouseholderQR<dfindex::CMat> qr(A);
  return qr.householderQ() * dfindex::CMat::Identity(n, n);
}

template <class F>
bool throws_kind(F&& f, dfindex::ErrorKind k) {
  try {
    f();
  } catch (const dfindex::Error& e) {
    return e.kind() == k;
  }
  return false;
}

}  // namespace testing_support
