#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace dfindex {

using cplx = std::complex<double>;

// real vectors live in R^{2n} with ordering (x1, y1, x2, y2, ...); n <= 3
using RVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1>;
using RMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;
using CVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, 6, 1>;
using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;

inline constexpr double kPi = 3.14159265358979323846;

inline RVec rvec(std::initializer_list<double> v) {
  RVec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// complex coordinates z_j = x_j + i y_j
inline CVec to_complex(const RVec& x) {
  CVec z(x.size() / 2);
  for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = cplx(x(2 * j), x(2 * j + 1));
  return z;
}

inline RVec to_real(const CVec& z) {
  RVec x(2 * z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    x(2 * j) = z(j).real();
    x(2 * j + 1) = z(j).imag();
  }
  return x;
}

// (1,0) coefficient vector a -> sum a_j d/dz_j as a complexified real vector
inline CVec coeff_to_real_rep(const CVec& a) {
  CVec v(2 * a.size());
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    v(2 * j) = 0.5 * a(j);
    v(2 * j + 1) = cplx(0.0, -0.5) * a(j);
  }
  return v;
}

// inverse of coeff_to_real_rep on (1,0) vectors
inline CVec real_rep_to_coeff(const CVec& v) {
  CVec a(v.size() / 2);
  for (Eigen::Index j = 0; j < a.size(); ++j) a(j) = v(2 * j) + cplx(0.0, 1.0) * v(2 * j + 1);
  return a;
}

// ambient complex structure: J d/dx = d/dy, J d/dy = -d/dx
inline RVec apply_J(const RVec& v) {
  RVec w(v.size());
  for (Eigen::Index j = 0; j + 1 < v.size(); j += 2) {
    w(j) = -v(j + 1);
    w(j + 1) = v(j);
  }
  return w;
}

inline CVec apply_J(const CVec& v) {
  CVec w(v.size());
  for (Eigen::Index j = 0; j + 1 < v.size(); j += 2) {
    w(j) = -v(j + 1);
    w(j + 1) = v(j);
  }
  return w;
}

inline RMat J_matrix(int dim) {
  RMat m = RMat::Zero(dim, dim);
  for (int j = 0; j + 1 < dim; j += 2) {
    m(j + 1, j) = 1.0;
    m(j, j + 1) = -1.0;
  }
  return m;
}

// Hermitian coefficient product <a, b> = sum a_j conj(b_j)
inline cplx herm(const CVec& a, const CVec& b) {
  cplx s = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) s += a(j) * std::conj(b(j));
  return s;
}

inline std::vector<double> to_std(const RVec& v) { return {v.data(), v.data() + v.size()}; }

inline RVec from_std(const std::vector<double>& v) {
  RVec out(static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

}  // namespace dfindex
