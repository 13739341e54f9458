#pragma once

#include <array>
#include <cmath>
#include <span>

namespace dfindex {

// Truncated multivariate Taylor jet (forward mode), derivatives up to Order
// in at most kMaxDim variables. Only sorted index tuples are stored.
template <int Order>
class Jet {
  static_assert(Order >= 1 && Order <= 3);

 public:
  static constexpr int kMaxDim = 6;

  Jet() = default;
  Jet(double v) : v_(v) {}  // NOLINT: constants mix freely with jets

  static Jet variable(double v, int dim, int index) {
    Jet j(v);
    j.dim_ = dim;
    j.g_[index] = 1.0;
    return j;
  }

  double value() const { return v_; }
  int dim() const { return dim_; }
  double d(int i) const { return g_[i]; }
  double d(int i, int j) const {
    if constexpr (Order >= 2) {
      if (i > j) std::swap(i, j);
      return h_[i * kMaxDim + j];
    }
    return 0.0;
  }
  double d(int i, int j, int k) const {
    if constexpr (Order >= 3) {
      sort3(i, j, k);
      return t_[(i * kMaxDim + j) * kMaxDim + k];
    }
    return 0.0;
  }

  Jet operator-() const {
    Jet r = *this;
    r.v_ = -v_;
    r.scale_derivs(-1.0);
    return r;
  }

  Jet& operator+=(const Jet& o) {
    int n = std::max(dim_, o.dim_);
    v_ += o.v_;
    for (int i = 0; i < n; ++i) g_[i] += o.g_[i];
    if constexpr (Order >= 2)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) h_[i * kMaxDim + j] += o.h_[i * kMaxDim + j];
    if constexpr (Order >= 3)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          for (int k = j; k < n; ++k) t_[(i * kMaxDim + j) * kMaxDim + k] += o.t_[(i * kMaxDim + j) * kMaxDim + k];
    dim_ = n;
    return *this;
  }
  Jet& operator-=(const Jet& o) { return *this += -o; }
  Jet& operator+=(double c) {
    v_ += c;
    return *this;
  }
  Jet& operator-=(double c) {
    v_ -= c;
    return *this;
  }
  Jet& operator*=(double c) {
    v_ *= c;
    scale_derivs(c);
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = mul(*this, o); }
  Jet& operator/=(const Jet& o) { return *this = mul(*this, o.reciprocal()); }
  Jet& operator/=(double c) { return *this *= (1.0 / c); }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(const Jet& a, const Jet& b) { return mul(a, b); }
  friend Jet operator/(const Jet& a, const Jet& b) { return mul(a, b.reciprocal()); }
  friend Jet operator+(Jet a, double c) { return a += c; }
  friend Jet operator+(double c, Jet a) { return a += c; }
  friend Jet operator-(Jet a, double c) { return a -= c; }
  friend Jet operator-(double c, const Jet& a) { return (-a) += c; }
  friend Jet operator*(Jet a, double c) { return a *= c; }
  friend Jet operator*(double c, Jet a) { return a *= c; }
  friend Jet operator/(Jet a, double c) { return a *= (1.0 / c); }
  friend Jet operator/(double c, const Jet& a) { return a.reciprocal() *= c; }

  // f(u) given f and its first three derivatives at u.value()
  Jet compose(double f0, double f1, double f2, double f3) const {
    Jet r;
    r.dim_ = dim_;
    r.v_ = f0;
    const int n = dim_;
    for (int i = 0; i < n; ++i) r.g_[i] = f1 * g_[i];
    if constexpr (Order >= 2)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) r.h_[i * kMaxDim + j] = f2 * g_[i] * g_[j] + f1 * h_[i * kMaxDim + j];
    if constexpr (Order >= 3)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          for (int k = j; k < n; ++k) {
            double ui = g_[i], uj = g_[j], uk = g_[k];
            r.t_[(i * kMaxDim + j) * kMaxDim + k] =
                f3 * ui * uj * uk +
                f2 * (h_[i * kMaxDim + j] * uk + h_[i * kMaxDim + k] * uj + h_[j * kMaxDim + k] * ui) +
                f1 * t_[(i * kMaxDim + j) * kMaxDim + k];
          }
    return r;
  }

  Jet reciprocal() const {
    double u = v_;
    return compose(1.0 / u, -1.0 / (u * u), 2.0 / (u * u * u), -6.0 / (u * u * u * u));
  }

 private:
  static void sort3(int& i, int& j, int& k) {
    if (i > j) std::swap(i, j);
    if (j > k) std::swap(j, k);
    if (i > j) std::swap(i, j);
  }

  void scale_derivs(double c) {
    for (auto& x : g_) x *= c;
    if constexpr (Order >= 2)
      for (auto& x : h_) x *= c;
    if constexpr (Order >= 3)
      for (auto& x : t_) x *= c;
  }

  static Jet mul(const Jet& a, const Jet& b) {
    Jet r;
    const int n = std::max(a.dim_, b.dim_);
    r.dim_ = n;
    r.v_ = a.v_ * b.v_;
    for (int i = 0; i < n; ++i) r.g_[i] = a.g_[i] * b.v_ + a.v_ * b.g_[i];
    if constexpr (Order >= 2)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          int ij = i * kMaxDim + j;
          r.h_[ij] = a.h_[ij] * b.v_ + a.g_[i] * b.g_[j] + a.g_[j] * b.g_[i] + a.v_ * b.h_[ij];
        }
    if constexpr (Order >= 3)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          for (int k = j; k < n; ++k) {
            int ij = i * kMaxDim + j, ik = i * kMaxDim + k, jk = j * kMaxDim + k;
            int ijk = ij * kMaxDim + k;
            r.t_[ijk] = a.t_[ijk] * b.v_ + a.h_[ij] * b.g_[k] + a.h_[ik] * b.g_[j] + a.h_[jk] * b.g_[i] +
                        a.g_[i] * b.h_[jk] + a.g_[j] * b.h_[ik] + a.g_[k] * b.h_[ij] + a.v_ * b.t_[ijk];
          }
    return r;
  }

  int dim_ = 0;
  double v_ = 0.0;
  std::array<double, kMaxDim> g_{};
  std::array<double, (Order >= 2 ? kMaxDim * kMaxDim : 1)> h_{};
  std::array<double, (Order >= 3 ? kMaxDim * kMaxDim * kMaxDim : 1)> t_{};
};

using Jet1 = Jet<1>;
using Jet2 = Jet<2>;
using Jet3 = Jet<3>;

// plain doubles go through the same unqualified calls as jets
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

inline double value(double x) { return x; }
template <int O>
double value(const Jet<O>& x) {
  return x.value();
}

template <int O>
Jet<O> exp(const Jet<O>& u) {
  double e = std::exp(u.value());
  return u.compose(e, e, e, e);
}
template <int O>
Jet<O> log(const Jet<O>& u) {
  double x = u.value();
  return u.compose(std::log(x), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x));
}
template <int O>
Jet<O> sin(const Jet<O>& u) {
  double s = std::sin(u.value()), c = std::cos(u.value());
  return u.compose(s, c, -s, -c);
}
template <int O>
Jet<O> cos(const Jet<O>& u) {
  double s = std::sin(u.value()), c = std::cos(u.value());
  return u.compose(c, -s, -c, s);
}
template <int O>
Jet<O> sqrt(const Jet<O>& u) {
  double r = std::sqrt(u.value());
  return u.compose(r, 0.5 / r, -0.25 / (r * u.value()), 0.375 / (r * u.value() * u.value()));
}
template <int O>
Jet<O> pow(const Jet<O>& u, double p) {
  double x = u.value();
  double f0 = std::pow(x, p);
  return u.compose(f0, p * f0 / x, p * (p - 1) * f0 / (x * x), p * (p - 1) * (p - 2) * f0 / (x * x * x));
}

template <class T>
T square(const T& x) {
  return x * x;
}

// seed variables x_i for i < dim
template <int O>
std::array<Jet<O>, Jet<O>::kMaxDim> seed(std::span<const double> x) {
  std::array<Jet<O>, Jet<O>::kMaxDim> out{};
  int dim = static_cast<int>(x.size());
  for (int i = 0; i < dim; ++i) out[i] = Jet<O>::variable(x[i], dim, i);
  return out;
}

}  // namespace dfindex
