#include "dfindex/geometry_core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace dfindex {

bool DomainSpec::in_box(const RVec& x) const {
  if (x.size() != 2 * n) return false;
  for (int i = 0; i < 2 * n; ++i)
    if (!(x(i) >= box_lo(i) && x(i) <= box_hi(i))) return false;
  return true;
}

double DomainSpec::eval(const RVec& x) const {
  if (!in_box(x)) throw Error(ErrorKind::EvaluationDomain, "point outside bounding box of " + id);
  double v = rho(std::span<const double>(x.data(), static_cast<size_t>(x.size())));
  if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "defining function of " + id + " is not finite");
  return v;
}

void WirtingerJet::set_third(int a, int b, int c, double v) {
  int p[3] = {a, b, c};
  std::sort(p, p + 3);
  do {
    third_[idx(p[0], p[1], p[2])] = v;
  } while (std::next_permutation(p, p + 3));
}

CVec WirtingerJet::dz() const {
  CVec out(n_);
  for (int j = 0; j < n_; ++j) out(j) = 0.5 * cplx(grad_(2 * j), -grad_(2 * j + 1));
  return out;
}

CVec WirtingerJet::dzbar() const { return dz().conjugate(); }

namespace {

CVec unit_dz(int n, int j) {
  CVec e = CVec::Zero(n);
  e(j) = 1.0;
  return coeff_to_real_rep(e);
}

}  // namespace

CMat WirtingerJet::mixed() const {
  CMat m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = hess_form(unit_dz(n_, i), unit_dz(n_, j));
  return m;
}

CMat WirtingerJet::pure() const {
  CMat m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = hess_form(unit_dz(n_, i), unit_dz(n_, j).conjugate());
  return m;
}

cplx WirtingerJet::hess_form(const CVec& X, const CVec& Y) const {
  if (order_ < 2) throw Error(ErrorKind::OrderTooLow, "Hessian needs an order-2 jet");
  int d = 2 * n_;
  cplx s = 0.0;
  for (int a = 0; a < d; ++a) {
    if (X(a) == 0.0) continue;
    cplx row = 0.0;
    for (int b = 0; b < d; ++b) row += hess_(a, b) * std::conj(Y(b));
    s += X(a) * row;
  }
  return s;
}

cplx WirtingerJet::third_form(const CVec& A, const CVec& B, const CVec& C) const {
  if (order_ < 3) throw Error(ErrorKind::OrderTooLow, "third derivatives need an order-3 jet");
  int d = 2 * n_;
  cplx s = 0.0;
  for (int a = 0; a < d; ++a) {
    if (A(a) == 0.0) continue;
    for (int b = 0; b < d; ++b) {
      cplx ab = A(a) * B(b);
      if (ab == 0.0) continue;
      cplx acc = 0.0;
      for (int c = 0; c < d; ++c) acc += third_[idx(a, b, c)] * std::conj(C(c));
      s += ab * acc;
    }
  }
  return s;
}

cplx WirtingerJet::directional(const CVec& X) const {
  cplx s = 0.0;
  for (int a = 0; a < 2 * n_; ++a) s += X(a) * grad_(a);
  return s;
}

WirtingerJet wirtinger_jet(const DomainSpec& domain, const RVec& point, int order) {
  if (order < 1 || order > 3) throw Error(ErrorKind::OrderTooLow, "jet order must be 1, 2 or 3");
  if (!domain.in_box(point)) throw Error(ErrorKind::EvaluationDomain, "point outside bounding box of " + domain.id);
  const int d = domain.real_dim();
  std::span<const double> x(point.data(), static_cast<size_t>(d));
  WirtingerJet out;
  if (order <= 2 && domain.rho_jet2) {
    auto s = seed<2>(x);
    out = WirtingerJet::from_jet(domain.rho_jet2(std::span<const Jet2>(s.data(), d)), domain.n, order);
  } else if (domain.rho_jet3) {
    auto s = seed<3>(x);
    out = WirtingerJet::from_jet(domain.rho_jet3(std::span<const Jet3>(s.data(), d)), domain.n, order);
  } else {
    out = fd_jet([&](const RVec& y) { return domain.eval(y); }, point, domain.n, order, 1e-3 * domain.scale);
  }
  bool finite = std::isfinite(out.value()) && out.grad().allFinite() && out.hess().allFinite();
  if (!finite) throw Error(ErrorKind::NonFinite, "jet of " + domain.id + " is not finite");
  return out;
}

namespace {

using Offset = std::array<int, 6>;

class Lattice {
 public:
  Lattice(const std::function<double(const RVec&)>& f, const RVec& x, double h) : f_(f), x_(x), h_(h) {}
  double at(const Offset& o) {
    auto it = cache_.find(o);
    if (it != cache_.end()) return it->second;
    RVec y = x_;
    for (int i = 0; i < x_.size(); ++i) y(i) += h_ * o[i];
    double v = f_(y);
    cache_.emplace(o, v);
    return v;
  }
  double at(std::initializer_list<std::pair<int, int>> moves) {
    Offset o{};
    for (auto [axis, k] : moves) o[axis] += k;
    return at(o);
  }

 private:
  const std::function<double(const RVec&)>& f_;
  RVec x_;
  double h_;
  std::map<Offset, double> cache_;
};

struct RawJet {
  double value;
  RVec g;
  RMat H;
  std::vector<double> T;
};

RawJet raw_fd(const std::function<double(const RVec&)>& f, const RVec& x, int order, double s) {
  const int d = static_cast<int>(x.size());
  Lattice L(f, x, s);
  RawJet r;
  r.value = L.at(Offset{});
  r.g = RVec::Zero(d);
  r.H = RMat::Zero(d, d);
  for (int a = 0; a < d; ++a) r.g(a) = (L.at({{a, 1}}) - L.at({{a, -1}})) / (2 * s);
  if (order >= 2) {
    for (int a = 0; a < d; ++a) {
      r.H(a, a) = (L.at({{a, 1}}) - 2 * r.value + L.at({{a, -1}})) / (s * s);
      for (int b = a + 1; b < d; ++b) {
        double v = (L.at({{a, 1}, {b, 1}}) - L.at({{a, 1}, {b, -1}}) - L.at({{a, -1}, {b, 1}}) + L.at({{a, -1}, {b, -1}})) /
                   (4 * s * s);
        r.H(a, b) = r.H(b, a) = v;
      }
    }
  }
  if (order >= 3) {
    r.T.assign(static_cast<size_t>(d * d * d), 0.0);
    auto put = [&](int a, int b, int c, double v) {
      int p[3] = {a, b, c};
      std::sort(p, p + 3);
      do {
        r.T[static_cast<size_t>((p[0] * d + p[1]) * d + p[2])] = v;
      } while (std::next_permutation(p, p + 3));
    };
    double s3 = s * s * s;
    for (int a = 0; a < d; ++a) {
      put(a, a, a, (L.at({{a, 2}}) - 2 * L.at({{a, 1}}) + 2 * L.at({{a, -1}}) - L.at({{a, -2}})) / (2 * s3));
      for (int b = 0; b < d; ++b) {
        if (b == a) continue;
        double plus = L.at({{a, 1}, {b, 1}}) - 2 * L.at({{b, 1}}) + L.at({{a, -1}, {b, 1}});
        double minus = L.at({{a, 1}, {b, -1}}) - 2 * L.at({{b, -1}}) + L.at({{a, -1}, {b, -1}});
        put(a, a, b, (plus - minus) / (2 * s3));
      }
      for (int b = a + 1; b < d; ++b)
        for (int c = b + 1; c < d; ++c) {
          double acc = 0.0;
          for (int sa : {1, -1})
            for (int sb : {1, -1})
              for (int sc : {1, -1}) acc += sa * sb * sc * L.at({{a, sa}, {b, sb}, {c, sc}});
          put(a, b, c, acc / (8 * s3));
        }
    }
  }
  return r;
}

}  // namespace

WirtingerJet fd_jet(const std::function<double(const RVec&)>& f, const RVec& x, int n, int order, double h) {
  RawJet coarse = raw_fd(f, x, order, h);
  RawJet fine = raw_fd(f, x, order, 0.5 * h);
  auto rich = [](double c, double fn) { return (4.0 * fn - c) / 3.0; };
  WirtingerJet w(n, order);
  const int d = 2 * n;
  w.set_value(fine.value);
  for (int a = 0; a < d; ++a) w.grad()(a) = rich(coarse.g(a), fine.g(a));
  if (order >= 2)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) w.hess()(a, b) = rich(coarse.H(a, b), fine.H(a, b));
  if (order >= 3)
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b)
        for (int c = b; c < d; ++c) {
          size_t k = static_cast<size_t>((a * d + b) * d + c);
          w.set_third(a, b, c, rich(coarse.T[k], fine.T[k]));
        }
  return w;
}

double jet_mismatch(const WirtingerJet& a, const WirtingerJet& b, int order) {
  double scale = std::max({1.0, std::abs(a.value()), a.grad().cwiseAbs().maxCoeff(),
                           order >= 2 ? a.hess().cwiseAbs().maxCoeff() : 0.0});
  double worst = std::abs(a.value() - b.value());
  const int d = 2 * a.n();
  for (int i = 0; i < d; ++i) worst = std::max(worst, std::abs(a.grad()(i) - b.grad()(i)));
  if (order >= 2)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) worst = std::max(worst, std::abs(a.hess()(i, j) - b.hess()(i, j)));
  double tscale = 0.0;
  double tworst = 0.0;
  if (order >= 3)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          tscale = std::max(tscale, std::abs(a.third(i, j, k)));
          tworst = std::max(tworst, std::abs(a.third(i, j, k) - b.third(i, j, k)));
        }
  double rel = worst / scale;
  if (order >= 3) rel = std::max(rel, tworst / std::max(1.0, tscale));
  return rel;
}

HermitianEigen hermitian_eig(const CMat& H) {
  const int n = static_cast<int>(H.rows());
  if (H.rows() != H.cols()) throw Error(ErrorKind::NotHermitian, "matrix is not square");
  double norm = H.norm();
  double defect = (H - H.adjoint()).norm();
  if (defect > 1e-8 * std::max(norm, 1e-300) && defect > 0.0)
    throw Error(ErrorKind::NotHermitian, "symmetry defect " + std::to_string(defect));
  CMat A = 0.5 * (H + H.adjoint());
  CMat V = CMat::Identity(n, n);
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::norm(A(p, q));
    if (std::sqrt(off) <= 1e-17 * std::max(norm, 1e-300)) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        double b = std::abs(A(p, q));
        if (b == 0.0) continue;
        cplx phase = A(p, q) / b;
        double app = A(p, p).real(), aqq = A(q, q).real();
        double theta = (aqq - app) / (2.0 * b);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        // U = D P on the (p, q) plane, D = diag(1, conj(phase))
        CMat U = CMat::Identity(n, n);
        U(p, p) = c;
        U(p, q) = s;
        U(q, p) = -s * std::conj(phase);
        U(q, q) = c * std::conj(phase);
        A = U.adjoint() * A * U;
        A(p, q) = A(q, p) = 0.0;
        V = V * U;
      }
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return A(i, i).real() < A(j, j).real(); });
  HermitianEigen out;
  out.vectors = CMat(n, n);
  for (int k = 0; k < n; ++k) {
    out.values.push_back(A(order[k], order[k]).real());
    out.vectors.col(k) = V.col(order[k]);
  }
  return out;
}

double hermitian_min_eig(const CMat& H) { return hermitian_eig(H).values.front(); }

cplx third_contraction(const WirtingerJet& jet, const CVec& A, const CVec& B, const CVec& C) {
  auto rep = [&](const CVec& v) { return v.size() == jet.n() ? coeff_to_real_rep(v) : v; };
  return jet.third_form(rep(A), rep(B), rep(C));
}

}  // namespace dfindex
