#include "dfindex/domain_zoo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dfindex {

namespace generated {
void worm_core_jet(const double* x, double* out);
void worm_log_modulus_jet(const double* x, double* out);
}  // namespace generated

std::string sigma_kind_name(SigmaKind k) {
  switch (k) {
    case SigmaKind::Empty: return "Empty";
    case SigmaKind::PointSet: return "PointSet";
    case SigmaKind::ComplexSubmanifold: return "ComplexSubmanifold";
    case SigmaKind::Foliation: return "Foliation";
    case SigmaKind::RealCurve: return "RealCurve";
  }
  return "?";
}

const SigmaChart& ZooEntry::chart(const std::string& id) const {
  for (const auto& c : charts)
    if (c.id == id) return c;
  if (curve && curve->id == id) return *curve;
  throw Error(ErrorKind::ConfigInvalid, "no chart '" + id + "' on " + domain.id);
}

const PathInSigma& ZooEntry::loop(const std::string& name) const {
  for (const auto& l : loops)
    if (l.name == name) return l;
  throw Error(ErrorKind::ConfigInvalid, "no loop '" + name + "' on " + domain.id);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// closed-form jet algebra for the oracles -----------------------------------

WirtingerJet quadratic_jet(const RVec& x, const std::vector<int>& coords, double c, int order) {
  const int n = static_cast<int>(x.size()) / 2;
  WirtingerJet q(n, std::max(order, 2));
  double v = -c;
  for (int i : coords) {
    v += x(i) * x(i);
    q.grad()(i) = 2 * x(i);
    q.hess()(i, i) = 2.0;
  }
  q.set_value(v);
  return q;
}

// g(q) by the chain rule up to third order
WirtingerJet chain(const WirtingerJet& q, double g0, double g1, double g2, double g3, int order) {
  const int n = q.n(), d = 2 * n;
  WirtingerJet f(n, order);
  f.set_value(g0);
  for (int a = 0; a < d; ++a) f.grad()(a) = g1 * q.grad()(a);
  if (order >= 2)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) f.hess()(a, b) = g2 * q.grad()(a) * q.grad()(b) + g1 * q.hess()(a, b);
  if (order >= 3)
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b)
        for (int c = b; c < d; ++c) {
          const RVec& g = q.grad();
          const RMat& H = q.hess();
          double t = g3 * g(a) * g(b) * g(c) + g2 * (H(a, b) * g(c) + H(a, c) * g(b) + H(b, c) * g(a));
          if (q.order() >= 3) t += g1 * q.third(a, b, c);
          f.set_third(a, b, c, t);
        }
  return f;
}

void accumulate(WirtingerJet& acc, const WirtingerJet& f) {
  const int d = 2 * acc.n();
  acc.set_value(acc.value() + f.value());
  acc.grad() += f.grad();
  if (acc.order() >= 2) acc.hess() += f.hess();
  if (acc.order() >= 3)
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b)
        for (int c = b; c < d; ++c) acc.set_third(a, b, c, acc.third(a, b, c) + f.third(a, b, c));
}

WirtingerJet unpack(const double* v, int n, int order) {
  const int d = 2 * n;
  WirtingerJet w(n, std::max(order, 3));
  int k = 0;
  w.set_value(v[k++]);
  for (int a = 0; a < d; ++a) w.grad()(a) = v[k++];
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      w.hess()(a, b) = v[k];
      w.hess()(b, a) = v[k++];
    }
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b)
      for (int c = b; c < d; ++c) w.set_third(a, b, c, v[k++]);
  return w;
}

WirtingerJet truncate(const WirtingerJet& j, int order) {
  const int d = 2 * j.n();
  WirtingerJet out(j.n(), order);
  out.set_value(j.value());
  out.grad() = j.grad();
  if (order >= 2) out.hess() = j.hess();
  if (order >= 3)
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b)
        for (int c = b; c < d; ++c) out.set_third(a, b, c, j.third(a, b, c));
  return out;
}

// power profile t^p for t > 0, 0 otherwise
std::array<double, 4> power_profile(double t, double p) {
  if (t <= 0) return {0, 0, 0, 0};
  return {std::pow(t, p), p * std::pow(t, p - 1), p * (p - 1) * std::pow(t, p - 2),
          p * (p - 1) * (p - 2) * std::pow(t, p - 3)};
}

template <class T>
T power_profile_jet(const T& t, double p) {
  if (value(t) <= 0) return T(0.0);
  return pow(t, p);
}

// worm profile M s^2 exp(-1/s) in s = |L| - a; derivatives in L
constexpr double kFlat = 0.01;  // below this s the profile is under 1e-40

std::array<double, 4> worm_profile(double L, double a, double M) {
  double s = std::abs(L) - a;
  if (s <= kFlat) return {0, 0, 0, 0};
  double sg = L > 0 ? 1.0 : -1.0;
  double E = std::exp(-1.0 / s);
  return {M * s * s * E, sg * M * (2 * s + 1) * E, M * (2 + 2 / s + 1 / (s * s)) * E, sg * M * E / (s * s * s * s)};
}

template <class T>
T worm_profile_jet(const T& L, double a, double M) {
  double Lv = value(L);
  if (std::abs(Lv) - a <= kFlat) return T(0.0);
  T s = (Lv > 0 ? L : -L) - a;
  return M * s * s * exp(-1.0 / s);
}

// meshes ---------------------------------------------------------------------

// star-shaped about the origin: rho(r d) increasing in r
RVec ray_hit(const DomainSpec& d, const RVec& dir, double rmax) {
  for (int i = 0; i < dir.size(); ++i)
    if (std::abs(dir(i)) > 1e-12) rmax = std::min(rmax, std::min(d.box_hi(i), -d.box_lo(i)) / std::abs(dir(i)));
  double lo = 0.0, hi = rmax;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * rmax; ++it) {
    double mid = 0.5 * (lo + hi);
    if (d.eval(mid * dir) < 0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi) * dir;
}

std::vector<RVec> ray_mesh2(const DomainSpec& d, size_t count, double rmax) {
  int na = std::max(4, static_cast<int>(std::round(std::cbrt(count / 39.0) * 2.5)));
  int nf = std::max(4, static_cast<int>(std::ceil(std::sqrt(double(count) / na))));
  std::vector<RVec> out;
  for (int i = 0; i < na; ++i) {
    double a = 0.5 * kPi * i / (na - 1);
    for (int j = 0; j < nf; ++j)
      for (int k = 0; k < nf; ++k) {
        double f1 = 2 * kPi * j / nf, f2 = 2 * kPi * k / nf;
        RVec dir = rvec({std::cos(a) * std::cos(f1), std::cos(a) * std::sin(f1), std::sin(a) * std::cos(f2),
                         std::sin(a) * std::sin(f2)});
        out.push_back(ray_hit(d, dir, rmax));
      }
  }
  return out;
}

// directions on S^5 with roughly equal arc spacing, so nearest-neighbour gaps track coverage
std::vector<RVec> ray_mesh3(const DomainSpec& d, size_t count, double rmax) {
  auto circle_count = [](double c, double s) { return std::max(1, static_cast<int>(std::round(2 * kPi * c / s))); };
  auto build = [&](double s, bool emit) {
    std::vector<RVec> out;
    size_t total = 0;
    int na = std::max(2, static_cast<int>(std::ceil(0.5 * kPi / s)) + 1);
    for (int i = 0; i < na; ++i) {
      double a = 0.5 * kPi * i / (na - 1);
      int nb = std::max(1, static_cast<int>(std::ceil(0.5 * kPi * std::cos(a) / s)) + 1);
      for (int ib = 0; ib < nb; ++ib) {
        double b = nb == 1 ? 0.0 : 0.5 * kPi * ib / (nb - 1);
        double c1 = std::cos(a) * std::cos(b), c2 = std::cos(a) * std::sin(b), c3 = std::sin(a);
        int n1 = circle_count(c1, s), n2 = circle_count(c2, s), n3 = circle_count(c3, s);
        total += size_t(n1) * n2 * n3;
        if (!emit) continue;
        for (int j = 0; j < n1; ++j)
          for (int k = 0; k < n2; ++k)
            for (int l = 0; l < n3; ++l) {
              double f1 = 2 * kPi * j / n1, f2 = 2 * kPi * k / n2, f3 = 2 * kPi * l / n3;
              RVec dir = rvec({c1 * std::cos(f1), c1 * std::sin(f1), c2 * std::cos(f2), c2 * std::sin(f2),
                               c3 * std::cos(f3), c3 * std::sin(f3)});
              out.push_back(ray_hit(d, dir, rmax));
            }
      }
    }
    return std::make_pair(total, out);
  };
  double lo = 0.02, hi = 2.0;
  for (int it = 0; it < 40; ++it) {
    double mid = std::sqrt(lo * hi);
    if (build(mid, false).first >= count) lo = mid;
    else hi = mid;
  }
  return build(lo, true).second;
}

std::vector<CVec> single_tangent(int n, int j, cplx c = 1.0) {
  CVec e = CVec::Zero(n);
  e(j) = c;
  return {e};
}

double wrap_angle(double a) {
  double w = std::fmod(a, 2 * kPi);
  return w < 0 ? w + 2 * kPi : w;
}

}  // namespace

// ball ---------------------------------------------------------------------------

ZooEntry make_ball(double radius) {
  if (!(radius > 0)) throw Error(ErrorKind::ConfigInvalid, "ball radius must be positive");
  const double r2 = radius * radius;
  const double R = 2.5 * radius;
  ZooEntry e;
  e.domain = make_domain(
      "ball", 2,
      [r2](auto x) {
        auto s = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
        return s - r2;
      },
      rvec({-R, -R, -R, -R}), rvec({R, R, R, R}), radius, 2 * radius);
  e.domain.analytic_oracle = [r2](const RVec& x, int order) {
    WirtingerJet q = quadratic_jet(x, {0, 1, 2, 3}, r2, 3);
    return truncate(chain(q, q.value(), 1, 0, 0, 3), order);
  };
  e.parameters = {{"radius", radius}};
  e.sigma_kind = SigmaKind::Empty;
  e.levi_scale = 0.5 / radius;
  e.boundary_mesh = [d = e.domain, R](size_t count) { return ray_mesh2(d, count, R); };
  e.sigma_samples = [](size_t) { return std::vector<RVec>{}; };
  e.sigma_distance = [](const RVec&) { return kInf; };
  e.rho_override = [r2](const RVec& x) {
    WirtingerJet q = quadratic_jet(x, {0, 1, 2, 3}, r2, 2);
    return chain(q, q.value(), 1, 0, 0, 2);
  };
  e.exact_delta = [radius](const RVec& x, int order) {
    const int d = static_cast<int>(x.size());
    double r = x.norm();
    WirtingerJet j(d / 2, order);
    j.set_value(r - radius);
    RVec u = x / r;
    j.grad() = u;
    if (order >= 2) j.hess() = (RMat::Identity(d, d) - u * u.transpose()) / r;
    if (order >= 3)
      for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b)
          for (int c = b; c < d; ++c) {
            double t = 3 * u(a) * u(b) * u(c);
            if (a == b) t -= u(c);
            if (a == c) t -= u(b);
            if (b == c) t -= u(a);
            j.set_third(a, b, c, t / (r * r));
          }
    return j;
  };
  e.expected = {{"Levi min eigenvalue 1/(2r) on the boundary", "closed-form distance Hessian"},
                {"Sigma empty at threshold 1e-6", "strict pseudoconvexity"},
                {"index certified >= 0.99", "both summands of the Hessian expansion are PSD"}};
  return e;
}

// fattened bidisc ------------------------------------------------------------------

ZooEntry make_fattened_bidisc(double r, double power) {
  if (!(r > 0 && r < 1)) throw Error(ErrorKind::ConfigInvalid, "fattened bidisc needs 0 < r < 1");
  if (!(power >= 4)) throw Error(ErrorKind::ConfigInvalid, "smoothing power must be >= 4 for a C^3 profile");
  const double r2 = r * r;
  const double R1 = std::sqrt(1 + r2) * 1.3, R2 = 1.3;
  ZooEntry e;
  e.domain = make_domain(
      "fattened_bidisc", 2,
      [r2, power](auto x) {
        auto t = x[0] * x[0] + x[1] * x[1] - r2;
        return x[2] * x[2] + x[3] * x[3] - 1.0 + power_profile_jet(t, power);
      },
      rvec({-R1, -R1, -R2, -R2}), rvec({R1, R1, R2, R2}), 1.0, 2 * std::sqrt(1 + r2));
  e.domain.analytic_oracle = [r2, power](const RVec& x, int order) {
    WirtingerJet f = chain(quadratic_jet(x, {2, 3}, 1.0, 3), 0, 1, 0, 0, 3);
    f.set_value(x(2) * x(2) + x(3) * x(3) - 1.0);
    WirtingerJet q = quadratic_jet(x, {0, 1}, r2, 3);
    auto g = power_profile(q.value(), power);
    accumulate(f, chain(q, g[0], g[1], g[2], g[3], 3));
    return truncate(f, order);
  };
  e.parameters = {{"r", r}, {"power", power}};
  e.sigma_kind = SigmaKind::Foliation;
  e.levi_scale = 0.5;
  const double half = r / std::sqrt(2.0);
  auto leaf_chart = [half](double t) {
    SigmaChart c;
    c.id = "leaf";
    c.kind = ChartKind::Complex;
    c.m = 1;
    c.box = {{-half, half, false}, {-half, half, false}};
    c.leaf = t;
    const double ct = std::cos(t), st = std::sin(t);
    c.embed = [ct, st](const Param& u) { return rvec({u[0], u[1], ct, st}); };
    c.complex_tangents = [](const Param&) { return single_tangent(2, 0); };
    // leaves extend past the square; locate does not clamp
    c.locate = [](const RVec& p) { return Param{p(0), p(1)}; };
    c.resolution = 12;
    return c;
  };
  FoliationAtlas atlas;
  atlas.leaf_chart = leaf_chart;
  atlas.leaf_of = [](const RVec& p) { return wrap_angle(std::atan2(p(3), p(2))); };
  atlas.leaf_range = {0.0, 2 * kPi, true};
  e.foliation = atlas;
  e.charts = {leaf_chart(0.0)};
  // Sigma samples sit up to r(1 - 1/sqrt2) off the square chart
  e.collar = CollarSpec{std::max(0.4, 4 * r * (1 - 1 / std::sqrt(2.0))), 0.05 * e.domain.diameter};
  {
    std::vector<Param> pts;
    const double rc = 0.9 * half;
    for (int k = 0; k < 24; ++k) pts.push_back({rc * std::cos(2 * kPi * k / 24), rc * std::sin(2 * kPi * k / 24)});
    e.loops.push_back(polyline(0, pts, true, "leaf_circle"));
  }
  e.boundary_mesh = [d = e.domain, R1](size_t count) { return ray_mesh2(d, count, 2 * R1); };
  e.sigma_samples = [r](size_t count) {
    std::vector<RVec> out;
    int nt = std::max(4, static_cast<int>(std::round(std::sqrt(count / 4.0))));
    int nr = std::max(1, static_cast<int>(count / (nt * nt)));
    for (int k = 0; k < nt; ++k) {
      double t = 2 * kPi * k / nt;
      for (int i = 0; i < nr; ++i) {
        double rr = r * (i + 0.5) / nr;
        for (int j = 0; j < nt; ++j) {
          double a = 2 * kPi * (j + 0.5 * i) / nt;
          out.push_back(rvec({rr * std::cos(a), rr * std::sin(a), std::cos(t), std::sin(t)}));
        }
      }
    }
    return out;
  };
  e.sigma_distance = [r](const RVec& p) {
    double m1 = std::hypot(p(0), p(1)), m2 = std::hypot(p(2), p(3));
    return std::hypot(std::max(0.0, m1 - r), m2 - 1.0);
  };
  e.expected = {{"Levi form at (0, e^{it}) in direction d/dz1 vanishes", "chi' = 0 on the flat part"},
                {"complex Hessian of rho is PSD", "diag(chi' + chi''|z1|^2, 1)"},
                {"theta vanishes on leaves; leaf-circle periods 0", "z1-translation symmetry"},
                {"index certified >= 0.99 with psi = -2 phi", "exact cancellation on each leaf"}};
  return e;
}

// worm ----------------------------------------------------------------------------

ZooEntry make_worm(double beta, WormProfile profile) {
  if (!(beta > kPi / 2)) throw Error(ErrorKind::BetaTooSmall, "worm needs beta > pi/2");
  if (!(profile.amplitude > 0)) throw Error(ErrorKind::ConfigInvalid, "worm profile amplitude must be positive");
  const double a = beta - kPi / 2;
  const double M = profile.amplitude;
  // cap where the profile reaches 1
  double lo = kFlat, hi = 50.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (M * mid * mid * std::exp(-1 / mid) < 1) lo = mid;
    else hi = mid;
  }
  const double T = a + hi;
  const double R2 = std::exp(T / 2) * 1.05;
  ZooEntry e;
  e.domain = make_domain(
      "worm", 2,
      [a, M](auto x) {
        auto L = log(x[2] * x[2] + x[3] * x[3]);
        auto u = x[0] + cos(L), v = x[1] + sin(L);
        return u * u + v * v - 1.0 + worm_profile_jet(L, a, M);
      },
      rvec({-2.1, -2.1, -R2, -R2}), rvec({2.1, 2.1, R2, R2}), 0.5, 2 * R2);
  e.domain.collar_width = 0.005;
  e.domain.analytic_oracle = [a, M](const RVec& x, int order) {
    double buf[35];
    generated::worm_core_jet(x.data(), buf);
    WirtingerJet f = unpack(buf, 2, 3);
    generated::worm_log_modulus_jet(x.data(), buf);
    WirtingerJet L = unpack(buf, 2, 3);
    auto g = worm_profile(L.value(), a, M);
    accumulate(f, chain(L, g[0], g[1], g[2], g[3], 3));
    return truncate(f, order);
  };
  e.parameters = {{"beta", beta}, {"amplitude", M}, {"cap", T}};
  e.sigma_kind = SigmaKind::ComplexSubmanifold;
  e.levi_scale = 0.5;
  {
    SigmaChart c;
    c.id = "annulus";
    c.m = 1;
    c.box = {{-a / 2, a / 2, false}, {0.0, 2 * kPi, true}};
    c.embed = [](const Param& u) {
      double r = std::exp(u[0]);
      return rvec({0.0, 0.0, r * std::cos(u[1]), r * std::sin(u[1])});
    };
    c.complex_tangents = [](const Param& u) {
      double r = std::exp(u[0]);
      return single_tangent(2, 1, cplx(r * std::cos(u[1]), r * std::sin(u[1])));
    };
    c.locate = [a](const RVec& p) {
      double s = std::log(std::hypot(p(2), p(3)));
      return Param{std::clamp(s, -a / 2, a / 2), wrap_angle(std::atan2(p(3), p(2)))};
    };
    c.resolution = 16;
    e.charts.push_back(c);
  }
  {
    SigmaChart c;
    c.id = "w_patch";
    c.m = 1;
    double w = std::min(0.4, 0.8 * (1 - std::exp(-a / 2)));
    c.box = {{1 - w, 1 + w, false}, {-w, w, false}};
    c.embed = [](const Param& u) { return rvec({0.0, 0.0, u[0], u[1]}); };
    c.complex_tangents = [](const Param&) { return single_tangent(2, 1); };
    c.locate = [box = c.box](const RVec& p) {
      return Param{std::clamp(p(2), box[0].lo, box[0].hi), std::clamp(p(3), box[1].lo, box[1].hi)};
    };
    c.resolution = 16;
    e.charts.push_back(c);
  }
  {
    std::vector<Param> pts;
    for (int k = 0; k < 32; ++k) pts.push_back({0.0, 2 * kPi * k / 32});
    e.loops.push_back(polyline(0, pts, true, "core"));
  }
  e.boundary_mesh = [a, M, T](size_t count) {
    int nt = std::max(6, static_cast<int>(std::round(std::cbrt(count * 1.5))));
    int nr = std::max(4, static_cast<int>(std::ceil(std::sqrt(double(count) / nt))));
    std::vector<RVec> out;
    for (int i = 0; i < nt; ++i) {
      double t = -T + 2 * T * (i + 0.5) / nt;
      double rad = std::sqrt(std::max(0.0, 1 - worm_profile(t, a, M)[0]));
      cplx el = std::exp(cplx(0, t));
      for (int j = 0; j < nr; ++j) {
        cplx z2 = std::exp(cplx(t / 2, 2 * kPi * j / nr));
        for (int k = 0; k < nr; ++k) {
          cplx z1 = el * (rad * std::exp(cplx(0, 2 * kPi * k / nr)) - 1.0);
          out.push_back(rvec({z1.real(), z1.imag(), z2.real(), z2.imag()}));
        }
      }
    }
    return out;
  };
  e.sigma_samples = [a](size_t count) {
    int ns = std::max(2, static_cast<int>(std::round(std::sqrt(count / 6.0))));
    int na = std::max(4, static_cast<int>(count / ns));
    std::vector<RVec> out;
    for (int i = 0; i < ns; ++i) {
      double s = -a / 2 + a * (i + 0.5) / ns;
      for (int j = 0; j < na; ++j) {
        double al = 2 * kPi * j / na;
        out.push_back(rvec({0.0, 0.0, std::exp(s) * std::cos(al), std::exp(s) * std::sin(al)}));
      }
    }
    return out;
  };
  e.sigma_distance = [a](const RVec& p) {
    double m2 = std::hypot(p(2), p(3));
    double s = std::log(m2);
    double sc = std::clamp(s, -a / 2, a / 2);
    return std::hypot(std::hypot(p(0), p(1)), m2 - std::exp(sc));
  };
  e.expected = {{"(0,1) on the boundary with vanishing Levi eigenvalue", "substitution; symbolic oracle"},
                {"core-circle period of theta is -pi", "h = -i/(2 w) on the annulus; symbolic oracle"},
                {"classify: Obstructed", "nonzero period"},
                {"not certified at eta = 0.99", "period obstruction"}};
  return e;
}

// quartic circle ----------------------------------------------------------------------

ZooEntry make_quartic_circle() {
  const double R = 1.3;
  ZooEntry e;
  e.domain = make_domain(
      "quartic_circle", 2,
      [](auto x) {
        auto s = x[0] * x[0] + x[1] * x[1];
        return s * s + x[2] * x[2] + x[3] * x[3] - 1.0;
      },
      rvec({-R, -R, -R, -R}), rvec({R, R, R, R}), 1.0, 2.0);
  e.domain.analytic_oracle = [](const RVec& x, int order) {
    WirtingerJet f = chain(quadratic_jet(x, {2, 3}, 1.0, 3), 0, 1, 0, 0, 3);
    f.set_value(x(2) * x(2) + x(3) * x(3) - 1.0);
    WirtingerJet q = quadratic_jet(x, {0, 1}, 0.0, 3);
    accumulate(f, chain(q, q.value() * q.value(), 2 * q.value(), 2.0, 0.0, 3));
    return truncate(f, order);
  };
  e.sigma_kind = SigmaKind::RealCurve;
  e.levi_scale = 0.5;
  SigmaChart c;
  c.id = "circle";
  c.kind = ChartKind::Real;
  c.m = 1;
  c.box = {{0.0, 2 * kPi, true}};
  c.embed = [](const Param& u) { return rvec({0.0, 0.0, std::cos(u[0]), std::sin(u[0])}); };
  c.real_tangents = [](const Param& u) { return std::vector<RVec>{rvec({0.0, 0.0, -std::sin(u[0]), std::cos(u[0])})}; };
  c.locate = [](const RVec& p) { return Param{wrap_angle(std::atan2(p(3), p(2)))}; };
  c.resolution = 64;
  e.curve = c;
  e.boundary_mesh = [d = e.domain, R](size_t count) { return ray_mesh2(d, count, 2 * R); };
  e.sigma_samples = [](size_t count) {
    std::vector<RVec> out;
    for (size_t k = 0; k < std::max<size_t>(count, 4); ++k) {
      double t = 2 * kPi * k / std::max<size_t>(count, 4);
      out.push_back(rvec({0.0, 0.0, std::cos(t), std::sin(t)}));
    }
    return out;
  };
  e.sigma_distance = [](const RVec& p) { return std::hypot(std::hypot(p(0), p(1)), std::hypot(p(2), p(3)) - 1.0); };
  e.expected = {{"Levi matrix of rho is diag(4|z1|^2, 1)", "direct differentiation"},
                {"Sigma = {z1 = 0, |z2| = 1}", "restricted Levi eigenvalue vanishes only at z1 = 0"},
                {"real-curve certificate at eta = 0.99", "transversal construction with sampled C_eta"}};
  return e;
}

// fattened ball in C^3 ------------------------------------------------------------------

ZooEntry make_fattened_ball3(double r) {
  if (!(r > 0 && r < 1)) throw Error(ErrorKind::ConfigInvalid, "fattened ball needs 0 < r < 1");
  const double r2 = r * r;
  const double R1 = std::sqrt(1 + r2) * 1.3, R3 = 1.3;
  ZooEntry e;
  e.domain = make_domain(
      "fattened_ball3", 3,
      [r2](auto x) {
        auto t = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] - r2;
        return x[4] * x[4] + x[5] * x[5] - 1.0 + power_profile_jet(t, 4.0);
      },
      rvec({-R1, -R1, -R1, -R1, -R3, -R3}), rvec({R1, R1, R1, R1, R3, R3}), 1.0, 2 * std::sqrt(1 + r2));
  e.domain.analytic_oracle = [r2](const RVec& x, int order) {
    WirtingerJet f = chain(quadratic_jet(x, {4, 5}, 1.0, 3), 0, 1, 0, 0, 3);
    f.set_value(x(4) * x(4) + x(5) * x(5) - 1.0);
    WirtingerJet q = quadratic_jet(x, {0, 1, 2, 3}, r2, 3);
    auto g = power_profile(q.value(), 4.0);
    accumulate(f, chain(q, g[0], g[1], g[2], g[3], 3));
    return truncate(f, order);
  };
  e.parameters = {{"r", r}};
  e.sigma_kind = SigmaKind::Foliation;
  e.levi_scale = 0.5;
  const double half = r / 2;
  FoliationAtlas atlas;
  atlas.leaf_chart = [half](double t) {
    SigmaChart c;
    c.id = "leaf";
    c.m = 2;
    c.box = std::vector<ParamRange>(4, ParamRange{-half, half, false});
    c.leaf = t;
    const double ct = std::cos(t), st = std::sin(t);
    c.embed = [ct, st](const Param& u) { return rvec({u[0], u[1], u[2], u[3], ct, st}); };
    c.complex_tangents = [](const Param&) {
      auto a = single_tangent(3, 0);
      a.push_back(single_tangent(3, 1)[0]);
      return a;
    };
    c.locate = [](const RVec& p) { return Param{p(0), p(1), p(2), p(3)}; };
    c.resolution = 8;
    return c;
  };
  atlas.leaf_of = [](const RVec& p) { return wrap_angle(std::atan2(p(5), p(4))); };
  atlas.leaf_range = {0.0, 2 * kPi, true};
  e.foliation = atlas;
  e.charts = {atlas.leaf_chart(0.0)};
  e.boundary_mesh = [d = e.domain, R1](size_t count) { return ray_mesh3(d, count, 2 * R1); };
  e.sigma_samples = [r](size_t count) {
    std::vector<RVec> out;
    int k = std::max(2, static_cast<int>(std::round(std::pow(count, 1.0 / 4))));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        for (int l = 0; l < k; ++l)
          for (int m = 0; m < k; ++m) {
            double rr = r * (i + 0.5) / k, a1 = 2 * kPi * j / k, a2 = 2 * kPi * l / k, t = 2 * kPi * m / k;
            double b = 0.5 * kPi * (j + 0.5) / k;
            out.push_back(rvec({rr * std::cos(b) * std::cos(a1), rr * std::cos(b) * std::sin(a1),
                                rr * std::sin(b) * std::cos(a2), rr * std::sin(b) * std::sin(a2), std::cos(t),
                                std::sin(t)}));
          }
    return out;
  };
  e.sigma_distance = [r](const RVec& p) {
    double m1 = p.head(4).norm(), m3 = std::hypot(p(4), p(5));
    return std::hypot(std::max(0.0, m1 - r), m3 - 1.0);
  };
  e.expected = {{"two-dimensional Levi null space on Sigma", "flat directions z1, z2"},
                {"N-properties on the boundary mesh", "generic"}};
  return e;
}

std::vector<std::string> zoo_ids() { return {"ball", "fattened_bidisc", "worm", "quartic_circle", "fattened_ball3"}; }

ZooEntry make_zoo_entry(const std::string& id, const std::map<std::string, double>& params) {
  auto get = [&](const std::string& k, double def) {
    auto it = params.find(k);
    return it == params.end() ? def : it->second;
  };
  for (const auto& [k, v] : params)
    if (!std::isfinite(v)) throw Error(ErrorKind::ConfigInvalid, "parameter " + k + " is not finite");
  if (id == "ball") return make_ball(get("radius", 1.0));
  if (id == "fattened_bidisc" || id == "bidisc") return make_fattened_bidisc(get("r", 0.5), get("power", 4.0));
  if (id == "worm") return make_worm(get("beta", kPi), WormProfile{get("amplitude", 2.0)});
  if (id == "quartic_circle" || id == "quartic") return make_quartic_circle();
  if (id == "fattened_ball3") return make_fattened_ball3(get("r", 0.5));
  throw Error(ErrorKind::ConfigInvalid, "unknown domain '" + id + "'");
}

double mesh_pitch(const std::vector<RVec>& mesh) {
  double worst = 0.0;
  for (size_t i = 0; i < mesh.size(); ++i) {
    double best = kInf;
    for (size_t j = 0; j < mesh.size(); ++j) {
      if (i == j) continue;
      double d = (mesh[i] - mesh[j]).squaredNorm();
      if (d > 0 && d < best) best = d;
    }
    if (best < kInf) worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

}  // namespace dfindex
