#include "dfindex/sigma_geometry.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>

#include "dfindex/parallel.hpp"

namespace dfindex {

bool SigmaChart::in_domain(const Param& u) const {
  if (static_cast<int>(u.size()) != param_dim()) return false;
  for (size_t i = 0; i < u.size(); ++i) {
    if (box[i].periodic) continue;
    double pad = 1e-12 * (box[i].hi - box[i].lo);
    if (u[i] < box[i].lo - pad || u[i] > box[i].hi + pad) return false;
  }
  return !contains || contains(u);
}

Param SigmaChart::wrap(const Param& u) const {
  Param w = u;
  for (size_t i = 0; i < u.size(); ++i) {
    if (!box[i].periodic) continue;
    double len = box[i].hi - box[i].lo;
    w[i] = box[i].lo + std::fmod(std::fmod(u[i] - box[i].lo, len) + len, len);
  }
  return w;
}

double SigmaChart::step() const {
  double s = std::numeric_limits<double>::infinity();
  for (const auto& r : box) s = std::min(s, (r.hi - r.lo) / resolution);
  return s;
}

std::vector<RVec> SigmaChart::x_directions(const Param& u) const {
  if (kind == ChartKind::Real) return real_tangents(u);
  std::vector<RVec> out;
  for (const CVec& t : complex_tangents(u)) out.push_back(2.0 * coeff_to_real_rep(t).real());
  return out;
}

SigmaChart as_real_chart(const SigmaChart& chart) {
  if (chart.kind == ChartKind::Real) return chart;
  SigmaChart r = chart;
  r.id = chart.id + ":real";
  r.kind = ChartKind::Real;
  r.m = 2 * chart.m;
  auto tangents = chart.complex_tangents;
  r.real_tangents = [tangents](const Param& u) {
    std::vector<RVec> out;
    for (const CVec& t : tangents(u)) {
      RVec x = 2.0 * coeff_to_real_rep(t).real();
      out.push_back(x);
      out.push_back(apply_J(x));
    }
    return out;
  };
  return r;
}

double nu_nu_pairing(const BoundaryPoint& bp, const RVec& X) {
  RVec n = bp.grad_delta.normalized();
  RVec vv = apply_J(RVec(bp.jet.hess() * apply_J(n)));
  return -vv.dot(X);
}

namespace {

BoundaryPoint on_sigma(const DomainSpec& domain, const SigmaChart& chart, const Param& u, const DistanceConfig& cfg) {
  return boundary_point_at_foot(domain, chart.embed(chart.wrap(u)), 2, cfg);
}

std::vector<cplx> h_values(const DomainSpec& domain, const SigmaChart& chart, const Param& u,
                           const DistanceConfig& cfg) {
  BoundaryPoint bp = on_sigma(domain, chart, u, cfg);
  std::vector<cplx> out;
  for (const CVec& t : chart.complex_tangents(chart.wrap(u))) out.push_back(mixed_term(bp, t));
  return out;
}

void require_interior(const SigmaChart& chart, const Param& u, double h) {
  for (size_t i = 0; i < u.size(); ++i) {
    Param a = u, b = u;
    a[i] -= h;
    b[i] += h;
    if (!chart.in_domain(a) || !chart.in_domain(b))
      throw Error(ErrorKind::StencilLeak, "stencil leaves the chart " + chart.id);
  }
}

}  // namespace

std::vector<double> theta_at(const DomainSpec& domain, const SigmaChart& chart, const Param& u,
                             const DistanceConfig& cfg) {
  if (chart.kind != ChartKind::Complex) throw Error(ErrorKind::ChartMismatch, "theta needs a complex chart");
  std::vector<double> out;
  for (cplx h : h_values(domain, chart, u, cfg)) {
    out.push_back(h.real());
    out.push_back(h.imag());
  }
  return out;
}

std::vector<double> real_one_form_at(const DomainSpec& domain, const SigmaChart& chart, const Param& u,
                                     const DistanceConfig& cfg) {
  if (chart.kind != ChartKind::Real) throw Error(ErrorKind::ChartMismatch, "real form needs a real chart");
  BoundaryPoint bp = on_sigma(domain, chart, u, cfg);
  std::vector<double> out;
  for (const RVec& x : chart.real_tangents(chart.wrap(u))) out.push_back(0.25 * nu_nu_pairing(bp, x));
  return out;
}

Lem1Residuals lem1_residuals(const DomainSpec& domain, const SigmaChart& chart, const Param& u, double h,
                             const DistanceConfig& cfg) {
  if (chart.kind != ChartKind::Complex) throw Error(ErrorKind::ChartMismatch, "lem1 needs a complex chart");
  require_interior(chart, u, h);
  const int m = chart.m;
  // D[k][j] = d h_j / d u_k
  std::vector<std::vector<cplx>> D(2 * m, std::vector<cplx>(m));
  for (int k = 0; k < 2 * m; ++k) {
    Param a = u, b = u;
    a[k] -= h;
    b[k] += h;
    auto ha = h_values(domain, chart, a, cfg);
    auto hb = h_values(domain, chart, b, cfg);
    for (int j = 0; j < m; ++j) D[k][j] = (hb[j] - ha[j]) / (2 * h);
  }
  const cplx I(0, 1);
  auto dz = [&](int k, int j) { return 0.5 * (D[2 * k][j] - I * D[2 * k + 1][j]); };         // d h_j / dz_k
  auto dzbar = [&](int k, int j) { return 0.5 * (D[2 * k][j] + I * D[2 * k + 1][j]); };      // d h_j / dzbar_k
  auto dz_conj = [&](int k, int j) { return std::conj(dzbar(k, j)); };                        // d conj(h_j) / dz_k
  auto dzbar_conj = [&](int k, int j) { return std::conj(dz(k, j)); };                        // d conj(h_j) / dzbar_k
  Lem1Residuals r;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      r.identity1 = std::max(r.identity1, std::abs(dz(j, i) - dzbar_conj(i, j)));
      r.identity2 = std::max(r.identity2, std::abs(dz_conj(j, i) - dz_conj(i, j)));
    }
  return r;
}

double dtheta_residual(const GridCell& c) {
  double circ = 0.0;
  for (int e = 0; e < 4; ++e) {
    int f = (e + 1) % 4;
    const auto& ua = c.corners[e];
    const auto& ub = c.corners[f];
    for (int k : {c.a, c.b}) circ += 0.5 * (c.forms[e][k] + c.forms[f][k]) * (ub[k] - ua[k]);
  }
  const auto& o = c.corners[0];
  double ea = c.corners[1][c.a] - o[c.a], eb = c.corners[1][c.b] - o[c.b];
  double fa = c.corners[3][c.a] - o[c.a], fb = c.corners[3][c.b] - o[c.b];
  double area = std::abs(ea * fb - eb * fa);
  return std::abs(circ) / area;
}

size_t ComplexGridField::flat(const std::vector<int>& idx) const {
  size_t f = 0;
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) f = f * static_cast<size_t>(dims[k]) + idx[k];
  return f;
}

size_t ComplexGridField::size() const {
  size_t s = 1;
  for (int d : dims) s *= static_cast<size_t>(d);
  return s;
}

double basicnoc_check(const ComplexGridField& F) {
  const int nd = 2 * F.m;
  const cplx I(0, 1);
  double worst = 0.0;
  std::vector<int> idx(nd, 1);
  for (int k = 0; k < nd; ++k)
    if (F.dims[k] < 3) return 0.0;
  while (true) {
    // D[k][j] = d h_j / d u_k
    std::vector<std::vector<cplx>> D(nd, std::vector<cplx>(F.m));
    for (int k = 0; k < nd; ++k) {
      auto a = idx, b = idx;
      a[k] -= 1;
      b[k] += 1;
      for (int j = 0; j < F.m; ++j) D[k][j] = (F.h[j][F.flat(b)] - F.h[j][F.flat(a)]) / (2 * F.step[k]);
    }
    for (int i = 0; i < F.m; ++i)
      for (int j = 0; j < F.m; ++j) {
        cplx dzbar_i_hj = 0.5 * (D[2 * i][j] + I * D[2 * i + 1][j]);
        cplx dzbar_j_hi = 0.5 * (D[2 * j][i] + I * D[2 * j + 1][i]);
        cplx dz_i_hj = 0.5 * (D[2 * i][j] - I * D[2 * i + 1][j]);
        cplx dzbar_j_conj_hi = std::conj(0.5 * (D[2 * j][i] - I * D[2 * j + 1][i]));
        worst = std::max({worst, std::abs(dzbar_i_hj - dzbar_j_hi), std::abs(dz_i_hj - dzbar_j_conj_hi)});
      }
    int k = 0;
    while (k < nd) {
      if (++idx[k] < F.dims[k] - 1) break;
      idx[k] = 1;
      ++k;
    }
    if (k == nd) break;
  }
  return worst;
}

ComplexGridField sample_h_field(const DomainSpec& domain, const SigmaChart& chart, const Param& u, double h,
                                int points, const DistanceConfig& cfg) {
  if (chart.kind != ChartKind::Complex) throw Error(ErrorKind::ChartMismatch, "h field needs a complex chart");
  ComplexGridField F;
  F.m = chart.m;
  const int nd = 2 * chart.m;
  F.dims.assign(nd, points);
  F.step.assign(nd, h);
  for (int k = 0; k < nd; ++k) F.lo.push_back(u[k] - h * (points - 1) / 2.0);
  require_interior(chart, u, h * (points - 1) / 2.0);
  const size_t total = F.size();
  auto vals = parallel_map(total, [&](size_t f) {
    Param v(nd);
    size_t r = f;
    for (int k = 0; k < nd; ++k) {
      v[k] = F.lo[k] + F.step[k] * static_cast<double>(r % points);
      r /= points;
    }
    if (!chart.in_domain(v)) throw Error(ErrorKind::StencilLeak, "grid leaves the chart " + chart.id);
    return h_values(domain, chart, v, cfg);
  });
  F.h.assign(chart.m, std::vector<cplx>(total));
  for (size_t f = 0; f < total; ++f)
    for (int j = 0; j < chart.m; ++j) F.h[j][f] = vals[f][j];
  return F;
}

NuResiduals nu_identity_residuals(const DomainSpec& domain, const SigmaChart& chart, const Param& u, double h,
                                  double threshold, const DistanceConfig& cfg) {
  Param w = chart.wrap(u);
  RVec p = chart.embed(w);
  BoundaryPoint bp = boundary_point_at_foot(domain, p, 2, cfg);
  const cplx I(0, 1);
  NuResiduals r;
  DistanceConfig quiet = cfg;
  quiet.check_ambiguity = false;
  auto shifted = [&](const RVec& v, double s) {
    return boundary_point(domain, RVec(p + s * v), 2, quiet);
  };
  for (const RVec& X : chart.x_directions(w)) {
    RVec Y = apply_J(X);
    CVec L = real_rep_to_coeff(0.5 * (X.cast<cplx>() - I * Y.cast<cplx>()));
    CVec Lt = L - herm(L, bp.N) * bp.N;
    double levi = std::abs(bp.jet.hess_form(coeff_to_real_rep(Lt), coeff_to_real_rep(Lt)));
    if (levi > threshold) throw Error(ErrorKind::HypothesisFail, "x-direction is not Levi-null");
    cplx hv = mixed_term(bp, L);
    r.re = std::max(r.re, std::abs(hv.real() - 0.25 * nu_nu_pairing(bp, X)));
    r.im = std::max(r.im, std::abs(hv.imag() - 0.25 * nu_nu_pairing(bp, Y)));
    BoundaryPoint xp = shifted(X, h), xm = shifted(X, -h), yp = shifted(Y, h), ym = shifted(Y, -h);
    cplx dx = (mixed_term(xp, L) - mixed_term(xm, L)) / (2 * h);
    cplx dy = (mixed_term(yp, L) - mixed_term(ym, L)) / (2 * h);
    cplx lhs = 0.5 * (dx - I * dy);
    double rhs = (nu_nu_pairing(xp, X) - nu_nu_pairing(xm, X) + nu_nu_pairing(yp, Y) - nu_nu_pairing(ym, Y)) /
                 (2 * h) / 8.0;
    r.derivative = std::max(r.derivative, std::abs(lhs - rhs));
  }
  return r;
}

namespace {

std::vector<std::vector<double>> grid_axes(const SigmaChart& chart, int res) {
  std::vector<std::vector<double>> axes;
  for (const auto& b : chart.box) {
    std::vector<double> ax;
    if (b.periodic)
      for (int i = 0; i < res; ++i) ax.push_back(b.lo + (b.hi - b.lo) * i / res);
    else
      for (int i = 0; i <= res; ++i) ax.push_back(b.lo + (b.hi - b.lo) * i / res);
    axes.push_back(ax);
  }
  return axes;
}

}  // namespace

OneFormSample sample_form(const DomainSpec& domain, const SigmaChart& chart, FormKind kind, int resolution,
                          const DistanceConfig& cfg) {
  OneFormSample s;
  s.chart_id = chart.id;
  auto axes = grid_axes(chart, resolution);
  const int nd = static_cast<int>(axes.size());
  size_t total = 1;
  for (auto& a : axes) {
    s.dims.push_back(static_cast<int>(a.size()));
    total *= a.size();
  }
  for (size_t f = 0; f < total; ++f) {
    Param u(nd);
    size_t r = f;
    for (int k = 0; k < nd; ++k) {
      u[k] = axes[k][r % axes[k].size()];
      r /= axes[k].size();
    }
    s.params.push_back(u);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto comps = parallel_map(total, [&](size_t f) -> std::vector<double> {
    const Param& u = s.params[f];
    if (!chart.in_domain(u)) return {};
    return kind == FormKind::Theta ? theta_at(domain, chart, u, cfg) : real_one_form_at(domain, chart, u, cfg);
  });
  for (size_t f = 0; f < total; ++f) {
    const Param& u = s.params[f];
    s.positions.push_back(chart.in_domain(u) ? chart.embed(u) : RVec::Constant(domain.real_dim(), nan));
    s.components.push_back(comps[f]);
  }
  s.cell_residuals.assign(total, nan);
  if (nd >= 2) {
    const size_t n0 = axes[0].size(), n1 = axes[1].size();
    for (size_t f = 0; f < total; ++f) {
      size_t i0 = f % n0, i1 = (f / n0) % n1;
      bool wrap0 = chart.box[0].periodic, wrap1 = chart.box[1].periodic;
      if ((!wrap0 && i0 + 1 >= n0) || (!wrap1 && i1 + 1 >= n1)) continue;
      size_t base = f - i0 - i1 * n0;
      size_t j0 = (i0 + 1) % n0, j1 = (i1 + 1) % n1;
      std::array<size_t, 4> ids = {base + i0 + i1 * n0, base + j0 + i1 * n0, base + j0 + j1 * n0, base + i0 + j1 * n0};
      GridCell c;
      c.a = 0;
      c.b = 1;
      bool ok = true;
      for (int q = 0; q < 4; ++q) {
        if (s.components[ids[q]].empty()) ok = false;
        c.corners[q] = s.params[ids[q]];
        c.forms[q] = s.components[ids[q]];
      }
      if (!ok) continue;
      // unwrap periodic corners so the cell is a genuine square
      for (int q = 1; q < 4; ++q)
        for (int k : {0, 1})
          if (chart.box[k].periodic) {
            double len = chart.box[k].hi - chart.box[k].lo;
            while (c.corners[q][k] < c.corners[0][k] - 0.5 * len) c.corners[q][k] += len;
          }
      s.cell_residuals[f] = dtheta_residual(c);
    }
  }
  return s;
}

void OneFormSample::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path);
  out << std::setprecision(17);
  size_t np = params.empty() ? 0 : params[0].size();
  size_t nx = positions.empty() ? 0 : static_cast<size_t>(positions[0].size());
  size_t nc = 0;
  for (const auto& c : components) nc = std::max(nc, c.size());
  for (size_t k = 0; k < np; ++k) out << "u" << k << ",";
  for (size_t k = 0; k < nx; ++k) out << "x" << k << ",";
  for (size_t k = 0; k < nc; ++k) out << "c" << k << ",";
  out << "cell_residual\n";
  for (size_t f = 0; f < params.size(); ++f) {
    for (double v : params[f]) out << v << ",";
    for (size_t k = 0; k < nx; ++k) out << positions[f](static_cast<Eigen::Index>(k)) << ",";
    for (size_t k = 0; k < nc; ++k) out << (k < components[f].size() ? components[f][k] : std::nan("")) << ",";
    out << cell_residuals[f] << "\n";
  }
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path);
}

}  // namespace dfindex
