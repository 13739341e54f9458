#include "dfindex/index_certifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "dfindex/parallel.hpp"

namespace dfindex {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double coefficient(double eta) { return 1.0 / (1.0 - eta) - 1.0; }

void check_eta(double eta) {
  if (!(eta > 0 && eta < 1)) throw Error(ErrorKind::ConfigInvalid, "eta must lie in (0, 1)");
}

// first and second directional derivatives of f at p along unit u, Richardson-extrapolated
std::pair<double, double> directional(const std::function<double(const RVec&)>& f, const RVec& p, const RVec& u,
                                      double h, double f0) {
  double fp = f(p + h * u), fm = f(p - h * u);
  double gp = f(p + 0.5 * h * u), gm = f(p - 0.5 * h * u);
  double d1h = (fp - fm) / (2 * h), d1g = (gp - gm) / h;
  double d2h = (fp - 2 * f0 + fm) / (h * h), d2g = (gp - 2 * f0 + gm) / (0.25 * h * h);
  return {(4 * d1g - d1h) / 3, (4 * d2g - d2h) / 3};
}

std::vector<double> gauss_nodes(int q, std::vector<double>& w) {
  // Golub-Welsch on [-1, 1]
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(q, q);
  for (int i = 1; i < q; ++i) {
    double b = i / std::sqrt(4.0 * i * i - 1.0);
    T(i, i - 1) = T(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  std::vector<double> x(q);
  w.assign(q, 0.0);
  for (int i = 0; i < q; ++i) {
    x[i] = es.eigenvalues()(i);
    w[i] = 2.0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
  return x;
}

std::vector<size_t> stride_subsample(size_t total, size_t cap) {
  std::vector<size_t> idx;
  if (total <= cap) {
    idx.resize(total);
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
  }
  for (size_t k = 0; k < cap; ++k) idx.push_back(k * total / cap);
  return idx;
}

}  // namespace

// criterion ------------------------------------------------------------------------

std::vector<CriterionSample> criterion_geometry(const DomainSpec& domain, const SigmaPointSet& sigma,
                                                const DistanceConfig& cfg) {
  auto per = parallel_map(sigma.members.size(), [&](size_t i) {
    const SigmaMember& m = sigma.members[i];
    BoundaryPoint bp = boundary_point_at_foot(domain, m.position, 3, cfg);
    std::vector<CVec> dirs = m.near_null.empty() ? std::vector<CVec>{m.L} : m.near_null;
    std::vector<CriterionSample> out;
    for (const CVec& L0 : dirs) {
      CriterionSample s;
      s.position = m.position;
      s.L = L0.normalized();
      s.h = mixed_term(bp, s.L);
      cplx t = third_term(bp, s.L);
      s.T3 = t.real();
      s.T3_imag = t.imag();
      CVec rep = coeff_to_real_rep(s.L);
      s.A = rep.real();
      s.B = rep.imag();
      out.push_back(std::move(s));
    }
    return out;
  });
  std::vector<CriterionSample> flat;
  for (auto& v : per)
    for (auto& s : v) flat.push_back(std::move(s));
  return flat;
}

PsiDerivatives psi_derivatives(const PsiEvaluator& psi, const CriterionSample& s, double step) {
  PsiDerivatives d;
  if (psi.is_zero()) return d;
  std::function<double(const RVec&)> f = [&](const RVec& z) { return psi(z); };
  double f0 = f(s.position);
  double na = s.A.norm(), nb = s.B.norm();
  auto [a1, a2] = directional(f, s.position, s.A / na, step, f0);
  auto [b1, b2] = directional(f, s.position, s.B / nb, step, f0);
  d.Lbar = cplx(na * a1, -nb * b1);
  d.hess = na * na * a2 + nb * nb * b2;
  return d;
}

double criterion_lhs(double eta, const CriterionSample& s, const PsiDerivatives& d) {
  cplx c = 0.5 * d.Lbar + s.h;
  return coefficient(eta) * std::norm(c) + 0.5 * (0.5 * d.hess + s.T3);
}

CriterionReport evaluate_criterion(const std::vector<CriterionSample>& samples, const std::vector<PsiDerivatives>& d,
                                   double eta, double slack) {
  check_eta(eta);
  CriterionReport r;
  r.eta = eta;
  r.slack = slack;
  if (samples.empty()) {
    r.vacuous = true;
    r.max_lhs = kNaN;
    r.certified = true;
    return r;
  }
  r.max_lhs = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < samples.size(); ++i) {
    double v = criterion_lhs(eta, samples[i], d[i]);
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "criterion value is not finite");
    r.lhs.push_back(v);
    r.positions.push_back(samples[i].position);
    if (v > r.max_lhs) {
      r.max_lhs = v;
      r.argmax = i;
    }
  }
  r.certified = r.max_lhs <= slack;
  return r;
}

namespace {

double psi_step(const DomainSpec& domain) { return 4e-3 * domain.scale; }

std::vector<PsiDerivatives> all_derivatives(const DomainSpec& domain, const PsiEvaluator& psi,
                                            const std::vector<CriterionSample>& samples) {
  return parallel_map(samples.size(), [&](size_t i) { return psi_derivatives(psi, samples[i], psi_step(domain)); });
}

}  // namespace

CriterionReport boundary_criterion(const DomainSpec& domain, const SigmaPointSet& sigma, const PsiEvaluator& psi,
                                   double eta, double slack, const DistanceConfig& cfg) {
  check_eta(eta);
  if (sigma.empty()) return evaluate_criterion({}, {}, eta, slack);
  auto samples = criterion_geometry(domain, sigma, cfg);
  return evaluate_criterion(samples, all_derivatives(domain, psi, samples), eta, slack);
}

// interior oracle ------------------------------------------------------------------------

OracleReport interior_psh_oracle(const DomainSpec& domain, const PsiEvaluator& psi, double eta,
                                 const std::vector<RVec>& mesh, double slack_rel,
                                 const std::function<WirtingerJet(const RVec&)>& rho_override,
                                 const DistanceConfig& cfg) {
  check_eta(eta);
  const double h = psi_step(domain);
  const int n = domain.n, D = 2 * n;
  struct Point {
    double lam, norm;
  };
  auto res = parallel_map(mesh.size(), [&](size_t i) {
    const RVec& z = mesh[i];
    WirtingerJet base = rho_override ? rho_override(z) : delta_jet(domain, z, 2, cfg);
    if (!(base.value() < 0)) throw Error(ErrorKind::MeshOutside, "oracle mesh point with rho >= 0");
    double p0 = 0.0;
    RVec pg = RVec::Zero(D);
    RMat pH = RMat::Zero(D, D);
    if (!psi.is_zero() && !psi.vanishes_near(z, 2 * h)) {
      WirtingerJet pj = fd_jet([&](const RVec& y) { return psi(y); }, z, n, 2, h);
      p0 = pj.value();
      pg = pj.grad();
      pH = pj.hess();
    }
    double e = std::exp(p0);
    const RVec& bg = base.grad();
    WirtingerJet rho(n, 2);
    rho.set_value(e * base.value());
    rho.grad() = e * (bg + base.value() * pg);
    rho.hess() = e * (base.hess() + bg * pg.transpose() + pg * bg.transpose() +
                      base.value() * (pH + pg * pg.transpose()));
    double r = -rho.value();
    if (!(r > 0)) throw Error(ErrorKind::MeshOutside, "oracle mesh point with rho >= 0");
    CVec dz = rho.dz();
    CMat M = eta * std::pow(r, eta - 1) * rho.mixed() + eta * (1 - eta) * std::pow(r, eta - 2) * (dz * dz.adjoint());
    M = 0.5 * (M + M.adjoint()).eval();
    return Point{hermitian_min_eig(M), M.norm()};
  });
  OracleReport rep;
  rep.eta = eta;
  rep.points = mesh.size();
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  rep.min_normalized = std::numeric_limits<double>::infinity();
  rep.certified = true;
  for (size_t i = 0; i < res.size(); ++i) {
    if (res[i].lam < rep.min_eigenvalue) {
      rep.min_eigenvalue = res[i].lam;
      rep.worst_index = i;
    }
    double nn = res[i].norm > 0 ? res[i].lam / res[i].norm : 0.0;
    rep.min_normalized = std::min(rep.min_normalized, nn);
    if (res[i].lam < -slack_rel * res[i].norm) rep.certified = false;
  }
  if (mesh.empty()) rep.min_eigenvalue = rep.min_normalized = kNaN;
  return rep;
}

std::vector<RVec> interior_shell(const DomainSpec& domain, const std::vector<RVec>& boundary,
                                 const std::vector<double>& depths) {
  std::vector<RVec> out;
  out.reserve(boundary.size() * depths.size());
  for (const RVec& p : boundary) {
    RVec g = wirtinger_jet(domain, p, 1).grad();
    RVec nrm = g / g.norm();
    for (double d : depths) out.push_back(p - d * nrm);
  }
  return out;
}

// potentials on Sigma --------------------------------------------------------------------

CollarSpec default_collar(const DomainSpec& domain, const DistanceConfig& cfg) {
  const double w = cfg.collar_fraction * domain.diameter;
  return CollarSpec{w, w};
}

namespace {

double max_theta_on_loops(const Atlas& atlas, const std::vector<PathInSigma>& loops) {
  double m = 0.0;
  for (const auto& l : loops)
    for (const auto& v : l.vertices)
      for (double c : atlas[v.chart].eval(v.u)) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

CohomologyVerdict sigma_periods(const ZooEntry& entry, const DistanceConfig& cfg) {
  const DomainSpec& d = entry.domain;
  if (entry.sigma_kind == SigmaKind::ComplexSubmanifold) {
    Atlas atlas;
    for (const auto& c : entry.charts) atlas.push_back(theta_source(d, c, cfg));
    std::vector<PeriodEntry> periods;
    for (const auto& l : entry.loops) periods.push_back({l.name, period(atlas, l)});
    double tol = default_exact_tolerance(std::max(max_theta_on_loops(atlas, entry.loops), 1e-12), d.diameter);
    return classify(periods, tol);
  }
  if (entry.sigma_kind != SigmaKind::Foliation) return classify({}, 0.0);
  // leafwise periods on two leaves
  const FoliationAtlas& fa = *entry.foliation;
  std::vector<PeriodEntry> periods;
  for (double t : {fa.leaf_range.lo, 0.5 * (fa.leaf_range.lo + fa.leaf_range.hi)}) {
    Atlas atlas{theta_source(d, fa.leaf_chart(t), cfg)};
    for (const auto& l : entry.loops) {
      std::ostringstream name;
      name << l.name << "@" << t;
      periods.push_back({name.str(), period(atlas, l)});
    }
  }
  Atlas a0{theta_source(d, fa.leaf_chart(fa.leaf_range.lo), cfg)};
  double tol = default_exact_tolerance(std::max(max_theta_on_loops(a0, entry.loops), 1e-3), d.diameter);
  return classify(periods, tol);
}

SigmaPotential sigma_potential(const ZooEntry& entry, const EstimateOptions& opts) {
  const DomainSpec& d = entry.domain;
  const DistanceConfig& cfg = opts.distance;
  CollarSpec collar = entry.collar ? *entry.collar : default_collar(d, cfg);
  SigmaPotential sp;
  sp.psi = zero_psi();
  sp.verdict = sigma_periods(entry, cfg);
  if (!sp.verdict.exact) return sp;
  if (entry.sigma_kind == SigmaKind::ComplexSubmanifold) {
    const SigmaChart& c = entry.charts.front();
    Param base(c.box.size());
    for (size_t i = 0; i < base.size(); ++i) base[i] = 0.5 * (c.box[i].lo + c.box[i].hi);
    sp.field = build_potential(scaled_source(theta_source(d, c, cfg), 2.0), base, sp.verdict,
                               opts.potential_resolution, opts.seed);
    sp.psi = extend_to_collar(d, *sp.field, collar, cfg);
  } else if (entry.sigma_kind == SigmaKind::Foliation) {
    sp.leaves =
        build_leaf_potentials(d, *entry.foliation, opts.leaf_count, sp.verdict, opts.potential_resolution, opts.seed, cfg);
    sp.psi = extend_to_collar(d, *sp.leaves, collar, cfg);
  }
  return sp;
}

// index estimation ------------------------------------------------------------------------

void IndexCertificate::require_certificate() const {
  if (!has_certificate) throw Error(ErrorKind::NoCertificate, "no eta in the grid was certified for " + domain_id);
}

namespace {

struct Family {
  const SigmaChart* chart = nullptr;
  std::vector<std::vector<int>> terms;  // per term, exponent or signed mode per parameter
  std::string describe() const {
    std::ostringstream o;
    o << "family(" << terms.size() << " terms on " << chart->id << ")";
    return o.str();
  }
};

double factor(const ParamRange& r, int code, double u) {
  if (r.periodic) {
    double w = 2 * kPi * (u - r.lo) / (r.hi - r.lo);
    if (code == 0) return 1.0;
    return code > 0 ? std::cos(code * w) : std::sin(-code * w);
  }
  double x = (u - 0.5 * (r.lo + r.hi)) / (0.5 * (r.hi - r.lo));
  return std::pow(x, code);
}

Family make_family(const SigmaChart& chart, const FamilySpec& spec) {
  Family f;
  f.chart = &chart;
  std::vector<std::vector<int>> codes;
  for (const auto& r : chart.box) {
    std::vector<int> c;
    if (r.periodic) {
      c.push_back(0);
      for (int k = 1; k <= spec.fourier_modes; ++k) {
        c.push_back(k);
        c.push_back(-k);
      }
    } else {
      for (int p = 0; p <= spec.poly_degree; ++p) c.push_back(p);
    }
    codes.push_back(c);
  }
  std::vector<int> cur(codes.size(), 0);
  std::function<void(size_t)> rec = [&](size_t k) {
    if (k == codes.size()) {
      bool constant = std::all_of(cur.begin(), cur.end(), [](int c) { return c == 0; });
      if (!constant) f.terms.push_back(cur);
      return;
    }
    for (int c : codes[k]) {
      cur[k] = c;
      rec(k + 1);
    }
  };
  rec(0);
  return f;
}

PsiEvaluator family_psi(const DomainSpec& domain, const Family& fam, const std::vector<double>& coeffs,
                        const CollarSpec& collar, const DistanceConfig& cfg) {
  SigmaChart chart = *fam.chart;
  auto terms = fam.terms;
  SigmaValue value = [chart, terms, coeffs](const RVec& foot) {
    Param u = chart.locate(foot);
    double dt = (foot - chart.embed(chart.wrap(u))).norm();
    double v = 0.0;
    for (size_t k = 0; k < terms.size(); ++k) {
      if (coeffs[k] == 0.0) continue;
      double b = 1.0;
      for (size_t i = 0; i < terms[k].size(); ++i) b *= factor(chart.box[i], terms[k][i], u[i]);
      v += coeffs[k] * b;
    }
    return std::make_pair(v, dt);
  };
  return PsiEvaluator(domain, value, collar, fam.describe(), cfg);
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters, double& best_x) {
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  best_x = fc < fd ? c : d;
  return std::min(fc, fd);
}

struct FamilyResult {
  std::vector<double> coeffs;
  CriterionReport report;
  PsiEvaluator psi;
};

FamilyResult search_family(const DomainSpec& domain, const Family& fam, const std::vector<CriterionSample>& samples,
                           double eta, double slack, const FamilySpec& spec, const CollarSpec& collar,
                           const DistanceConfig& cfg) {
  const size_t K = fam.terms.size();
  // derivative data per basis function; the criterion is affine-quadratic in the coefficients
  std::vector<std::vector<PsiDerivatives>> basis(K);
  for (size_t k = 0; k < K; ++k) {
    std::vector<double> e(K, 0.0);
    e[k] = 1.0;
    basis[k] = all_derivatives(domain, family_psi(domain, fam, e, collar, cfg), samples);
  }
  auto combine = [&](const std::vector<double>& c) {
    std::vector<PsiDerivatives> d(samples.size());
    for (size_t i = 0; i < samples.size(); ++i)
      for (size_t k = 0; k < K; ++k) {
        d[i].Lbar += c[k] * basis[k][i].Lbar;
        d[i].hess += c[k] * basis[k][i].hess;
      }
    return d;
  };
  auto objective = [&](const std::vector<double>& c) {
    auto d = combine(c);
    double m = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < samples.size(); ++i) m = std::max(m, criterion_lhs(eta, samples[i], d[i]));
    return m;
  };
  std::vector<double> c(K, 0.0);
  double best = objective(c);
  for (int sweep = 0; sweep < spec.sweeps; ++sweep)
    for (size_t k = 0; k < K; ++k) {
      double x = c[k];
      double v = golden_min(
          [&](double t) {
            auto cc = c;
            cc[k] = t;
            return objective(cc);
          },
          -spec.coefficient_box, spec.coefficient_box, spec.line_iterations, x);
      if (v < best) {
        best = v;
        c[k] = x;
      }
    }
  FamilyResult fr;
  fr.coeffs = c;
  fr.report = evaluate_criterion(samples, combine(c), eta, slack);
  fr.psi = family_psi(domain, fam, c, collar, cfg);
  return fr;
}

struct CurveConstruction {
  CriterionReport report;
  PsiEvaluator psi;
};
CurveConstruction construct_curve_psi(const DomainSpec& domain, const SigmaChart& curve, double eta, double slack,
                                      size_t samples, const DistanceConfig& cfg);

}  // namespace

IndexCertificate estimate_index(const ZooEntry& entry, const EstimateOptions& opts) {
  const DomainSpec& d = entry.domain;
  for (double eta : opts.eta_grid) check_eta(eta);
  IndexCertificate cert;
  cert.domain_id = d.id;
  cert.eta_grid = opts.eta_grid;
  std::sort(cert.eta_grid.begin(), cert.eta_grid.end());
  const double slack_b = opts.boundary_slack ? *opts.boundary_slack : 1e-4 * entry.levi_scale;
  const double d0 = opts.d0_fraction * d.diameter;
  cert.tolerances = {{"boundary_slack", slack_b}, {"oracle_slack_rel", opts.oracle_slack}, {"d0", d0}};

  auto mesh = entry.boundary_mesh(opts.mesh_points);
  SigmaPointSet sigma = detect_sigma(d, mesh, opts.sigma_threshold, opts.distance);
  cert.tolerances["sigma_threshold"] = sigma.threshold;
  SigmaPointSet sub = sigma;
  sub.members.clear();
  for (size_t i : stride_subsample(sigma.members.size(), opts.max_criterion_samples))
    sub.members.push_back(sigma.members[i]);
  auto samples = criterion_geometry(d, sub, opts.distance);
  cert.sizes = {{"boundary_mesh", double(mesh.size())},
                {"sigma_detected", double(sigma.members.size())},
                {"criterion_samples", double(samples.size())}};

  // oracle mesh: near-boundary shell for delta e^psi, deeper layers with an override
  std::vector<RVec> base;
  for (size_t i : stride_subsample(mesh.size(), opts.interior_base_points)) base.push_back(mesh[i]);
  std::vector<double> depths;
  if (entry.rho_override) {
    for (double f : {0.01, 0.05, 0.15, 0.3, 0.5, 0.7}) depths.push_back(f * d.scale);
    cert.tolerances["d0"] = depths.front();
  } else {
    for (double f : opts.interior_depth_factors) depths.push_back(f * d0);
  }
  auto interior = interior_shell(d, base, depths);
  cert.sizes["interior_mesh"] = double(interior.size());
  DistanceConfig ocfg = opts.distance;
  ocfg.method = JetMethod::ShapeOperator;
  ocfg.check_ambiguity = false;

  SigmaPotential sp;
  bool vacuous = sigma.empty();
  if (vacuous) {
    cert.verdict = "Vacuous";
    sp.psi = zero_psi();
  } else if (entry.sigma_kind == SigmaKind::RealCurve) {
    cert.verdict = "RealCurve";
  } else {
    sp = sigma_potential(entry, opts);
    cert.verdict = sp.verdict.classification();
    cert.periods = sp.verdict.periods;
  }
  std::optional<Family> fam;
  CollarSpec collar = entry.collar ? *entry.collar : default_collar(d, opts.distance);
  if (cert.verdict == "Obstructed") {
    fam = make_family(entry.charts.front(), opts.family);
    cert.diagnostics.push_back("theta has nonzero periods (Obstructed): no potential; searching " + fam->describe() +
                               ", which only yields lower bounds");
  }

  for (double eta : cert.eta_grid) {
    EtaResult er;
    er.eta = eta;
    PsiEvaluator psi = sp.psi;
    if (vacuous) {
      er.criterion = evaluate_criterion({}, {}, eta, slack_b);
      cert.psi_provenance = entry.rho_override ? "zero (override defining function)" : "zero";
    } else if (cert.verdict == "RealCurve") {
      auto cc = construct_curve_psi(d, *entry.curve, eta, slack_b, 48, opts.distance);
      er.criterion = cc.report;
      psi = cc.psi;
      cert.psi_provenance = "real-curve construction";
    } else if (fam) {
      auto fr = search_family(d, *fam, samples, eta, slack_b, opts.family, collar, opts.distance);
      er.criterion = fr.report;
      psi = fr.psi;
      cert.psi_provenance = fam->describe();
    } else {
      er.criterion = evaluate_criterion(samples, all_derivatives(d, psi, samples), eta, slack_b);
      cert.psi_provenance = psi.provenance();
    }
    if (er.criterion.certified) {
      er.oracle = interior_psh_oracle(d, psi, eta, interior, opts.oracle_slack, entry.rho_override, ocfg);
      er.certified = er.oracle->certified;
      if (!er.certified) {
        std::ostringstream o;
        o << "eta " << eta << ": boundary criterion certified but interior oracle min eigenvalue "
          << er.oracle->min_eigenvalue;
        cert.diagnostics.push_back(o.str());
      }
    }
    cert.results.push_back(std::move(er));
  }
  bool seen_fail = false;
  for (const auto& r : cert.results) {
    if (r.certified) {
      cert.bound = r.eta;
      cert.has_certificate = true;
      if (seen_fail) cert.monotone = false;
    } else {
      seen_fail = true;
    }
  }
  if (!cert.monotone) cert.diagnostics.push_back("certified set is not downward closed in the grid");
  if (!cert.has_certificate) cert.diagnostics.push_back("no eta certified; bound reported as 0");
  return cert;
}

// residual sequence -------------------------------------------------------------------------

ResidualReport residual_sequence(const DomainSpec& domain, const SigmaChart& chart, const std::vector<double>& etas,
                                 const std::function<PsiEvaluator(size_t, double)>& producer, double inner_fraction,
                                 int quadrature, const DistanceConfig& cfg) {
  if (chart.kind != ChartKind::Complex) throw Error(ErrorKind::ChartMismatch, "residuals need a complex chart");
  std::vector<double> gw;
  std::vector<double> gx = gauss_nodes(quadrature, gw);
  const size_t nd = chart.box.size();
  std::vector<std::vector<double>> nodes(nd), weights(nd);
  for (size_t k = 0; k < nd; ++k) {
    const auto& r = chart.box[k];
    if (r.periodic) {
      int m = 2 * quadrature;
      for (int i = 0; i < m; ++i) {
        nodes[k].push_back(r.lo + (r.hi - r.lo) * i / m);
        weights[k].push_back((r.hi - r.lo) / m);
      }
    } else {
      double mid = 0.5 * (r.lo + r.hi), half = 0.5 * (r.hi - r.lo) * inner_fraction;
      for (int i = 0; i < quadrature; ++i) {
        nodes[k].push_back(mid + half * gx[i]);
        weights[k].push_back(half * gw[i]);
      }
    }
  }
  size_t total = 1;
  for (auto& v : nodes) total *= v.size();
  struct Q {
    double w;
    std::vector<CriterionSample> s;
  };
  auto quad = parallel_map(total, [&](size_t f) {
    Param u(nd);
    double w = 1.0;
    size_t r = f;
    for (size_t k = 0; k < nd; ++k) {
      size_t i = r % nodes[k].size();
      r /= nodes[k].size();
      u[k] = nodes[k][i];
      w *= weights[k][i];
    }
    RVec p = chart.embed(u);
    BoundaryPoint bp = boundary_point_at_foot(domain, p, 2, cfg);
    auto tangents = chart.complex_tangents(u);
    // area element from the real frame x_j, J x_j
    Eigen::MatrixXd F(p.size(), 2 * tangents.size());
    for (size_t j = 0; j < tangents.size(); ++j) {
      RVec x = 2.0 * coeff_to_real_rep(tangents[j]).real();
      F.col(2 * j) = x;
      F.col(2 * j + 1) = apply_J(x);
    }
    w *= std::sqrt((F.transpose() * F).determinant());
    Q q;
    q.w = w;
    for (const CVec& t : tangents) {
      CriterionSample s;
      s.position = p;
      s.L = t.normalized();
      s.h = mixed_term(bp, s.L);
      CVec rep = coeff_to_real_rep(s.L);
      s.A = rep.real();
      s.B = rep.imag();
      q.s.push_back(s);
    }
    return q;
  });
  ResidualReport rep;
  rep.etas = etas;
  for (size_t n = 0; n < etas.size(); ++n) {
    PsiEvaluator psi = producer(n, etas[n]);
    auto vals = parallel_map(quad.size(), [&](size_t i) {
      double acc = 0.0;
      for (const auto& s : quad[i].s) acc += std::abs(0.5 * psi_derivatives(psi, s, psi_step(domain)).Lbar + s.h);
      return quad[i].w * acc;
    });
    double sum = 0.0;
    for (double v : vals) sum += v;
    rep.residuals.push_back(sum);
  }
  rep.decreasing = !rep.residuals.empty() && rep.residuals.back() < 1e-3;
  for (size_t i = 1; i < rep.residuals.size(); ++i)
    if (rep.residuals[i] > rep.residuals[i - 1] + 1e-8) rep.decreasing = false;
  rep.note =
      "L1 residuals only; psi_n + constants give identical residuals, so no distributional limit is constructed";
  return rep;
}

// Caccioppoli ---------------------------------------------------------------------------------

namespace {

double smoothstep7(double x) {
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  double x4 = x * x * x * x;
  return x4 * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
}
double smoothstep7_d(double x) {
  if (x <= 0 || x >= 1) return 0.0;
  return 140.0 * x * x * x * (1 - x) * (1 - x) * (1 - x);
}

}  // namespace

CaccioppoliReport caccioppoli_check(const PatchSpec& patch, const std::function<double(const RVec&)>& f, int n,
                                    int quadrature) {
  if (n < 1) throw Error(ErrorKind::ConfigInvalid, "n must be a positive integer");
  if (!(patch.radius_W > 0 && patch.radius_W < patch.radius_V && patch.radius_V < patch.radius_U))
    throw Error(ErrorKind::ConfigInvalid, "patch needs 0 < W < V < U");
  const int j = patch.coordinate;
  const double h = 1e-3 * patch.radius_U;
  auto at = [&](double x, double y) {
    RVec z = patch.center;
    z(2 * j) += x;
    z(2 * j + 1) += y;
    return z;
  };
  auto local = [&](double x, double y) {
    double f0 = f(at(x, y));
    std::function<double(const RVec&)> g = f;
    auto [fx, fxx] = directional(g, at(x, y), [&] {
      RVec e = RVec::Zero(patch.center.size());
      e(2 * j) = 1;
      return e;
    }(), h, f0);
    auto [fy, fyy] = directional(g, at(x, y), [&] {
      RVec e = RVec::Zero(patch.center.size());
      e(2 * j + 1) = 1;
      return e;
    }(), h, f0);
    double dbar2 = 0.25 * (fx * fx + fy * fy);
    double lap = 0.25 * (fxx + fyy);
    return std::make_pair(dbar2, lap);
  };
  CaccioppoliReport rep;
  rep.patch = patch;
  rep.n = n;
  // hypothesis on U
  const int hr = 40, ha = 64;
  double hmax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= hr; ++i)
    for (int k = 0; k < (patch.shape == PatchShape::Disc ? ha : hr + 1); ++k) {
      double x, y;
      if (patch.shape == PatchShape::Disc) {
        double rr = patch.radius_U * i / hr, a = 2 * kPi * k / ha;
        x = rr * std::cos(a);
        y = rr * std::sin(a);
      } else {
        x = patch.radius_U * (2.0 * i / hr - 1);
        y = patch.radius_U * (2.0 * k / hr - 1);
      }
      auto [d2, lap] = local(x, y);
      hmax = std::max(hmax, n * d2 + lap);
    }
  rep.hypothesis_max = hmax;
  if (hmax > 1e-8 * (1 + std::abs(hmax)))
    throw Error(ErrorKind::HypothesisFail, "n|dbar f|^2 + Hess_f > 0 somewhere on the patch");
  std::vector<double> gw;
  std::vector<double> gx = gauss_nodes(quadrature, gw);
  const double W = patch.radius_W, V = patch.radius_V;
  double left = 0.0, C = 0.0;
  if (patch.shape == PatchShape::Disc) {
    const int na = 2 * quadrature;
    for (int i = 0; i < quadrature; ++i) {
      double rr = 0.5 * W * (gx[i] + 1), wr = 0.5 * W * gw[i];
      for (int k = 0; k < na; ++k) {
        double a = 2 * kPi * k / na;
        left += wr * rr * (2 * kPi / na) * local(rr * std::cos(a), rr * std::sin(a)).first;
      }
      double s = W + 0.5 * (V - W) * (gx[i] + 1), ws = 0.5 * (V - W) * gw[i];
      double cp = smoothstep7_d((s - W) / (V - W)) / (V - W);
      C += 2 * kPi * ws * s * cp * cp;
    }
  } else {
    for (int i = 0; i < quadrature; ++i)
      for (int k = 0; k < quadrature; ++k)
        left += W * W * gw[i] * gw[k] * local(W * gx[i], W * gx[k]).first;
    // chi(x, y) = c(x) c(y), c = 1 on [-W, W], 0 off [-V, V]
    double I1 = 2 * W, Id = 0.0;
    for (int i = 0; i < quadrature; ++i) {
      double s = W + 0.5 * (V - W) * (gx[i] + 1), ws = 0.5 * (V - W) * gw[i];
      double c = 1 - smoothstep7((s - W) / (V - W));
      double cp = smoothstep7_d((s - W) / (V - W)) / (V - W);
      I1 += 2 * ws * c * c;
      Id += 2 * ws * cp * cp;
    }
    C = 2 * Id * I1;
  }
  rep.left = left;
  rep.C = C;
  rep.bound = C / (double(n) * n);
  rep.holds = left <= 0.99 * rep.bound;
  return rep;
}

// real curves ----------------------------------------------------------------------------------

namespace {

RVec unit_in_H(const RVec& nrm) {
  RVec jn = apply_J(nrm);
  RVec best;
  double bn = -1;
  for (int k = 0; k < nrm.size(); ++k) {
    RVec e = RVec::Zero(nrm.size());
    e(k) = 1;
    e -= e.dot(nrm) * nrm + e.dot(jn) * jn;
    if (e.norm() > bn + 1e-12) {
      bn = e.norm();
      best = e;
    }
  }
  return best / bn;
}

RVec boundary_normal(const DomainSpec& domain, const RVec& p) {
  RVec g = wirtinger_jet(domain, p, 1).grad();
  return g / g.norm();
}

double periodic_interp(const std::vector<double>& ts, const std::vector<double>& vals, const ParamRange& r,
                       double t) {
  const size_t n = ts.size();
  double len = r.hi - r.lo;
  if (!r.periodic) {
    if (t <= ts.front()) return vals.front();
    if (t >= ts.back()) return vals.back();
    size_t i = std::upper_bound(ts.begin(), ts.end(), t) - ts.begin() - 1;
    double w = (t - ts[i]) / (ts[i + 1] - ts[i]);
    return (1 - w) * vals[i] + w * vals[i + 1];
  }
  // barycentric trigonometric interpolation on equispaced nodes (n even)
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double arg = kPi * (t - ts[i]) / len;
    double s = std::sin(arg);
    if (std::abs(s) < 1e-14) return vals[i];
    double k = (i % 2 ? -1.0 : 1.0) * std::cos(arg) / s;
    num += k * vals[i];
    den += k;
  }
  return num / den;
}

CurveConstruction construct_curve_psi(const DomainSpec& domain, const SigmaChart& curve, double eta, double slack,
                                      size_t samples, const DistanceConfig& cfg) {
  check_eta(eta);
  if (curve.kind != ChartKind::Real || curve.m != 1 || !curve.real_tangents)
    throw Error(ErrorKind::NotACurve, "Sigma is not described by a one-dimensional real chart");
  const ParamRange& r = curve.box[0];
  if (samples % 2) ++samples;
  std::vector<double> ts;
  for (size_t k = 0; k < samples; ++k)
    ts.push_back(r.periodic ? r.lo + (r.hi - r.lo) * k / samples
                            : r.lo + (r.hi - r.lo) * (k + 0.5) / samples);
  struct Geo {
    RVec p, e1, je1;
    double cosb, lev;
    BoundaryPoint bp;
  };
  auto geo = parallel_map(ts.size(), [&](size_t k) {
    Geo g;
    g.p = curve.embed({ts[k]});
    g.bp = boundary_point_at_foot(domain, g.p, 2, cfg);
    g.lev = levi_decompose(g.bp).min_eig();
    RVec nrm = g.bp.grad_delta.normalized();
    RVec tau = curve.real_tangents({ts[k]})[0].normalized();
    g.cosb = std::abs(tau.dot(apply_J(nrm)));
    return g;
  });
  double lev_max = 0.0;
  for (const auto& g : geo) lev_max = std::max(lev_max, std::abs(g.lev));
  if (lev_max > 1e-6) throw Error(ErrorKind::NotACurve, "Levi form does not degenerate along the curve");
  const double band = 1e-3;
  bool transversal = std::all_of(geo.begin(), geo.end(), [&](const Geo& g) { return g.cosb >= 1 - band; });
  bool parallel = std::all_of(geo.begin(), geo.end(), [&](const Geo& g) { return g.cosb <= band; });
  if (!transversal && !parallel)
    throw Error(ErrorKind::TangencyUnresolved, "curve tangent is neither complex-tangent nor along J(grad delta)");
  auto frame_at = [&, transversal](const RVec& p, const RVec& tau) {
    RVec nrm = boundary_normal(domain, p);
    RVec e1;
    if (transversal) {
      e1 = unit_in_H(nrm);
    } else {
      RVec jn = apply_J(nrm);
      e1 = tau - tau.dot(nrm) * nrm - tau.dot(jn) * jn;
      e1.normalize();
    }
    return std::make_pair(e1, apply_J(e1));
  };
  for (size_t k = 0; k < geo.size(); ++k) {
    auto [e1, je1] = frame_at(geo[k].p, curve.real_tangents({ts[k]})[0].normalized());
    geo[k].e1 = e1;
    geo[k].je1 = je1;
  }
  const double hG = 1e-2 * domain.scale;
  DistanceConfig quiet = cfg;
  quiet.check_ambiguity = false;
  auto G_at = [&](const RVec& p, const RVec& v, double s) {
    RVec q = project_to_boundary(domain, p + s * v, quiet).foot;
    return nu_nu_pairing(boundary_point_at_foot(domain, q, 2, cfg), v);
  };
  struct Gv {
    double G1, G2, dG1, dG2;
  };
  auto gv = parallel_map(geo.size(), [&](size_t k) {
    const Geo& g = geo[k];
    Gv o;
    o.G1 = nu_nu_pairing(g.bp, g.e1);
    o.G2 = nu_nu_pairing(g.bp, g.je1);
    auto deriv = [&](const RVec& v) {
      double d1 = (G_at(g.p, v, hG) - G_at(g.p, v, -hG)) / (2 * hG);
      double d2 = (G_at(g.p, v, 0.5 * hG) - G_at(g.p, v, -0.5 * hG)) / hG;
      return (4 * d2 - d1) / 3;
    };
    o.dG1 = deriv(g.e1);
    o.dG2 = deriv(g.je1);
    return o;
  });
  const double coef = coefficient(eta);
  double mx = -std::numeric_limits<double>::infinity();
  std::vector<double> avals;
  for (const auto& o : gv) {
    mx = std::max(mx, coef * o.G1 * o.G1 + o.dG1 + o.dG2);
    avals.push_back(-o.G2);
  }
  const double C = std::max(mx + 0.1 * std::abs(mx), 0.0) + slack;
  const double b = -2 * C - 1;

  SigmaChart chart = curve;
  auto tsv = ts;
  SigmaValue value = [chart, tsv, avals, b, frame_at](const RVec& foot) {
    Param u = chart.wrap(chart.locate(foot));
    RVec g = chart.embed(u);
    RVec tau = chart.real_tangents(u)[0].normalized();
    RVec je1 = frame_at(g, tau).second;
    RVec dvec = foot - g;
    double s = dvec.dot(je1);
    double a = periodic_interp(tsv, avals, chart.box[0], u[0]);
    return std::make_pair(s * a + 0.5 * s * s * b, dvec.norm());
  };
  CollarSpec collar = default_collar(domain, cfg);
  PsiEvaluator psi(domain, value, collar, "real-curve psi on " + curve.id, cfg);

  const double hp = psi_step(domain);
  auto lhs = parallel_map(geo.size(), [&](size_t k) {
    const Geo& g = geo[k];
    std::function<double(const RVec&)> f = [&](const RVec& z) { return psi(z); };
    double f0 = f(g.p);
    auto [p1, p11] = directional(f, g.p, g.e1, hp, f0);
    auto [p2, p22] = directional(f, g.p, g.je1, hp, f0);
    cplx first(p1 + gv[k].G1, p2 + gv[k].G2);
    return coef * std::norm(first) + (p11 + p22 + gv[k].dG1 + gv[k].dG2);
  });
  CurveConstruction out;
  CriterionReport& rep = out.report;
  rep.eta = eta;
  rep.slack = slack;
  rep.lhs = lhs;
  rep.max_lhs = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < lhs.size(); ++k) {
    if (!std::isfinite(lhs[k])) throw Error(ErrorKind::NonFinite, "curve criterion value is not finite");
    rep.positions.push_back(geo[k].p);
    if (lhs[k] > rep.max_lhs) {
      rep.max_lhs = lhs[k];
      rep.argmax = k;
    }
  }
  rep.certified = rep.max_lhs <= slack;
  rep.C_eta = C;
  rep.a_values = avals;
  rep.b_values.assign(lhs.size(), b);
  rep.curve_case = transversal ? "transversal" : "parallel";
  out.psi = psi;
  return out;
}

}  // namespace

CriterionReport real_curve_certify(const DomainSpec& domain, const SigmaChart& curve, double eta, double slack,
                                   size_t samples, const DistanceConfig& cfg) {
  return construct_curve_psi(domain, curve, eta, slack, samples, cfg).report;
}

CriterionReport real_curve_certify(const ZooEntry& entry, double eta, double slack, size_t samples,
                                   const DistanceConfig& cfg) {
  if (entry.sigma_kind != SigmaKind::RealCurve || !entry.curve)
    throw Error(ErrorKind::NotACurve, "Sigma of " + entry.domain.id + " is not a real curve");
  return real_curve_certify(entry.domain, *entry.curve, eta, slack, samples, cfg);
}

}  // namespace dfindex
