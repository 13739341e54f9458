#include "dfindex/cohomology.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <random>

#include "dfindex/parallel.hpp"

namespace dfindex {

namespace {

struct FormCache {
  std::mutex mu;
  std::map<Param, std::vector<double>> values;
};

OneFormSource cached(std::string id, const SigmaChart& chart, std::function<std::vector<double>(const Param&)> f) {
  auto cache = std::make_shared<FormCache>();
  OneFormSource s;
  s.id = std::move(id);
  s.chart = chart;
  s.eval = [cache, f, chart](const Param& u) {
    Param w = chart.wrap(u);
    {
      std::lock_guard<std::mutex> lock(cache->mu);
      auto it = cache->values.find(w);
      if (it != cache->values.end()) return it->second;
    }
    std::vector<double> v = f(w);
    std::lock_guard<std::mutex> lock(cache->mu);
    cache->values.emplace(w, v);
    return v;
  };
  return s;
}

}  // namespace

OneFormSource theta_source(const DomainSpec& domain, const SigmaChart& chart, const DistanceConfig& cfg) {
  const DomainSpec* d = &domain;
  return cached("theta:" + chart.id, chart, [d, chart, cfg](const Param& u) { return theta_at(*d, chart, u, cfg); });
}

OneFormSource real_form_source(const DomainSpec& domain, const SigmaChart& chart, const DistanceConfig& cfg) {
  const DomainSpec* d = &domain;
  return cached("real:" + chart.id, chart,
                [d, chart, cfg](const Param& u) { return real_one_form_at(*d, chart, u, cfg); });
}

OneFormSource scaled_source(const OneFormSource& src, double factor) {
  OneFormSource s = src;
  s.id = src.id + "*" + std::to_string(factor);
  auto f = src.eval;
  s.eval = [f, factor](const Param& u) {
    auto v = f(u);
    for (double& x : v) x *= factor;
    return v;
  };
  return s;
}

PathInSigma polyline(int chart, const std::vector<Param>& points, bool closed, std::string name) {
  PathInSigma p;
  p.name = std::move(name);
  p.closed = closed;
  for (const auto& u : points) p.vertices.push_back({chart, u});
  if (closed && !points.empty() && points.back() != points.front()) p.vertices.push_back({chart, points.front()});
  return p;
}

PathInSigma reversed(const PathInSigma& p) {
  PathInSigma r = p;
  std::reverse(r.vertices.begin(), r.vertices.end());
  return r;
}

PathInSigma rotated(const PathInSigma& p, size_t shift) {
  if (!p.closed || p.vertices.size() < 2) return p;
  std::vector<PathVertex> ring(p.vertices.begin(), p.vertices.end() - 1);
  PathInSigma r = p;
  r.vertices.clear();
  for (size_t i = 0; i <= ring.size(); ++i) r.vertices.push_back(ring[(i + shift) % ring.size()]);
  return r;
}

namespace {

double segment_integral(const OneFormSource& f, const Param& a, const Param& bin, double tol) {
  const size_t d = a.size();
  Param b = bin;
  for (size_t k = 0; k < d; ++k) {
    const auto& r = f.chart.box[k];
    if (!r.periodic) continue;
    double len = r.hi - r.lo;
    double diff = std::remainder(b[k] - a[k], len);
    b[k] = a[k] + diff;
  }
  auto integrand = [&](double s) {
    Param u(d);
    for (size_t k = 0; k < d; ++k) u[k] = a[k] + s * (b[k] - a[k]);
    if (!f.chart.in_domain(u)) throw Error(ErrorKind::ChartGap, "path leaves chart " + f.chart.id);
    auto v = f.eval(u);
    double acc = 0.0;
    for (size_t k = 0; k < d; ++k) acc += v[k] * (b[k] - a[k]);
    return acc;
  };
  bool degenerate = true;
  for (size_t k = 0; k < d; ++k)
    if (a[k] != b[k]) degenerate = false;
  if (degenerate) return 0.0;
  std::vector<double> vals = {integrand(0.0), integrand(0.5), integrand(1.0)};
  double prev = (vals[0] + 4 * vals[1] + vals[2]) / 6.0;
  for (int panels = 4; panels <= 8192; panels *= 2) {
    std::vector<double> next(panels + 1);
    for (int i = 0; i <= panels; ++i) next[i] = (i % 2 == 0) ? vals[i / 2] : integrand(double(i) / panels);
    double h = 1.0 / panels;
    double s = next[0] + next[panels];
    for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * next[i];
    s *= h / 3.0;
    vals = std::move(next);
    if (std::abs(s - prev) < tol) return s;
    prev = s;
  }
  throw Error(ErrorKind::NoConvergence, "Simpson refinement did not settle");
}

}  // namespace

double integrate_theta(const Atlas& atlas, const PathInSigma& path, double tol) {
  double total = 0.0;
  for (size_t i = 0; i + 1 < path.vertices.size(); ++i) {
    const auto& va = path.vertices[i];
    const auto& vb = path.vertices[i + 1];
    if (va.chart < 0 || va.chart >= static_cast<int>(atlas.size()) || vb.chart < 0 ||
        vb.chart >= static_cast<int>(atlas.size()))
      throw Error(ErrorKind::ChartGap, "vertex refers to a missing chart");
    const OneFormSource& fa = atlas[va.chart];
    if (!fa.chart.in_domain(va.u)) throw Error(ErrorKind::ChartGap, "vertex outside chart " + fa.chart.id);
    if (va.chart != vb.chart) {
      // declared overlap: both vertices must name the same boundary point
      const OneFormSource& fb = atlas[vb.chart];
      if (!fb.chart.in_domain(vb.u)) throw Error(ErrorKind::ChartGap, "vertex outside chart " + fb.chart.id);
      RVec pa = fa.chart.embed(fa.chart.wrap(va.u));
      RVec pb = fb.chart.embed(fb.chart.wrap(vb.u));
      if ((pa - pb).norm() > 1e-8) throw Error(ErrorKind::ChartGap, "chart transition at distinct points");
      continue;
    }
    total += segment_integral(fa, va.u, vb.u, tol);
  }
  return total;
}

double integrate_theta(const OneFormSource& form, const PathInSigma& path, double tol) {
  return integrate_theta(Atlas{form}, path, tol);
}

double period(const Atlas& atlas, const PathInSigma& loop, double tol) {
  if (!loop.closed) throw Error(ErrorKind::ChartGap, "period needs a closed loop");
  return integrate_theta(atlas, loop, tol);
}

double period(const OneFormSource& form, const PathInSigma& loop, double tol) { return period(Atlas{form}, loop, tol); }

CohomologyVerdict classify(const std::vector<PeriodEntry>& periods, double tol) {
  CohomologyVerdict v;
  v.periods = periods;
  v.tolerance = tol;
  v.exact = true;
  for (const auto& p : periods)
    if (!(std::abs(p.value) < tol)) v.exact = false;
  return v;
}

double default_exact_tolerance(double max_theta, double diameter) { return 1e-4 * max_theta * diameter; }

namespace {

void lobatto(double lo, double hi, int N, std::vector<double>& x, std::vector<double>& w) {
  x.resize(N + 1);
  w.resize(N + 1);
  for (int i = 0; i <= N; ++i) {
    x[i] = 0.5 * (lo + hi) - 0.5 * (hi - lo) * std::cos(kPi * i / N);
    w[i] = (i % 2 ? -1.0 : 1.0) * ((i == 0 || i == N) ? 0.5 : 1.0);
  }
  x[N / 2] = (N % 2 == 0) ? 0.5 * (lo + hi) : x[N / 2];
}

std::vector<double> lagrange_row(const std::vector<double>& x, const std::vector<double>& w, double t, bool periodic,
                                 double period_len) {
  const size_t n = x.size();
  std::vector<double> row(n, 0.0);
  for (size_t i = 0; i < n; ++i)
    if (t == x[i]) {
      row[i] = 1.0;
      return row;
    }
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double k;
    if (periodic) {
      double arg = kPi * (t - x[i]) / period_len;
      if (std::abs(std::sin(arg)) < 1e-300) {
        std::fill(row.begin(), row.end(), 0.0);
        row[i] = 1.0;
        return row;
      }
      k = w[i] / std::tan(arg);
    } else {
      k = w[i] / (t - x[i]);
    }
    row[i] = k;
    sum += k;
  }
  for (double& r : row) r /= sum;
  return row;
}

}  // namespace

bool PotentialField::identically_zero(double tol) const {
  for (double v : values_)
    if (std::abs(v) > tol) return false;
  return true;
}

double PotentialField::value_at(const Param& uin) const {
  Param u = source_.chart.wrap(uin);
  const size_t nd = axes_.size();
  std::vector<std::vector<double>> rows(nd);
  for (size_t k = 0; k < nd; ++k) {
    const auto& b = source_.chart.box[k];
    double t = u[k];
    rows[k] = lagrange_row(axes_[k], weights_[k], t, b.periodic, b.hi - b.lo);
  }
  double acc = 0.0;
  std::vector<size_t> idx(nd, 0);
  for (size_t f = 0; f < values_.size(); ++f) {
    double w = 1.0;
    size_t r = f;
    for (size_t k = 0; k < nd; ++k) {
      w *= rows[k][r % axes_[k].size()];
      r /= axes_[k].size();
      if (w == 0.0) break;
    }
    if (w != 0.0) acc += w * values_[f];
  }
  return acc;
}

void PotentialField::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoFailure, "cannot write " + path);
  out << std::setprecision(17);
  const size_t nd = axes_.size();
  for (size_t k = 0; k < nd; ++k) out << "u" << k << ",";
  out << "phi\n";
  for (size_t f = 0; f < values_.size(); ++f) {
    size_t r = f;
    for (size_t k = 0; k < nd; ++k) {
      out << axes_[k][r % axes_[k].size()] << ",";
      r /= axes_[k].size();
    }
    out << values_[f] << "\n";
  }
  if (!out) throw Error(ErrorKind::IoFailure, "write failed for " + path);
}

PotentialField build_potential(const OneFormSource& form, const Param& basepoint, const CohomologyVerdict& verdict,
                               int resolution, std::uint64_t seed, PotentialStrategy strategy) {
  if (!verdict.exact) throw Error(ErrorKind::ObstructedClass, "theta has nonzero periods; no global potential");
  const SigmaChart& chart = form.chart;
  if (!chart.in_domain(basepoint)) throw Error(ErrorKind::ChartGap, "basepoint outside chart");
  PotentialField pf;
  pf.source_ = form;
  pf.base_ = basepoint;
  const size_t nd = chart.box.size();
  int N = std::max(2, resolution);
  if (N % 2) ++N;
  for (size_t k = 0; k < nd; ++k) {
    const auto& b = chart.box[k];
    std::vector<double> x, w;
    if (b.periodic) {
      for (int i = 0; i < N; ++i) {
        x.push_back(b.lo + (b.hi - b.lo) * i / N);
        w.push_back(i % 2 ? -1.0 : 1.0);
      }
    } else {
      lobatto(b.lo, b.hi, N, x, w);
    }
    pf.axes_.push_back(x);
    pf.weights_.push_back(w);
  }
  size_t total = 1;
  for (auto& a : pf.axes_) total *= a.size();
  auto node = [&](size_t f) {
    Param u(nd);
    for (size_t k = 0; k < nd; ++k) {
      u[k] = pf.axes_[k][f % pf.axes_[k].size()];
      f /= pf.axes_[k].size();
    }
    return u;
  };
  for (size_t f = 0; f < total; ++f)
    if (!chart.in_domain(node(f))) throw Error(ErrorKind::ChartGap, "potential grid node outside chart " + chart.id);
  const double tol = 1e-10;
  pf.values_.assign(total, 0.0);
  if (strategy == PotentialStrategy::LeafSegment) {
    pf.values_ = parallel_map(total, [&](size_t f) { return segment_integral(form, basepoint, node(f), tol); });
  } else {
    // root at the node nearest the basepoint, then breadth-first over grid edges
    size_t root = 0;
    double best = std::numeric_limits<double>::infinity();
    for (size_t f = 0; f < total; ++f) {
      Param u = node(f);
      double d2 = 0.0;
      for (size_t k = 0; k < nd; ++k) d2 += (u[k] - basepoint[k]) * (u[k] - basepoint[k]);
      if (d2 < best) {
        best = d2;
        root = f;
      }
    }
    std::vector<char> seen(total, 0);
    std::deque<size_t> queue;
    pf.values_[root] = segment_integral(form, basepoint, node(root), tol);
    seen[root] = 1;
    queue.push_back(root);
    std::vector<size_t> stride(nd, 1);
    for (size_t k = 1; k < nd; ++k) stride[k] = stride[k - 1] * pf.axes_[k - 1].size();
    while (!queue.empty()) {
      size_t f = queue.front();
      queue.pop_front();
      for (size_t k = 0; k < nd; ++k) {
        size_t ik = (f / stride[k]) % pf.axes_[k].size();
        for (int dir : {-1, 1}) {
          if ((dir < 0 && ik == 0) || (dir > 0 && ik + 1 == pf.axes_[k].size())) continue;
          size_t g = dir < 0 ? f - stride[k] : f + stride[k];
          if (seen[g]) continue;
          seen[g] = 1;
          pf.values_[g] = pf.values_[f] + segment_integral(form, node(f), node(g), tol);
          queue.push_back(g);
        }
      }
    }
  }
  // homotopic paths with equal endpoints: axis order forward vs backward
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  const int targets = 100;
  std::vector<Param> ends;
  while (static_cast<int>(ends.size()) < targets) {
    Param t(nd);
    for (size_t k = 0; k < nd; ++k) {
      std::uniform_real_distribution<double> U(chart.box[k].lo, chart.box[k].hi);
      t[k] = U(rng);
    }
    if (chart.in_domain(t)) ends.push_back(t);
  }
  auto gaps = parallel_map(ends.size(), [&](size_t i) {
    const Param& t = ends[i];
    double a = 0.0, b = 0.0;
    Param cur = basepoint;
    for (size_t k = 0; k < nd; ++k) {
      Param nxt = cur;
      nxt[k] = t[k];
      a += segment_integral(form, cur, nxt, tol);
      cur = nxt;
    }
    cur = basepoint;
    for (size_t kk = nd; kk-- > 0;) {
      Param nxt = cur;
      nxt[kk] = t[kk];
      b += segment_integral(form, cur, nxt, tol);
      cur = nxt;
    }
    return std::abs(a - b);
  });
  for (double g : gaps) worst = std::max(worst, g);
  pf.path_disagreement_ = worst;
  if (worst > 1e-6) throw Error(ErrorKind::PathDisagreement, "homotopic paths differ by " + std::to_string(worst));
  // gradient round trip at interior nodes
  double gres = 0.0;
  for (size_t f = 0; f < total; ++f) {
    Param u = node(f);
    bool interior = true;
    for (size_t k = 0; k < nd; ++k) {
      const auto& b = chart.box[k];
      if (!b.periodic && (u[k] <= b.lo || u[k] >= b.hi)) interior = false;
    }
    if (!interior) continue;
    auto v = form.eval(u);
    for (size_t k = 0; k < nd; ++k) {
      double e = 1e-5 * (chart.box[k].hi - chart.box[k].lo);
      Param a = u, b = u;
      a[k] -= e;
      b[k] += e;
      double d = (pf.value_at(b) - pf.value_at(a)) / (2 * e);
      gres = std::max(gres, std::abs(d - v[k]));
    }
  }
  pf.gradient_residual_ = gres;
  return pf;
}

double FoliationPotential::value_at(const Param& u, double leaf) const {
  const auto& r = atlas_.leaf_range;
  std::vector<double> w(leaves_.size());
  for (size_t i = 0; i < leaves_.size(); ++i) w[i] = i % 2 ? -1.0 : 1.0;
  auto row = lagrange_row(leaves_, w, r.lo + std::fmod(std::fmod(leaf - r.lo, r.hi - r.lo) + (r.hi - r.lo), r.hi - r.lo),
                          true, r.hi - r.lo);
  double acc = 0.0;
  for (size_t i = 0; i < leaves_.size(); ++i)
    if (row[i] != 0.0) acc += row[i] * fields_[i].value_at(u);
  return acc;
}

double FoliationPotential::max_abs() const {
  double m = 0.0;
  for (const auto& f : fields_)
    for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

FoliationPotential build_leaf_potentials(const DomainSpec& domain, const FoliationAtlas& atlas, int leaf_count,
                                         const CohomologyVerdict& verdict, int resolution, std::uint64_t seed,
                                         const DistanceConfig& cfg) {
  if (!verdict.exact) throw Error(ErrorKind::ObstructedClass, "leafwise class is not zero");
  if (leaf_count % 2) ++leaf_count;
  std::vector<double> leaves;
  std::vector<PotentialField> fields;
  const auto& r = atlas.leaf_range;
  for (int k = 0; k < leaf_count; ++k) {
    double t = r.lo + (r.hi - r.lo) * k / leaf_count;
    SigmaChart chart = atlas.leaf_chart(t);
    Param base(chart.box.size());
    for (size_t i = 0; i < base.size(); ++i) base[i] = 0.5 * (chart.box[i].lo + chart.box[i].hi);
    // the factor 2 makes dbar phi equal Hess(N, .) rather than half of it
    OneFormSource src = scaled_source(theta_source(domain, chart, cfg), 2.0);
    leaves.push_back(t);
    fields.push_back(build_potential(src, base, verdict, resolution, seed + k, PotentialStrategy::LeafSegment));
  }
  return FoliationPotential(atlas, leaves, fields);
}

double collar_bump(double s) {
  s = std::abs(s);
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  double x = 2.0 * (s - 0.5);
  double x4 = x * x * x * x;
  return 1.0 - x4 * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x);
}

PsiEvaluator::PsiEvaluator(const DomainSpec& domain, SigmaValue value, CollarSpec collar, std::string provenance,
                           DistanceConfig cfg)
    : domain_(&domain), value_(std::move(value)), collar_(collar), provenance_(std::move(provenance)), cfg_(cfg) {
  cfg_.check_ambiguity = false;
}

double PsiEvaluator::on_sigma_value(const RVec& foot) const {
  if (!value_) return 0.0;
  auto [v, dt] = value_(foot);
  return v * collar_bump(dt / collar_.tube_width);
}

double PsiEvaluator::operator()(const RVec& z) const {
  if (!value_) return 0.0;
  FootPoint fp;
  try {
    fp = project_to_boundary(*domain_, z, cfg_);
  } catch (const Error& e) {
    throw Error(ErrorKind::PsiDomain, std::string("psi not evaluable: ") + e.what());
  }
  double bn = collar_bump(fp.delta / collar_.collar_width);
  if (bn == 0.0) return 0.0;
  auto [v, dt] = value_(fp.foot);
  return v * collar_bump(dt / collar_.tube_width) * bn;
}

bool PsiEvaluator::vanishes_near(const RVec& z, double radius) const {
  if (!value_) return true;
  FootPoint fp;
  try {
    fp = project_to_boundary(*domain_, z, cfg_);
  } catch (const Error&) {
    return false;
  }
  if (std::abs(fp.delta) - radius >= collar_.collar_width) return true;
  return value_(fp.foot).second - 2 * radius >= collar_.tube_width;
}

PsiEvaluator zero_psi() { return PsiEvaluator(); }

namespace {

void probe_collar(const DomainSpec& domain, const std::vector<RVec>& feet, const CollarSpec& collar,
                  const DistanceConfig& cfg) {
  DistanceConfig strict = cfg;
  strict.check_ambiguity = true;
  for (const RVec& p : feet) {
    WirtingerJet j = wirtinger_jet(domain, p, 1);
    RVec n = j.grad().normalized();
    for (double s : {-1.0, 1.0}) {
      RVec z = p + s * collar.collar_width * n;
      try {
        FootPoint fp = project_to_boundary(domain, z, strict);
        if ((fp.foot - p).norm() > 1e-6 * std::max(1.0, domain.scale))
          throw Error(ErrorKind::CollarTooWide, "collar edge projects to a different foot");
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::CollarTooWide) throw;
        throw Error(ErrorKind::CollarTooWide, std::string("foot point not unique inside collar: ") + e.what());
      }
    }
  }
}

std::vector<RVec> chart_probe_points(const SigmaChart& c) {
  std::vector<RVec> out;
  Param mid(c.box.size());
  for (size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (c.box[i].lo + c.box[i].hi);
  out.push_back(c.embed(mid));
  for (size_t i = 0; i < mid.size(); ++i)
    for (double f : {0.05, 0.95}) {
      Param u = mid;
      u[i] = c.box[i].lo + f * (c.box[i].hi - c.box[i].lo);
      if (c.in_domain(u)) out.push_back(c.embed(u));
    }
  return out;
}

}  // namespace

PsiEvaluator extend_to_collar(const DomainSpec& domain, const PotentialField& phi, const CollarSpec& collar,
                              const DistanceConfig& cfg) {
  if (!(collar.collar_width > 0) || !(collar.tube_width > 0))
    throw Error(ErrorKind::CollarTooWide, "collar widths must be positive");
  probe_collar(domain, chart_probe_points(phi.chart()), collar, cfg);
  auto field = std::make_shared<PotentialField>(phi);
  SigmaValue value = [field](const RVec& foot) {
    const SigmaChart& c = field->chart();
    Param u = c.locate(foot);
    double dt = (foot - c.embed(c.wrap(u))).norm();
    return std::make_pair(-2.0 * field->value_at(u), dt);
  };
  return PsiEvaluator(domain, value, collar, "collar(-2 phi) on " + phi.chart().id, cfg);
}

PsiEvaluator extend_to_collar(const DomainSpec& domain, const FoliationPotential& phi, const CollarSpec& collar,
                              const DistanceConfig& cfg) {
  if (!(collar.collar_width > 0) || !(collar.tube_width > 0))
    throw Error(ErrorKind::CollarTooWide, "collar widths must be positive");
  probe_collar(domain, chart_probe_points(phi.fields().front().chart()), collar, cfg);
  auto field = std::make_shared<FoliationPotential>(phi);
  SigmaValue value = [field](const RVec& foot) {
    double t = field->atlas().leaf_of(foot);
    SigmaChart c = field->atlas().leaf_chart(t);
    Param u = c.locate(foot);
    double dt = (foot - c.embed(c.wrap(u))).norm();
    return std::make_pair(-2.0 * field->value_at(u, t), dt);
  };
  return PsiEvaluator(domain, value, collar, "leafwise collar(-2 phi)", cfg);
}

PsiEvaluator shifted_psi(const DomainSpec& domain, const PsiEvaluator& psi, double c) {
  SigmaValue base = psi.sigma_value();
  SigmaValue value = [base, c](const RVec& foot) {
    if (!base) return std::make_pair(c, 0.0);
    auto [v, dt] = base(foot);
    return std::make_pair(v + c, dt);
  };
  return PsiEvaluator(domain, value, psi.collar(), psi.provenance() + " + " + std::to_string(c),
                      psi.distance_config());
}

}  // namespace dfindex
