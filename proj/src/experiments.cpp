#include "horoflow/experiments.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "horoflow/error.hpp"

namespace horo {

GroupContext makeContext(const FuchsianGroup& g, const MeasureConfig& cfg) {
  GroupContext ctx{g, cfg, {}, {}, {}};
  ctx.exponent = criticalExponent(g, cfg.exponentRadius);
  PattersonCutoff cut = g.hasParabolics() ? PattersonCutoff::ball(cfg.ballRadius, cfg.shellWidth)
                                          : PattersonCutoff::sphere(cfg.sphereLength);
  ctx.nu = pattersonMeasure(g, ctx.exponent.delta + cfg.sOffset, cut);
  ctx.funnels = funnelCharts(g);
  return ctx;
}

std::vector<BatteryPoint> classificationBattery(const FuchsianGroup& g, std::size_t size, std::uint64_t seed) {
  OrdinarySet o = ordinaryIntervals(g, 3);
  std::vector<BatteryPoint> out;
  std::size_t firsts = size * 2 / 5, seconds = size * 7 / 10;
  for (std::size_t k = 0; k < o.intervals.size() && out.size() < firsts; k += 3)
    out.push_back({"first-endpoint of gap " + std::to_string(k), o.intervals[k].first, false});
  for (std::size_t k = 1; k < o.intervals.size() && out.size() < seconds; k += 3)
    out.push_back({"second-endpoint of gap " + std::to_string(k), o.intervals[k].second, true});
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> len(2, 5), let(0, static_cast<int>(g.letterCount()) - 1);
  while (out.size() < size) {
    std::vector<Letter> w;
    int n = len(rng);
    while (static_cast<int>(w.size()) < n) {
      Letter l = static_cast<Letter>(let(rng));
      if (!w.empty() && w.back() == inverseLetter(l)) continue;
      w.push_back(l);
    }
    if (w.front() == inverseLetter(w.back())) continue;
    GroupWord word(w);
    MoebiusMap m = word.evaluate(g);
    if (classify(m) != IsometryClass::Hyperbolic) continue;
    for (const FixedPoint& f : fixedPoints(m))
      if (f.stability == Stability::Attracting)
        out.push_back({"fixed-point:" + word.toString(g), f.point, true});
  }
  return out;
}

std::vector<double> logGrid(double lo, double hi, int perDecade) {
  if (!(lo > 0.0) || !(hi >= lo) || perDecade < 1) throw ValidationError("bad log grid");
  std::vector<double> out;
  double step = std::log(10.0) / perDecade;
  int n = static_cast<int>(std::ceil(std::log(hi / lo) / step - 1e-9));
  for (int k = 0; k < n; ++k) out.push_back(lo * std::exp(k * step));
  out.push_back(hi);
  return out;
}

FrameNet buildNet(const GroupContext& ctx, double eps, std::size_t samples, std::uint64_t seed) {
  if (!(eps > 0.0)) throw ValidationError("net radius must be positive");
  FrameNet net{{}, eps, samples, FrameIndex(eps)};
  if (samples == 0) return net;
  BMSSample bms = sampleBMS(ctx.group, ctx.delta(), ctx.nu, samples, seed);
  for (const WeightedFrame& w : bms.samples) {
    bool covered = false;
    net.index.near(w.frame, [&](std::size_t) { covered = true; });
    if (covered) continue;
    std::size_t id = net.points.size();
    net.points.push_back(w.frame);
    for (const MoebiusMap& l : frameLifts(ctx.group, w.frame, 2)) net.index.add(l, id);
  }
  return net;
}

double CoverageResult::coverageAt(double r) const {
  double c = 0.0;
  for (std::size_t k = 0; k < grid.size() && grid[k] <= r * (1.0 + 1e-12); ++k) c = coverage[k];
  return c;
}

CoverageResult densityCoverage(const GroupContext& ctx, const StartFrame& u, const CoverageParams& p) {
  if (!(p.netEps > 0.0)) throw ValidationError("netEps must be positive");
  if (p.trace.skipDepth > 0.0 && p.trace.skipDepth <= p.netEps)
    throw ValidationError("funnel skip depth must exceed netEps");
  CoverageResult out;
  out.params = p;
  out.params.trace.R = p.R;
  FrameNet net = buildNet(ctx, p.netEps, p.netSamples, p.seed);
  if (net.points.empty()) throw DomainError("reference net is empty");
  out.netSize = net.points.size();
  const double inf = std::numeric_limits<double>::infinity();
  out.firstHit.assign(out.netSize, inf);
  std::size_t missing = out.netSize;
  out.trace = traceHorocycle(ctx.group, ctx.funnels, u.frame, out.params.trace, [&](const TraceStep& st) {
    if (missing == 0) return;
    net.index.near(st.start, [&](std::size_t id) {
      if (out.firstHit[id] == inf) {
        out.firstHit[id] = st.s;
        --missing;
      }
    });
  });
  std::vector<double> hits = out.firstHit;
  std::sort(hits.begin(), hits.end());
  out.grid = logGrid(std::min(p.gridStart, p.R), p.R, p.perDecade);
  for (double r : out.grid) {
    auto n = std::upper_bound(hits.begin(), hits.end(), r) - hits.begin();
    out.coverage.push_back(static_cast<double>(n) / static_cast<double>(out.netSize));
  }
  return out;
}

MoebiusMap axisFrame(const FuchsianGroup& g, const GroupWord& w) {
  MoebiusMap m = w.evaluate(g);
  if (classify(m) != IsometryClass::Hyperbolic) throw ValidationError("axis frame needs a hyperbolic word");
  BoundaryPoint rep, att;
  for (const FixedPoint& f : fixedPoints(m)) (f.stability == Stability::Attracting ? att : rep) = f.point;
  MoebiusMap f = frameToMatrix({rep, att, 0.0});
  // The foot of the perpendicular from p = f^-1(o) to the imaginary axis is i|p|.
  f = f * MoebiusMap::geodesic(std::log(std::abs(f.inverse().apply(cplx(0.0, 1.0)))));
  reduceFrameInPlace(f, g);
  return f;
}

double injectivityRadius(const FuchsianGroup& g, cplx z, int maxLength) {
  double best = std::numeric_limits<double>::infinity();
  visitOrbit(g, OrbitCutoff::length(maxLength), [&](std::span<const Letter> w, const MoebiusMap& m, double) {
    if (!w.empty()) best = std::min(best, 0.5 * distance(z, m.apply(z)));
  });
  return best;
}

MoebiusMap frameFromBackward(const BoundaryPoint& xi, cplx z) {
  double sy = std::sqrt(z.imag());
  MoebiusMap t(sy, z.real() / sy, 0.0, 1.0 / sy);
  // Rotate about i so that 0 (disc angle pi) goes to t^-1(xi).
  return t * MoebiusMap::rotation(t.inverse().apply(xi).angle() - kPi);
}

namespace {

// Records running sums at the grid points as the trace passes them.
struct GridRecorder {
  const std::vector<double>& grid;
  std::size_t next = 0;
  template <class F>
  void advance(double s, F&& record) {
    while (next < grid.size() && grid[next] <= s) record(next++);
  }
};

void checkSkip(const AverageParams& p, double supportRadius) {
  if (p.trace.skipDepth > 0.0 && p.trace.skipDepth < supportRadius)
    throw ValidationError("funnel skip depth is smaller than the test function support");
}

}  // namespace

PSAverageResult psAverages(const GroupContext& ctx, const StartFrame& u, const FrameFunction& psi,
                           double supportRadius, const AverageParams& p) {
  checkSkip(p, supportRadius);
  PSAverageResult out;
  out.params = p;
  out.params.trace.R = p.R;
  std::vector<double> grid = logGrid(std::min(p.gridStart, p.R), p.R, p.perDecade);
  std::vector<double> mass(grid.size()), integral(grid.size());
  double m = 0.0, acc = 0.0;
  GridRecorder rec{grid};
  auto record = [&](std::size_t k) {
    mass[k] = m;
    integral[k] = acc;
  };
  out.trace = traceHorocycle(
      ctx.group, ctx.funnels, u.frame, out.params.trace,
      [&](const TraceStep& st) {
        rec.advance(st.s, record);
        if (st.mass > 0.0) {
          m += st.mass;
          acc += st.mass * psi(st.mid);
        }
      },
      &ctx.nu, ctx.delta());
  rec.advance(std::numeric_limits<double>::infinity(), record);
  if (!(m > 0.0)) throw DomainError("zero horocyclic mass along the trace: R too small");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(mass[k] > 0.0)) continue;
    out.grid.push_back(grid[k]);
    out.mass.push_back(mass[k]);
    out.average.push_back(integral[k] / mass[k]);
  }
  BMSSample ref = sampleBMS(ctx.group, ctx.delta(), ctx.nu, p.referenceSamples, p.seed);
  double sw = 0.0, swf = 0.0;
  std::vector<double> vals(ref.samples.size());
  for (std::size_t i = 0; i < ref.samples.size(); ++i) {
    vals[i] = psi(ref.samples[i].frame);
    sw += ref.samples[i].weight;
    swf += ref.samples[i].weight * vals[i];
  }
  out.reference = swf / sw;
  double var = 0.0;
  for (std::size_t i = 0; i < ref.samples.size(); ++i) {
    double d = ref.samples[i].weight * (vals[i] - out.reference);
    var += d * d;
  }
  out.referenceError = std::sqrt(var) / sw;
  return out;
}

PSAverageResult psAverages(const GroupContext& ctx, const StartFrame& u, const TestFunction& psi,
                           const AverageParams& p) {
  return psAverages(ctx, u, [&](const MoebiusMap& m) { return psi(m); }, psi.radius(), p);
}

std::pair<double, double> burgerRoblinIntegral(const GroupContext& ctx, const TestFunction& f, std::size_t n,
                                               std::uint64_t seed) {
  if (n < 2) throw ValidationError("need at least two samples");
  cplx c = basePoint(f.center());
  double r = f.radius();
  double inj = injectivityRadius(ctx.group, c);
  if (inj < r)
    throw ValidationError("test function radius " + std::to_string(r) + " exceeds the injectivity radius " +
                          std::to_string(inj) + " at its center");
  double sy = std::sqrt(c.imag());
  MoebiusMap to(sy, c.real() / sy, 0.0, 1.0 / sy);
  double volume = kTwoPi * (std::cosh(r) - 1.0);
  std::mt19937_64 rng(seed);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    BoundaryPoint xi = BoundaryPoint::fromAngle(ctx.nu.angles()[ctx.nu.sample(unitUniform(rng()))]);
    double rho = std::acosh(1.0 + unitUniform(rng()) * (std::cosh(r) - 1.0));
    double phi = kTwoPi * unitUniform(rng());
    cplx z = (to * MoebiusMap::rotation(phi)).apply(cplx(0.0, std::exp(rho)));
    MoebiusMap fr = frameFromBackward(xi, z);
    double v = f(fr);
    if (v > 0.0) v *= brWeight(fr, ctx.delta());
    sum += v;
    sum2 += v * v;
  }
  double mean = sum / static_cast<double>(n);
  double var = std::max(sum2 / static_cast<double>(n) - mean * mean, 0.0);
  return {volume * mean, volume * std::sqrt(var / static_cast<double>(n - 1))};
}

BirkhoffResult birkhoffRatios(const GroupContext& ctx, const StartFrame& u, const TestFunction& f,
                              const TestFunction& g, const AverageParams& p) {
  checkSkip(p, std::max(f.radius(), g.radius()));
  BirkhoffResult out;
  out.params = p;
  out.params.trace.R = p.R;
  std::vector<double> grid = logGrid(std::min(p.gridStart, p.R), p.R, p.perDecade);
  std::vector<double> num(grid.size()), den(grid.size());
  double a = 0.0, b = 0.0;
  GridRecorder rec{grid};
  auto record = [&](std::size_t k) {
    num[k] = a;
    den[k] = b;
  };
  out.trace = traceHorocycle(ctx.group, ctx.funnels, u.frame, out.params.trace, [&](const TraceStep& st) {
    rec.advance(st.s, record);
    a += f(st.mid) * st.ds;
    b += g(st.mid) * st.ds;
  });
  rec.advance(std::numeric_limits<double>::infinity(), record);
  if (!(b > 0.0)) throw DomainError("denominator integral is zero over the whole grid");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(den[k] > 0.0)) continue;
    out.grid.push_back(grid[k]);
    out.numerator.push_back(num[k]);
    out.denominator.push_back(den[k]);
    out.ratio.push_back(num[k] / den[k]);
  }
  auto [fi, fe] = burgerRoblinIntegral(ctx, f, p.referenceSamples, p.seed);
  // One random stream for both, so that f = k g gives exactly k.
  auto [gi, ge] = burgerRoblinIntegral(ctx, g, p.referenceSamples, p.seed);
  if (!(gi > 0.0)) throw DomainError("reference denominator is zero");
  out.reference = fi / gi;
  out.referenceError = out.reference * std::hypot(fe / std::max(fi, 1e-300), ge / gi);
  return out;
}

namespace {

struct CuspChart {
  MoebiusMap chart;  // cusp -> infinity, o fixed
  double y0 = 1.0;   // the horoball is Im >= y0
};

std::vector<CuspChart> cuspCharts(const FuchsianGroup& g) {
  if (g.horoballSeeds().empty()) throw DomainError("the group has no cusp");
  std::vector<CuspChart> out;
  for (const Horoball& h : g.horoballSeeds()) out.push_back({rotateToInfinity(h.base), std::exp(h.level)});
  return out;
}

double slopeFit(const std::vector<double>& x, const std::vector<double>& y, double* intercept = nullptr) {
  double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double den = n * sxx - sx * sx;
  if (x.size() < 2 || den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  double b = (n * sxy - sx * sy) / den;
  if (intercept) *intercept = (sy - b * sx) / n;
  return b;
}

}  // namespace

CuspMassResult cuspMass(const GroupContext& ctx, const StartFrame& u, const CuspMassParams& p) {
  std::vector<CuspChart> charts = cuspCharts(ctx.group);
  if (p.depths.empty()) throw ValidationError("empty depth grid");
  CuspMassResult out;
  out.params = p;
  out.params.trace.R = p.R;
  out.depths = p.depths;
  std::vector<double> above(p.depths.size(), 0.0);
  double total = 0.0;
  out.trace = traceHorocycle(
      ctx.group, ctx.funnels, u.frame, out.params.trace,
      [&](const TraceStep& st) {
        if (!(st.mass > 0.0)) return;
        total += st.mass;
        double h = -std::numeric_limits<double>::infinity();
        for (const CuspChart& c : charts) h = std::max(h, std::log(c.chart.apply(basePoint(st.mid)).imag() / c.y0));
        for (std::size_t k = 0; k < p.depths.size(); ++k)
          if (h >= p.depths[k]) above[k] += st.mass;
      },
      &ctx.nu, ctx.delta());
  if (!(total > 0.0)) throw DomainError("zero horocyclic mass along the trace: R too small");
  std::vector<double> xs, ys;
  out.nonincreasing = true;
  for (std::size_t k = 0; k < p.depths.size(); ++k) {
    out.fraction.push_back(above[k] / total);
    if (k > 0 && p.depths[k] >= p.depths[k - 1] && out.fraction[k] > out.fraction[k - 1]) out.nonincreasing = false;
    if (p.depths[k] >= p.fitFrom && above[k] > 0.0) {
      xs.push_back(p.depths[k]);
      ys.push_back(std::log(out.fraction[k]));
    }
  }
  out.slope = slopeFit(xs, ys);
  out.predicted = -(2.0 * ctx.delta() - 1.0);
  return out;
}

ExcursionResult excursionWindows(const GroupContext& ctx, const StartFrame& u, const ExcursionParams& p) {
  std::vector<CuspChart> charts = cuspCharts(ctx.group);
  ExcursionResult out;
  out.params = p;
  out.params.trace.R = p.R;
  struct Open {
    bool active = false, complete = true;
    Excursion e;
  };
  std::vector<Open> open(charts.size());
  out.trace = traceHorocycle(ctx.group, ctx.funnels, u.frame, out.params.trace, [&](const TraceStep& st) {
    for (std::size_t i = 0; i < charts.size(); ++i) {
      // Along K n_x the height is 1 / ((c + d x)^2 + d^2): inside on
      // |c + d x| <= sqrt(1/y0 - d^2), deepest at x = -c/d.
      MoebiusMap k = charts[i].chart * st.start;
      double c = k.c(), d = k.d(), y0 = charts[i].y0;
      double w2 = 1.0 / y0 - d * d;
      Open& o = open[i];
      if (!(w2 > 0.0) || d == 0.0) {
        if (o.active) {
          // Left between steps: close at the step boundary.
          o.e.exit = st.s;
          if (o.complete) out.excursions.push_back(o.e);
          o = Open{};
        }
        continue;
      }
      double x0 = -c / d, w = std::sqrt(w2) / std::abs(d);
      double lo = x0 - w, hi = x0 + w;
      if (hi < 0.0 || lo > st.ds) {
        if (o.active) {
          o.e.exit = st.s;
          if (o.complete) out.excursions.push_back(o.e);
          o = Open{};
        }
        continue;
      }
      if (!o.active) {
        o.active = true;
        o.complete = lo >= 0.0 || st.s > 0.0;
        o.e = Excursion{};
        o.e.cusp = i;
        o.e.entry = st.s + std::max(lo, 0.0);
        o.e.height = -std::numeric_limits<double>::infinity();
      }
      double x = std::clamp(x0, 0.0, st.ds);
      double h = -std::log(((c + d * x) * (c + d * x) + d * d) * y0);
      if (h > o.e.height) {
        o.e.height = h;
        o.e.sigma = st.s + x;
      }
      if (hi <= st.ds) {
        o.e.exit = st.s + hi;
        if (o.complete) out.excursions.push_back(o.e);
        o = Open{};
      }
    }
  });
  std::vector<double> hs, ls;
  out.alpha = 0.0;
  for (const Excursion& e : out.excursions) {
    double L = e.halfLength();
    out.maxUpperRatio = std::max(out.maxUpperRatio, L * std::exp(-0.5 * e.height));
    if (e.height < p.minHeight || !(L > 0.0)) continue;
    hs.push_back(e.height);
    ls.push_back(std::log(L));
    out.alpha = std::max(out.alpha, e.height - 2.0 * std::log(L));
  }
  out.fitted = hs.size();
  out.slope = slopeFit(hs, ls, &out.intercept);
  out.sandwich = out.fitted > 0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    double L = std::exp(ls[i]);
    if (L > std::exp(0.5 * hs[i]) * (1.0 + 1e-9) || L < std::exp(0.5 * (hs[i] - out.alpha)) * (1.0 - 1e-9))
      out.sandwich = false;
  }
  return out;
}

ShadowScanResult shadowScan(const AtomicBoundaryMeasure& nu, const ShadowScanParams& p) {
  if (p.depths.size() < 2) throw ValidationError("shadow scan needs at least two depths");
  ShadowScanResult out;
  out.params = p;
  out.points = p.points;
  if (out.points.empty()) {
    if (p.quantiles < 1) throw ValidationError("quantile count must be positive");
    for (int q = 0; q < p.quantiles; ++q)
      out.points.push_back(BoundaryPoint::fromAngle(nu.angles()[nu.sample((q + 0.5) / p.quantiles)]));
  }
  std::vector<double> xs, ys;
  for (double t : p.depths) {
    double acc = 0.0;
    int n = 0;
    for (const BoundaryPoint& xi : out.points) {
      double m = arcMass(nu, shadowArc(xi, t, p.side));
      if (m > 0.0) {
        acc += std::log(m);
        ++n;
      } else {
        ++out.emptyShadows;
      }
    }
    if (n == 0) continue;
    out.depths.push_back(t);
    out.meanLogMass.push_back(acc / n);
  }
  out.slope = slopeFit(out.depths, out.meanLogMass, &out.intercept);
  return out;
}

}  // namespace horo
