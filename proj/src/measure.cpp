#include "horoflow/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace horo {

namespace {

const cplx kO(0.0, 1.0);

struct LineFit {
  double slope = 0.0, intercept = 0.0, rms = 0.0;
};

LineFit fitLine(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  LineFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    double r = y[k] - (f.intercept + f.slope * x[k]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double unitUniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

CriticalExponentFit criticalExponent(const FuchsianGroup& g, double T, std::size_t budget) {
  if (!(T > 0.0)) throw ValidationError("orbit radius must be positive");
  std::vector<double> ds;
  visitOrbit(g, OrbitCutoff::distance(T), [&](std::span<const Letter>, const MoebiusMap&, double d) {
    if (ds.size() >= budget) throw BudgetError("orbit enumeration exceeded the point budget");
    ds.push_back(d);
  });
  std::sort(ds.begin(), ds.end());
  auto countUpTo = [&](double r) {
    return static_cast<double>(std::upper_bound(ds.begin(), ds.end(), r) - ds.begin());
  };
  if (countUpTo(0.5 * T) < 10.0) throw DomainError("too few orbit points: increase T");

  CriticalExponentFit fit;
  fit.cutoff = T;
  fit.count = ds.size();
  const int K = 64;
  for (int k = 0; k <= K; ++k) {
    double r = 0.5 * T * (1.0 + static_cast<double>(k) / K);
    fit.radii.push_back(r);
    fit.logCounts.push_back(std::log(countUpTo(r)));
  }
  LineFit lf = fitLine(fit.radii, fit.logCounts);
  fit.delta = lf.slope;
  fit.intercept = lf.intercept;
  fit.residual = lf.rms;

  // Shell sums of the Poincare series on [T/2, T].
  auto tail = [&](double s, double& partial) {
    const int shells = 8;
    double w = 0.5 * T / shells;
    std::vector<double> sums(shells, 0.0);
    partial = 0.0;
    for (double d : ds) {
      double e = std::exp(-s * d);
      partial += e;
      int k = static_cast<int>((d - 0.5 * T) / w);
      if (d >= 0.5 * T && k >= 0) sums[std::min(k, shells - 1)] += e;
    }
    std::vector<double> x, y;
    for (int k = 0; k < shells; ++k)
      if (sums[k] > 0.0) {
        x.push_back(0.5 * T + (k + 0.5) * w);
        y.push_back(std::log(sums[k]));
      }
    return x.size() >= 2 ? fitLine(x, y).slope : 0.0;
  };
  fit.sLow = fit.delta - 0.05;
  fit.sHigh = fit.delta + 0.05;
  fit.tailSlopeLow = tail(fit.sLow, fit.partialLow);
  fit.tailSlopeHigh = tail(fit.sHigh, fit.partialHigh);
  fit.transition = fit.tailSlopeLow > 0.0 && fit.tailSlopeHigh < 0.0;
  return fit;
}

std::string PattersonCutoff::describe() const {
  if (wordLength >= 0) return "sphere:" + std::to_string(wordLength);
  return "shell:" + fmt(distance) + ":" + fmt(shell);
}

double radialAngle(const MoebiusMap& m) {
  return wrapAngle(std::atan2(m.a() - m.d(), m.b() + m.c()) - std::atan2(m.a() + m.d(), m.b() - m.c()));
}

AtomicBoundaryMeasure::AtomicBoundaryMeasure(std::vector<double> angles, std::vector<double> weights) {
  if (angles.size() != weights.size()) throw ValidationError("angles and weights differ in length");
  std::vector<std::size_t> idx(angles.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (double& a : angles) a = wrapAngle(a);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return angles[a] < angles[b]; });
  double tot = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw ValidationError("atom weights must be positive");
    tot += w;
  }
  angles_.reserve(idx.size());
  weights_.reserve(idx.size());
  for (std::size_t k : idx) {
    angles_.push_back(angles[k]);
    weights_.push_back(weights[k] / tot);
  }
  prefix_.assign(1, 0.0);
  double c = 0.0;
  for (double w : weights_) prefix_.push_back(c += w);
}

double AtomicBoundaryMeasure::mass(double start, double length, bool openStart, bool openEnd) const {
  if (angles_.empty()) return 0.0;
  if (length >= kTwoPi) return total();
  if (length < 0.0) return 0.0;
  auto index = [&](double x, bool after) {
    auto it = after ? std::upper_bound(angles_.begin(), angles_.end(), x)
                    : std::lower_bound(angles_.begin(), angles_.end(), x);
    return static_cast<std::size_t>(it - angles_.begin());
  };
  double a = wrapAngle(start);
  double b = a + length;
  if (b < kTwoPi) return prefix_[index(b, !openEnd)] - prefix_[index(a, openStart)];
  b -= kTwoPi;
  return (total() - prefix_[index(a, openStart)]) + prefix_[index(b, !openEnd)];
}

double AtomicBoundaryMeasure::mass(const ArcSet& s) const {
  double m = 0.0;
  for (const Arc& a : s.arcs()) m += mass(a);
  return m;
}

std::size_t AtomicBoundaryMeasure::sample(double u) const {
  if (angles_.empty()) throw DomainError("sampling an empty measure");
  auto it = std::upper_bound(prefix_.begin() + 1, prefix_.end(), u * total());
  std::size_t k = static_cast<std::size_t>(it - prefix_.begin()) - 1;
  return std::min(k, angles_.size() - 1);
}

AtomicBoundaryMeasure pattersonMeasure(const FuchsianGroup& g, double s, const PattersonCutoff& cutoff,
                                       std::size_t budget) {
  if (!(s > 0.0)) throw ValidationError("Patterson exponent must be positive");
  bool sphere = cutoff.wordLength >= 0;
  if (sphere && cutoff.wordLength < 1) throw ValidationError("sphere cutoff needs word length >= 1");
  if (!sphere && !(cutoff.distance > 0.0 && cutoff.shell > 0.0 && cutoff.shell <= cutoff.distance))
    throw ValidationError("shell cutoff needs 0 < width <= T");

  std::vector<double> angles, weights;
  int minLen = std::numeric_limits<int>::max();
  // Two halves of the outer layer, for the growth estimate.
  double sumIn = 0.0, sumOut = 0.0, distIn = 0.0, distOut = 0.0;
  std::size_t nIn = 0, nOut = 0;
  auto keep = [&](std::span<const Letter> w, const MoebiusMap& m, double d) {
    if (angles.size() >= budget) throw BudgetError("Patterson measure exceeded the atom budget");
    angles.push_back(radialAngle(m));
    weights.push_back(std::exp(-s * d));
    minLen = std::min(minLen, static_cast<int>(w.size()));
  };
  if (sphere) {
    int n = cutoff.wordLength;
    visitOrbit(g, OrbitCutoff::length(n), [&](std::span<const Letter> w, const MoebiusMap& m, double d) {
      int len = static_cast<int>(w.size());
      if (len == n) {
        keep(w, m, d);
        sumOut += std::exp(-s * d);
        distOut += d;
        ++nOut;
      } else if (len == n - 1) {
        sumIn += std::exp(-s * d);
        distIn += d;
        ++nIn;
      }
    });
  } else {
    double T = cutoff.distance, lo = T - cutoff.shell, mid = T - 0.5 * cutoff.shell;
    visitOrbit(g, OrbitCutoff::distance(T), [&](std::span<const Letter> w, const MoebiusMap& m, double d) {
      if (w.empty() || d < lo) return;
      keep(w, m, d);
      if (d < mid) {
        sumIn += std::exp(-s * d);
        ++nIn;
      } else {
        sumOut += std::exp(-s * d);
        ++nOut;
      }
    });
    distIn = 0.0;
    distOut = 0.5 * cutoff.shell;
    nIn = nOut = 1;
  }
  if (angles.empty()) throw DomainError("cutoff leaves no orbit points");
  double growth = 0.0;
  double span = distOut / static_cast<double>(nOut) - distIn / static_cast<double>(std::max<std::size_t>(nIn, 1));
  if (sumIn > 0.0 && sumOut > 0.0 && span > 0.0) growth = std::log(sumOut / sumIn) / span;
  if (growth > 0.1) throw DomainError("exponent far below the critical exponent: outer layer dominates");

  AtomicBoundaryMeasure mu(std::move(angles), std::move(weights));
  mu.group = g.name();
  mu.exponent = s;
  mu.cutoff = cutoff;
  mu.coverDepth = minLen;
  mu.growth = growth;
  return mu;
}

std::string measureCsv(const AtomicBoundaryMeasure& mu) {
  std::ostringstream os;
  os << "# group=" << mu.group << "\n# s=" << fmt(mu.exponent) << "\n# cutoff=" << mu.cutoff.describe()
     << "\n# depth=" << mu.coverDepth << "\nangle,weight\n";
  for (std::size_t k = 0; k < mu.size(); ++k) os << fmt(mu.angles()[k]) << ',' << fmt(mu.weights()[k]) << '\n';
  return os.str();
}

EquivarianceCheck equivarianceDefect(const AtomicBoundaryMeasure& mu, const FuchsianGroup& g, Letter x,
                                     int bins) {
  if (bins < 1) throw ValidationError("need at least one bin");
  EquivarianceCheck c;
  c.letter = x;
  c.pushed.assign(bins, 0.0);
  c.reweighted.assign(bins, 0.0);
  const MoebiusMap& m = g.letter(x);
  cplx xo = m.apply(kO);
  auto bin = [&](double a) { return std::min(bins - 1, static_cast<int>(wrapAngle(a) / kTwoPi * bins)); };
  for (std::size_t k = 0; k < mu.size(); ++k) {
    BoundaryPoint xi = BoundaryPoint::fromAngle(mu.angles()[k]);
    double w = mu.weights()[k];
    c.pushed[bin(m.apply(xi).angle())] += w;
    c.reweighted[bin(xi.angle())] += w * std::exp(-mu.exponent * busemann(xi, xo, kO));
  }
  double tv = 0.0;
  for (int k = 0; k < bins; ++k) tv += std::abs(c.pushed[k] - c.reweighted[k]);
  c.totalVariation = 0.5 * tv;
  return c;
}

const char* shadowSideName(ShadowSide s) {
  switch (s) {
    case ShadowSide::Full: return "full";
    case ShadowSide::Positive: return "positive";
    case ShadowSide::Negative: return "negative";
  }
  return "?";
}

ShadowArc shadowArc(const BoundaryPoint& xi, double t, ShadowSide side, const PlanePoint& basepoint) {
  if (!(t >= 0.0)) throw ValidationError("shadow depth must be nonnegative");
  cplx x = basepoint.inHalfPlane();
  double r = std::sqrt(x.imag());
  MoebiusMap g(r, x.real() / r, 0.0, 1.0 / r);  // g(i) = x
  double th = g.inverse().apply(xi).angle();
  double phi = 2.0 * std::atan(std::exp(-t));
  BoundaryPoint lo = g.apply(BoundaryPoint::fromAngle(th - phi));
  BoundaryPoint hi = g.apply(BoundaryPoint::fromAngle(th + phi));
  ShadowArc v;
  v.basepoint = basepoint;
  v.direction = xi;
  v.depth = t;
  v.side = side;
  switch (side) {
    case ShadowSide::Full:
      v.arc = {lo.angle(), ccwDistance(lo.angle(), hi.angle())};
      break;
    case ShadowSide::Positive:
      v.arc = {xi.angle(), ccwDistance(xi.angle(), hi.angle())};
      v.openStart = true;
      break;
    case ShadowSide::Negative:
      v.arc = {lo.angle(), ccwDistance(lo.angle(), xi.angle())};
      v.openEnd = true;
      break;
  }
  return v;
}

BMSWeight bmsWeight(const HopfFrame& f, double delta) {
  cplx p = basePoint(f);
  return {f, std::exp(delta * (busemann(f.xiMinus, kO, p) + busemann(f.xiPlus, kO, p)))};
}

double horoWeight(const HopfFrame& f, double delta) {
  return std::exp(delta * busemann(f.xiPlus, kO, basePoint(f)));
}

double brWeight(const HopfFrame& f, double delta) {
  return std::exp(delta * busemann(f.xiMinus, kO, basePoint(f)));
}

double horoWeight(const MoebiusMap& m, double delta) {
  return std::exp(delta * busemann(m.apply(BoundaryPoint::infinity()), kO, basePoint(m)));
}

double brWeight(const MoebiusMap& m, double delta) {
  return std::exp(delta * busemann(m.apply(BoundaryPoint::fromReal(0.0)), kO, basePoint(m)));
}

ChordWindow domainChord(const FuchsianGroup& g, const MoebiusMap& m) {
  // Along m a_t the base point is m(i y), y = e^t. In a region chart the
  // point is inside iff ac y^2 + bd > 0.
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < g.letterCount(); ++l) {
    MoebiusMap k = g.region(static_cast<Letter>(l)).chart() * m;
    double A = k.a() * k.c(), B = k.b() * k.d();
    if (A > 0.0) {
      if (B >= 0.0) return {};
      hi = std::min(hi, 0.5 * std::log(-B / A));
    } else if (A < 0.0) {
      if (B > 0.0) lo = std::max(lo, 0.5 * std::log(B / -A));
    } else if (B > 0.0) {
      return {};
    }
  }
  return {lo, hi};
}

BMSSample sampleBMS(const FuchsianGroup& g, double delta, const AtomicBoundaryMeasure& nu, std::size_t n,
                    std::uint64_t seed, const BMSSampleParams& params) {
  if (nu.size() == 0) throw DomainError("empty boundary measure");
  std::mt19937_64 rng(seed);
  std::size_t maxDraws = params.maxDraws ? params.maxDraws : 1000 * std::max<std::size_t>(n, 1);
  BMSSample out;
  out.samples.reserve(n);
  while (out.samples.size() < n) {
    if (out.draws >= maxDraws) throw BudgetError("BMS sampling exceeded the draw budget");
    ++out.draws;
    BoundaryPoint vm = BoundaryPoint::fromAngle(nu.angles()[nu.sample(unitUniform(rng()))]);
    BoundaryPoint vp = BoundaryPoint::fromAngle(nu.angles()[nu.sample(unitUniform(rng()))]);
    double u = unitUniform(rng());
    bool diagonal = vm.arcDistance(vp) < params.minSeparation;
    if (vm.arcDistance(vp) < 1e-15) {
      ++out.rejectedDiagonal;
      continue;
    }
    MoebiusMap m = frameToMatrix({vm, vp, 0.0});
    ChordWindow w = domainChord(g, m);
    // Endpoints off the limit set can leave through a free arc.
    if (w.empty() || !std::isfinite(w.length())) {
      if (diagonal) ++out.rejectedDiagonal;
      else ++out.missedDomain;
      continue;
    }
    MoebiusMap f = m * MoebiusMap::geodesic(w.lo + u * w.length());
    double weight = w.length() * bmsWeight(matrixToFrame(f), delta).weight;
    if (diagonal) {
      ++out.rejectedDiagonal;
      out.excludedWeight += weight;
      continue;
    }
    out.samples.push_back({f, weight});
    out.totalWeight += weight;
  }
  return out;
}

}  // namespace horo
