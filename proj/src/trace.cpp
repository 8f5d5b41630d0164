#include "horoflow/experiments.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "horoflow/error.hpp"

namespace horo {

namespace {

std::pair<std::string, std::string> splitSpec(const std::string& spec) {
  std::size_t colon = spec.find(':');
  if (colon == std::string::npos) return {spec, ""};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

std::size_t intervalIndex(const std::string& arg, std::size_t count) {
  if (count == 0) throw DomainError("the group has no ordinary intervals");
  if (arg.empty() || arg == "auto") return 0;
  std::size_t used = 0;
  unsigned long k = 0;
  try {
    k = std::stoul(arg, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != arg.size()) throw ValidationError("bad interval index '" + arg + "'");
  if (k >= count) throw ValidationError("interval index " + arg + " out of range (" + std::to_string(count) + " intervals)");
  return k;
}

}  // namespace

BoundaryPoint resolveBoundaryPoint(const FuchsianGroup& g, const std::string& spec, GroupWord* cert) {
  auto [kind, arg] = splitSpec(spec);
  if (kind == "first-endpoint" || kind == "second-endpoint") {
    OrdinarySet os = ordinaryIntervals(g, 1);
    const OrdinaryInterval& iv = os.intervals[intervalIndex(arg, os.intervals.size())];
    bool first = kind == "first-endpoint";
    if (cert) *cert = first ? iv.firstCert : iv.secondCert;
    return first ? iv.first : iv.second;
  }
  if (kind == "fixed-point") {
    GroupWord w = g.parseWord(arg);
    if (w.empty()) throw ValidationError("fixed-point needs a nontrivial word");
    MoebiusMap m = w.evaluate(g);
    for (const FixedPoint& f : fixedPoints(m)) {
      if (f.stability == Stability::Attracting || f.stability == Stability::Neutral) {
        if (cert) *cert = w;
        return f.point;
      }
    }
    throw ValidationError("word '" + arg + "' has no attracting fixed point");
  }
  if (kind == "angle") {
    try {
      std::size_t used = 0;
      double t = std::stod(arg, &used);
      if (used == arg.size() && std::isfinite(t)) {
        if (cert) *cert = GroupWord();
        return BoundaryPoint::fromAngle(t);
      }
    } catch (const std::exception&) {
    }
    throw ValidationError("bad angle '" + arg + "'");
  }
  throw ValidationError("unknown boundary point specifier '" + spec +
                        "' (expected first-endpoint:K, second-endpoint:K, fixed-point:WORD or angle:THETA)");
}

StartFrame resolveStart(const FuchsianGroup& g, const std::string& uminus, const std::string& uplus) {
  StartFrame s;
  s.uminus = uminus;
  s.uplus = uplus;
  BoundaryPoint um = resolveBoundaryPoint(g, uminus, &s.uminusCert);
  BoundaryPoint up;
  if (uplus == "auto") {
    if (g.rank() < 2) throw ValidationError("u+ auto needs two generators");
    up = resolveBoundaryPoint(g, "fixed-point:" + g.letterName(0) + g.letterName(2));
  } else {
    up = resolveBoundaryPoint(g, uplus);
  }
  if (um.arcDistance(up) < 1e-9) throw ValidationError("u- and u+ coincide");
  s.frame = {um, up, 0.0};
  try {
    s.firstEndpoint = isFirstEndpoint(um, g, 12).verdict;
  } catch (const DomainError&) {
    s.firstEndpoint = Verdict::Unresolved;  // not a limit point
  }
  return s;
}

std::vector<Funnel> funnelCharts(const FuchsianGroup& g) {
  std::vector<Funnel> out;
  OrdinarySet os;
  try {
    os = ordinaryIntervals(g, 1);
  } catch (const DomainError&) {
    return out;
  }
  for (const OrdinaryInterval& iv : os.intervals) {
    Funnel f;
    f.interval = iv;
    f.chart = Region(iv.first, iv.second).chart();
    // The stabilizer fixes both endpoints; the certificate words usually do.
    for (const GroupWord& w : {iv.firstCert, iv.secondCert}) {
      if (w.empty()) continue;
      MoebiusMap m = w.evaluate(g);
      if (classify(m) != IsometryClass::Hyperbolic) continue;
      if (m.apply(iv.first).arcDistance(iv.first) < 1e-10 && m.apply(iv.second).arcDistance(iv.second) < 1e-10) {
        f.stabilizer = w;
        f.length = translationLength(m);
        break;
      }
    }
    if (f.length > 0.0) out.push_back(f);
  }
  return out;
}

double funnelDepth(const Funnel& f, const MoebiusMap& m) {
  MoebiusMap k = f.chart * m;
  return std::asinh(k.a() * k.c() + k.b() * k.d());
}

namespace {

// Exit of a deep funnel excursion. In the funnel chart the horocycle is the
// circle tangent to the real line at xi < 0 with diameter H; it leaves the
// region {Re >= sinh(c) Im} through the nearer intersection with the ray
// Re = sinh(c) Im. The exit frame is dilated by a power of the stabilizer
// before leaving the chart so that no precision is lost near xi.
MoebiusMap funnelExit(const Funnel& f, const MoebiusMap& k, double c) {
  double xi = k.b() / k.d();
  double H = 1.0 / (k.d() * k.d());
  double sh = std::sinh(c), ch = std::cosh(c);
  double B = (xi * sh + 0.5 * H) / ch;
  double r = xi * xi / (B + std::sqrt(std::max(B * B - xi * xi, 0.0)));
  cplx z = r * cplx(sh, 1.0) / ch;
  double n = std::round(-std::log(r) / f.length);
  double lam = std::exp(n * f.length);
  xi *= lam;
  z *= lam;
  cplx dz = z - xi;
  double vplus = xi + std::norm(dz) / dz.real();
  // E(0) = xi, E(inf) = v+, E(i) = z.
  double t = (dz / (cplx(0.0, 1.0) * (vplus - z))).real();
  MoebiusMap e(vplus * t, xi, t, 1.0);
  return f.chart.inverse() * e;
}

}  // namespace

TraceSummary traceHorocycle(const FuchsianGroup& g, const std::vector<Funnel>& funnels, const HopfFrame& u,
                            const TraceParams& p, const TraceVisitor& visit, const AtomicBoundaryMeasure* nu,
                            double delta) {
  if (!(p.R > 0.0) || !std::isfinite(p.R)) throw ValidationError("trace length R must be positive");
  if (!(p.maxStep > 0.0) || !(p.minStep > 0.0) || p.minStep > p.maxStep)
    throw ValidationError("trace steps need 0 < minStep <= maxStep");
  TraceSummary out;
  out.start = u;
  out.R = p.R;
  MoebiusMap m = frameToMatrix(u);
  reduceFrameInPlace(m, g);
  const bool skipping = p.skipDepth > 0.0 && !funnels.empty();
  const double sinhC = std::sinh(p.skipDepth);
  double s = 0.0;
  bool justSkipped = false;
  while (s < p.R) {
    if (skipping && !justSkipped) {
      bool moved = false, done = false;
      for (const Funnel& f : funnels) {
        MoebiusMap k = f.chart * m;
        double a = k.a(), b = k.b(), c = k.c(), d = k.d();
        if (a * c + b * d < sinhC) continue;
        // Depth along the horocycle: sinh = bd s^2 + (ad + bc) s + ac + bd.
        double A2 = b * d, A1 = a * d + b * c, A0 = a * c + b * d - sinhC;
        if (A2 >= 0.0) {
          out.escaped = true;
          out.escapeAt = s;
          out.skipped += p.R - s;
          s = p.R;
          done = true;
          break;
        }
        double disc = std::sqrt(std::max(A1 * A1 - 4.0 * A2 * A0, 0.0));
        double q = -0.5 * (A1 + (A1 >= 0.0 ? disc : -disc));
        double r1 = q / A2, r2 = q != 0.0 ? A0 / q : r1;
        double exitAt = std::max(r1, r2);
        if (s + exitAt >= p.R) {
          out.escaped = true;
          out.escapeAt = s;
          out.skipped += p.R - s;
          s = p.R;
          done = true;
          break;
        }
        m = funnelExit(f, k, p.skipDepth);
        reduceFrameInPlace(m, g);
        s += exitAt;
        out.skipped += exitAt;
        ++out.skips;
        moved = true;
        break;
      }
      if (done) break;
      if (moved) {
        justSkipped = true;
        continue;
      }
    }
    justSkipped = false;
    if (out.steps >= p.maxSteps) throw BudgetError("trace step budget exhausted");
    double ds = std::clamp(p.growth * s, p.minStep, p.maxStep);
    ds = std::min(ds, p.R - s);
    TraceStep st;
    st.s = s;
    st.ds = ds;
    st.start = m;
    st.mid = m * MoebiusMap::horocyclic(0.5 * ds);
    if (nu) {
      // The forward endpoint moves clockwise from m(inf) to m(1/ds).
      double from = m.apply(BoundaryPoint::fromReal(1.0 / ds)).angle();
      double to = m.apply(BoundaryPoint::infinity()).angle();
      double arcMass = nu->mass(from, ccwDistance(from, to), true, false);
      if (arcMass > 0.0) st.mass = arcMass * horoWeight(st.mid, delta);
      out.mass += st.mass;
    }
    visit(st);
    m = m * MoebiusMap::horocyclic(ds);
    reduceFrameInPlace(m, g);
    s += ds;
    ++out.steps;
  }
  out.last = m;
  return out;
}

std::vector<MoebiusMap> frameLifts(const FuchsianGroup& g, const MoebiusMap& m, int depth) {
  std::vector<MoebiusMap> out;
  visitOrbit(g, OrbitCutoff::length(depth),
             [&](std::span<const Letter>, const MoebiusMap& w, double) { out.push_back(w * m); });
  return out;
}

double quotientDistance(const std::vector<MoebiusMap>& lifts, const MoebiusMap& u) {
  double best = std::numeric_limits<double>::infinity();
  for (const MoebiusMap& l : lifts) best = std::min(best, frameDistance(u, l));
  return best;
}

TestFunction::TestFunction(const FuchsianGroup& g, const MoebiusMap& center, double radius, double amplitude)
    : center_(center), radius_(radius), amplitude_(amplitude), lifts_(frameLifts(g, center, 2)) {
  if (!(radius > 0.0)) throw ValidationError("test function radius must be positive");
  if (!(amplitude >= 0.0)) throw ValidationError("test function amplitude must be nonnegative");
}

double TestFunction::operator()(const MoebiusMap& m) const {
  double d = quotientDistance(lifts_, m);
  return d >= radius_ ? 0.0 : amplitude_ * (1.0 - d / radius_);
}

TestFunction TestFunction::scaled(double k) const {
  TestFunction t = *this;
  t.amplitude_ *= k;
  return t;
}

FrameIndex::FrameIndex(double eps) : eps_(eps) {
  if (!(eps > 0.0)) throw ValidationError("index radius must be positive");
  xFactor_ = std::sqrt(2.0 * std::exp(eps) * (std::cosh(eps) - 1.0));
}

void FrameIndex::add(const MoebiusMap& frame, std::size_t owner) {
  cplx z = basePoint(frame);
  auto& band = bands_[bandOf(z.imag())];
  Entry e{z.real(), frames_.size()};
  band.insert(std::upper_bound(band.begin(), band.end(), e.x, [](double x, const Entry& b) { return x < b.x; }), e);
  frames_.push_back(frame);
  owners_.push_back(owner);
}

}  // namespace horo
