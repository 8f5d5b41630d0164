#include "horoflow/flows.hpp"

#include <cmath>

namespace horo {

namespace {
const cplx kO(0.0, 1.0);
}

MoebiusMap frameToMatrix(const HopfFrame& f) {
  const BoundaryPoint& m = f.xiMinus;
  const BoundaryPoint& p = f.xiPlus;
  // Columns are representatives of xi+ (image of infinity) and xi- (image of 0).
  double det = p.p() * m.q() - m.p() * p.q();
  if (std::abs(det) < 1e-15) throw DomainError("degenerate frame: xi- == xi+");
  double sgn = det > 0 ? 1.0 : -1.0;
  MoebiusMap g0(p.p(), sgn * m.p(), p.q(), sgn * m.q());
  double tau0 = busemann(m, basePoint(g0), kO);
  return g0 * MoebiusMap::geodesic(f.tau - tau0);
}

HopfFrame matrixToFrame(const MoebiusMap& g) {
  HopfFrame f;
  f.xiMinus = g.apply(BoundaryPoint::fromReal(0.0));
  f.xiPlus = g.apply(BoundaryPoint::infinity());
  f.tau = busemann(f.xiMinus, basePoint(g), kO);
  return f;
}

cplx basePoint(const HopfFrame& f) { return basePoint(frameToMatrix(f)); }

double tangentAngle(const MoebiusMap& m) {
  // M'(i) = (c i + d)^{-2}; the reference vector points along +i.
  return wrapAngle(0.5 * kPi - 2.0 * std::arg(cplx(m.d(), m.c())));
}

HopfFrame geodesicFlow(const HopfFrame& f, double t) { return {f.xiMinus, f.xiPlus, f.tau + t}; }

HopfFrame horocycleFlow(const HopfFrame& f, double s) {
  return matrixToFrame(frameToMatrix(f) * MoebiusMap::horocyclic(s));
}

HopfFrame applyIsometry(const MoebiusMap& g, const HopfFrame& f) {
  return matrixToFrame(g * frameToMatrix(f));
}

double frameDistance(const MoebiusMap& u, const MoebiusMap& v) {
  double da = std::abs(tangentAngle(u) - tangentAngle(v));
  if (da > kPi) da = kTwoPi - da;
  return distance(basePoint(u), basePoint(v)) + da;
}

HopfFrame bracket(const HopfFrame& u, const HopfFrame& v, double maxDistance) {
  if (u.xiMinus.arcDistance(v.xiPlus) < 1e-14)
    throw DomainError("bracket undefined: u- equals v+");
  MoebiusMap mu = frameToMatrix(u), mv = frameToMatrix(v);
  if (frameDistance(mu, mv) > maxDistance)
    throw DomainError("bracket inputs are outside the product-structure radius");
  HopfFrame w0{u.xiMinus, v.xiPlus, 0.0};
  // Flowing forward by t lowers beta_{v+}(., pi(v)) by exactly t.
  double t = busemann(v.xiPlus, basePoint(w0), basePoint(mv));
  return geodesicFlow(w0, t);
}

bool Horoball::contains(cplx x, double tol) const { return height(x) >= -tol; }

double Horoball::height(cplx x) const { return busemann(base, kO, x) - level; }

Horoball Horoball::image(const MoebiusMap& g) const {
  BoundaryPoint b = g.apply(base);
  return {b, level + busemann(b, kO, g.apply(kO))};
}

bool horoballsDisjoint(const Horoball& a, const Horoball& b, double margin) {
  if (a.base.arcDistance(b.base) < 1e-14) return false;
  // Rotate a's base to infinity about o: a becomes {Im z >= e^{level}} and b
  // a Euclidean disc tangent at r with diameter (r^2+1) e^{-level_b}.
  MoebiusMap rot = rotateToInfinity(a.base);
  double r = rot.apply(b.base).real();
  double diam = (r * r + 1.0) * std::exp(-b.level);
  return std::log(std::exp(a.level) / diam) > margin;
}

}  // namespace horo
