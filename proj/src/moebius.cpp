#include "horoflow/moebius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace horo {

double wrapAngle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

double ccwDistance(double from, double to) { return wrapAngle(to - from); }

// ---------------------------------------------------------------------------
// BoundaryPoint
//
// The canonical pair for disc angle theta is (-cos(theta/2), sin(theta/2)),
// whose ratio is the half-plane coordinate -cot(theta/2).

BoundaryPoint BoundaryPoint::fromPair(double p, double q) {
  double n = std::hypot(p, q);
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("degenerate projective pair");
  p /= n;
  q /= n;
  if (q < 0.0 || (q == 0.0 && p > 0.0)) {
    p = -p;
    q = -q;
  }
  if (q == 0.0) return BoundaryPoint(-1.0, 0.0, 0.0);
  double theta = 2.0 * std::atan2(q, -p);
  if (theta >= kTwoPi) theta = 0.0;
  return BoundaryPoint(p, q, theta);
}

BoundaryPoint BoundaryPoint::fromAngle(double theta) {
  theta = wrapAngle(theta);
  if (theta == 0.0) return BoundaryPoint(-1.0, 0.0, 0.0);
  return BoundaryPoint(-std::cos(0.5 * theta), std::sin(0.5 * theta), theta);
}

BoundaryPoint BoundaryPoint::fromReal(double x) {
  if (std::isinf(x)) return infinity();
  if (std::isnan(x)) throw DomainError("NaN boundary coordinate");
  return fromPair(x, 1.0);
}

BoundaryPoint BoundaryPoint::infinity() { return BoundaryPoint(-1.0, 0.0, 0.0); }

double BoundaryPoint::real() const {
  if (q_ == 0.0) return std::numeric_limits<double>::infinity();
  return p_ / q_;
}

double BoundaryPoint::arcDistance(const BoundaryPoint& other) const {
  double d = ccwDistance(angle_, other.angle_);
  return std::min(d, kTwoPi - d);
}

bool ccwOrdered(const BoundaryPoint& a, const BoundaryPoint& b, const BoundaryPoint& c) {
  double ab = ccwDistance(a.angle(), b.angle());
  double ac = ccwDistance(a.angle(), c.angle());
  return ab > 0.0 && ab < ac;
}

// ---------------------------------------------------------------------------
// PlanePoint

PlanePoint PlanePoint::halfPlane(cplx z) {
  if (!(z.imag() > 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("half-plane point must have positive finite imaginary part");
  return PlanePoint(Model::HalfPlane, z);
}

PlanePoint PlanePoint::disc(cplx z) {
  if (!(std::abs(z) < 1.0)) throw DomainError("disc point must satisfy |z| < 1");
  return PlanePoint(Model::Disc, z);
}

cplx PlanePoint::inHalfPlane() const {
  if (model_ == Model::HalfPlane) return z_;
  const cplx i(0.0, 1.0);
  return i * (1.0 + z_) / (1.0 - z_);
}

cplx PlanePoint::inDisc() const {
  if (model_ == Model::Disc) return z_;
  const cplx i(0.0, 1.0);
  return (z_ - i) / (z_ + i);
}

const char* enumName(IsometryClass c) {
  switch (c) {
    case IsometryClass::Identity: return "identity";
    case IsometryClass::Hyperbolic: return "hyperbolic";
    case IsometryClass::Parabolic: return "parabolic";
    case IsometryClass::Elliptic: return "elliptic";
  }
  return "?";
}

const char* enumName(Stability s) {
  switch (s) {
    case Stability::Attracting: return "attracting";
    case Stability::Repelling: return "repelling";
    case Stability::Neutral: return "neutral";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// MoebiusMap

namespace {

void canonicalSign(std::array<double, 4>& m) {
  double scale = 0.0;
  for (double x : m) scale = std::max(scale, std::abs(x));
  for (double x : m) {
    if (std::abs(x) > 1e-13 * scale) {
      if (x < 0.0)
        for (double& y : m) y = -y;
      return;
    }
  }
}

}  // namespace

MoebiusMap::MoebiusMap(double a, double b, double c, double d) : m_{a, b, c, d} {
  double det = a * d - b * c;
  if (!(det > 0.0) || !std::isfinite(det))
    throw ValidationError("matrix must have positive finite determinant");
  double s = 1.0 / std::sqrt(det);
  for (double& x : m_) x *= s;
  canonicalSign(m_);
}

MoebiusMap MoebiusMap::geodesic(double t) {
  double e = std::exp(0.5 * t);
  return MoebiusMap(e, 0.0, 0.0, 1.0 / e);
}

MoebiusMap MoebiusMap::horocyclic(double s) { return MoebiusMap(1.0, 0.0, s, 1.0); }

MoebiusMap MoebiusMap::rotation(double phi) {
  // Conjugate of z -> e^{i phi} z by the Cayley map: rotation about i.
  double c = std::cos(0.5 * phi), s = std::sin(0.5 * phi);
  return MoebiusMap(c, s, -s, c);
}

MoebiusMap MoebiusMap::inverse() const {
  MoebiusMap r = *this;
  r.m_ = {m_[3], -m_[1], -m_[2], m_[0]};
  canonicalSign(r.m_);
  return r;
}

MoebiusMap MoebiusMap::operator*(const MoebiusMap& g) const {
  MoebiusMap r;
  r.m_ = {m_[0] * g.m_[0] + m_[1] * g.m_[2], m_[0] * g.m_[1] + m_[1] * g.m_[3],
          m_[2] * g.m_[0] + m_[3] * g.m_[2], m_[2] * g.m_[1] + m_[3] * g.m_[3]};
  canonicalSign(r.m_);
  return r;
}

cplx MoebiusMap::apply(cplx z) const {
  return (m_[0] * z + m_[1]) / (m_[2] * z + m_[3]);
}

PlanePoint MoebiusMap::apply(const PlanePoint& x) const {
  cplx w = apply(x.inHalfPlane());
  // Guard against round-off pushing a far point onto the real axis.
  if (!(w.imag() > 0.0)) w = cplx(w.real(), std::numeric_limits<double>::min());
  PlanePoint h = PlanePoint::halfPlane(w);
  if (x.model() == Model::Disc) return PlanePoint::disc(h.inDisc());
  return h;
}

BoundaryPoint MoebiusMap::apply(const BoundaryPoint& xi) const {
  return BoundaryPoint::fromPair(m_[0] * xi.p() + m_[1] * xi.q(), m_[2] * xi.p() + m_[3] * xi.q());
}

bool MoebiusMap::approxEqual(const MoebiusMap& g, double tol) const {
  double plus = 0.0, minus = 0.0;
  for (int k = 0; k < 4; ++k) {
    plus = std::max(plus, std::abs(m_[k] - g.m_[k]));
    minus = std::max(minus, std::abs(m_[k] + g.m_[k]));
  }
  return std::min(plus, minus) <= tol;
}

MoebiusMap compose(const MoebiusMap& f, const MoebiusMap& g) {
  MoebiusMap r = f * g;
  // Renormalize the determinant; exact in exact arithmetic.
  return MoebiusMap(r.a(), r.b(), r.c(), r.d());
}

IsometryClass classify(const MoebiusMap& m) {
  if (m.approxEqual(MoebiusMap::identity(), 1e-12)) return IsometryClass::Identity;
  double t = std::abs(m.trace());
  if (t > 2.0 + kParabolicTol) return IsometryClass::Hyperbolic;
  if (t >= 2.0 - kParabolicTol) return IsometryClass::Parabolic;
  return IsometryClass::Elliptic;
}

std::vector<FixedPoint> fixedPoints(const MoebiusMap& m) {
  IsometryClass cls = classify(m);
  if (cls == IsometryClass::Identity) throw DomainError("identity fixes every point");
  if (cls == IsometryClass::Elliptic) return {};

  // Fixed points are the eigenlines of the matrix; the eigenvalue lambda
  // gives derivative 1/lambda^2 at the fixed point.
  double a = m.a(), b = m.b(), c = m.c(), d = m.d();
  double tr = a + d;
  auto eigenline = [&](double lambda) {
    double p1 = b, q1 = lambda - a;
    double p2 = lambda - d, q2 = c;
    if (std::hypot(p1, q1) >= std::hypot(p2, q2)) return BoundaryPoint::fromPair(p1, q1);
    return BoundaryPoint::fromPair(p2, q2);
  };

  if (cls == IsometryClass::Parabolic) {
    double lambda = tr > 0 ? 1.0 : -1.0;
    return {{eigenline(lambda), Stability::Neutral}};
  }
  double disc = std::sqrt(tr * tr - 4.0);
  double big = tr > 0 ? 0.5 * (tr + disc) : 0.5 * (tr - disc);  // |big| > 1
  double small = 1.0 / big;
  return {{eigenline(big), Stability::Attracting}, {eigenline(small), Stability::Repelling}};
}

double translationLength(const MoebiusMap& m) {
  if (classify(m) != IsometryClass::Hyperbolic)
    throw DomainError("translation length is defined for hyperbolic isometries only");
  return 2.0 * std::acosh(0.5 * std::abs(m.trace()));
}

double distance(cplx x, cplx y) {
  double num = std::abs(x - y);
  return 2.0 * std::asinh(0.5 * num / std::sqrt(x.imag() * y.imag()));
}

double distance(const PlanePoint& x, const PlanePoint& y) {
  if (x.model() == Model::Disc && y.model() == Model::Disc) {
    cplx z = x.coords(), w = y.coords();
    double den = std::sqrt((1.0 - std::norm(z)) * (1.0 - std::norm(w)));
    return 2.0 * std::asinh(std::abs(z - w) / den);
  }
  return distance(x.inHalfPlane(), y.inHalfPlane());
}

double busemann(const BoundaryPoint& xi, cplx x, cplx y) {
  // Rotating xi to infinity about o maps z to a point with imaginary part
  // Im z / |q z - p|^2; there beta_inf(x, y) = log(Im y / Im x).
  double p = xi.p(), q = xi.q();
  double px = x.imag() / std::norm(q * x - p);
  double py = y.imag() / std::norm(q * y - p);
  return std::log(py / px);
}

double busemann(const BoundaryPoint& xi, const PlanePoint& x, const PlanePoint& y) {
  return busemann(xi, x.inHalfPlane(), y.inHalfPlane());
}

BoundaryPoint applyBoundary(const MoebiusMap& m, const BoundaryPoint& xi) { return m.apply(xi); }

PlanePoint cayley(const PlanePoint& x) {
  if (x.model() == Model::Disc) return PlanePoint::halfPlane(x.inHalfPlane());
  return PlanePoint::disc(x.inDisc());
}

BoundaryPoint cayley(const BoundaryPoint& xi) { return xi; }

MoebiusMap rotateToInfinity(const BoundaryPoint& xi) {
  // (p q; -q p) sends p/q to infinity and fixes i.
  return MoebiusMap(xi.p(), xi.q(), -xi.q(), xi.p());
}

}  // namespace horo
