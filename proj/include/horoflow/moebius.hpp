#pragma once

// Orientation-preserving isometries of the hyperbolic plane (PSL(2,R)),
// points of the plane in the disc and upper half-plane models, and points
// of the circle at infinity. Curvature -1 throughout: the half-plane metric
// is (dx^2+dy^2)/y^2 and the disc metric 4|dz|^2/(1-|z|^2)^2.
//
// Conventions used by every other module:
//   - the base point o is the disc origin, i.e. i in the half-plane;
//   - the Cayley map z -> i(1+z)/(1-z) sends the disc to the half-plane;
//   - counterclockwise order on the disc circle is increasing order on the
//     extended real line, with infinity sitting at disc angle 0.

#include <array>
#include <complex>
#include <vector>

#include "horoflow/error.hpp"

namespace horo {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Wraps an angle into [0, 2pi).
double wrapAngle(double theta);

// Counterclockwise angular distance from `from` to `to`, in [0, 2pi).
double ccwDistance(double from, double to);

class BoundaryPoint {
public:
  BoundaryPoint() : BoundaryPoint(fromAngle(0.0)) {}

  static BoundaryPoint fromAngle(double theta);
  // Extended real coordinate; +-infinity both mean the point at infinity.
  static BoundaryPoint fromReal(double x);
  static BoundaryPoint infinity();
  // Projective pair (p : q) meaning the real number p/q; (p : 0) is infinity.
  static BoundaryPoint fromPair(double p, double q);

  double angle() const { return angle_; }
  bool isInfinity() const { return q_ == 0.0; }
  // Half-plane coordinate; returns +inf for the point at infinity.
  double real() const;
  // Unit-norm projective representative with q >= 0.
  double p() const { return p_; }
  double q() const { return q_; }

  // Circle distance (shortest arc) between two boundary points.
  double arcDistance(const BoundaryPoint& other) const;

private:
  BoundaryPoint(double p, double q, double theta) : p_(p), q_(q), angle_(theta) {}
  double p_;
  double q_;
  double angle_;
};

// True when a, b, c appear in this order going counterclockwise.
bool ccwOrdered(const BoundaryPoint& a, const BoundaryPoint& b, const BoundaryPoint& c);

enum class Model { Disc, HalfPlane };

class PlanePoint {
public:
  static PlanePoint halfPlane(cplx z);
  static PlanePoint halfPlane(double x, double y) { return halfPlane(cplx(x, y)); }
  static PlanePoint disc(cplx z);
  // The base point o.
  static PlanePoint origin() { return halfPlane(cplx(0.0, 1.0)); }

  Model model() const { return model_; }
  cplx coords() const { return z_; }
  // Same point expressed in the upper half-plane.
  cplx inHalfPlane() const;
  cplx inDisc() const;

private:
  PlanePoint(Model m, cplx z) : model_(m), z_(z) {}
  Model model_;
  cplx z_;
};

enum class IsometryClass { Identity, Hyperbolic, Parabolic, Elliptic };
const char* enumName(IsometryClass c);

enum class Stability { Attracting, Repelling, Neutral };
const char* enumName(Stability s);

struct FixedPoint {
  BoundaryPoint point;
  Stability stability;
};

// 2x2 real matrix with determinant 1, taken up to sign. Sign is canonical:
// the first entry (row-major) that is not negligible is positive.
class MoebiusMap {
public:
  MoebiusMap() : m_{1.0, 0.0, 0.0, 1.0} {}
  // Normalizes by 1/sqrt(det); throws on det <= 0.
  MoebiusMap(double a, double b, double c, double d);

  static MoebiusMap identity() { return {}; }
  // a_t = diag(e^{t/2}, e^{-t/2}); translates by t along the imaginary axis.
  static MoebiusMap geodesic(double t);
  // n_s = (1 0; s 1).
  static MoebiusMap horocyclic(double s);
  // Rotation about o by angle phi in the disc model.
  static MoebiusMap rotation(double phi);

  double a() const { return m_[0]; }
  double b() const { return m_[1]; }
  double c() const { return m_[2]; }
  double d() const { return m_[3]; }
  double trace() const { return m_[0] + m_[3]; }
  double det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

  MoebiusMap inverse() const;
  MoebiusMap operator*(const MoebiusMap& g) const;

  cplx apply(cplx z) const;  // half-plane action
  PlanePoint apply(const PlanePoint& x) const;
  BoundaryPoint apply(const BoundaryPoint& xi) const;

  // Entrywise closeness up to the global sign.
  bool approxEqual(const MoebiusMap& g, double tol) const;

private:
  std::array<double, 4> m_;
};

inline constexpr double kParabolicTol = 1e-9;

MoebiusMap compose(const MoebiusMap& f, const MoebiusMap& g);
IsometryClass classify(const MoebiusMap& m);
// Throws DomainError for the identity.
std::vector<FixedPoint> fixedPoints(const MoebiusMap& m);
// 2 arccosh(|tr|/2); throws DomainError unless hyperbolic.
double translationLength(const MoebiusMap& m);

double distance(const PlanePoint& x, const PlanePoint& y);
double distance(cplx x, cplx y);  // half-plane coordinates

// beta_xi(x, y) = lim_{z->xi} d(x,z) - d(y,z), evaluated in closed form.
double busemann(const BoundaryPoint& xi, const PlanePoint& x, const PlanePoint& y);
double busemann(const BoundaryPoint& xi, cplx x, cplx y);  // half-plane

BoundaryPoint applyBoundary(const MoebiusMap& m, const BoundaryPoint& xi);

PlanePoint cayley(const PlanePoint& x);
// Boundary points are stored model-free; this is the identity on the point,
// provided so callers can state model changes explicitly.
BoundaryPoint cayley(const BoundaryPoint& xi);

// The isometry fixing o that sends xi to infinity.
MoebiusMap rotateToInfinity(const BoundaryPoint& xi);

}  // namespace horo
