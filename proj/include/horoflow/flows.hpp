#pragma once

// Unit tangent vectors in Hopf coordinates, the geodesic and strong unstable
// horocycle flows, and the local product bracket.
//
// The identity matrix is the unit vector at o = i pointing up (towards
// infinity), which is the image of the horizontal vector at the disc origin
// under the Cayley map. A matrix M is the vector M_*(reference), so M(0) is
// the backward endpoint, M(infinity) the forward endpoint and M(i) the base
// point. The geodesic flow is right multiplication by a_t and the horocycle
// flow right multiplication by n_s.

#include "horoflow/moebius.hpp"

namespace horo {

// (xi-, xi+, tau) with tau = beta_{xi-}(base point, o).
struct HopfFrame {
  BoundaryPoint xiMinus;
  BoundaryPoint xiPlus;
  double tau = 0.0;
};

MoebiusMap frameToMatrix(const HopfFrame& f);
HopfFrame matrixToFrame(const MoebiusMap& m);

cplx basePoint(const HopfFrame& f);  // half-plane coordinates
inline cplx basePoint(const MoebiusMap& m) { return m.apply(cplx(0.0, 1.0)); }
// Euclidean direction angle (half-plane chart) of the unit vector M_*(reference).
double tangentAngle(const MoebiusMap& m);

HopfFrame geodesicFlow(const HopfFrame& f, double t);
HopfFrame horocycleFlow(const HopfFrame& f, double s);
inline MoebiusMap geodesicFlow(const MoebiusMap& m, double t) { return m * MoebiusMap::geodesic(t); }
inline MoebiusMap horocycleFlow(const MoebiusMap& m, double s) { return m * MoebiusMap::horocyclic(s); }

// Left action of an isometry on frames.
HopfFrame applyIsometry(const MoebiusMap& g, const HopfFrame& f);

// Distance between unit vectors: base-point distance plus the angle between
// the tangent directions. Adequate as a local quasi-metric.
double frameDistance(const MoebiusMap& u, const MoebiusMap& v);

// Sign of the positive horocycle direction: for s > 0 the forward endpoint of
// h^s v lies on the open arc going clockwise from v+ to v-. Pinned by the
// monotonicity scan in the flow tests.
inline constexpr int kPositiveHorocycleSense = -1;

// w = [u, v]: w- = u-, w+ = v+, base point on the strong stable horocycle
// of v (beta_{v+}(pi(w), pi(v)) = 0). Throws DomainError when u- = v+ and
// when the inputs are further apart than the product radius maxDistance.
HopfFrame bracket(const HopfFrame& u, const HopfFrame& v, double maxDistance);

// A horoball based at `base`: the points x with beta_base(o, x) >= level.
struct Horoball {
  BoundaryPoint base;
  double level = 0.0;

  bool contains(cplx x, double tol = 0.0) const;
  // Busemann height of x above the bounding horocycle (negative outside).
  double height(cplx x) const;
  // Distance from o to the horoball (0 if o is inside).
  double entryDistance() const { return level > 0.0 ? level : 0.0; }
  // The same horoball shrunk by depth n.
  Horoball shrunk(double n) const { return {base, level + n}; }
  Horoball image(const MoebiusMap& g) const;
};

bool horoballsDisjoint(const Horoball& a, const Horoball& b, double margin = 0.0);

}  // namespace horo
