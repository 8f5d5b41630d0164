#include <doctest.h>

#include <cmath>
#include <random>

#include "horoflow/flows.hpp"

using namespace horo;

namespace {

MoebiusMap randomMap(std::mt19937_64& rng, double bound = 3.0) {
  std::uniform_real_distribution<double> u(-bound, bound);
  for (;;) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    double det = a * d - b * c;
    if (det > 0.3) return MoebiusMap(a, b, c, d);
  }
}

HopfFrame randomFrame(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(0.0, kTwoPi), t(-3.0, 3.0);
  for (;;) {
    BoundaryPoint m = BoundaryPoint::fromAngle(ang(rng)), p = BoundaryPoint::fromAngle(ang(rng));
    if (m.arcDistance(p) > 0.05) return {m, p, t(rng)};
  }
}

bool sameFrame(const HopfFrame& a, const HopfFrame& b, double tol) {
  return a.xiMinus.arcDistance(b.xiMinus) <= tol && a.xiPlus.arcDistance(b.xiPlus) <= tol &&
         std::abs(a.tau - b.tau) <= tol;
}

}  // namespace

TEST_CASE("reference frame") {
  HopfFrame f = matrixToFrame(MoebiusMap::identity());
  CHECK(f.xiMinus.real() == doctest::Approx(0.0));
  CHECK(f.xiPlus.isInfinity());
  CHECK(f.tau == doctest::Approx(0.0));
  CHECK(std::abs(basePoint(f) - cplx(0, 1)) < 1e-14);
}

TEST_CASE("frame and matrix round-trip") {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 500; ++k) {
    MoebiusMap m = randomMap(rng);
    CHECK(frameToMatrix(matrixToFrame(m)).approxEqual(m, 1e-9));
    HopfFrame f = randomFrame(rng);
    CHECK(sameFrame(matrixToFrame(frameToMatrix(f)), f, 1e-9));
  }
  HopfFrame bad{BoundaryPoint::fromReal(1.0), BoundaryPoint::fromReal(1.0), 0.0};
  CHECK_THROWS_AS(frameToMatrix(bad), DomainError);
}

TEST_CASE("tau is the Busemann coordinate of the base point") {
  std::mt19937_64 rng(22);
  for (int k = 0; k < 200; ++k) {
    HopfFrame f = randomFrame(rng);
    CHECK(busemann(f.xiMinus, basePoint(f), cplx(0, 1)) == doctest::Approx(f.tau).epsilon(1e-9));
  }
}

TEST_CASE("geodesic flow") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 200; ++k) {
    HopfFrame f = randomFrame(rng);
    CHECK(sameFrame(geodesicFlow(f, 0.0), f, 0.0));
    HopfFrame g = geodesicFlow(f, 1.25);
    CHECK(g.tau == doctest::Approx(f.tau + 1.25));
    // Right multiplication by a_t is the same flow.
    CHECK(sameFrame(matrixToFrame(frameToMatrix(f) * MoebiusMap::geodesic(1.25)), g, 1e-9));
    MoebiusMap m = frameToMatrix(f);
    CHECK((m * MoebiusMap::geodesic(1.0) * MoebiusMap::geodesic(2.0))
              .approxEqual(m * MoebiusMap::geodesic(3.0), 1e-10 * (1 + std::abs(m.a()) + std::abs(m.b()))));
    // The base point moves at unit speed toward xi+.
    CHECK(distance(basePoint(f), basePoint(g)) == doctest::Approx(1.25).epsilon(1e-9));
  }
}

TEST_CASE("flow laws and commutation") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    MoebiusMap m = frameToMatrix(randomFrame(rng));
    double t = u(rng), s = u(rng), s2 = u(rng);
    // g^t h^s v versus h^{s e^t} g^t v
    MoebiusMap lhs = geodesicFlow(horocycleFlow(m, s), t);
    MoebiusMap rhs = horocycleFlow(geodesicFlow(m, t), s * std::exp(t));
    HopfFrame a = matrixToFrame(lhs), b = matrixToFrame(rhs);
    worst = std::max({worst, a.xiMinus.arcDistance(b.xiMinus), a.xiPlus.arcDistance(b.xiPlus),
                      std::abs(a.tau - b.tau)});
    HopfFrame c = matrixToFrame(horocycleFlow(horocycleFlow(m, s), s2));
    HopfFrame d = matrixToFrame(horocycleFlow(m, s + s2));
    CHECK(sameFrame(c, d, 1e-10));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("horocycle flow keeps xi- and the unstable horocycle") {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 300; ++k) {
    HopfFrame f = randomFrame(rng);
    HopfFrame g = horocycleFlow(f, u(rng));
    CHECK(g.xiMinus.arcDistance(f.xiMinus) < 1e-10);
    CHECK(g.tau == doctest::Approx(f.tau).epsilon(1e-9));
    CHECK(sameFrame(horocycleFlow(f, 0.0), f, 1e-12));
  }
}

TEST_CASE("horocycle flow has unit speed along the horocycle") {
  // Oracle: on the horocycle Im = 1 around infinity the arc length between
  // x and x + s is |s|.
  MoebiusMap flip(0.0, -1.0, 1.0, 0.0);  // frame with xi- = infinity at i
  HopfFrame f = matrixToFrame(flip);
  CHECK(f.xiMinus.isInfinity());
  for (double s : {0.1, 1.0, 4.0}) {
    cplx z = basePoint(horocycleFlow(flip, s));
    CHECK(z.imag() == doctest::Approx(1.0));
    CHECK(std::abs(z.real()) == doctest::Approx(s));
  }
}

TEST_CASE("positive horocycle sense is pinned") {
  // Scan s -> xi+(h^s v): monotone, injective, tends to xi- at both ends,
  // and for s > 0 sits on the clockwise arc from v+ to v-.
  std::mt19937_64 rng(26);
  for (int k = 0; k < 50; ++k) {
    HopfFrame f = randomFrame(rng);
    MoebiusMap m = frameToMatrix(f);
    double start = f.xiPlus.angle();
    double prev = 0.0;
    for (int j = 1; j <= 400; ++j) {
      double s = 0.05 * j * j;
      BoundaryPoint p = matrixToFrame(horocycleFlow(m, s)).xiPlus;
      // clockwise displacement from v+
      double cw = ccwDistance(p.angle(), start);
      CHECK(cw > prev);
      prev = cw;
      double span = ccwDistance(f.xiMinus.angle(), start);  // clockwise room from v+ to v-
      CHECK(cw < span);
      if (kPositiveHorocycleSense < 0) CHECK(ccwOrdered(f.xiMinus, p, f.xiPlus));
    }
    BoundaryPoint far = matrixToFrame(horocycleFlow(m, 1e7)).xiPlus;
    BoundaryPoint farNeg = matrixToFrame(horocycleFlow(m, -1e7)).xiPlus;
    CHECK(far.arcDistance(f.xiMinus) < 1e-5);
    CHECK(farNeg.arcDistance(f.xiMinus) < 1e-5);
    CHECK(ccwOrdered(f.xiPlus, farNeg, f.xiMinus));
  }
}

TEST_CASE("stable contraction under the backward geodesic flow") {
  std::mt19937_64 rng(27);
  for (int k = 0; k < 100; ++k) {
    MoebiusMap m = frameToMatrix(randomFrame(rng));
    double s = 1.5;
    double prev = INFINITY;
    for (double t : {0.0, 5.0, 10.0, 20.0}) {
      double d = distance(basePoint(geodesicFlow(m, -t)), basePoint(geodesicFlow(horocycleFlow(m, s), -t)));
      CHECK(d <= prev + 1e-12);
      prev = d;
    }
    CHECK(prev < 1e-7);
  }
}

TEST_CASE("bracket") {
  std::mt19937_64 rng(28);
  std::uniform_real_distribution<double> small(-0.05, 0.05);
  HopfFrame u = randomFrame(rng);
  CHECK(sameFrame(bracket(u, u, 1.0), u, 1e-9));
  for (int k = 0; k < 300; ++k) {
    HopfFrame a = randomFrame(rng);
    MoebiusMap ma = frameToMatrix(a);
    MoebiusMap mb = ma * MoebiusMap::geodesic(small(rng)) * MoebiusMap::horocyclic(small(rng)) *
                    MoebiusMap(1.0, small(rng), 0.0, 1.0);
    HopfFrame b = matrixToFrame(mb);
    HopfFrame w = bracket(a, b, 1.0);
    CHECK(w.xiMinus.arcDistance(a.xiMinus) == 0.0);
    CHECK(w.xiPlus.arcDistance(b.xiPlus) == 0.0);
    CHECK(std::abs(busemann(b.xiPlus, basePoint(w), basePoint(b))) < 1e-9);
    MoebiusMap mw = frameToMatrix(w);
    CHECK(frameDistance(mw, ma) < 0.5);
    CHECK(frameDistance(mw, mb) < 0.5);
  }
}

TEST_CASE("bracket errors") {
  HopfFrame u{BoundaryPoint::fromReal(0.0), BoundaryPoint::infinity(), 0.0};
  HopfFrame v{BoundaryPoint::fromReal(1.0), BoundaryPoint::fromReal(0.0), 0.0};
  CHECK_THROWS_AS(bracket(u, v, 100.0), DomainError);
  HopfFrame far{BoundaryPoint::fromReal(0.0), BoundaryPoint::infinity(), 30.0};
  CHECK_THROWS_AS(bracket(u, far, 1.0), DomainError);
}

TEST_CASE("horoballs") {
  Horoball h{BoundaryPoint::infinity(), std::log(2.0)};
  CHECK(h.contains(cplx(5.0, 2.0), 1e-12));
  CHECK(!h.contains(cplx(0.0, 1.9)));
  CHECK(std::abs(h.height(cplx(0.3, 2.0))) < 1e-12);
  CHECK(h.entryDistance() == doctest::Approx(std::log(2.0)));
  // The distance from o to the ball is the level.
  CHECK(distance(cplx(0, 1), cplx(0, 2)) == doctest::Approx(h.entryDistance()));
  Horoball deep = h.shrunk(1.0);
  CHECK(deep.contains(cplx(0, 2 * std::exp(1.0)), 1e-12));

  std::mt19937_64 rng(29);
  for (int k = 0; k < 100; ++k) {
    MoebiusMap g = randomMap(rng);
    Horoball gh = h.image(g);
    cplx x(0.7, 3.0);
    CHECK(gh.height(g.apply(x)) == doctest::Approx(h.height(x)).epsilon(1e-9));
  }
  Horoball other{BoundaryPoint::fromReal(0.0), std::log(2.0)};
  // Base 0, level ln 2: Euclidean diameter 1/2, below the line Im = 2.
  CHECK(horoballsDisjoint(h, other));
  CHECK(horoballsDisjoint(other, h));
  Horoball fat{BoundaryPoint::fromReal(0.0), -2.0};
  CHECK(!horoballsDisjoint(h, fat));
}
