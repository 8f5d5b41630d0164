#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "horoflow/boundary.hpp"

using namespace horo;

namespace {

std::vector<std::vector<Letter>> wordsUpTo(const FuchsianGroup& g, int n) {
  std::vector<std::vector<Letter>> out;
  visitOrbit(g, OrbitCutoff::length(n), [&](std::span<const Letter> w, const MoebiusMap&, double) {
    if (!w.empty()) out.emplace_back(w.begin(), w.end());
  });
  return out;
}

const OrdinaryInterval& widest(const OrdinarySet& s) {
  return *std::max_element(s.intervals.begin(), s.intervals.end(),
                           [](const auto& a, const auto& b) { return a.length() < b.length(); });
}

}  // namespace

TEST_CASE("arc sets") {
  ArcSet s = ArcSet::fromArcs({{1.0, 0.5}, {6.0, 0.5}, {3.0, 1.0}});
  CHECK(s.size() == 3);
  CHECK(s.measure() == doctest::Approx(2.0));
  CHECK(s.contains(0.2));  // wrapped arc
  CHECK(s.contains(3.5));
  CHECK(!s.contains(2.0));
  ArcSet c = s.complement();
  CHECK(c.measure() == doctest::Approx(kTwoPi - 2.0));
  CHECK(c.contains(2.0));
  CHECK_THROWS_AS(ArcSet::fromArcs({{1.0, 1.0}, {1.5, 1.0}}), ValidationError);
}

TEST_CASE("depth-1 cover is the region set") {
  FuchsianGroup g = builtinGroup("schottky2");
  LimitSetCover c = limitSetCover(g, 1);
  REQUIRE(c.size() == 4);
  for (std::size_t l = 0; l < 4; ++l) {
    const Region& r = g.region(static_cast<Letter>(l));
    bool found = false;
    for (const Arc& a : c.arcs)
      if (std::abs(a.start - r.start().angle()) < 1e-15 && std::abs(a.length - r.arcLength()) < 1e-15)
        found = true;
    CHECK(found);
  }
}

TEST_CASE("covers nest, shrink and contain the fixed points") {
  for (const char* name : {"schottky2", "cusp1"}) {
    FuchsianGroup g = builtinGroup(name);
    double prev = INFINITY;
    ArcSet prevSet;
    for (int d = 1; d <= 8; ++d) {
      LimitSetCover c = limitSetCover(g, d);
      CHECK(c.size() == static_cast<std::size_t>(4 * std::pow(3, d - 1)));
      CHECK(c.measure() < prev);
      prev = c.measure();
      ArcSet s = c.arcSet();
      if (d > 1) CHECK(s.subsetOf(prevSet, 1e-15));
      prevSet = s;
    }
    LimitSetCover c4 = limitSetCover(g, 4);
    ArcSet s4 = c4.arcSet();
    auto words = wordsUpTo(g, 4);
    CHECK(words.size() == 160);
    for (const auto& w : words) {
      MoebiusMap m = GroupWord(w).evaluate(g);
      for (const FixedPoint& f : fixedPoints(m)) CHECK(s4.contains(f.point.angle(), 1e-12));
    }
  }
}

TEST_CASE("ordinary intervals") {
  FuchsianGroup g = builtinGroup("schottky2");
  OrdinarySet o1 = ordinaryIntervals(g, 1);
  CHECK(o1.intervals.size() == 4);
  CHECK(ordinaryIntervals(builtinGroup("cusp1"), 1).intervals.size() == 3);

  for (int d : {1, 3, 6}) {
    OrdinarySet o = ordinaryIntervals(g, d);
    CHECK(o.intervals.size() == static_cast<std::size_t>(4 * std::pow(3, d - 1)));
    for (const auto& iv : o.intervals) {
      // Each endpoint is the attracting fixed point of its certificate, and
      // the two certificates are mutually inverse (one axis per interval).
      MoebiusMap cf = iv.firstCert.evaluate(g), cs = iv.secondCert.evaluate(g);
      CHECK(fixedPoints(cf)[0].point.arcDistance(iv.first) < 1e-9);
      CHECK(fixedPoints(cs)[0].point.arcDistance(iv.second) < 1e-9);
      CHECK(iv.secondCert == iv.firstCert.inverse());
      // The resolved gap lies inside the exact interval.
      CHECK(ccwDistance(iv.first.angle(), iv.gap.start) <= iv.length() + 1e-12);
      CHECK(ccwDistance(iv.gap.start, iv.second.angle()) >= iv.gap.length - 1e-12);
    }
  }
  // The widest gap's cover endpoints converge to the exact endpoints.
  double prev = INFINITY;
  for (int d = 1; d <= 8; ++d) {
    OrdinarySet od = ordinaryIntervals(g, d);
    const OrdinaryInterval& w = widest(od);
    double err = w.first.arcDistance(BoundaryPoint::fromAngle(w.gap.start));
    CHECK(err <= prev);
    prev = err;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("first endpoints") {
  FuchsianGroup g = builtinGroup("schottky2");
  OrdinarySet o = ordinaryIntervals(g, 12);
  const OrdinaryInterval& w = widest(o);
  FirstEndpointResult r = isFirstEndpoint(w.first, g, 12);
  CHECK(r.verdict == Verdict::Yes);
  CHECK(fixedPoints(r.cert.evaluate(g))[0].point.arcDistance(w.first) < 1e-9);

  MoebiusMap ab = g.parseWord("ab").evaluate(g);
  BoundaryPoint fab = fixedPoints(ab)[0].point;
  CHECK(isFirstEndpoint(fab, g, 12).verdict == Verdict::No);
  CHECK(isFirstEndpoint(w.second, g, 12).verdict == Verdict::No);

  double mid = w.first.angle() + 0.5 * w.length();
  CHECK_THROWS_WITH_AS(isFirstEndpoint(BoundaryPoint::fromAngle(mid), g, 12), "not a limit point",
                       DomainError);

  // Coarse tolerance cannot resolve anything.
  CHECK(isFirstEndpoint(fab, g, 12, 1.0).verdict == Verdict::Unresolved);

  // Generators carry first endpoints to first endpoints.
  OrdinarySet o3 = ordinaryIntervals(g, 3);
  for (const auto& iv : o3.intervals)
    for (Letter l = 0; l < 4; ++l)
      CHECK(isFirstEndpoint(g.letter(l).apply(iv.first), g, 12).verdict == Verdict::Yes);
}

TEST_CASE("radial and parabolic points") {
  FuchsianGroup g = builtinGroup("schottky2");
  BoundaryPoint fab = fixedPoints(g.parseWord("ab").evaluate(g))[0].point;
  RadialResult r = isRadial(fab, g, 1.0, 16.0);
  CHECK(r.kind == RadialKind::Radial);
  CHECK(r.witnesses >= 2);

  OrdinarySet o = ordinaryIntervals(g, 1);
  const OrdinaryInterval& w = widest(o);
  RadialResult n = isRadial(BoundaryPoint::fromAngle(w.first.angle() + 0.5 * w.length()), g, 1.0, 16.0);
  CHECK(n.kind == RadialKind::NotRadialUpTo);
  CHECK(n.witnesses == 0);

  FuchsianGroup c = builtinGroup("cusp1");
  RadialResult p = isRadial(BoundaryPoint::infinity(), c, 1.0, 16.0);
  CHECK(p.kind == RadialKind::ParabolicFixed);
  CHECK(p.parabolicWord.empty());
  BoundaryPoint img = c.parseWord("h").evaluate(c).apply(BoundaryPoint::infinity());
  CHECK(isRadial(img, c, 1.0, 16.0).kind == RadialKind::ParabolicFixed);
}

TEST_CASE("cone membership matches the definition") {
  // Oracle: distance to sampled points of the backward ray and horoball
  // membership via the Busemann function.
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi), u(-3.0, 3.0), y(0.05, 4.0);
  for (int k = 0; k < 20; ++k) {
    HopfFrame v{BoundaryPoint::fromAngle(ang(rng)), BoundaryPoint::fromAngle(ang(rng)), u(rng)};
    if (v.xiMinus.arcDistance(v.xiPlus) < 0.1) continue;
    double alpha = 0.7, D = 1.0;
    ConeRegion cone(v, alpha, D);
    MoebiusMap w = frameToMatrix(v) * MoebiusMap::geodesic(-D);
    cplx base = basePoint(w);
    for (int j = 0; j < 200; ++j) {
      cplx x = cone.chart().inverse().apply(cplx(u(rng), 1.0 + y(rng)));
      bool inHoro = busemann(v.xiMinus, base, x) >= 0.0;
      double dray = INFINITY;
      for (int s = 0; s <= 4000; ++s) dray = std::min(dray, distance(x, basePoint(w * MoebiusMap::geodesic(-0.005 * s))));
      bool clear = std::abs(dray - alpha) > 0.01;
      CHECK(cone.inHoroball(x) == inHoro);
      if (clear) CHECK(cone.inCone(x) == (inHoro && dray <= alpha));
    }
  }
}

TEST_CASE("right horocyclic points: two methods agree") {
  for (const char* name : {"schottky2", "cusp1"}) {
    FuchsianGroup g = builtinGroup(name);
    OrdinarySet o = ordinaryIntervals(g, 3);
    std::vector<std::pair<BoundaryPoint, bool>> battery;  // point, expected
    for (std::size_t k = 0; k < o.intervals.size() && battery.size() < 8; k += 3)
      battery.push_back({o.intervals[k].first, false});
    for (std::size_t k = 1; k < o.intervals.size() && battery.size() < 14; k += 3)
      battery.push_back({o.intervals[k].second, true});
    std::mt19937_64 rng(43);
    while (battery.size() < 20) {
      std::uniform_int_distribution<int> len(2, 5), let(0, 3);
      std::vector<Letter> w;
      int n = len(rng);
      while (static_cast<int>(w.size()) < n) {
        Letter l = static_cast<Letter>(let(rng));
        if (!w.empty() && w.back() == inverseLetter(l)) continue;
        w.push_back(l);
      }
      if (w.front() == inverseLetter(w.back())) continue;
      MoebiusMap m = GroupWord(w).evaluate(g);
      if (classify(m) != IsometryClass::Hyperbolic) continue;
      battery.push_back({fixedPoints(m)[0].point, true});
    }
    HorocyclicParams params;
    params.radialDistance = 6.0;
    params.radialLength = 12.0;
    for (const auto& [xi, expected] : battery) {
      HorocyclicResult r = isRightHorocyclic(xi, g, params);
      REQUIRE(r.predicate.has_value());
      CHECK(*r.predicate == expected);
      CHECK(r.direct == expected);
      CHECK(r.agree());
    }
  }
  FuchsianGroup c = builtinGroup("cusp1");
  CHECK_THROWS_AS(isRightHorocyclic(BoundaryPoint::infinity(), c), DomainError);
}
