#include "horoflow/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace horo {

namespace {

const cplx kO(0.0, 1.0);
const MoebiusMap kFlip(0.0, -1.0, 1.0, 0.0);

double gapBetween(double from, double to) {
  double d = ccwDistance(from, to);
  if (d > kTwoPi - 1e-9) d = 0.0;  // touching, up to round-off
  return d;
}

MoebiusMap evalLetters(const FuchsianGroup& g, std::span<const Letter> w) {
  MoebiusMap m;
  for (Letter l : w) m = m * g.letter(l);
  return m;
}

Arc clampInto(const Arc& parent, const BoundaryPoint& s, const BoundaryPoint& e) {
  double off = gapBetween(parent.start, s.angle());
  if (off > parent.length) off = parent.length;
  double len = gapBetween(s.angle(), e.angle());
  len = std::min(len, parent.length - off);
  return {wrapAngle(parent.start + off), len};
}

ExtremePoint extremePoint(const FuchsianGroup& g, std::span<const Letter> word, bool last) {
  if (word.empty()) throw DomainError("extreme point needs a nonempty word");
  // The extreme child depends only on the current letter, so the chain of
  // extreme children is eventually periodic.
  std::vector<Letter> chain{word.back()};
  std::vector<int> seen(g.letterCount(), -1);
  seen[word.back()] = 0;
  int mu = 0;
  for (;;) {
    Letter cur = chain.back();
    Letter nx = last ? g.children(cur).back() : g.children(cur).front();
    if (seen[nx] >= 0) {
      mu = seen[nx];
      break;
    }
    seen[nx] = static_cast<int>(chain.size());
    chain.push_back(nx);
  }
  std::vector<Letter> u(word.begin(), word.end() - 1);
  u.insert(u.end(), chain.begin(), chain.begin() + mu);
  std::vector<Letter> period(chain.begin() + mu, chain.end());
  MoebiusMap mp = evalLetters(g, period);
  auto fps = fixedPoints(mp);
  ExtremePoint ep;
  ep.parabolic = classify(mp) == IsometryClass::Parabolic;
  ep.point = evalLetters(g, u).apply(fps[0].point);
  GroupWord uw(u);
  ep.cert = uw * GroupWord(period) * uw.inverse();
  return ep;
}

}  // namespace

bool Arc::contains(double angle, double tol) const {
  double d = ccwDistance(start, angle);
  return d <= length + tol || d >= kTwoPi - tol;
}

ArcSet ArcSet::fromArcs(std::vector<Arc> arcs, double tol) {
  for (Arc& a : arcs) {
    if (a.length < 0.0 || a.length > kTwoPi) throw ValidationError("arc length out of range");
    a.start = wrapAngle(a.start);
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.start < b.start; });
  for (std::size_t k = 0; k + 1 < arcs.size(); ++k)
    if (arcs[k + 1].start - arcs[k].start < arcs[k].length - tol)
      throw ValidationError("arcs overlap");
  if (arcs.size() > 1 && arcs.front().start + kTwoPi - arcs.back().start < arcs.back().length - tol)
    throw ValidationError("arcs overlap");
  ArcSet s;
  s.arcs_ = std::move(arcs);
  return s;
}

double ArcSet::measure() const {
  double m = 0.0;
  for (const Arc& a : arcs_) m += a.length;
  return m;
}

std::optional<std::size_t> ArcSet::find(double angle, double tol) const {
  if (arcs_.empty()) return std::nullopt;
  angle = wrapAngle(angle);
  auto it = std::upper_bound(arcs_.begin(), arcs_.end(), angle,
                             [](double a, const Arc& arc) { return a < arc.start; });
  std::size_t idx = it == arcs_.begin() ? arcs_.size() - 1 : static_cast<std::size_t>(it - arcs_.begin()) - 1;
  for (std::size_t cand : {idx, (idx + 1) % arcs_.size(), arcs_.size() - 1})
    if (arcs_[cand].contains(angle, tol)) return cand;
  return std::nullopt;
}

ArcSet ArcSet::complement(double minGap) const {
  std::vector<Arc> out;
  if (arcs_.empty()) return fromArcs({{0.0, kTwoPi}});
  for (std::size_t k = 0; k < arcs_.size(); ++k) {
    const Arc& a = arcs_[k];
    const Arc& b = arcs_[(k + 1) % arcs_.size()];
    double gap = gapBetween(a.end(), b.start);
    if (arcs_.size() == 1) gap = kTwoPi - a.length;
    if (gap > minGap) out.push_back({a.end(), gap});
  }
  return fromArcs(std::move(out));
}

bool ArcSet::subsetOf(const ArcSet& other, double tol) const {
  for (const Arc& a : arcs_) {
    auto k = other.find(a.start, tol);
    if (!k) return false;
    const Arc& b = other.arcs()[*k];
    double off = ccwDistance(b.start, a.start);
    if (off > kTwoPi - tol) off = 0.0;
    if (off + a.length > b.length + tol) return false;
  }
  return true;
}

GroupWord LimitSetCover::word(std::size_t k) const {
  return GroupWord(std::vector<Letter>(wordData(k), wordData(k) + depth));
}

double LimitSetCover::measure() const {
  double m = 0.0;
  for (const Arc& a : arcs) m += a.length;
  return m;
}

LimitSetCover limitSetCover(const FuchsianGroup& g, int depth) {
  if (depth < 1) throw ValidationError("cover depth must be at least 1");
  if (depth > 20) throw BudgetError("cover depth above 20 is not supported");
  LimitSetCover cover;
  cover.depth = depth;
  std::vector<Letter> word;
  std::function<void(const MoebiusMap&, const Arc&)> rec = [&](const MoebiusMap& m, const Arc& arc) {
    if (static_cast<int>(word.size()) == depth) {
      cover.arcs.push_back(arc);
      cover.letters.insert(cover.letters.end(), word.begin(), word.end());
      return;
    }
    MoebiusMap mk = m * g.letter(word.back());
    for (Letter y : g.children(word.back())) {
      const Region& r = g.region(y);
      Arc child = clampInto(arc, mk.apply(r.start()), mk.apply(r.end()));
      word.push_back(y);
      rec(mk, child);
      word.pop_back();
    }
  };
  for (Letter x : g.topLetters()) {
    const Region& r = g.region(x);
    word.push_back(x);
    rec(MoebiusMap(), Arc{r.start().angle(), r.arcLength()});
    word.pop_back();
  }
  return cover;
}

ExtremePoint lastLimitPoint(const FuchsianGroup& g, std::span<const Letter> word) {
  return extremePoint(g, word, true);
}

ExtremePoint firstLimitPoint(const FuchsianGroup& g, std::span<const Letter> word) {
  return extremePoint(g, word, false);
}

OrdinarySet ordinaryIntervals(const FuchsianGroup& g, int depth) {
  LimitSetCover top = limitSetCover(g, 1);
  if (top.measure() >= kTwoPi - 1e-12)
    throw DomainError("group of the first kind: no ordinary intervals");
  LimitSetCover cover = limitSetCover(g, depth);
  OrdinarySet out;
  out.depth = depth;
  std::vector<Arc> gaps;
  std::size_t n = cover.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t j = (k + 1) % n;
    std::span<const Letter> wl(cover.wordData(k), depth), wr(cover.wordData(j), depth);
    ExtremePoint l = lastLimitPoint(g, wl);
    // Arcs meeting at a parabolic fixed point leave no ordinary interval.
    if (l.parabolic) continue;
    ExtremePoint r = firstLimitPoint(g, wr);
    OrdinaryInterval iv;
    iv.gap = {cover.arcs[k].end(), gapBetween(cover.arcs[k].end(), cover.arcs[j].start)};
    iv.first = l.point;
    iv.second = r.point;
    iv.firstCert = l.cert;
    iv.secondCert = r.cert;
    gaps.push_back(iv.gap);
    out.intervals.push_back(iv);
  }
  // Keep intervals parallel to the sorted gap set.
  std::vector<std::size_t> idx(gaps.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return wrapAngle(gaps[a].start) < wrapAngle(gaps[b].start);
  });
  std::vector<OrdinaryInterval> sorted;
  std::vector<Arc> sortedGaps;
  for (std::size_t k : idx) {
    sorted.push_back(out.intervals[k]);
    sortedGaps.push_back(gaps[k]);
  }
  out.intervals = std::move(sorted);
  out.gaps = ArcSet::fromArcs(std::move(sortedGaps));
  return out;
}

const char* verdictName(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Unresolved: return "unresolved";
  }
  return "?";
}

FirstEndpointResult isFirstEndpoint(const BoundaryPoint& xi, const FuchsianGroup& g, int depth,
                                    double tol) {
  if (depth < 1) throw ValidationError("depth must be at least 1");
  double th = xi.angle();
  auto distTo = [&](const Arc& a) {
    if (a.contains(th)) return 0.0;
    double d1 = xi.arcDistance(BoundaryPoint::fromAngle(a.start));
    double d2 = xi.arcDistance(BoundaryPoint::fromAngle(a.end()));
    return std::min(d1, d2);
  };
  // Nested arcs containing xi, level by level.
  std::vector<Letter> word;
  MoebiusMap m;  // x_1 ... x_{k-1}
  Arc arc;
  std::vector<Letter> candidates = g.topLetters();
  FirstEndpointResult res;
  bool anyResolved = false;
  for (int level = 1; level <= depth; ++level) {
    MoebiusMap mk = word.empty() ? MoebiusMap() : m * g.letter(word.back());
    double best = INFINITY;
    Letter pick = 0;
    Arc pickArc;
    for (Letter y : (word.empty() ? candidates : g.children(word.back()))) {
      const Region& r = g.region(y);
      Arc a = word.empty() ? Arc{r.start().angle(), r.arcLength()}
                           : clampInto(arc, mk.apply(r.start()), mk.apply(r.end()));
      double d = distTo(a);
      if (d < best) {
        best = d;
        pick = y;
        pickArc = a;
      }
    }
    if (best > tol) throw DomainError("not a limit point");
    m = mk;
    arc = pickArc;
    word.push_back(pick);
    if (arc.length <= 100.0 * tol) break;
    anyResolved = true;
    ExtremePoint l = lastLimitPoint(g, word);
    double sep = xi.arcDistance(l.point);
    res.level = level;
    res.nearest = l.point;
    res.separation = sep;
    if (sep <= tol && !l.parabolic) {
      res.verdict = Verdict::Yes;
      res.cert = l.cert;
      return res;
    }
  }
  res.verdict = anyResolved ? Verdict::No : Verdict::Unresolved;
  return res;
}

const char* radialName(RadialKind k) {
  switch (k) {
    case RadialKind::Radial: return "radial";
    case RadialKind::NotRadialUpTo: return "not_radial_up_to";
    case RadialKind::ParabolicFixed: return "parabolic_fixed";
  }
  return "?";
}

RadialResult isRadial(const BoundaryPoint& xi, const FuchsianGroup& g, double distanceCutoff,
                      double lengthCutoff, int parabolicWordLength) {
  RadialResult res;
  res.distanceCutoff = distanceCutoff;
  res.lengthCutoff = lengthCutoff;
  for (std::size_t k = 0; k < g.rank(); ++k) {
    if (g.kind(k) != IsometryClass::Parabolic) continue;
    BoundaryPoint fix = fixedPoints(g.generator(k))[0].point;
    bool found = false;
    visitOrbit(g, OrbitCutoff::length(parabolicWordLength),
               [&](std::span<const Letter> w, const MoebiusMap& m, double) {
                 if (found) return;
                 if (m.apply(fix).arcDistance(xi) < 1e-10) {
                   found = true;
                   res.parabolicWord = GroupWord(std::vector<Letter>(w.begin(), w.end()));
                 }
               });
    if (found) {
      res.kind = RadialKind::ParabolicFixed;
      return res;
    }
  }
  // Send xi to infinity fixing o: the ray [o xi) is the vertical ray above i.
  MoebiusMap rot = rotateToInfinity(xi);
  visitOrbit(g, OrbitCutoff::distance(lengthCutoff),
             [&](std::span<const Letter>, const MoebiusMap& m, double) {
               cplx z = (rot * m).apply(kO);
               double t = std::log(std::abs(z));
               double d = std::asinh(std::abs(z.real()) / z.imag());
               if (t >= 0.5 * lengthCutoff && d <= distanceCutoff) ++res.witnesses;
             });
  res.kind = res.witnesses >= 2 ? RadialKind::Radial : RadialKind::NotRadialUpTo;
  return res;
}

ConeRegion::ConeRegion(const HopfFrame& v, double alpha, double depth) : alpha_(alpha) {
  if (!(alpha > 0.0) || depth < 0.0) throw ValidationError("cone needs alpha > 0 and depth >= 0");
  MoebiusMap w = frameToMatrix(v) * MoebiusMap::geodesic(-depth);
  chart_ = kFlip * w.inverse();
}

bool ConeRegion::inHoroball(cplx x) const { return chart_.apply(x).imag() >= 1.0 - 1e-12; }

bool ConeRegion::inCone(cplx x) const {
  cplx z = chart_.apply(x);
  return z.imag() >= 1.0 - 1e-12 && std::abs(z.real()) <= std::sinh(alpha_) * z.imag();
}

bool ConeRegion::inRightHoroball(cplx x) const {
  cplx z = chart_.apply(x);
  return z.imag() >= 1.0 - 1e-12 && z.real() <= 0.0;
}

HorocyclicResult isRightHorocyclic(const BoundaryPoint& xi, const FuchsianGroup& g,
                                   const HorocyclicParams& params) {
  if (params.alphas.empty() || params.depths.empty())
    throw ValidationError("right-horocyclic search needs a nonempty (alpha, D) grid");
  RadialResult rad = isRadial(xi, g, params.radialDistance, params.radialLength);
  if (rad.kind == RadialKind::ParabolicFixed)
    throw DomainError("not horospherical: parabolic fixed point");
  if (rad.kind != RadialKind::Radial) throw DomainError("not horospherical up to the cutoffs");

  HorocyclicResult res;
  res.firstEndpoint = isFirstEndpoint(xi, g, params.coverDepth, params.tol);
  if (res.firstEndpoint.verdict != Verdict::Unresolved)
    res.predicate = res.firstEndpoint.verdict == Verdict::No;

  // Direct search. Chart for v = (xi, antipode, 0): v- at infinity, pi(v) at i,
  // so Hor+(g^{-D} v) \ C(g^{-D} v, alpha) = {Im >= e^D, -Re > sinh(alpha) Im}.
  HopfFrame v{xi, BoundaryPoint::fromAngle(xi.angle() + kPi), 0.0};
  MoebiusMap chart = kFlip * frameToMatrix(v).inverse();
  for (double a : params.alphas)
    for (double d : params.depths) res.grid.push_back({a, d, 0, {}});
  double yMin = std::exp(*std::min_element(params.depths.begin(), params.depths.end()));
  double sMin = std::sinh(*std::min_element(params.alphas.begin(), params.alphas.end()));

  std::vector<Letter> word;
  std::function<void(const MoebiusMap&)> rec = [&](const MoebiusMap& m) {
    cplx z = (chart * m).apply(kO);
    for (GridCell& c : res.grid) {
      if (z.imag() >= std::exp(c.depth) && -z.real() > std::sinh(c.alpha) * z.imag()) {
        if (c.witnesses == 0) c.example = GroupWord(word);
        ++c.witnesses;
      }
    }
    if (static_cast<int>(word.size()) >= params.maxWordLength) return;
    MoebiusMap cm = chart * m;
    for (std::size_t x = 0; x < g.letterCount(); ++x) {
      if (!word.empty() && x == inverseLetter(word.back())) continue;
      const Region& r = g.region(static_cast<Letter>(x));
      BoundaryPoint e1 = cm.apply(r.start()), e2 = cm.apply(r.end());
      double len = gapBetween(e1.angle(), e2.angle());
      bool unbounded = e1.isInfinity() || e2.isInfinity() || e1.angle() + len >= kTwoPi;
      if (!unbounded) {
        double lo = e1.real(), hi = e2.real();
        if (0.5 * (hi - lo) < yMin || lo >= -sMin * yMin) continue;
      }
      word.push_back(static_cast<Letter>(x));
      rec(m * g.letter(static_cast<Letter>(x)));
      word.pop_back();
    }
  };
  rec(MoebiusMap());
  res.direct = std::all_of(res.grid.begin(), res.grid.end(),
                           [](const GridCell& c) { return c.witnesses > 0; });
  return res;
}

}  // namespace horo
