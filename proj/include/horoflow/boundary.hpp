#pragma once

// Limit-set covers, ordinary intervals and classification of boundary
// points: first endpoints of ordinary intervals, radial and parabolic
// points, and right-horocyclic points.

#include <optional>
#include <vector>

#include "horoflow/group.hpp"

namespace horo {

// Counterclockwise arc of disc angles [start, start + length].
struct Arc {
  double start = 0.0;
  double length = 0.0;
  double end() const { return wrapAngle(start + length); }
  bool contains(double angle, double tol = 0.0) const;
};

// Disjoint arcs sorted by start angle. At most one arc wraps through 0.
class ArcSet {
public:
  ArcSet() = default;
  // Throws ValidationError if the arcs overlap by more than tol.
  static ArcSet fromArcs(std::vector<Arc> arcs, double tol = 1e-12);

  const std::vector<Arc>& arcs() const { return arcs_; }
  std::size_t size() const { return arcs_.size(); }
  double measure() const;
  std::optional<std::size_t> find(double angle, double tol = 0.0) const;
  bool contains(double angle, double tol = 0.0) const { return find(angle, tol).has_value(); }
  // Complementary arcs, dropping gaps shorter than minGap.
  ArcSet complement(double minGap = 0.0) const;
  // Every arc of *this lies in some arc of other (within tol).
  bool subsetOf(const ArcSet& other, double tol = 0.0) const;

private:
  std::vector<Arc> arcs_;
};

// Arcs x1...x_{d-1}(I_{x_d}) over all reduced words of length d, in
// counterclockwise order. Words are stored flat, `depth` letters each.
struct LimitSetCover {
  int depth = 0;
  std::vector<Arc> arcs;
  std::vector<Letter> letters;

  std::size_t size() const { return arcs.size(); }
  GroupWord word(std::size_t k) const;
  const Letter* wordData(std::size_t k) const { return letters.data() + k * depth; }
  double measure() const;
  ArcSet arcSet() const { return ArcSet::fromArcs(arcs); }
};

LimitSetCover limitSetCover(const FuchsianGroup& g, int depth);

// Extreme limit point inside the cover arc of a word: the counterclockwise
// last (or first) point of the limit set in that arc. `cert` is a word
// fixing the point (attracting fixed point when hyperbolic).
struct ExtremePoint {
  BoundaryPoint point;
  GroupWord cert;
  bool parabolic = false;
};
ExtremePoint lastLimitPoint(const FuchsianGroup& g, std::span<const Letter> word);
ExtremePoint firstLimitPoint(const FuchsianGroup& g, std::span<const Letter> word);

// A maximal interval of the ordinary set, as resolved by a depth-d cover.
// `gap` is the complementary arc of the cover; `first` and `second` are the
// exact endpoints (counterclockwise first, then second).
struct OrdinaryInterval {
  Arc gap;
  BoundaryPoint first, second;
  GroupWord firstCert, secondCert;
  double length() const { return ccwDistance(first.angle(), second.angle()); }
};

struct OrdinarySet {
  int depth = 0;
  ArcSet gaps;
  std::vector<OrdinaryInterval> intervals;  // parallel to gaps.arcs()
};

// Throws DomainError for a group of the first kind.
OrdinarySet ordinaryIntervals(const FuchsianGroup& g, int depth);

enum class Verdict { Yes, No, Unresolved };
const char* verdictName(Verdict v);

struct FirstEndpointResult {
  Verdict verdict = Verdict::Unresolved;
  GroupWord cert;       // hyperbolic word whose attracting fixed point is xi
  int level = 0;        // cover level where the decision was made
  BoundaryPoint nearest;  // the extreme point compared against
  double separation = 0.0;
};

// Throws DomainError("not a limit point") when xi is further than tol from
// the cover.
FirstEndpointResult isFirstEndpoint(const BoundaryPoint& xi, const FuchsianGroup& g, int depth,
                                    double tol = 1e-9);

enum class RadialKind { Radial, NotRadialUpTo, ParabolicFixed };
const char* radialName(RadialKind k);

struct RadialResult {
  RadialKind kind = RadialKind::NotRadialUpTo;
  int witnesses = 0;
  GroupWord parabolicWord;  // w with xi = w(fixed point of a parabolic generator)
  double distanceCutoff = 0.0;
  double lengthCutoff = 0.0;
};

// Parabolic fixed points are detected among w(p) for words of length at
// most parabolicWordLength.
RadialResult isRadial(const BoundaryPoint& xi, const FuchsianGroup& g, double distanceCutoff,
                      double lengthCutoff, int parabolicWordLength = 6);

// The cone C(w, alpha) and right horoball Hor+(w) for w = g^{-depth} v.
class ConeRegion {
public:
  ConeRegion(const HopfFrame& v, double alpha, double depth);
  // Isometry sending pi(w) to i and w- to infinity.
  const MoebiusMap& chart() const { return chart_; }
  bool inHoroball(cplx x) const;
  bool inCone(cplx x) const;
  bool inRightHoroball(cplx x) const;

private:
  MoebiusMap chart_;
  double alpha_;
};

struct HorocyclicParams {
  std::vector<double> alphas{0.5, 1.0, 2.0};
  std::vector<double> depths{1.0, 2.0, 3.0, 4.0};
  int maxWordLength = 14;
  int coverDepth = 12;
  double tol = 1e-9;
  double radialDistance = 5.0;
  double radialLength = 16.0;
};

struct GridCell {
  double alpha = 0.0;
  double depth = 0.0;
  int witnesses = 0;
  GroupWord example;
};

struct HorocyclicResult {
  std::optional<bool> predicate;  // (a): not a first endpoint; empty if unresolved
  FirstEndpointResult firstEndpoint;
  bool direct = false;            // (b): every grid cell has a witness
  std::vector<GridCell> grid;
  bool agree() const { return predicate.has_value() && *predicate == direct; }
};

// Throws DomainError("not horospherical") for parabolic fixed points and
// for points that are not radial up to the cutoffs.
HorocyclicResult isRightHorocyclic(const BoundaryPoint& xi, const FuchsianGroup& g,
                                   const HorocyclicParams& params = {});

}  // namespace horo
