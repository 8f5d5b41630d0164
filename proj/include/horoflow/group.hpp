#pragma once

// Geometrically finite Fuchsian groups given by Schottky ping-pong data
// (hyperbolic generators, optionally parabolic ones with a horoball seed),
// free-group words, orbit enumeration and reduction to the Schottky
// fundamental domain.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "horoflow/flows.hpp"

namespace horo {

// A closed half-plane bounded by a geodesic, given by the ideal arc it rests
// on: the arc runs counterclockwise from `start` to `end`.
class Region {
public:
  Region() = default;
  Region(const BoundaryPoint& start, const BoundaryPoint& end);

  const BoundaryPoint& start() const { return start_; }
  const BoundaryPoint& end() const { return end_; }
  double arcLength() const { return ccwDistance(start_.angle(), end_.angle()); }

  // Signed hyperbolic distance to the boundary geodesic, positive inside.
  double signedDistance(cplx z) const;
  bool containsInterior(cplx z, double tol = 1e-12) const { return signedDistance(z) > tol; }
  bool containsBoundaryPoint(const BoundaryPoint& xi, double tol = 0.0) const;
  Region image(const MoebiusMap& g) const { return {g.apply(start_), g.apply(end_)}; }
  // Distance from o to the region (0 when o lies inside).
  double distanceFromOrigin() const;
  // Isometry sending start to 0 and end to infinity; the region becomes Re >= 0.
  const MoebiusMap& chart() const { return chart_; }

private:
  BoundaryPoint start_, end_;
  MoebiusMap chart_;  // start -> 0, end -> infinity, arc -> positive reals
};

// Letters: 2k is generator k, 2k+1 its inverse.
using Letter = std::uint8_t;
inline Letter inverseLetter(Letter l) { return l ^ 1; }

struct GeneratorSpec {
  std::string name;  // single lowercase character; the inverse prints uppercase
  MoebiusMap matrix;
  Region region;         // where the generator sends the complement of inverseRegion
  Region inverseRegion;  // where the inverse generator sends the complement of region
};

struct GroupSpec {
  std::string name;
  std::vector<GeneratorSpec> generators;
  std::vector<Horoball> horoballSeeds;
  int horoballDepth = 3;
};

struct Certificate {
  double minRegionMargin = 0.0;  // smallest angular gap between regions of distinct letters
  double pingPongSlack = 0.0;    // worst containment slack of the ping-pong law (>= -tol)
  int limitPointsWitnessed = 0;
  int horoballsChecked = 0;
  double minHoroballGap = 0.0;   // smallest distance between distinct horoballs checked
};

class FuchsianGroup;

class GroupWord {
public:
  GroupWord() = default;
  explicit GroupWord(std::vector<Letter> letters);  // freely reduces

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t length() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  GroupWord operator*(const GroupWord& other) const;
  GroupWord inverse() const;
  MoebiusMap evaluate(const FuchsianGroup& g) const;
  std::string toString(const FuchsianGroup& g) const;

  bool operator==(const GroupWord& o) const { return letters_ == o.letters_; }

private:
  std::vector<Letter> letters_;
};

struct OrbitPoint {
  GroupWord word;
  PlanePoint image = PlanePoint::origin();
  double dist = 0.0;
};

struct OrbitCutoff {
  int maxWordLength = -1;    // < 0: unbounded
  double maxDistance = -1.0; // < 0: unbounded
  static OrbitCutoff length(int n) { return {n, -1.0}; }
  static OrbitCutoff distance(double t) { return {-1, t}; }
};

class FuchsianGroup {
public:
  const std::string& name() const { return name_; }
  std::size_t rank() const { return generators_.size(); }
  std::size_t letterCount() const { return 2 * generators_.size(); }
  const MoebiusMap& generator(std::size_t k) const { return generators_[k]; }
  IsometryClass kind(std::size_t k) const { return kinds_[k]; }
  bool hasParabolics() const;
  const MoebiusMap& letter(Letter l) const { return letterMaps_[l]; }
  const Region& region(Letter l) const { return regions_[l]; }
  std::string letterName(Letter l) const;
  PlanePoint basepoint() const { return PlanePoint::origin(); }
  const std::vector<Horoball>& horoballSeeds() const { return seeds_; }
  const Certificate& certificate() const { return cert_; }
  const GroupSpec& spec() const { return spec_; }

  // Letters y != x^-1 ordered counterclockwise by the position of x(I_y)
  // inside I_x, and all letters ordered by the start of their arcs.
  const std::vector<Letter>& children(Letter x) const { return children_[x]; }
  const std::vector<Letter>& topLetters() const { return top_; }

  // Lower bound for d(o, w x v o) over all reduced continuations x v: the
  // distance to w(R_x), sharpened for parabolic x by excluding the cusp
  // horoball, which holds no orbit point.
  double subtreeDistance(const MoebiusMap& w, Letter x) const;

  // Number of consecutive applications of x^-1 that take z out of R_x: 1
  // unless x is parabolic, when the whole run is counted at once.
  int parabolicRun(Letter x, cplx z) const;
  // x^n for n >= 0; exact translation in the cusp chart for parabolic x.
  MoebiusMap letterPower(Letter x, int n) const;

  // True when z is in the closed fundamental domain.
  bool inDomain(cplx z, double tol = 1e-12) const;
  // Letter whose region interior contains z, if any.
  std::optional<Letter> regionOf(cplx z, double tol = 1e-12) const;
  // Letter whose ideal arc contains xi, if any.
  std::optional<Letter> arcOf(const BoundaryPoint& xi) const;

  // Parses a word such as "a B b" or "g0 G1"; letters are named by
  // generator (lowercase) and inverse (uppercase).
  GroupWord parseWord(const std::string& text) const;

private:
  friend FuchsianGroup buildGroup(const GroupSpec& spec);
  std::string name_;
  GroupSpec spec_;
  std::vector<MoebiusMap> generators_;
  std::vector<IsometryClass> kinds_;
  std::vector<MoebiusMap> letterMaps_;
  std::vector<Region> regions_;
  std::vector<Horoball> seeds_;
  std::vector<std::vector<Letter>> children_;
  std::vector<Letter> top_;
  // Per letter: chart sending the cusp to infinity, R_x = {side * (Re - a) >= 0},
  // horoball {Im >= h}. Inactive for hyperbolic letters.
  struct CuspBound {
    bool active = false;
    MoebiusMap chart;
    double a = 0.0;
    double side = 1.0;
    double h = 0.0;
    double shift = 0.0;  // x acts as z -> z + shift in the chart
  };
  std::vector<CuspBound> cusps_;
  Certificate cert_;
};

// Validates every ping-pong certificate; throws ValidationError naming the
// violated certificate ("region overlap", "ping-pong law violation",
// "elementary group", "parabolic without horoball seed", "horoball overlap").
FuchsianGroup buildGroup(const GroupSpec& spec);

// Built-in reference groups: "schottky2", "cusp1".
GroupSpec builtinSpec(const std::string& name);
std::vector<std::string> builtinNames();
FuchsianGroup builtinGroup(const std::string& name);

// Group spec files are JSON; see README for the schema.
GroupSpec parseGroupSpec(const std::string& jsonText);
GroupSpec loadGroupSpec(const std::string& path);
// Built-in name or path to a spec file.
FuchsianGroup resolveGroup(const std::string& nameOrPath);

// Depth-first visit of all freely reduced words within the cutoff, in
// lexicographic letter order. The callback sees the letters, the matrix and
// d(o, gamma o).
using OrbitVisitor = std::function<void(std::span<const Letter>, const MoebiusMap&, double)>;
void visitOrbit(const FuchsianGroup& g, const OrbitCutoff& cutoff, const OrbitVisitor& visit);

// All words within the cutoff in length-lex order.
std::vector<OrbitPoint> enumerateOrbit(const FuchsianGroup& g, const OrbitCutoff& cutoff);

// d(o, gamma o) from the Frobenius norm.
double orbitDistance(const MoebiusMap& m);

inline constexpr int kReductionBudget = 10000;

// Reduces a point into the fundamental domain: rep = word . x.
std::pair<PlanePoint, GroupWord> reducePoint(const PlanePoint& x, const FuchsianGroup& g,
                                             int budget = kReductionBudget);

// Same reduction for a frame matrix M (base point M(i)): returns the
// reduced matrix word . M and the word.
std::pair<MoebiusMap, GroupWord> reduceFrame(const MoebiusMap& m, const FuchsianGroup& g,
                                             int budget = kReductionBudget);
struct QuotientFrame {
  HopfFrame rep;  // base point in the closed fundamental domain
  GroupWord word; // rep = word . f
};
QuotientFrame reduceFrame(const HopfFrame& f, const FuchsianGroup& g, int budget = kReductionBudget);
// In-place variant without word bookkeeping; returns the number of steps.
int reduceFrameInPlace(MoebiusMap& m, const FuchsianGroup& g, int budget = kReductionBudget);

// Horoball images under words of length <= depth, one per coset of the
// stabilizer of each seed. Throws DomainError when the group has no cusp.
std::vector<Horoball> horoballFamily(const FuchsianGroup& g, int depth);

}  // namespace horo
