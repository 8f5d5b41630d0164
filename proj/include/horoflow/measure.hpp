#pragma once

// Critical exponent, Patterson-Sullivan densities as atomic boundary
// measures, shadows and half-shadows, the density factors of the
// Bowen-Margulis, horocyclic conditional and Burger-Roblin measures, and
// weighted sampling of the Bowen-Margulis measure.

#include <cstdint>
#include <string>
#include <vector>

#include "horoflow/boundary.hpp"

namespace horo {

struct CriticalExponentFit {
  double delta = 0.0;      // slope of ln N(T') against T' on [T/2, T]
  double intercept = 0.0;
  double residual = 0.0;   // RMS deviation of ln N from the fitted line
  double cutoff = 0.0;
  std::size_t count = 0;   // N(T)
  std::vector<double> radii, logCounts;

  // Poincare series cross-check at s = delta -+ 0.05: slope of the log of
  // unit-shell sums of exp(-s d) over [T/2, T]. Positive means the terms
  // grow (series large), negative means they decay (series bounded).
  double sLow = 0.0, sHigh = 0.0;
  double tailSlopeLow = 0.0, tailSlopeHigh = 0.0;
  double partialLow = 0.0, partialHigh = 0.0;  // partial sums up to T
  bool transition = false;
};

inline constexpr std::size_t kOrbitBudget = 50'000'000;

// Throws DomainError when T is too small to fit, BudgetError when the
// orbit holds more than `budget` points.
CriticalExponentFit criticalExponent(const FuchsianGroup& g, double T,
                                     std::size_t budget = kOrbitBudget);

// Which orbit points carry atoms: the word sphere |gamma| = wordLength, or
// the distance shell T - shell <= d(o, gamma o) <= T.
struct PattersonCutoff {
  int wordLength = -1;
  double distance = -1.0;
  double shell = 4.0;
  static PattersonCutoff sphere(int n) { return {n, -1.0, 4.0}; }
  static PattersonCutoff ball(double T, double width = 4.0) { return {-1, T, width}; }
  std::string describe() const;
};

// Disc angle of the point where the ray from o through m(o) meets the circle.
double radialAngle(const MoebiusMap& m);

class AtomicBoundaryMeasure {
public:
  AtomicBoundaryMeasure() = default;
  // Sorts by angle and normalizes to total mass 1.
  AtomicBoundaryMeasure(std::vector<double> angles, std::vector<double> weights);

  std::size_t size() const { return angles_.size(); }
  const std::vector<double>& angles() const { return angles_; }
  const std::vector<double>& weights() const { return weights_; }
  double total() const { return prefix_.empty() ? 0.0 : prefix_.back(); }

  // Mass of the ccw arc from start of the given length; endpoints included
  // unless flagged open. A length of 2pi or more is the whole circle.
  double mass(double start, double length, bool openStart = false, bool openEnd = false) const;
  double mass(const Arc& a) const { return mass(a.start, a.length); }
  double mass(const ArcSet& s) const;
  // Atom index for a uniform variate u in [0, 1).
  std::size_t sample(double u) const;

  // Provenance.
  std::string group;
  double exponent = 0.0;
  PattersonCutoff cutoff;
  int coverDepth = 0;   // every atom lies in the limit-set cover of this depth
  double growth = 0.0;  // log growth rate per unit distance of the outer layer

private:
  std::vector<double> angles_, weights_, prefix_;
};

// Throws DomainError when s is so far below the critical exponent that the
// outer layer dominates (growth above 0.1), BudgetError past `budget` atoms.
AtomicBoundaryMeasure pattersonMeasure(const FuchsianGroup& g, double s, const PattersonCutoff& cutoff,
                                       std::size_t budget = kOrbitBudget);

std::string measureCsv(const AtomicBoundaryMeasure& mu);

// Compares gamma_* nu (atoms moved by the letter) with the reweighting
// exp(-s beta_xi(gamma o, o)) nu on `bins` equal arcs of the circle.
struct EquivarianceCheck {
  Letter letter = 0;
  std::vector<double> pushed, reweighted;
  double totalVariation = 0.0;
};
EquivarianceCheck equivarianceDefect(const AtomicBoundaryMeasure& mu, const FuchsianGroup& g, Letter x,
                                     int bins = 16);

// V(x, xi, t): boundary points whose projection on the ray [x xi) is at
// distance at least t from x, measured along the full geodesic, so t = 0
// gives the closed half circle facing xi. Half-shadows exclude xi itself.
enum class ShadowSide { Full, Positive, Negative };
const char* shadowSideName(ShadowSide s);

struct ShadowArc {
  PlanePoint basepoint = PlanePoint::origin();
  BoundaryPoint direction;
  double depth = 0.0;
  ShadowSide side = ShadowSide::Full;
  Arc arc;
  bool openStart = false, openEnd = false;
};

// Throws ValidationError for t < 0.
ShadowArc shadowArc(const BoundaryPoint& xi, double t, ShadowSide side,
                    const PlanePoint& basepoint = PlanePoint::origin());

inline double arcMass(const AtomicBoundaryMeasure& mu, const ShadowArc& v) {
  return mu.mass(v.arc.start, v.arc.length, v.openStart, v.openEnd);
}
inline double arcMass(const AtomicBoundaryMeasure& mu, const ArcSet& s) { return mu.mass(s); }
inline double arcMass(const AtomicBoundaryMeasure& mu, const Arc& a) { return mu.mass(a); }

struct BMSWeight {
  HopfFrame frame;
  double weight = 0.0;
};
// exp(delta beta_{v-}(o, pi) + delta beta_{v+}(o, pi)).
BMSWeight bmsWeight(const HopfFrame& f, double delta);
// exp(delta beta_{v+}(o, pi)): density of the horocyclic conditional measure.
double horoWeight(const HopfFrame& f, double delta);
// exp(delta beta_{v-}(o, pi)): density of the Burger-Roblin measure.
double brWeight(const HopfFrame& f, double delta);
double horoWeight(const MoebiusMap& m, double delta);
double brWeight(const MoebiusMap& m, double delta);

// Parameter interval of the geodesic t -> m a_t with base point in the
// closed fundamental domain; empty when lo > hi, unbounded when an endpoint
// lies on a free arc of the domain.
struct ChordWindow {
  double lo = 0.0, hi = -1.0;
  bool empty() const { return !(hi >= lo); }
  double length() const { return empty() ? 0.0 : hi - lo; }
};
ChordWindow domainChord(const FuchsianGroup& g, const MoebiusMap& m);

// Weighted samples of the Bowen-Margulis measure restricted to frames over
// the fundamental domain: (v-, v+) from nu x nu, t uniform on the chord of
// the geodesic inside the domain, weight = chord length times the density.
// The mean weight over all draws estimates the total mass.
struct BMSSampleParams {
  double minSeparation = 0.05;  // near-diagonal rejection radius (arc distance)
  std::size_t maxDraws = 0;     // 0: 1000 n
};

struct WeightedFrame {
  MoebiusMap frame;  // base point in the fundamental domain
  double weight = 0.0;
  HopfFrame hopf() const { return matrixToFrame(frame); }
};

struct BMSSample {
  std::vector<WeightedFrame> samples;
  std::size_t draws = 0;
  std::size_t rejectedDiagonal = 0;
  std::size_t missedDomain = 0;
  double totalWeight = 0.0;      // over accepted samples
  double excludedWeight = 0.0;   // chord weight of the rejected near-diagonal pairs
  double massEstimate() const { return draws ? totalWeight / static_cast<double>(draws) : 0.0; }
  double excludedFraction() const {
    double all = totalWeight + excludedWeight;
    return all > 0.0 ? excludedWeight / all : 0.0;
  }
};

// Deterministic in (nu, n, seed). Throws BudgetError if maxDraws is hit
// before n samples are accepted.
BMSSample sampleBMS(const FuchsianGroup& g, double delta, const AtomicBoundaryMeasure& nu, std::size_t n,
                    std::uint64_t seed, const BMSSampleParams& params = {});

// Uniform variate in [0, 1) from 53 random bits; identical on every platform.
double unitUniform(std::uint64_t bits);

}  // namespace horo
