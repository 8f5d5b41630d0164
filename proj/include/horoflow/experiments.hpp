#pragma once

// Horocycle traces on the quotient surface and the experiments built on
// them: density of positive half-horocycles, averages against the
// horocyclic conditional measure, Birkhoff ratios, cusp mass and cusp
// excursion windows.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "horoflow/measure.hpp"

namespace horo {

// ---- start frames

// u- / u+ specifiers:
//   first-endpoint:auto | first-endpoint:K    first endpoint of depth-1 ordinary interval K (auto = 0)
//   second-endpoint:auto | second-endpoint:K
//   fixed-point:WORD                          attracting fixed point of WORD
//   angle:THETA                               disc angle
//   auto                                      (u+ only) attracting fixed point of g1 g2
struct StartFrame {
  HopfFrame frame;  // tau = 0
  std::string uminus, uplus;
  GroupWord uminusCert;  // word fixing u-, when there is one
  Verdict firstEndpoint = Verdict::Unresolved;
};

StartFrame resolveStart(const FuchsianGroup& g, const std::string& uminus, const std::string& uplus = "auto");
BoundaryPoint resolveBoundaryPoint(const FuchsianGroup& g, const std::string& spec, GroupWord* cert = nullptr);

// ---- funnels

// Half-plane over a maximal ordinary interval meeting the depth-1 gaps.
struct Funnel {
  OrdinaryInterval interval;
  MoebiusMap chart;   // first -> 0, second -> infinity; the funnel is Re > 0
  double length = 0.0;  // translation length of the stabilizer
  GroupWord stabilizer;
};
// Empty for groups of the first kind.
std::vector<Funnel> funnelCharts(const FuchsianGroup& g);

// Signed distance into the funnel (negative outside).
double funnelDepth(const Funnel& f, const MoebiusMap& m);

// ---- horocycle traces

struct TraceParams {
  double R = 1e4;
  double growth = 0.01;   // step = growth * s, clamped to [minStep, maxStep]
  double minStep = 1e-3;
  double maxStep = 0.05;
  // Funnel depth past which the trace is advanced to the exit point in one
  // move. Nothing is recorded there: the base point stays skipDepth away
  // from the convex core. <= 0 disables skipping.
  double skipDepth = 2.0;
  std::size_t maxSteps = 400'000'000;
};

struct TraceStep {
  double s = 0.0;      // start of the step
  double ds = 0.0;     // Lebesgue length
  MoebiusMap start;    // reduced frame at s
  MoebiusMap mid;      // frame at s + ds / 2 (start * n_{ds/2})
  double mass = 0.0;   // horocyclic conditional mass of the step (0 without a measure)
};
using TraceVisitor = std::function<void(const TraceStep&)>;

struct TraceSummary {
  HopfFrame start;
  double R = 0.0;
  std::size_t steps = 0;
  std::size_t skips = 0;
  double skipped = 0.0;    // parameter length advanced without steps
  bool escaped = false;    // from escapeAt to R the trace stays deep in a funnel
  double escapeAt = 0.0;
  double mass = 0.0;
  MoebiusMap last;         // reduced frame at the end
};

// Steps s -> s + ds with the reduced frame carried along: M <- reduce(M n_ds).
// Step masses use nu and delta when nu is given: nu of the arc swept by the
// forward endpoint times the horocyclic density at the midpoint.
TraceSummary traceHorocycle(const FuchsianGroup& g, const std::vector<Funnel>& funnels, const HopfFrame& u,
                            const TraceParams& params, const TraceVisitor& visit,
                            const AtomicBoundaryMeasure* nu = nullptr, double delta = 0.0);

// ---- quotient frame metric and test functions

// Lifts w m for the words w of length <= depth.
std::vector<MoebiusMap> frameLifts(const FuchsianGroup& g, const MoebiusMap& m, int depth = 2);

// min over the lifts of v of frameDistance(u, lift).
double quotientDistance(const std::vector<MoebiusMap>& liftsOfV, const MoebiusMap& u);

// amplitude * max(0, 1 - d_q(center, .) / radius).
class TestFunction {
public:
  TestFunction() = default;
  TestFunction(const FuchsianGroup& g, const MoebiusMap& center, double radius, double amplitude = 1.0);
  double operator()(const MoebiusMap& m) const;
  const MoebiusMap& center() const { return center_; }
  double radius() const { return radius_; }
  double amplitude() const { return amplitude_; }
  TestFunction scaled(double k) const;

private:
  MoebiusMap center_;
  double radius_ = 1.0, amplitude_ = 1.0;
  std::vector<MoebiusMap> lifts_;
};

// Frames indexed for frame-distance queries: bands of ln Im(base point),
// sorted by Re(base point) within a band.
class FrameIndex {
public:
  explicit FrameIndex(double eps = 1.0);
  void add(const MoebiusMap& frame, std::size_t owner);
  // Calls hit(owner) for every stored frame within frameDistance eps of m
  // (an owner with several frames may repeat).
  template <class F>
  void near(const MoebiusMap& m, F&& hit) const;
  std::size_t size() const { return frames_.size(); }
  double eps() const { return eps_; }

private:
  struct Entry {
    double x;
    std::size_t k;
  };
  int bandOf(double y) const { return static_cast<int>(std::floor(std::log(y) / eps_)); }
  double eps_ = 1.0, xFactor_ = 0.0;
  std::map<int, std::vector<Entry>> bands_;
  std::vector<MoebiusMap> frames_;
  std::vector<std::size_t> owners_;
};

template <class F>
void FrameIndex::near(const MoebiusMap& m, F&& hit) const {
  cplx z = basePoint(m);
  // d(z, w) <= eps forces |ln Im z - ln Im w| <= eps and
  // (Re z - Re w)^2 <= 2 Im z Im w (cosh eps - 1).
  double dx = z.imag() * xFactor_;
  auto lo = bands_.lower_bound(bandOf(z.imag() * std::exp(-eps_)));
  auto hi = bands_.upper_bound(bandOf(z.imag() * std::exp(eps_)));
  for (auto b = lo; b != hi; ++b) {
    const auto& band = b->second;
    auto it = std::lower_bound(band.begin(), band.end(), z.real() - dx,
                               [](const Entry& e, double x) { return e.x < x; });
    for (; it != band.end() && it->x <= z.real() + dx; ++it)
      if (frameDistance(m, frames_[it->k]) <= eps_) hit(owners_[it->k]);
  }
}

// ---- shared setup

struct MeasureConfig {
  double exponentRadius = 16.0;  // T of the critical exponent fit
  int sphereLength = 10;         // atoms on the word sphere (no cusps)
  double ballRadius = 20.0;      // atoms on the distance shell (with cusps)
  double shellWidth = 4.0;
  double sOffset = 0.0;          // atoms weighted by exp(-(delta + sOffset) d)
};

struct GroupContext {
  FuchsianGroup group;
  MeasureConfig config;
  CriticalExponentFit exponent;
  AtomicBoundaryMeasure nu;  // at s = exponent.delta
  std::vector<Funnel> funnels;
  double delta() const { return exponent.delta; }
};

GroupContext makeContext(const FuchsianGroup& g, const MeasureConfig& cfg = {});

// Log-spaced points lo = x_0 < ... < x_n = hi, perDecade per factor 10.
std::vector<double> logGrid(double lo, double hi, int perDecade);

// ---- density of the positive half-horocycle

// Bowen-Margulis samples thinned greedily to an eps-separated set in the
// quotient metric; the index holds the lifts of length <= 2.
struct FrameNet {
  std::vector<MoebiusMap> points;
  double eps = 0.0;
  std::size_t sampled = 0;
  FrameIndex index;
};
FrameNet buildNet(const GroupContext& ctx, double eps, std::size_t samples, std::uint64_t seed);

struct CoverageParams {
  double R = 1e8;
  double netEps = 0.3;
  std::size_t netSamples = 20000;
  std::uint64_t seed = 1;
  double gridStart = 10.0;
  int perDecade = 4;
  TraceParams trace;  // trace.R is set from R
};

struct CoverageResult {
  CoverageParams params;
  TraceSummary trace;
  std::size_t netSize = 0;
  std::vector<double> grid, coverage;  // fraction of the net hit by (h^s u)_{0 <= s <= R'}
  std::vector<double> firstHit;        // per net point; infinity when never hit
  double finalCoverage() const { return coverage.empty() ? 0.0 : coverage.back(); }
  double coverageAt(double r) const;   // at the largest grid point <= r
};

// Throws DomainError for an empty net, ValidationError when the funnel skip
// depth does not exceed netEps.
CoverageResult densityCoverage(const GroupContext& ctx, const StartFrame& u, const CoverageParams& p);

// ---- equidistribution

using FrameFunction = std::function<double(const MoebiusMap&)>;

// Reduced frame on the axis of the hyperbolic word w (backward endpoint the
// repelling fixed point) at the foot of the perpendicular from o.
MoebiusMap axisFrame(const FuchsianGroup& g, const GroupWord& w);

// Half the smallest displacement d(z, w z) over the words of length 1..maxLength.
double injectivityRadius(const FuchsianGroup& g, cplx z, int maxLength = 6);

// The frame with backward endpoint xi and base point z.
MoebiusMap frameFromBackward(const BoundaryPoint& xi, cplx z);

struct AverageParams {
  double R = 1e8;
  double gridStart = 100.0;
  int perDecade = 4;
  std::size_t referenceSamples = 200000;
  std::uint64_t seed = 1;
  TraceParams trace;  // trace.R is set from R
};

struct PSAverageResult {
  AverageParams params;
  TraceSummary trace;
  std::vector<double> grid;
  std::vector<double> mass;     // horocyclic conditional mass of (h^s u)_{0 <= s <= R'}
  std::vector<double> average;  // M+_{R'}(psi)
  double reference = 0.0;       // int psi dm^ps over the total mass, from Bowen-Margulis samples
  double referenceError = 0.0;  // its standard error
  double relativeError(std::size_t k) const { return std::abs(average[k] - reference) / std::abs(reference); }
};

// supportRadius bounds the distance from the convex core at which psi can be
// nonzero; it must not exceed the funnel skip depth. Grid points where the
// mass is still zero are dropped; DomainError if the final mass is zero.
PSAverageResult psAverages(const GroupContext& ctx, const StartFrame& u, const FrameFunction& psi,
                           double supportRadius, const AverageParams& p);
PSAverageResult psAverages(const GroupContext& ctx, const StartFrame& u, const TestFunction& psi,
                           const AverageParams& p);

struct BirkhoffResult {
  AverageParams params;
  TraceSummary trace;
  std::vector<double> grid;
  std::vector<double> numerator, denominator, ratio;  // int_0^T f(h^s u) ds, same for g, quotient
  double reference = 0.0;       // int f dm / int g dm for the Burger-Roblin measure m
  double referenceError = 0.0;
  double relativeError(std::size_t k) const { return std::abs(ratio[k] - reference) / std::abs(reference); }
};

// Grid points where the denominator is still zero are dropped; DomainError
// if it stays zero. The reference integrates each tent over the ball of its
// radius about the center's base point, which must embed in the quotient
// (ValidationError otherwise).
BirkhoffResult birkhoffRatios(const GroupContext& ctx, const StartFrame& u, const TestFunction& f,
                              const TestFunction& g, const AverageParams& p);

// int f dm over the frames above B(pi(center), radius), by sampling: returns
// (estimate, standard error) with nu normalized to mass 1.
std::pair<double, double> burgerRoblinIntegral(const GroupContext& ctx, const TestFunction& f, std::size_t n,
                                               std::uint64_t seed);

// ---- cusps

// Fraction of the horocyclic conditional mass of (h^s u)_{0 <= s <= R} lying
// over the seed horoballs shrunk by N, for each N of the grid.
struct CuspMassParams {
  double R = 1e6;
  std::vector<double> depths{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  double fitFrom = 1.0;  // slope fit over depths >= fitFrom
  TraceParams trace;
};

struct CuspMassResult {
  CuspMassParams params;
  TraceSummary trace;
  std::vector<double> depths, fraction;
  double slope = 0.0;      // least-squares slope of ln fraction against N
  double predicted = 0.0;  // -(2 delta - 1)
  bool nonincreasing = false;
};

// Throws DomainError when the group has no cusp or the mass is zero.
CuspMassResult cuspMass(const GroupContext& ctx, const StartFrame& u, const CuspMassParams& p);

// One passage of the trace through a seed horoball: entry and exit
// parameters, the parameter of the deepest point and its depth h.
struct Excursion {
  std::size_t cusp = 0;
  double entry = 0.0, exit = 0.0;
  double sigma = 0.0, height = 0.0;
  double halfLength() const { return 0.5 * (exit - entry); }
};

struct ExcursionParams {
  double R = 1e6;
  double minHeight = 2.0;  // excursions used for the fits
  TraceParams trace;
};

struct ExcursionResult {
  ExcursionParams params;
  TraceSummary trace;
  std::vector<Excursion> excursions;  // complete passages, in order
  std::size_t fitted = 0;             // excursions with height >= minHeight
  double alpha = 0.0;                 // smallest alpha with e^{(h - alpha)/2} <= L for the fitted ones
  double slope = 0.0, intercept = 0.0;  // ln L against h over the fitted ones
  double maxUpperRatio = 0.0;         // max L e^{-h/2} over all excursions (<= 1 expected)
  bool sandwich = false;              // e^{(h - alpha)/2} <= L <= e^{h/2} for every fitted excursion
};

ExcursionResult excursionWindows(const GroupContext& ctx, const StartFrame& u, const ExcursionParams& p);

// ---- classification battery

// Points with a known answer to "is the positive half-horocycle dense":
// first endpoints of depth-3 ordinary intervals (no), second endpoints (yes)
// and attracting fixed points of random cyclically reduced words (yes).
struct BatteryPoint {
  std::string label;
  BoundaryPoint point;
  bool expected = false;
};
std::vector<BatteryPoint> classificationBattery(const FuchsianGroup& g, std::size_t size = 20,
                                                std::uint64_t seed = 43);

// ---- shadows

// Mean of ln nu(V(o, xi, t)) over the points xi, against t. With no points
// given, xi runs over the nu-quantiles (k + 1/2) / quantiles.
struct ShadowScanParams {
  std::vector<double> depths{2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0};
  ShadowSide side = ShadowSide::Full;
  std::vector<BoundaryPoint> points;
  int quantiles = 64;
};

struct ShadowScanResult {
  ShadowScanParams params;
  std::vector<BoundaryPoint> points;
  std::vector<double> depths, meanLogMass;
  std::size_t emptyShadows = 0;  // (point, t) pairs with no atom, left out of the means
  double slope = 0.0, intercept = 0.0;
};

ShadowScanResult shadowScan(const AtomicBoundaryMeasure& nu, const ShadowScanParams& p);

}  // namespace horo
