#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "horoflow/error.hpp"
#include "runner_internal.hpp"

#ifndef HOROFLOW_VERSION
#define HOROFLOW_VERSION "unknown"
#endif

namespace horo {

const char* libraryVersion() { return HOROFLOW_VERSION; }

namespace run {

// ---- checks

void Report::relative(const std::string& name, double value, double target, double tol) {
  bool ok = std::isfinite(value) && std::abs(value - target) <= tol * std::abs(target);
  checks.push_back({name, "relative", value, target, tol, ok});
}
void Report::absolute(const std::string& name, double value, double target, double tol) {
  bool ok = std::isfinite(value) && std::abs(value - target) <= tol;
  checks.push_back({name, "absolute", value, target, tol, ok});
}
void Report::above(const std::string& name, double value, double target) {
  checks.push_back({name, "above", value, target, 0.0, value > target});
}
void Report::atMost(const std::string& name, double value, double target) {
  checks.push_back({name, "atMost", value, target, 0.0, value <= target});
}
void Report::atLeast(const std::string& name, double value, double target) {
  checks.push_back({name, "atLeast", value, target, 0.0, value >= target});
}
void Report::holds(const std::string& name, bool value) {
  checks.push_back({name, "holds", value ? 1.0 : 0.0, 1.0, 0.0, value});
}

// ---- config access

namespace {

const Json& at(const Json& c, const char* key) {
  auto it = c.find(key);
  if (it == c.end()) throw ValidationError(std::string("missing config key '") + key + "'");
  return *it;
}

}  // namespace

double num(const Json& c, const char* key) {
  const Json& v = at(c, key);
  if (!v.is_number()) throw ValidationError(std::string("config key '") + key + "' must be a number");
  return v.get<double>();
}

int integer(const Json& c, const char* key) {
  double v = num(c, key);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ValidationError(std::string("config key '") + key + "' must be an integer");
  return static_cast<int>(v);
}

std::size_t count(const Json& c, const char* key) {
  double v = num(c, key);
  if (v != std::floor(v) || v < 0 || v > 1e15) throw ValidationError(std::string("config key '") + key + "' must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

std::uint64_t seedOf(const Json& c) {
  const Json& v = at(c, "seed");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw ValidationError("seed must be nonnegative");
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  double d = v.get<double>();
  if (d != std::floor(d) || d < 0 || d >= 18446744073709551616.0) throw ValidationError("seed must be a 64-bit unsigned integer");
  return static_cast<std::uint64_t>(d);
}

std::string str(const Json& c, const char* key) {
  const Json& v = at(c, key);
  if (!v.is_string()) throw ValidationError(std::string("config key '") + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const Json& c, const char* key) {
  std::vector<double> out;
  for (const Json& v : at(c, key)) out.push_back(v.get<double>());
  return out;
}

Json numberOrNull(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json frameJson(const StartFrame& u) {
  return Json{{"uminus", u.uminus},
              {"uplus", u.uplus},
              {"uminusAngle", u.frame.xiMinus.angle()},
              {"uplusAngle", u.frame.xiPlus.angle()},
              {"uminusFirstEndpoint", verdictName(u.firstEndpoint)}};
}

Json traceJson(const TraceSummary& t) {
  return Json{{"R", t.R},
              {"steps", t.steps},
              {"skips", t.skips},
              {"skippedLength", t.skipped},
              {"escaped", t.escaped},
              {"escapeAt", t.escaped ? Json(t.escapeAt) : Json(nullptr)},
              {"mass", t.mass}};
}

Json traceDefaults() {
  TraceParams p;
  return Json{{"growth", p.growth},
              {"minStep", p.minStep},
              {"maxStep", p.maxStep},
              {"skipDepth", p.skipDepth},
              {"maxSteps", p.maxSteps}};
}

Json measureDefaults() {
  MeasureConfig m;
  return Json{{"exponentRadius", m.exponentRadius},
              {"sphereLength", m.sphereLength},
              {"ballRadius", m.ballRadius},
              {"shellWidth", m.shellWidth},
              {"sOffset", m.sOffset}};
}

TraceParams traceParams(const Json& c) {
  const Json& t = at(c, "trace");
  TraceParams p;
  p.growth = num(t, "growth");
  p.minStep = num(t, "minStep");
  p.maxStep = num(t, "maxStep");
  p.skipDepth = num(t, "skipDepth");
  p.maxSteps = count(t, "maxSteps");
  if (!(p.growth >= 0.0)) throw ValidationError("trace.growth must be nonnegative");
  return p;
}

MeasureConfig measureConfig(const Json& c) {
  const Json& m = at(c, "measure");
  MeasureConfig cfg;
  cfg.exponentRadius = num(m, "exponentRadius");
  cfg.sphereLength = integer(m, "sphereLength");
  cfg.ballRadius = num(m, "ballRadius");
  cfg.shellWidth = num(m, "shellWidth");
  cfg.sOffset = num(m, "sOffset");
  if (cfg.sphereLength < 1) throw ValidationError("measure.sphereLength must be positive");
  return cfg;
}

GroupContext context(const Json& c) { return makeContext(resolveGroup(str(c, "group")), measureConfig(c)); }

Json contextJson(const GroupContext& ctx) {
  return Json{{"group", ctx.group.name()},
              {"delta", ctx.delta()},
              {"exponentResidual", ctx.exponent.residual},
              {"measureExponent", ctx.nu.exponent},
              {"measureCutoff", ctx.nu.cutoff.describe()},
              {"atoms", ctx.nu.size()},
              {"funnels", ctx.funnels.size()}};
}

namespace {

// ---- config merging

const char* kindName(const Json& v) {
  if (v.is_number()) return "a number";
  if (v.is_string()) return "a string";
  if (v.is_boolean()) return "a boolean";
  if (v.is_array()) return "an array";
  if (v.is_object()) return "an object";
  return "null";
}

bool sameKind(const Json& a, const Json& b) {
  if (a.is_number()) return b.is_number();
  if (a.is_string()) return b.is_string();
  if (a.is_boolean()) return b.is_boolean();
  if (a.is_array()) {
    if (!b.is_array()) return false;
    // Empty defaults are lists of specifier strings.
    const Json proto = a.empty() ? Json("") : a.front();
    return std::all_of(b.begin(), b.end(), [&](const Json& e) { return sameKind(proto, e); });
  }
  return false;
}

void merge(Json& base, const Json& user, const std::string& path) {
  if (!user.is_object()) throw ValidationError((path.empty() ? std::string("config") : "'" + path + "'") + " must be a JSON object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ValidationError("unknown config key '" + key + "'");
    Json& slot = base[it.key()];
    if (slot.is_object()) {
      merge(slot, it.value(), key);
      continue;
    }
    if (!sameKind(slot, it.value())) throw ValidationError("config key '" + key + "' expects " + kindName(slot));
    slot = it.value();
  }
}

Json common(const std::string& group) {
  return Json{{"group", group}, {"seed", 1}, {"threads", 1}, {"output", ""}};
}

Json with(Json base, const Json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it) base[it.key()] = it.value();
  return base;
}

PattersonCutoff parseCutoff(const std::string& spec, const FuchsianGroup& g, int sphereAuto, double ballAuto,
                            double shell) {
  if (spec == "auto")
    return g.hasParabolics() ? PattersonCutoff::ball(ballAuto, shell) : PattersonCutoff::sphere(sphereAuto);
  auto colon = spec.find(':');
  std::string kind = spec.substr(0, colon), arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    std::size_t used = 0;
    if (kind == "sphere") {
      int n = std::stoi(arg, &used);
      if (used == arg.size() && n >= 1) return PattersonCutoff::sphere(n);
    } else if (kind == "ball") {
      double t = std::stod(arg, &used);
      if (used == arg.size() && t > 0.0) return PattersonCutoff::ball(t, shell);
    }
  } catch (const std::exception&) {
  }
  throw ValidationError("bad cutoff '" + spec + "' (expected auto, sphere:N or ball:T)");
}

// ---- group-check

Json groupCheckDefaults() { return common("schottky2"); }

void runGroupCheck(const Json& c, Report& r) {
  FuchsianGroup g = resolveGroup(str(c, "group"));
  Json gens = Json::array();
  for (std::size_t k = 0; k < g.rank(); ++k) {
    const MoebiusMap& m = g.generator(k);
    Json e{{"name", g.letterName(static_cast<Letter>(2 * k))},
           {"matrix", {m.a(), m.b(), m.c(), m.d()}},
           {"class", enumName(g.kind(k))},
           {"trace", std::abs(m.a() + m.d())}};
    if (g.kind(k) == IsometryClass::Hyperbolic) e["translationLength"] = translationLength(m);
    gens.push_back(e);
  }
  const Certificate& cert = g.certificate();
  r.results["name"] = g.name();
  r.results["rank"] = g.rank();
  r.results["hasParabolics"] = g.hasParabolics();
  r.results["generators"] = gens;
  r.results["certificate"] = {{"minRegionMargin", cert.minRegionMargin},
                              {"pingPongSlack", cert.pingPongSlack},
                              {"limitPointsWitnessed", cert.limitPointsWitnessed},
                              {"horoballsChecked", cert.horoballsChecked},
                              {"minHoroballGap", numberOrNull(cert.minHoroballGap)}};
  Json seeds = Json::array();
  for (const Horoball& h : g.horoballSeeds()) seeds.push_back({{"angle", h.base.angle()}, {"level", h.level}});
  r.results["horoballSeeds"] = seeds;

  // Orbit words up to length 3 and distinct elements up to length 6.
  std::size_t words3 = enumerateOrbit(g, OrbitCutoff::length(3)).size();
  double n = static_cast<double>(g.letterCount()), expected = 1.0;
  for (int k = 1; k <= 3; ++k) expected += n * std::pow(n - 1.0, k - 1);
  std::vector<MoebiusMap> elems;
  visitOrbit(g, OrbitCutoff::length(6), [&](std::span<const Letter>, const MoebiusMap& m, double) { elems.push_back(m); });
  std::sort(elems.begin(), elems.end(), [](const MoebiusMap& a, const MoebiusMap& b) { return orbitDistance(a) < orbitDistance(b); });
  std::size_t collisions = 0;
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (std::size_t j = i + 1; j < elems.size() && orbitDistance(elems[j]) - orbitDistance(elems[i]) < 1e-6; ++j)
      if (elems[i].approxEqual(elems[j], 1e-8)) ++collisions;
  r.results["orbitWordsToLength3"] = words3;
  r.results["elementsToLength6"] = elems.size();
  r.results["elementCollisionsToLength6"] = collisions;
  r.above("region margin", cert.minRegionMargin, 0.0);
  r.above("ping-pong slack", cert.pingPongSlack, -1e-12);
  r.absolute("orbit words to length 3", static_cast<double>(words3), expected, 0.0);
  r.atMost("element collisions to length 6", static_cast<double>(collisions), 0.0);

  CsvTable t({"letter", "arc_start", "arc_length"});
  DiscFigure fig;
  fig.title = g.name() + ": ping-pong arcs";
  for (Letter l = 0; l < g.letterCount(); ++l) {
    const Region& reg = g.region(l);
    t.row(std::vector<std::string>{g.letterName(l), formatNumber(reg.start().angle()), formatNumber(reg.arcLength())});
    fig.arcs.push_back({reg.start().angle(), reg.arcLength()});
    fig.marks.push_back({wrapAngle(reg.start().angle() + 0.5 * reg.arcLength()), g.letterName(l)});
  }
  r.csv = t.str();
  r.svg = svgDisc(fig);
}

// ---- limitset

Json limitsetDefaults() { return with(common("schottky2"), {{"depth", 8}, {"ordinaryDepth", 3}, {"figureDepth", 6}}); }

void runLimitset(const Json& c, Report& r) {
  FuchsianGroup g = resolveGroup(str(c, "group"));
  int depth = integer(c, "depth"), od = integer(c, "ordinaryDepth"), fd = integer(c, "figureDepth");
  if (depth < 1 || depth > 14 || od < 1 || od > 14 || fd < 1) throw ValidationError("cover depths must lie in 1..14");
  LimitSetCover cover = limitSetCover(g, depth);
  r.results["depth"] = depth;
  r.results["arcs"] = cover.size();
  r.results["coverMeasure"] = cover.measure();
  Json ivs = Json::array();
  DiscFigure fig;
  fig.title = g.name() + ": limit set cover, depth " + std::to_string(std::min(fd, depth));
  try {
    OrdinarySet os = ordinaryIntervals(g, od);
    for (const OrdinaryInterval& iv : os.intervals)
      ivs.push_back({{"first", iv.first.angle()},
                     {"second", iv.second.angle()},
                     {"length", iv.length()},
                     {"firstCert", iv.firstCert.toString(g)},
                     {"secondCert", iv.secondCert.toString(g)}});
    r.results["kind"] = "second";
    OrdinarySet top = ordinaryIntervals(g, 1);
    for (std::size_t k = 0; k < top.intervals.size(); ++k) {
      fig.marks.push_back({top.intervals[k].first.angle(), "f" + std::to_string(k)});
      fig.marks.push_back({top.intervals[k].second.angle(), "s" + std::to_string(k)});
    }
  } catch (const DomainError&) {
    r.results["kind"] = "first";
  }
  r.results["ordinaryDepth"] = od;
  r.results["ordinaryIntervals"] = ivs;
  r.atMost("cover measure", cover.measure(), kTwoPi);

  CsvTable t({"k", "word", "arc_start", "arc_length"});
  t.comment("group " + g.name() + ", depth " + std::to_string(depth));
  for (std::size_t k = 0; k < cover.size(); ++k)
    t.row(std::vector<std::string>{std::to_string(k), cover.word(k).toString(g), formatNumber(cover.arcs[k].start),
                                   formatNumber(cover.arcs[k].length)});
  r.csv = t.str();
  fig.arcs = (fd >= depth ? cover : limitSetCover(g, fd)).arcs;
  r.svg = svgDisc(fig);
}

// ---- classify-point

Json classifyDefaults() {
  HorocyclicParams h;
  return with(common("schottky2"), {{"point", "first-endpoint:auto"},
                                    {"coverDepth", h.coverDepth},
                                    {"radialDistance", 6.0},
                                    {"radialLength", 12.0},
                                    {"parabolicWordLength", 6},
                                    {"alphas", h.alphas},
                                    {"depths", h.depths},
                                    {"maxWordLength", h.maxWordLength},
                                    {"batterySize", 20}});
}

HorocyclicParams horocyclicParams(const Json& c) {
  HorocyclicParams h;
  h.alphas = numbers(c, "alphas");
  h.depths = numbers(c, "depths");
  h.maxWordLength = integer(c, "maxWordLength");
  h.coverDepth = integer(c, "coverDepth");
  h.radialDistance = num(c, "radialDistance");
  h.radialLength = num(c, "radialLength");
  return h;
}

Json classifyOne(const FuchsianGroup& g, const BoundaryPoint& xi, const Json& c, CsvTable* cells) {
  Json out{{"angle", xi.angle()}};
  HorocyclicParams h = horocyclicParams(c);
  try {
    FirstEndpointResult fe = isFirstEndpoint(xi, g, h.coverDepth);
    out["firstEndpoint"] = verdictName(fe.verdict);
    if (!fe.cert.empty()) out["firstEndpointCert"] = fe.cert.toString(g);
  } catch (const DomainError& e) {
    out["firstEndpoint"] = nullptr;
    out["limitPoint"] = false;
    out["note"] = e.what();
    return out;
  }
  out["limitPoint"] = true;
  RadialResult rad = isRadial(xi, g, h.radialDistance, h.radialLength, integer(c, "parabolicWordLength"));
  out["radial"] = radialName(rad.kind);
  out["radialWitnesses"] = rad.witnesses;
  if (rad.kind == RadialKind::ParabolicFixed) out["parabolicWord"] = rad.parabolicWord.toString(g);
  try {
    HorocyclicResult hr = isRightHorocyclic(xi, g, h);
    out["predicate"] = hr.predicate ? Json(*hr.predicate) : Json(nullptr);
    out["direct"] = hr.direct;
    out["agree"] = hr.agree();
    if (cells)
      for (const GridCell& gc : hr.grid)
        cells->row(std::vector<std::string>{formatNumber(gc.alpha), formatNumber(gc.depth), std::to_string(gc.witnesses),
                                            gc.example.toString(g)});
  } catch (const DomainError& e) {
    out["predicate"] = nullptr;
    out["direct"] = nullptr;
    out["note"] = e.what();
  }
  return out;
}

void runClassify(const Json& c, Report& r) {
  FuchsianGroup g = resolveGroup(str(c, "group"));
  std::string spec = str(c, "point");
  if (spec != "battery") {
    BoundaryPoint xi = resolveBoundaryPoint(g, spec);
    CsvTable cells({"alpha", "depth", "witnesses", "example"});
    r.results = classifyOne(g, xi, c, &cells);
    if (r.results.contains("agree")) r.holds("predicate and direct verdicts agree", r.results["agree"].get<bool>());
    r.csv = cells.str();
    DiscFigure fig;
    fig.title = g.name() + ": " + spec;
    fig.arcs = limitSetCover(g, 6).arcs;
    fig.marks.push_back({xi.angle(), "xi"});
    r.svg = svgDisc(fig);
    return;
  }
  std::vector<BatteryPoint> battery = classificationBattery(g, count(c, "batterySize"), seedOf(c) + 42);
  CsvTable t({"label", "angle", "expected", "first_endpoint", "predicate", "direct", "agree"});
  Json rows = Json::array();
  std::size_t disagree = 0, unexpected = 0;
  DiscFigure fig;
  fig.title = g.name() + ": classification battery (hollow: first endpoints)";
  fig.arcs = limitSetCover(g, 6).arcs;
  for (const BatteryPoint& b : battery) {
    Json one = classifyOne(g, b.point, c, nullptr);
    one["label"] = b.label;
    one["expected"] = b.expected;
    bool agree = one.value("agree", false);
    disagree += !agree;
    if (!one["direct"].is_boolean() || one["direct"].get<bool>() != b.expected) ++unexpected;
    auto cell = [](const Json& v) { return v.is_boolean() ? std::string(v.get<bool>() ? "yes" : "no") : std::string("-"); };
    t.row(std::vector<std::string>{b.label, formatNumber(b.point.angle()), b.expected ? "yes" : "no",
                                   one["firstEndpoint"].is_string() ? one["firstEndpoint"].get<std::string>() : "-",
                                   cell(one["predicate"]), cell(one["direct"]), agree ? "yes" : "no"});
    fig.marks.push_back({b.point.angle(), "", !b.expected});
    rows.push_back(one);
  }
  r.results["points"] = rows;
  r.results["disagreements"] = disagree;
  r.results["unexpected"] = unexpected;
  r.atMost("predicate/direct disagreements", static_cast<double>(disagree), 0.0);
  r.atMost("verdicts differing from the construction", static_cast<double>(unexpected), 0.0);
  r.csv = t.str();
  r.svg = svgDisc(fig);
}

// ---- critical-exponent

Json exponentDefaults() {
  return with(common("schottky2"), {{"T", 16.0}, {"budget", kOrbitBudget}, {"tolerances", {{"residual", 0.05}}}});
}

void runExponent(const Json& c, Report& r) {
  FuchsianGroup g = resolveGroup(str(c, "group"));
  CriticalExponentFit f = criticalExponent(g, num(c, "T"), count(c, "budget"));
  r.results = {{"delta", f.delta},
               {"intercept", f.intercept},
               {"residual", f.residual},
               {"count", f.count},
               {"poincare",
                {{"sLow", f.sLow},
                 {"sHigh", f.sHigh},
                 {"tailSlopeLow", f.tailSlopeLow},
                 {"tailSlopeHigh", f.tailSlopeHigh},
                 {"partialLow", f.partialLow},
                 {"partialHigh", f.partialHigh},
                 {"transition", f.transition}}}};
  r.above("delta positive", f.delta, 0.0);
  r.atMost("delta below 1", f.delta, 1.0 - 1e-12);
  if (g.hasParabolics()) r.above("delta above the cusp exponent 1/2", f.delta, 0.5);
  r.atMost("fit residual", f.residual, c["tolerances"]["residual"].get<double>());
  r.holds("Poincare series transition at delta -+ 0.05", f.transition);

  CsvTable t({"radius", "log_count", "fit"});
  t.comment("group " + g.name() + ", delta " + formatNumber(f.delta));
  std::vector<double> fit;
  for (std::size_t k = 0; k < f.radii.size(); ++k) {
    fit.push_back(f.intercept + f.delta * f.radii[k]);
    t.row(std::vector<double>{f.radii[k], f.logCounts[k], fit.back()});
  }
  r.csv = t.str();
  PlotSpec p;
  p.title = g.name() + ": orbit counting";
  p.xLabel = "T";
  p.yLabel = "ln N(T)";
  p.series.push_back({"ln N(T)", f.radii, f.logCounts, false, true});
  p.series.push_back({"slope " + formatNumber(std::round(f.delta * 1e4) / 1e4), f.radii, fit, true, false});
  r.svg = svgPlot(p);
}

// ---- patterson

Json pattersonDefaults() {
  return with(common("schottky2"), {{"T", 16.0},
                                    {"cutoff", "auto"},
                                    {"shellWidth", 4.0},
                                    {"sOffset", 0.02},
                                    {"bins", 16},
                                    {"histogramBins", 128},
                                    {"tolerances", {{"equivariance", 0.10}}}});
}

void runPatterson(const Json& c, Report& r) {
  FuchsianGroup g = resolveGroup(str(c, "group"));
  CriticalExponentFit f = criticalExponent(g, num(c, "T"));
  double s = f.delta + num(c, "sOffset");
  PattersonCutoff cut = parseCutoff(str(c, "cutoff"), g, 10, 20.0, num(c, "shellWidth"));
  AtomicBoundaryMeasure mu = pattersonMeasure(g, s, cut);
  int bins = integer(c, "bins"), hb = integer(c, "histogramBins");
  if (bins < 1 || hb < 1) throw ValidationError("bins must be positive");
  r.results = {{"delta", f.delta}, {"s", s}, {"cutoff", cut.describe()}, {"atoms", mu.size()},
               {"coverDepth", mu.coverDepth}, {"growth", mu.growth}, {"total", mu.total()}};
  Json eq = Json::array();
  double tol = c["tolerances"]["equivariance"].get<double>();
  for (Letter l = 0; l < g.letterCount(); ++l) {
    EquivarianceCheck e = equivarianceDefect(mu, g, l, bins);
    eq.push_back({{"letter", g.letterName(l)}, {"totalVariation", e.totalVariation}});
    r.atMost("equivariance defect of " + g.letterName(l), e.totalVariation, tol);
  }
  r.results["equivariance"] = eq;
  r.absolute("total mass", mu.total(), 1.0, 1e-12);
  r.csv = measureCsv(mu);
  PlotSpec p;
  p.title = g.name() + ": Patterson measure, " + cut.describe();
  p.xLabel = "disc angle";
  p.yLabel = "mass per bin";
  PlotSeries h{"nu", {}, {}, false, false};
  for (int k = 0; k < hb; ++k) {
    double a = -kPi + kTwoPi * k / hb;
    h.x.push_back(a + kPi / hb);
    h.y.push_back(mu.mass(a, kTwoPi / hb, false, true));
  }
  p.series.push_back(h);
  r.svg = svgPlot(p);
}

// ---- shadow-scan

Json shadowDefaults() {
  ShadowScanParams s;
  return with(common("schottky2"), {{"T", 16.0},
                                    {"cutoff", "auto"},
                                    {"shellWidth", 4.0},
                                    {"sOffset", 0.0},
                                    {"side", "full"},
                                    {"points", Json::array()},
                                    {"quantiles", s.quantiles},
                                    {"depths", s.depths},
                                    {"predict", "auto"},
                                    {"tolerances", {{"shadowSlope", 0.15}, {"halfShadowSlope", 0.20}}}});
}

void runShadow(const Json& c, Report& r) {
  FuchsianGroup g = resolveGroup(str(c, "group"));
  CriticalExponentFit f = criticalExponent(g, num(c, "T"));
  PattersonCutoff cut = parseCutoff(str(c, "cutoff"), g, 12, 20.0, num(c, "shellWidth"));
  AtomicBoundaryMeasure mu = pattersonMeasure(g, f.delta + num(c, "sOffset"), cut);
  ShadowScanParams p;
  std::string side = str(c, "side");
  if (side == "full") p.side = ShadowSide::Full;
  else if (side == "positive") p.side = ShadowSide::Positive;
  else if (side == "negative") p.side = ShadowSide::Negative;
  else throw ValidationError("side must be full, positive or negative");
  std::vector<std::string> specs;
  for (const Json& s : c["points"]) specs.push_back(s.get<std::string>());
  bool parabolic = !specs.empty() && g.hasParabolics();
  for (const std::string& s : specs) {
    p.points.push_back(resolveBoundaryPoint(g, s));
    parabolic = parabolic && isRadial(p.points.back(), g, 1.0, 1.0).kind == RadialKind::ParabolicFixed;
  }
  p.quantiles = integer(c, "quantiles");
  p.depths = numbers(c, "depths");
  ShadowScanResult s = shadowScan(mu, p);

  std::string predict = str(c, "predict");
  if (predict == "auto") predict = specs.empty() ? "exponent" : parabolic && p.side != ShadowSide::Full ? "cusp" : "none";
  double predicted = std::numeric_limits<double>::quiet_NaN();
  if (predict == "exponent") predicted = -f.delta;
  else if (predict == "cusp") predicted = 1.0 - 2.0 * f.delta;
  else if (predict != "none") throw ValidationError("predict must be auto, exponent, cusp or none");

  Json pts = Json::array();
  for (const BoundaryPoint& b : s.points) pts.push_back(b.angle());
  r.results = {{"delta", f.delta}, {"cutoff", cut.describe()}, {"atoms", mu.size()}, {"side", shadowSideName(p.side)},
               {"points", pts}, {"slope", numberOrNull(s.slope)}, {"intercept", numberOrNull(s.intercept)},
               {"emptyShadows", s.emptyShadows}, {"prediction", predict}, {"predictedSlope", numberOrNull(predicted)}};
  if (predict == "exponent") r.relative("shadow slope against -delta", s.slope, predicted, c["tolerances"]["shadowSlope"].get<double>());
  if (predict == "cusp")
    r.relative("half-shadow slope against 1 - 2 delta", s.slope, predicted, c["tolerances"]["halfShadowSlope"].get<double>());

  CsvTable t({"t", "mean_log_mass", "fit"});
  t.comment("group " + g.name() + ", " + cut.describe() + ", side " + shadowSideName(p.side));
  std::vector<double> fit, ref;
  double tMid = 0.0, yMid = 0.0;
  for (std::size_t k = 0; k < s.depths.size(); ++k) {
    tMid += s.depths[k] / s.depths.size();
    yMid += s.meanLogMass[k] / s.depths.size();
  }
  for (std::size_t k = 0; k < s.depths.size(); ++k) {
    fit.push_back(s.intercept + s.slope * s.depths[k]);
    ref.push_back(yMid + predicted * (s.depths[k] - tMid));
    t.row(std::vector<double>{s.depths[k], s.meanLogMass[k], fit.back()});
  }
  r.csv = t.str();
  PlotSpec plot;
  plot.title = g.name() + ": shadow masses";
  plot.xLabel = "t";
  plot.yLabel = "mean ln nu(V(o, xi, t))";
  plot.series.push_back({"measured", s.depths, s.meanLogMass, false, true});
  plot.series.push_back({"fit", s.depths, fit, true, false});
  if (std::isfinite(predicted)) plot.series.push_back({"predicted slope", s.depths, ref, true, false});
  r.svg = svgPlot(plot);
}

struct Command {
  std::function<Json()> defaults;
  std::function<void(const Json&, Report&)> run;
};

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"group-check", {groupCheckDefaults, runGroupCheck}},
      {"limitset", {limitsetDefaults, runLimitset}},
      {"classify-point", {classifyDefaults, runClassify}},
      {"critical-exponent", {exponentDefaults, runExponent}},
      {"patterson", {pattersonDefaults, runPatterson}},
      {"shadow-scan", {shadowDefaults, runShadow}},
      {"density", {densityDefaults, runDensity}},
      {"ps-average", {psAverageDefaults, runPsAverage}},
      {"birkhoff", {birkhoffDefaults, runBirkhoff}},
      {"cusp-mass", {cuspMassDefaults, runCuspMass}},
      {"excursions", {excursionsDefaults, runExcursions}},
  };
  return table;
}

const Command& command(const std::string& name) {
  auto it = commands().find(name);
  if (it == commands().end()) throw ValidationError("unknown command '" + name + "'");
  return it->second;
}

Json resolved(const std::string& name, const std::string& configJson) {
  Json base = command(name).defaults();
  Json user;
  try {
    user = Json::parse(configJson.empty() ? std::string("{}") : configJson);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  merge(base, user, "");
  if (integer(base, "threads") < 1) throw ValidationError("threads must be at least 1");
  seedOf(base);
  return base;
}

}  // namespace

Json experimentCommon(const std::string& group) { return common(group); }

}  // namespace run

const std::vector<std::string>& commandNames() {
  static const std::vector<std::string> names{"group-check", "limitset",   "classify-point", "critical-exponent",
                                              "patterson",   "shadow-scan", "density",        "ps-average",
                                              "birkhoff",    "cusp-mass",  "excursions"};
  return names;
}

std::string defaultConfig(const std::string& command) { return run::command(command).defaults().dump(2); }

std::string resolveConfig(const std::string& command, const std::string& configJson) {
  return run::resolved(command, configJson).dump(2);
}

RunResult runCommand(const std::string& name, const std::string& configJson) {
  run::Json cfg = run::resolved(name, configJson);
  run::Report rep;
  run::command(name).run(cfg, rep);
  RunResult out;
  out.command = name;
  run::Json checks = run::Json::array();
  for (const run::Check& ch : rep.checks) {
    out.pass = out.pass && ch.pass;
    checks.push_back({{"name", ch.name},
                      {"rule", ch.rule},
                      {"value", run::numberOrNull(ch.value)},
                      {"target", run::numberOrNull(ch.target)},
                      {"tolerance", ch.tolerance},
                      {"pass", ch.pass}});
  }
  run::Json summary{{"command", name}, {"version", libraryVersion()}, {"config", cfg},
                    {"results", rep.results}, {"checks", checks}, {"pass", out.pass}};
  out.summary = summary.dump(2) + "\n";
  out.csv = rep.csv;
  out.svg = rep.svg;
  return out;
}

}  // namespace horo
