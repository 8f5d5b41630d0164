#include <algorithm>
#include <cmath>

#include "horoflow/error.hpp"
#include "runner_internal.hpp"

namespace horo::run {

namespace {

Json experiment(const std::string& group, double R, const Json& extra) {
  Json base = experimentCommon(group);
  base["uminus"] = "second-endpoint:auto";
  base["uplus"] = "auto";
  base["R"] = R;
  for (auto it = extra.begin(); it != extra.end(); ++it) base[it.key()] = it.value();
  base["trace"] = traceDefaults();
  base["measure"] = measureDefaults();
  return base;
}

Json tentDefaults(const std::string& word) { return Json{{"word", word}, {"radius", 1.0}, {"amplitude", 1.0}}; }

TestFunction tent(const GroupContext& ctx, const Json& t) {
  GroupWord w = ctx.group.parseWord(str(t, "word"));
  return TestFunction(ctx.group, axisFrame(ctx.group, w), num(t, "radius"), num(t, "amplitude"));
}

StartFrame start(const GroupContext& ctx, const Json& c) {
  return resolveStart(ctx.group, str(c, "uminus"), str(c, "uplus"));
}

double tolerance(const Json& c, const char* key) { return c["tolerances"][key].get<double>(); }

AverageParams averageParams(const Json& c) {
  AverageParams p;
  p.R = num(c, "R");
  p.gridStart = num(c, "gridStart");
  p.perDecade = integer(c, "perDecade");
  p.referenceSamples = count(c, "referenceSamples");
  p.seed = seedOf(c);
  p.trace = traceParams(c);
  return p;
}

// Mean of v over its first and last quarters.
std::pair<double, double> quarterMeans(const std::vector<double>& v) {
  std::size_t q = std::max<std::size_t>(1, v.size() / 4);
  double a = 0.0, b = 0.0;
  for (std::size_t k = 0; k < q; ++k) {
    a += v[k] / q;
    b += v[v.size() - 1 - k] / q;
  }
  return {a, b};
}

void errorTrend(Report& r, const std::vector<double>& err, Json& results) {
  auto [early, late] = quarterMeans(err);
  results["meanErrorFirstQuarter"] = early;
  results["meanErrorLastQuarter"] = late;
  r.holds("error decreases along the grid", late < early);
}

bool nondecreasing(const std::vector<double>& v) { return std::is_sorted(v.begin(), v.end()); }

}  // namespace

// ---- density

Json densityDefaults() {
  CoverageParams p;
  return experiment("schottky2", p.R,
                    {{"netEps", p.netEps},
                     {"netSamples", p.netSamples},
                     {"gridStart", p.gridStart},
                     {"perDecade", p.perDecade},
                     {"expect", "auto"},
                     {"plateauFrom", 1e4},
                     {"tolerances", {{"denseCoverage", 0.95}, {"plateauDrift", 0.01}}}});
}

void runDensity(const Json& c, Report& r) {
  GroupContext ctx = context(c);
  StartFrame u = start(ctx, c);
  CoverageParams p;
  p.R = num(c, "R");
  p.netEps = num(c, "netEps");
  p.netSamples = count(c, "netSamples");
  p.seed = seedOf(c);
  p.gridStart = num(c, "gridStart");
  p.perDecade = integer(c, "perDecade");
  p.trace = traceParams(c);
  CoverageResult res = densityCoverage(ctx, u, p);

  std::string expect = str(c, "expect");
  if (expect == "auto") expect = u.firstEndpoint == Verdict::Yes ? "plateau" : "dense";
  if (expect != "dense" && expect != "plateau" && expect != "none")
    throw ValidationError("expect must be auto, dense, plateau or none");
  double from = num(c, "plateauFrom");
  std::size_t never = 0;
  for (double t : res.firstHit) never += !std::isfinite(t);
  r.results = {{"context", contextJson(ctx)},
               {"start", frameJson(u)},
               {"trace", traceJson(res.trace)},
               {"netSize", res.netSize},
               {"netSampled", p.netSamples},
               {"finalCoverage", res.finalCoverage()},
               {"netPointsNeverHit", never},
               {"expectation", expect}};
  if (expect == "dense") r.atLeast("final coverage", res.finalCoverage(), tolerance(c, "denseCoverage"));
  if (expect == "plateau") {
    r.holds("coverage stays below 1", res.finalCoverage() < 1.0);
    if (res.grid.front() <= from && from <= p.R) {
      r.results["coverageAtPlateauStart"] = res.coverageAt(from);
      r.absolute("coverage drift after the plateau start", res.finalCoverage(), res.coverageAt(from),
                 tolerance(c, "plateauDrift"));
    }
  }
  r.holds("coverage is nondecreasing", nondecreasing(res.coverage));

  CsvTable t({"R", "coverage"});
  t.comment("group " + ctx.group.name() + ", u- " + u.uminus + ", net " + std::to_string(res.netSize) +
            " points at eps " + formatNumber(p.netEps));
  for (std::size_t k = 0; k < res.grid.size(); ++k) t.row(std::vector<double>{res.grid[k], res.coverage[k]});
  r.csv = t.str();
  PlotSpec plot;
  plot.title = ctx.group.name() + ": net coverage, u- = " + u.uminus;
  plot.xLabel = "R (log scale)";
  plot.yLabel = "fraction of the net hit";
  plot.logX = true;
  plot.series.push_back({"coverage", res.grid, res.coverage, false, true});
  plot.yMin = 0.0;
  plot.yMax = 1.05;
  if (expect == "dense") plot.levels.push_back({"target", tolerance(c, "denseCoverage")});
  r.svg = svgPlot(plot);
}

// ---- ps-average

Json psAverageDefaults() {
  AverageParams p;
  return experiment("schottky2", p.R,
                    {{"gridStart", p.gridStart},
                     {"perDecade", p.perDecade},
                     {"referenceSamples", p.referenceSamples},
                     {"psi", tentDefaults("ab")},
                     {"tolerances", {{"average", 0.15}}}});
}

void runPsAverage(const Json& c, Report& r) {
  GroupContext ctx = context(c);
  StartFrame u = start(ctx, c);
  AverageParams p = averageParams(c);
  TestFunction psi = tent(ctx, c["psi"]);
  PSAverageResult res = psAverages(ctx, u, psi, p);
  std::vector<double> err;
  for (std::size_t k = 0; k < res.grid.size(); ++k) err.push_back(res.relativeError(k));
  r.results = {{"context", contextJson(ctx)},
               {"start", frameJson(u)},
               {"trace", traceJson(res.trace)},
               {"finalAverage", res.average.back()},
               {"reference", res.reference},
               {"referenceStandardError", res.referenceError},
               {"finalRelativeError", err.back()},
               {"finalMass", res.mass.back()}};
  r.relative("average against the Bowen-Margulis reference", res.average.back(), res.reference,
             tolerance(c, "average"));
  errorTrend(r, err, r.results);
  r.holds("horocyclic mass grows along the grid", nondecreasing(res.mass) && res.mass.back() > res.mass.front());

  CsvTable t({"R", "mass", "average", "reference", "relative_error"});
  t.comment("group " + ctx.group.name() + ", u- " + u.uminus + ", psi tent at axis of " + str(c["psi"], "word"));
  for (std::size_t k = 0; k < res.grid.size(); ++k)
    t.row(std::vector<double>{res.grid[k], res.mass[k], res.average[k], res.reference, err[k]});
  r.csv = t.str();
  PlotSpec plot;
  plot.title = ctx.group.name() + ": horocyclic averages";
  plot.xLabel = "R (log scale)";
  plot.yLabel = "relative error";
  plot.logX = true;
  plot.series.push_back({"|M+ - ref| / ref", res.grid, err, false, true});
  plot.levels.push_back({"tolerance", tolerance(c, "average")});
  r.svg = svgPlot(plot);
}

// ---- birkhoff

Json birkhoffDefaults() {
  AverageParams p;
  return experiment("schottky2", p.R,
                    {{"gridStart", p.gridStart},
                     {"perDecade", p.perDecade},
                     {"referenceSamples", p.referenceSamples},
                     {"f", tentDefaults("ab")},
                     {"g", tentDefaults("aB")},
                     {"shift", 0.0},
                     {"tolerances", {{"ratio", 0.15}}}});
}

void runBirkhoff(const Json& c, Report& r) {
  GroupContext ctx = context(c);
  StartFrame u = start(ctx, c);
  AverageParams p = averageParams(c);
  TestFunction f = tent(ctx, c["f"]), g = tent(ctx, c["g"]);
  BirkhoffResult res = birkhoffRatios(ctx, u, f, g, p);
  std::vector<double> err;
  for (std::size_t k = 0; k < res.grid.size(); ++k) err.push_back(res.relativeError(k));
  r.results = {{"context", contextJson(ctx)},
               {"start", frameJson(u)},
               {"trace", traceJson(res.trace)},
               {"finalRatio", res.ratio.back()},
               {"reference", res.reference},
               {"referenceStandardError", res.referenceError},
               {"finalRelativeError", err.back()}};
  double tol = tolerance(c, "ratio");
  r.relative("ratio against the Burger-Roblin reference", res.ratio.back(), res.reference, tol);
  errorTrend(r, err, r.results);
  double shift = num(c, "shift");
  if (shift != 0.0) {
    if (!(shift > 0.0)) throw ValidationError("shift must be nonnegative");
    StartFrame moved = u;
    moved.frame = horocycleFlow(u.frame, shift);
    BirkhoffResult later = birkhoffRatios(ctx, moved, f, g, p);
    r.results["shiftedFinalRatio"] = later.ratio.back();
    r.relative("ratio after shifting the start", later.ratio.back(), res.ratio.back(), tol);
  }

  CsvTable t({"T", "numerator", "denominator", "ratio", "reference", "relative_error"});
  t.comment("group " + ctx.group.name() + ", u- " + u.uminus + ", f at axis of " + str(c["f"], "word") +
            ", g at axis of " + str(c["g"], "word"));
  for (std::size_t k = 0; k < res.grid.size(); ++k)
    t.row(std::vector<double>{res.grid[k], res.numerator[k], res.denominator[k], res.ratio[k], res.reference, err[k]});
  r.csv = t.str();
  PlotSpec plot;
  plot.title = ctx.group.name() + ": Birkhoff ratios";
  plot.xLabel = "T (log scale)";
  plot.yLabel = "ratio";
  plot.logX = true;
  plot.series.push_back({"int f / int g", res.grid, res.ratio, false, true});
  plot.levels.push_back({"reference", res.reference});
  r.svg = svgPlot(plot);
}

// ---- cusp-mass

Json cuspMassDefaults() {
  CuspMassParams p;
  return experiment("cusp1", p.R, {{"depths", p.depths}, {"fitFrom", p.fitFrom}, {"tolerances", {{"slope", 0.25}}}});
}

void runCuspMass(const Json& c, Report& r) {
  GroupContext ctx = context(c);
  StartFrame u = start(ctx, c);
  CuspMassParams p;
  p.R = num(c, "R");
  p.depths = numbers(c, "depths");
  p.fitFrom = num(c, "fitFrom");
  p.trace = traceParams(c);
  CuspMassResult res = cuspMass(ctx, u, p);
  r.results = {{"context", contextJson(ctx)},
               {"start", frameJson(u)},
               {"trace", traceJson(res.trace)},
               {"slope", numberOrNull(res.slope)},
               {"predictedSlope", res.predicted},
               {"nonincreasing", res.nonincreasing}};
  r.holds("fraction is nonincreasing in N", res.nonincreasing);
  r.relative("log-slope against -(2 delta - 1)", res.slope, res.predicted, tolerance(c, "slope"));
  if (!res.depths.empty() && res.depths.front() == 0.0) r.holds("fraction at N = 0 is below 1", res.fraction.front() < 1.0);

  CsvTable t({"N", "fraction", "log_fraction"});
  t.comment("group " + ctx.group.name() + ", u- " + u.uminus + ", R " + formatNumber(p.R));
  std::vector<double> logs, ref;
  double x0 = p.fitFrom, y0 = 0.0;
  for (std::size_t k = 0; k < res.depths.size(); ++k) {
    logs.push_back(res.fraction[k] > 0.0 ? std::log(res.fraction[k]) : -INFINITY);
    if (res.depths[k] == p.fitFrom) y0 = logs.back();
    t.row(std::vector<double>{res.depths[k], res.fraction[k], logs.back()});
  }
  for (double n : res.depths) ref.push_back(y0 + res.predicted * (n - x0));
  r.csv = t.str();
  PlotSpec plot;
  plot.title = ctx.group.name() + ": mass deep in the cusp";
  plot.xLabel = "N";
  plot.yLabel = "ln fraction above depth N";
  plot.series.push_back({"measured", res.depths, logs, false, true});
  plot.series.push_back({"slope -(2 delta - 1)", res.depths, ref, true, false});
  r.svg = svgPlot(plot);
}

// ---- excursions

Json excursionsDefaults() {
  ExcursionParams p;
  return experiment("cusp1", p.R, {{"minHeight", p.minHeight}, {"tolerances", {{"halfLengthSlope", 0.1}}}});
}

void runExcursions(const Json& c, Report& r) {
  GroupContext ctx = context(c);
  StartFrame u = start(ctx, c);
  ExcursionParams p;
  p.R = num(c, "R");
  p.minHeight = num(c, "minHeight");
  p.trace = traceParams(c);
  ExcursionResult res = excursionWindows(ctx, u, p);
  r.results = {{"context", contextJson(ctx)},
               {"start", frameJson(u)},
               {"trace", traceJson(res.trace)},
               {"excursions", res.excursions.size()},
               {"fitted", res.fitted},
               {"alpha", numberOrNull(res.alpha)},
               {"slope", numberOrNull(res.slope)},
               {"intercept", numberOrNull(res.intercept)},
               {"maxUpperRatio", res.maxUpperRatio},
               {"sandwich", res.sandwich}};
  r.above("at least two fitted excursions", static_cast<double>(res.fitted), 1.0);
  r.holds("every fitted window satisfies the sandwich", res.sandwich);
  r.above("fitted alpha", res.alpha, 0.0);
  r.atMost("L e^{-h/2}", res.maxUpperRatio, 1.0);
  r.absolute("ln L against h slope", res.slope, 0.5, tolerance(c, "halfLengthSlope"));

  CsvTable t({"cusp", "entry", "exit", "sigma", "height", "half_length"});
  t.comment("group " + ctx.group.name() + ", u- " + u.uminus + ", R " + formatNumber(p.R));
  PlotSeries pts{"fitted excursions", {}, {}, false, true, false}, upper{"L = e^{h/2}", {}, {}, true, false},
      lower{"L = e^{(h - alpha)/2}", {}, {}, true, false};
  double hMax = 0.0;
  for (const Excursion& e : res.excursions) {
    t.row(std::vector<double>{static_cast<double>(e.cusp), e.entry, e.exit, e.sigma, e.height, e.halfLength()});
    if (e.height >= p.minHeight) {
      pts.x.push_back(e.height);
      pts.y.push_back(std::log(e.halfLength()));
    }
    hMax = std::max(hMax, e.height);
  }
  for (double h : {p.minHeight, std::max(hMax, p.minHeight + 1.0)}) {
    upper.x.push_back(h);
    upper.y.push_back(0.5 * h);
    lower.x.push_back(h);
    lower.y.push_back(0.5 * (h - res.alpha));
  }
  r.csv = t.str();
  PlotSpec plot;
  plot.title = ctx.group.name() + ": cusp excursion windows";
  plot.xLabel = "depth h";
  plot.yLabel = "ln half-length";
  plot.series = {pts, upper, lower};
  r.svg = svgPlot(plot);
}

}  // namespace horo::run
