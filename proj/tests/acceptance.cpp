// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1
// if any fails. Experiments go through the same config runner as the CLI.
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "horoflow/flows.hpp"
#include "horoflow/moebius.hpp"
#include "horoflow/runner.hpp"

using namespace horo;
using Json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

struct Run {
  RunResult raw;
  Json summary;
};

// Every run is kept so the determinism criterion can repeat it.
std::vector<std::pair<std::string, Json>> history;

Run run(const std::string& command, const Json& config) {
  history.push_back({command, config});
  Run r;
  r.raw = runCommand(command, config.dump());
  r.summary = Json::parse(r.raw.summary);
  return r;
}

const Json& results(const Run& r) { return r.summary["results"]; }

// Failed tolerance checks of a run, "" when all passed.
std::string failedChecks(const Run& r) {
  std::string out;
  for (const Json& c : r.summary["checks"])
    if (!c["pass"].get<bool>()) out += (out.empty() ? "" : "; ") + c["name"].get<std::string>() + " = " + c["value"].dump();
  return out;
}

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail += (detail.empty() ? "" : ", ") + (ok ? what : "NOT " + what);
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : ", ") + what; }
  void checks(const Run& r, const std::string& label) {
    std::string f = failedChecks(r);
    require(f.empty(), label + " checks" + (f.empty() ? "" : " [" + f + "]"));
  }
};

std::string num(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

int failures = 0;

void criterion(int id, const char* title, const std::function<Verdict()>& body) {
  Clock::time_point t0 = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.note(std::string("error: ") + e.what());
  }
  if (!v.pass) ++failures;
  std::printf("%s  %2d  %s  (%s; %.1f s)\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), seconds(t0));
  std::fflush(stdout);
}

// ---- criterion 1

MoebiusMap randomMap(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (;;) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    double det = a * d - b * c;
    if (det > 0.3) return MoebiusMap(a, b, c, d);
  }
}

cplx randomPoint(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> x(-5.0, 5.0), ly(-2.0, 2.0);
  return {x(rng), std::exp(ly(rng))};
}

HopfFrame randomFrame(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(0.0, kTwoPi), t(-3.0, 3.0);
  for (;;) {
    BoundaryPoint m = BoundaryPoint::fromAngle(ang(rng)), p = BoundaryPoint::fromAngle(ang(rng));
    if (m.arcDistance(p) > 0.05) return {m, p, t(rng)};
  }
}

double frameGap(const HopfFrame& a, const HopfFrame& b) {
  return std::max({a.xiMinus.arcDistance(b.xiMinus), a.xiPlus.arcDistance(b.xiPlus), std::abs(a.tau - b.tau)});
}

Verdict algebraicCore() {
  Clock::time_point t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-3.0, 3.0), ang(0.0, kTwoPi);
  double cocycle = 0, equivariance = 0, flowLaws = 0, commutation = 0;
  const int n = 1000;
  for (int k = 0; k < n; ++k) {
    BoundaryPoint xi = BoundaryPoint::fromAngle(ang(rng));
    cplx x = randomPoint(rng), y = randomPoint(rng), z = randomPoint(rng);
    MoebiusMap g = randomMap(rng);
    HopfFrame f = randomFrame(rng);
    double t = u(rng), t2 = u(rng), s = u(rng), s2 = u(rng);

    cocycle = std::max(cocycle, std::abs(busemann(xi, x, z) - busemann(xi, x, y) - busemann(xi, y, z)));

    equivariance = std::max({equivariance,
                             std::abs(busemann(g.apply(xi), g.apply(x), g.apply(y)) - busemann(xi, x, y)),
                             std::abs(distance(g.apply(x), g.apply(y)) - distance(x, y)),
                             frameGap(applyIsometry(g, geodesicFlow(f, t)), geodesicFlow(applyIsometry(g, f), t)),
                             frameGap(applyIsometry(g, horocycleFlow(f, s)), horocycleFlow(applyIsometry(g, f), s))});

    flowLaws = std::max({flowLaws, frameGap(geodesicFlow(geodesicFlow(f, t), t2), geodesicFlow(f, t + t2)),
                         frameGap(horocycleFlow(horocycleFlow(f, s), s2), horocycleFlow(f, s + s2)),
                         frameGap(geodesicFlow(f, 0.0), f), frameGap(horocycleFlow(f, 0.0), f)});

    // g^t h^s v against h^{s e^t} g^t v
    commutation = std::max(commutation, frameGap(geodesicFlow(horocycleFlow(f, s), t),
                                                 horocycleFlow(geodesicFlow(f, t), s * std::exp(t))));
  }
  double elapsed = seconds(t0);
  Verdict v;
  v.note(std::to_string(n) + " instances");
  v.require(cocycle <= 1e-9, "cocycle " + num(cocycle, 2) + " <= 1e-9");
  v.require(equivariance <= 1e-9, "equivariance " + num(equivariance, 2) + " <= 1e-9");
  v.require(flowLaws <= 1e-9, "flow laws " + num(flowLaws, 2) + " <= 1e-9");
  v.require(commutation <= 1e-9, "commutation " + num(commutation, 2) + " <= 1e-9");
  v.require(elapsed < 10.0, "runtime " + num(elapsed, 3) + " s < 10 s");
  return v;
}

Json with(Json base, const Json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it) base[it.key()] = it.value();
  return base;
}

}  // namespace

int main() {
  std::printf("horoflow %s acceptance\n", libraryVersion());
  Clock::time_point start = Clock::now();

  criterion(1, "algebraic core identities", algebraicCore);

  criterion(2, "group certification", [] {
    Verdict v;
    for (const char* g : {"schottky2", "cusp1"}) {
      Run r = run("group-check", {{"group", g}});
      const Json& res = results(r);
      double margin = res["certificate"]["minRegionMargin"].get<double>();
      v.require(margin > 0, std::string(g) + " margin " + num(margin) + " > 0");
      v.require(res["elementCollisionsToLength6"] == 0, "no collisions to length 6");
      v.require(res["orbitWordsToLength3"] == 53, "53 words to length 3");
      v.checks(r, g);
    }
    return v;
  });

  criterion(3, "critical exponents", [] {
    Clock::time_point t0 = Clock::now();
    Verdict v;
    Run c = run("critical-exponent", {{"group", "cusp1"}, {"T", 16.0}});
    Run s = run("critical-exponent", {{"group", "schottky2"}, {"T", 16.0}});
    double elapsed = seconds(t0);
    const Json &rc = results(c), &rs = results(s);
    double delta = rc["delta"].get<double>();
    double ds = rs["delta"].get<double>();
    v.require(delta > 0.5, "cusp1 delta " + num(delta, 5) + " > 0.5");
    v.require(rc["residual"].get<double>() < 0.05, "residual " + num(rc["residual"].get<double>(), 3) + " < 0.05");
    v.require(rc["poincare"]["transition"].get<bool>(), "cusp1 Poincare transition at delta -+ 0.05");
    v.require(ds > 0 && ds < 1, "schottky2 delta " + num(ds, 5) + " in (0,1)");
    v.require(rs["poincare"]["transition"].get<bool>(), "schottky2 Poincare transition");
    v.require(elapsed < 120.0, "runtime " + num(elapsed, 3) + " s < 120 s");
    return v;
  });

  criterion(4, "shadow lemma slope on schottky2", [] {
    Verdict v;
    Run r = run("shadow-scan", {{"group", "schottky2"},
                                {"cutoff", "sphere:12"},
                                {"depths", {2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0}},
                                {"predict", "exponent"},
                                {"tolerances", {{"shadowSlope", 0.15}}}});
    const Json& res = results(r);
    double slope = res["slope"].get<double>(), target = res["predictedSlope"].get<double>();
    v.require(std::abs(slope - target) <= 0.15 * std::abs(target),
              "slope " + num(slope) + " vs -delta " + num(target) + " within 15%");
    v.checks(r, "shadow-scan");
    return v;
  });

  criterion(5, "half-shadow decay on cusp1", [] {
    Verdict v;
    for (const char* side : {"positive", "negative"}) {
      Run r = run("shadow-scan", {{"group", "cusp1"},
                                  {"side", side},
                                  {"points", {"fixed-point:p"}},
                                  {"predict", "cusp"},
                                  {"tolerances", {{"halfShadowSlope", 0.20}}}});
      const Json& res = results(r);
      double slope = res["slope"].get<double>(), target = res["predictedSlope"].get<double>();
      v.require(std::abs(slope - target) <= 0.20 * std::abs(target),
                std::string(side) + " slope " + num(slope) + " vs 1-2delta " + num(target) + " within 20%");
      v.checks(r, side);
    }
    return v;
  });

  Json densityBase = {{"group", "schottky2"}, {"R", 1e8}, {"netEps", 0.3}};

  criterion(6, "coverage plateau from a first endpoint", [&] {
    Clock::time_point t0 = Clock::now();
    Verdict v;
    Run r = run("density", with(densityBase, {{"uminus", "first-endpoint:auto"}, {"expect", "plateau"}, {"plateauFrom", 1e4}}));
    double elapsed = seconds(t0);
    const Json& res = results(r);
    double fin = res["finalCoverage"].get<double>(), at = res["coverageAtPlateauStart"].get<double>();
    v.require(res["start"]["uminusFirstEndpoint"] == "yes", "u- certified as a first endpoint");
    v.require(fin < 1.0, "coverage " + num(fin) + " < 1");
    v.require(std::abs(fin - at) <= 0.01, "drift from 1e4 to 1e8 " + num(std::abs(fin - at), 3) + " <= 0.01");
    v.checks(r, "density");
    v.require(elapsed < 600.0, "runtime " + num(elapsed, 3) + " s < 600 s");
    return v;
  });

  criterion(7, "coverage from the opposite endpoint", [&] {
    Verdict v;
    Run r = run("density", with(densityBase, {{"uminus", "second-endpoint:auto"}, {"expect", "dense"}}));
    const Json& res = results(r);
    double fin = res["finalCoverage"].get<double>();
    v.require(res["start"]["uminusFirstEndpoint"] == "no", "u- is not a first endpoint");
    v.require(fin >= 0.95, "coverage " + num(fin) + " >= 0.95 at R = 1e8");
    v.checks(r, "density");
    return v;
  });

  criterion(8, "predicate and direct classification agree", [] {
    Verdict v;
    for (const char* g : {"schottky2", "cusp1"}) {
      Run r = run("classify-point", {{"group", g}, {"point", "battery"}, {"batterySize", 20}});
      const Json& res = results(r);
      v.require(res["points"].size() == 20 && res["disagreements"] == 0,
                std::string(g) + " " + std::to_string(res["points"].size()) + " points, " +
                    res["disagreements"].dump() + " disagreements");
      v.checks(r, g);
    }
    return v;
  });

  criterion(9, "equidistribution on schottky2", [] {
    Clock::time_point t0 = Clock::now();
    Verdict v;
    Run ps = run("ps-average", {{"group", "schottky2"}});
    const Json& a = results(ps);
    double avg = a["finalAverage"].get<double>(), ref = a["reference"].get<double>();
    double err = std::abs(avg - ref) / std::abs(ref);
    v.require(err <= 0.15, "M+ error " + num(100 * err, 3) + "% <= 15%");
    v.checks(ps, "ps-average");
    Run bk = run("birkhoff", {{"group", "schottky2"}});
    const Json& b = results(bk);
    double ratio = b["finalRatio"].get<double>(), bref = b["reference"].get<double>();
    double berr = std::abs(ratio - bref) / std::abs(bref);
    v.require(berr <= 0.15, "Birkhoff ratio error " + num(100 * berr, 3) + "% <= 15%");
    v.checks(bk, "birkhoff");
    double elapsed = seconds(t0);
    v.require(elapsed < 1800.0, "runtime " + num(elapsed, 3) + " s < 1800 s");
    return v;
  });

  criterion(10, "cusp tightness on cusp1", [] {
    Verdict v;
    Run m = run("cusp-mass", {{"group", "cusp1"}});
    const Json& res = results(m);
    double slope = res["slope"].get<double>(), target = res["predictedSlope"].get<double>();
    v.require(res["nonincreasing"].get<bool>(), "nonincreasing in N");
    v.require(std::abs(slope - target) <= 0.25 * std::abs(target),
              "log-slope " + num(slope) + " vs -(2delta-1) " + num(target) + " within 25%");
    v.checks(m, "cusp-mass");
    Run e = run("excursions", {{"group", "cusp1"}});
    const Json& ex = results(e);
    v.require(ex["sandwich"].get<bool>(), "sandwich holds with alpha " + num(ex["alpha"].get<double>(), 3) + " over " +
                                              ex["fitted"].dump() + " windows");
    v.checks(e, "excursions");
    return v;
  });

  criterion(11, "reruns are byte-identical", [] {
    Verdict v;
    std::size_t same = 0, threaded = 0;
    std::vector<std::pair<std::string, Json>> runs = history;
    for (const auto& [command, config] : runs) {
      RunResult a = runCommand(command, config.dump());
      RunResult b = runCommand(command, config.dump());
      if (a.summary == b.summary && a.csv == b.csv && a.svg == b.svg) ++same;
      else v.note("differs: " + command + " " + config.dump());
      // The worker cap is echoed in the config, so compare everything else.
      Json more = config;
      more["threads"] = 4;
      RunResult c = runCommand(command, more.dump());
      Json sa = Json::parse(a.summary), sc = Json::parse(c.summary);
      if (sa["results"] == sc["results"] && sa["checks"] == sc["checks"] && a.csv == c.csv && a.svg == c.svg) ++threaded;
      else v.note("threads change the output: " + command);
    }
    v.require(same == runs.size(), std::to_string(same) + "/" + std::to_string(runs.size()) + " reruns identical");
    v.require(threaded == runs.size(), std::to_string(threaded) + "/" + std::to_string(runs.size()) +
                                           " identical with threads = 4");
    return v;
  });

  std::printf("%s  %d criteria failed, total %.1f s\n", failures ? "FAIL" : "PASS", failures, seconds(start));
  return failures ? 1 : 0;
}
