#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "horoflow/experiments.hpp"
#include "horoflow/report.hpp"
#include "horoflow/runner.hpp"

namespace horo::run {

using Json = nlohmann::ordered_json;

// One tolerance comparison. Rules: "relative" |value - target| <= tol |target|,
// "absolute" |value - target| <= tol, "above" value > target,
// "atMost" value <= target, "atLeast" value >= target, "holds" value != 0.
struct Check {
  std::string name, rule;
  double value = 0.0, target = 0.0, tolerance = 0.0;
  bool pass = false;
};

class Report {
public:
  Json results = Json::object();
  std::string csv, svg;
  std::vector<Check> checks;

  void relative(const std::string& name, double value, double target, double tol);
  void absolute(const std::string& name, double value, double target, double tol);
  void above(const std::string& name, double value, double target);
  void atMost(const std::string& name, double value, double target);
  void atLeast(const std::string& name, double value, double target);
  void holds(const std::string& name, bool value);
};

// Typed access to a resolved config.
double num(const Json& c, const char* key);
int integer(const Json& c, const char* key);
std::size_t count(const Json& c, const char* key);
std::uint64_t seedOf(const Json& c);
std::string str(const Json& c, const char* key);
std::vector<double> numbers(const Json& c, const char* key);

Json numberOrNull(double x);
Json frameJson(const StartFrame& u);
Json traceJson(const TraceSummary& t);

TraceParams traceParams(const Json& c);
MeasureConfig measureConfig(const Json& c);
// Group, exponent fit and Patterson measure for the config's "group" and "measure".
GroupContext context(const Json& c);
Json contextJson(const GroupContext& ctx);

// Experiment commands (runner_experiments.cpp).
Json densityDefaults();
Json psAverageDefaults();
Json birkhoffDefaults();
Json cuspMassDefaults();
Json excursionsDefaults();
void runDensity(const Json& c, Report& r);
void runPsAverage(const Json& c, Report& r);
void runBirkhoff(const Json& c, Report& r);
void runCuspMass(const Json& c, Report& r);
void runExcursions(const Json& c, Report& r);

// Shared blocks of the experiment defaults.
Json experimentCommon(const std::string& group);
Json traceDefaults();
Json measureDefaults();

}  // namespace horo::run
