#include "horoflow.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "horoflow/error.hpp"
#include "horoflow/experiments.hpp"
#include "horoflow/runner.hpp"

struct hf_group {
  horo::FuchsianGroup g;
};
struct hf_measure {
  horo::AtomicBoundaryMeasure mu;
};
struct hf_result {
  horo::RunResult r;
};

namespace {

thread_local std::string lastError;

int fail(int code, const std::string& what) {
  lastError = what;
  return code;
}

template <class F>
int guard(F&& f) {
  try {
    f();
    lastError.clear();
    return HF_OK;
  } catch (const horo::Error& e) {
    return fail(static_cast<int>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(HF_ERR_BUDGET, "out of memory");
  } catch (const std::exception& e) {
    return fail(HF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(HF_ERR_INTERNAL, "unknown error");
  }
}

char* copy(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define HF_REQUIRE(cond) \
  if (!(cond)) return fail(HF_ERR_ARGUMENT, "invalid argument: " #cond)

}  // namespace

extern "C" {

const char* hf_version(void) { return horo::libraryVersion(); }
const char* hf_last_error(void) { return lastError.c_str(); }
void hf_string_free(char* s) { std::free(s); }

int hf_group_open(const char* name_or_path, hf_group** out) {
  HF_REQUIRE(name_or_path && out);
  *out = nullptr;
  return guard([&] { *out = new hf_group{horo::resolveGroup(name_or_path)}; });
}

int hf_group_from_json(const char* spec_json, hf_group** out) {
  HF_REQUIRE(spec_json && out);
  *out = nullptr;
  return guard([&] { *out = new hf_group{horo::buildGroup(horo::parseGroupSpec(spec_json))}; });
}

void hf_group_free(hf_group* g) { delete g; }

int hf_group_rank(const hf_group* g, size_t* rank) {
  HF_REQUIRE(g && rank);
  *rank = g->g.rank();
  return HF_OK;
}

int hf_group_has_parabolics(const hf_group* g, int* yes) {
  HF_REQUIRE(g && yes);
  *yes = g->g.hasParabolics() ? 1 : 0;
  return HF_OK;
}

int hf_group_region_margin(const hf_group* g, double* margin) {
  HF_REQUIRE(g && margin);
  *margin = g->g.certificate().minRegionMargin;
  return HF_OK;
}

int hf_critical_exponent(const hf_group* g, double T, double* delta, double* residual) {
  HF_REQUIRE(g && delta);
  return guard([&] {
    horo::CriticalExponentFit f = horo::criticalExponent(g->g, T);
    *delta = f.delta;
    if (residual) *residual = f.residual;
  });
}

int hf_reduce_point(const hf_group* g, double x, double y, double* rx, double* ry, size_t* word_length) {
  HF_REQUIRE(g && rx && ry);
  HF_REQUIRE(y > 0.0);
  return guard([&] {
    auto [p, w] = horo::reducePoint(horo::PlanePoint::halfPlane(x, y), g->g);
    horo::cplx z = p.inHalfPlane();
    *rx = z.real();
    *ry = z.imag();
    if (word_length) *word_length = w.length();
  });
}

int hf_boundary_point(const hf_group* g, const char* spec, double* angle) {
  HF_REQUIRE(g && spec && angle);
  return guard([&] { *angle = horo::resolveBoundaryPoint(g->g, spec).angle(); });
}

int hf_is_first_endpoint(const hf_group* g, double angle, int depth, int* verdict) {
  HF_REQUIRE(g && verdict);
  return guard([&] {
    horo::Verdict v = horo::isFirstEndpoint(horo::BoundaryPoint::fromAngle(angle), g->g, depth).verdict;
    *verdict = v == horo::Verdict::Yes ? HF_YES : v == horo::Verdict::No ? HF_NO : HF_UNRESOLVED;
  });
}

int hf_patterson(const hf_group* g, double s, int sphere_length, double ball_radius, double shell_width,
                 hf_measure** out) {
  HF_REQUIRE(g && out);
  *out = nullptr;
  return guard([&] {
    horo::PattersonCutoff cut = sphere_length > 0 ? horo::PattersonCutoff::sphere(sphere_length)
                                                  : horo::PattersonCutoff::ball(ball_radius, shell_width);
    *out = new hf_measure{horo::pattersonMeasure(g->g, s, cut)};
  });
}

void hf_measure_free(hf_measure* m) { delete m; }

size_t hf_measure_size(const hf_measure* m) { return m ? m->mu.size() : 0; }

int hf_measure_atom(const hf_measure* m, size_t k, double* angle, double* weight) {
  HF_REQUIRE(m && angle && weight);
  HF_REQUIRE(k < m->mu.size());
  *angle = m->mu.angles()[k];
  *weight = m->mu.weights()[k];
  return HF_OK;
}

int hf_measure_arc_mass(const hf_measure* m, double start, double length, double* mass) {
  HF_REQUIRE(m && mass);
  return guard([&] { *mass = m->mu.mass(start, length); });
}

size_t hf_command_count(void) { return horo::commandNames().size(); }

const char* hf_command_name(size_t k) {
  const auto& names = horo::commandNames();
  return k < names.size() ? names[k].c_str() : nullptr;
}

int hf_default_config(const char* command, char** json) {
  HF_REQUIRE(command && json);
  *json = nullptr;
  return guard([&] { *json = copy(horo::defaultConfig(command)); });
}

int hf_resolve_config(const char* command, const char* config_json, char** json) {
  HF_REQUIRE(command && json);
  *json = nullptr;
  return guard([&] { *json = copy(horo::resolveConfig(command, config_json ? config_json : "")); });
}

int hf_run(const char* command, const char* config_json, hf_result** out) {
  HF_REQUIRE(command && out);
  *out = nullptr;
  return guard([&] { *out = new hf_result{horo::runCommand(command, config_json ? config_json : "")}; });
}

const char* hf_result_summary(const hf_result* r) { return r ? r->r.summary.c_str() : nullptr; }
const char* hf_result_csv(const hf_result* r) { return r ? r->r.csv.c_str() : nullptr; }
const char* hf_result_svg(const hf_result* r) { return r ? r->r.svg.c_str() : nullptr; }
int hf_result_pass(const hf_result* r) { return r && r->r.pass ? 1 : 0; }
void hf_result_free(hf_result* r) { delete r; }

}  // extern "C"
