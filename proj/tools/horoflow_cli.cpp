// Command-line front end over the C interface.
//
//   horoflow <command> [--group G] [--config FILE] [--set key=value]... [--out DIR]
//
// Every top-level scalar of a command's default config is also a flag
// (netEps -> --net-eps; single capitals stay as they are: --R, --T).
// Exit codes: 0 ok, 1 ran but a tolerance check failed, 2 validation error,
// 3 numerical budget exhausted, 4 domain error, 6 internal error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "horoflow.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kOutputEnv = "HOROFLOW_OUTPUT_DIR";

const std::map<std::string, std::string> kAbout{
    {"group-check", "build a group and verify its ping-pong certificate and word counts"},
    {"limitset", "limit set cover and ordinary intervals at a word depth"},
    {"classify-point", "first-endpoint predicate against the direct search, for one point or a battery"},
    {"critical-exponent", "orbit-counting estimate of the critical exponent with a Poincare series check"},
    {"patterson", "Patterson measure atoms, histogram and equivariance defects"},
    {"shadow-scan", "log-mass of shadows or half-shadows against depth"},
    {"density", "fraction of an eps-net visited by the positive half-horocycle"},
    {"ps-average", "horocyclic averages against the Bowen-Margulis integral"},
    {"birkhoff", "ratio of horocyclic Birkhoff integrals against the Burger-Roblin ratio"},
    {"cusp-mass", "horocyclic mass deep in the cusp against depth"},
    {"excursions", "cusp excursion windows against depth"},
};

std::string flagName(const std::string& key) {
  if (key.size() == 1) return key;
  std::string out;
  for (std::size_t i = 0; i < key.size(); ++i) {
    char c = key[i];
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (i > 0) out += '-';
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else {
      out += c;
    }
  }
  return out;
}

struct Failure {
  int code;
  std::string message;
};

void check(int status) {
  if (status != HF_OK) throw Failure{status, hf_last_error()};
}

std::string owned(char* s) {
  std::string out(s ? s : "");
  hf_string_free(s);
  return out;
}

// A flag value typed after the default it replaces.
Json typedValue(const Json& proto, const std::string& key, const std::string& text) {
  if (proto.is_string()) return text;
  try {
    Json v = Json::parse(text);
    if (proto.is_number() && v.is_number()) return v;
    if (proto.is_boolean() && v.is_boolean()) return v;
    if (proto.is_array() && v.is_array()) return v;
    if (proto.is_object() && v.is_object()) return v;
  } catch (const nlohmann::json::parse_error&) {
    if (proto.is_array() && proto.empty()) return Json::array({text});
  }
  throw Failure{HF_ERR_VALIDATION, "bad value '" + text + "' for " + key};
}

void setPath(Json& cfg, const Json& defaults, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Failure{HF_ERR_VALIDATION, "--set expects key=value, got '" + assignment + "'"};
  std::string path = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  Json* slot = &cfg;
  const Json* proto = &defaults;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!proto->is_object() || !proto->contains(parts[i]))
      throw Failure{HF_ERR_VALIDATION, "unknown config key '" + path + "'"};
    proto = &(*proto)[parts[i]];
    if (i + 1 < parts.size()) {
      if (!slot->contains(parts[i])) (*slot)[parts[i]] = Json::object();
      slot = &(*slot)[parts[i]];
    } else {
      (*slot)[parts[i]] = typedValue(*proto, path, text);
    }
  }
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{HF_ERR_VALIDATION, "cannot read config file '" + path + "'"};
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Temp file in the target directory, then rename over the destination.
void writeAtomic(const fs::path& path, const std::string& data) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure{HF_ERR_VALIDATION, "cannot write '" + tmp.string() + "'"};
    out << data;
    out.flush();
    if (!out) throw Failure{HF_ERR_VALIDATION, "write failed for '" + tmp.string() + "'"};
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Failure{HF_ERR_VALIDATION, "cannot rename onto '" + path.string() + "': " + ec.message()};
  }
}

struct Sub {
  std::string name;
  Json defaults;
  CLI::App* app = nullptr;
  std::map<std::string, std::string> flags;  // config key -> raw text
  std::vector<std::string> sets;
  std::string configFile, out, stem;
  bool printConfig = false, quiet = false;
};

int runSub(Sub& s) {
  Json cfg = Json::object();
  if (!s.configFile.empty()) {
    try {
      cfg = Json::parse(readFile(s.configFile));
    } catch (const nlohmann::json::parse_error& e) {
      throw Failure{HF_ERR_VALIDATION, "config file is not valid JSON: " + std::string(e.what())};
    }
    if (!cfg.is_object()) throw Failure{HF_ERR_VALIDATION, "config file must hold a JSON object"};
  }
  for (auto& [key, text] : s.flags)
    if (s.app->count("--" + flagName(key))) cfg[key] = typedValue(s.defaults[key], key, text);
  for (const std::string& a : s.sets) setPath(cfg, s.defaults, a);

  std::string outDir = s.out;
  if (outDir.empty() && cfg.contains("output") && cfg["output"].is_string()) outDir = cfg["output"].get<std::string>();
  if (outDir.empty()) {
    const char* env = std::getenv(kOutputEnv);
    outDir = env && *env ? env : ".";
  }
  cfg["output"] = outDir;

  std::string text = cfg.dump();
  if (s.printConfig) {
    char* resolved = nullptr;
    check(hf_resolve_config(s.name.c_str(), text.c_str(), &resolved));
    std::cout << owned(resolved) << "\n";
    return 0;
  }
  hf_result* raw = nullptr;
  check(hf_run(s.name.c_str(), text.c_str(), &raw));
  std::unique_ptr<hf_result, void (*)(hf_result*)> res(raw, hf_result_free);

  fs::path dir(outDir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{HF_ERR_VALIDATION, "cannot create output directory '" + outDir + "': " + ec.message()};
  std::string stem = s.stem.empty() ? s.name : s.stem;
  std::vector<fs::path> written;
  auto emit = [&](const char* ext, const char* data) {
    if (!data || !*data) return;
    fs::path p = dir / (stem + ext);
    writeAtomic(p, data);
    written.push_back(p);
  };
  emit(".json", hf_result_summary(res.get()));
  emit(".csv", hf_result_csv(res.get()));
  emit(".svg", hf_result_svg(res.get()));

  Json summary = Json::parse(hf_result_summary(res.get()));
  bool pass = hf_result_pass(res.get()) == 1;
  if (!s.quiet) {
    for (const Json& c : summary["checks"]) {
      std::cout << (c["pass"].get<bool>() ? "PASS  " : "FAIL  ") << c["name"].get<std::string>();
      if (c["rule"] != "holds")
        std::cout << "  (value " << c["value"].dump() << ", " << c["rule"].get<std::string>() << " "
                  << c["target"].dump()
                  << (c["tolerance"].get<double>() > 0 ? ", tolerance " + c["tolerance"].dump() : "") << ")";
      std::cout << "\n";
    }
    for (const fs::path& p : written) std::cout << "wrote " << p.string() << "\n";
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Horocycle flows on geometrically finite hyperbolic surfaces"};
  app.set_version_flag("--version", std::string(hf_version()));
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Sub>> subs;
  try {
    for (std::size_t k = 0; k < hf_command_count(); ++k) {
      auto s = std::make_unique<Sub>();
      s->name = hf_command_name(k);
      char* d = nullptr;
      check(hf_default_config(s->name.c_str(), &d));
      s->defaults = Json::parse(owned(d));
      auto about = kAbout.find(s->name);
      s->app = app.add_subcommand(s->name, about != kAbout.end() ? about->second : s->name);
      s->app->add_option("--config", s->configFile, "JSON config file; flags override its values");
      s->app->add_option("--set", s->sets, "override any config key, e.g. --set trace.skipDepth=3");
      s->app->add_option("--out", s->out, std::string("output directory (default $") + kOutputEnv + " or .)");
      s->app->add_option("--name", s->stem, "base name of the output files (default: the command)");
      s->app->add_flag("--print-config", s->printConfig, "print the resolved config and exit");
      s->app->add_flag("--quiet", s->quiet, "no summary on stdout");
      for (auto it = s->defaults.begin(); it != s->defaults.end(); ++it) {
        const Json& v = it.value();
        if (it.key() == "output" || v.is_object()) continue;
        std::string help = it.key() == "threads" ? "worker cap; runs are single-threaded and deterministic"
                                                 : "default " + v.dump();
        s->app->add_option("--" + flagName(it.key()), s->flags[it.key()], help);
      }
      subs.push_back(std::move(s));
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : HF_ERR_VALIDATION;
  }
  for (auto& s : subs) {
    if (!s->app->parsed()) continue;
    try {
      return runSub(*s);
    } catch (const Failure& f) {
      std::cerr << "error: " << f.message << "\n";
      return f.code;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return HF_ERR_INTERNAL;
    }
  }
  return HF_ERR_VALIDATION;
}
