#pragma once

// Configuration-driven commands. A config is a JSON object; keys missing
// from it take the command's defaults and unknown keys are rejected before
// anything is computed. Each run yields a JSON summary (library version,
// resolved config, results, tolerance checks), a CSV table and an SVG
// figure, all depending only on the resolved config.

#include <string>
#include <vector>

namespace horo {

struct RunResult {
  std::string command;
  std::string summary;  // JSON
  std::string csv;
  std::string svg;
  bool pass = true;     // every tolerance check passed (true when there are none)
};

const std::vector<std::string>& commandNames();

// Default config of a command as JSON text. Throws ValidationError for an
// unknown command.
std::string defaultConfig(const std::string& command);

// Defaults merged with the given JSON object; throws ValidationError on
// unknown keys, wrong value types and malformed JSON.
std::string resolveConfig(const std::string& command, const std::string& configJson);

// Throws ValidationError, BudgetError or DomainError.
RunResult runCommand(const std::string& command, const std::string& configJson);

const char* libraryVersion();

}  // namespace horo
