#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "subwave/elliptic.hpp"
#include "subwave/evolution.hpp"
#include "subwave/scattering.hpp"
#include "subwave/stationary.hpp"

namespace subwave {

/// Run configuration: INI text with [section] headers and key = value lines.
/// Every key has a default; unknown sections or keys are rejected with
/// ConfigError. Lists are comma separated.
class RunConfig {
 public:
  RunConfig();
  static RunConfig parse(std::istream& is);
  static RunConfig load(const std::filesystem::path& path);

  /// Overrides a "section.key" entry (command-line flags).
  void set(const std::string& key, const std::string& value);
  const std::string& raw(const std::string& key) const;
  /// Effective "section.key=value" lines, sorted, and their SHA-256.
  std::string canonical() const;
  std::string hash() const;

  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;

  /// Typed views; each validates the module preconditions it can check
  /// without running the computation and throws ConfigError or DomainError.
  Topography topography() const;
  std::vector<double> lambdas() const;
  double lambda() const;  // first entry
  std::uint64_t seed() const;
  int threads() const;
  ScatteringOptions scattering() const;
  StationaryOptions stationary() const;
  SourceTerm source(const Topography& topo) const;
  Cutoff cutoff() const;
  ResolventProblem resolvent(const Topography& topo) const;
  EvolutionConfig evolution(const Topography& topo) const;

  /// Validates the sections a command reads ("check", "billiard", "scatter",
  /// "solve", "lap", "evolve", "extract"; empty validates everything).
  void validate(const std::string& command = "") const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace subwave
