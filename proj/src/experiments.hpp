#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dnmap.hpp"
#include "monotonicity.hpp"
#include "perturbation.hpp"
#include "ucp2d.hpp"

namespace plap::lab {

inline constexpr const char* kToolVersion = "0.1.0";

// Manifest of one experiment run: every emitted file is listed and every
// asserted invariant carries a verdict. The run is deterministic given
// (config, seed); wall_time_ms is the only non-reproducible field.
struct RunManifest {
  std::string kind;
  std::string config_hash;
  std::string version = kToolVersion;
  uint64_t seed = 0;
  int threads = 1;
  long long wall_time_ms = 0;
  std::vector<std::string> outputs;                 // paths relative to the output directory
  std::map<std::string, bool> verdicts;

  bool all_passed() const;
  nlohmann::json to_json() const;
};

// Executes the experiment named by config["kind"] (solve | dn | mono |
// detect | perturb | ucp | calibrate-eps), writes its artifacts plus
// manifest.json into out_dir, and returns the manifest.
RunManifest run(const nlohmann::json& config, const std::string& out_dir, uint64_t seed,
                int threads);

// convenience: load a JSON config file (errors carry the filename)
nlohmann::json load_config(const std::string& path);

uint64_t config_hash(const nlohmann::json& config);

}  // namespace plap::lab
