#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sifair/sim.hpp"

namespace sifair {

/// A fully loaded run: configuration plus the network, partition, demand and
/// fleet it refers to.
struct RunSetup {
  SimConfig config;
  StreetNetwork net;
  AreaPartition partition;
  std::vector<Request> requests;
  std::vector<VehicleState> fleet;
};

/// Parses a JSON manifest. Relative file paths resolve against `base_dir`.
/// Syntax errors throw ParseError; invalid values throw ConfigError whose
/// message starts with `name:line:`. Referenced files raise their own
/// ParseError or InputError.
RunSetup parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                        const std::string& name = "manifest");

/// Reads and parses a manifest file.
RunSetup load_manifest(const std::filesystem::path& path);

/// Final equity figures, totals and per-driver income as pretty JSON.
std::string result_to_json(const RunResult& result);

}  // namespace sifair
