#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "predlab/trainer.hpp"

namespace predlab {

// Provenance block embedded in every report.
struct RunManifest {
  std::string command;
  TrainConfig config;
  std::uint64_t seed = 0;
  std::string input_digest;  // content hash of the input dataset file
  std::string version = PREDLAB_VERSION;
  std::string created_at;  // ISO-8601 UTC

  nlohmann::json to_json() const;
};

// FNV-1a 64-bit hex digest of a file's bytes.
std::string file_digest(const std::string& path);

std::string utc_timestamp_now();

// Serializes with a stable key order and writes atomically-ish
// (temp file + rename).
void write_report(const nlohmann::json& report, const std::string& path);

}  // namespace predlab
