#pragma once
// Per-run provenance record: the exact config, code version, wall time,
// guard events, and an FNV-1a checksum of every emitted file. One manifest
// JSON per run; verify_manifest re-hashes the files on disk.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "otoclab/config.hpp"

namespace otoclab::io {

std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t file_checksum(const std::string& path);  // throws std::runtime_error

struct RunManifest {
  std::string experiment;
  ExperimentConfig config;
  std::string code_version;
  double wall_time_seconds = 0.0;
  std::vector<std::string> guard_events;
  std::map<std::string, std::string> files;  // relative path -> hex checksum
  std::map<std::string, double> notes;       // scalar run results worth keeping

  void add_file(const std::string& dir, const std::string& relpath);
};

void write_manifest(const RunManifest& m, const std::string& path);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> mismatches;
};
// re-hash every file listed in the manifest (paths relative to the manifest's
// directory) and compare
VerifyReport verify_manifest(const std::string& manifest_path);

}  // namespace otoclab::io
