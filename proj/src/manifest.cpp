#include "otoclab/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "otoclab/version.hpp"

namespace otoclab::io {

std::uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for checksum");
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const auto got = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
    if (!in) break;
  }
  return h;
}

namespace {
std::string hex64(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}
}  // namespace

void RunManifest::add_file(const std::string& dir, const std::string& relpath) {
  files[relpath] = hex64(file_checksum((std::filesystem::path(dir) / relpath).string()));
}

void write_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::json j;
  j["experiment"] = m.experiment;
  j["code_version"] = m.code_version.empty() ? kVersion : m.code_version;
  j["config"] = config_to_json(m.config);
  j["wall_time_seconds"] = m.wall_time_seconds;
  j["guard_events"] = m.guard_events;
  j["files"] = m.files;
  if (!m.notes.empty()) j["notes"] = m.notes;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

VerifyReport verify_manifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open manifest '" + manifest_path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("manifest '" + manifest_path + "' is not valid JSON: " + e.what());
  }
  const auto dir = std::filesystem::path(manifest_path).parent_path();
  VerifyReport rep;
  for (const auto& [rel, want] : j.at("files").items()) {
    std::string got;
    try {
      got = hex64(file_checksum((dir / rel).string()));
    } catch (const std::runtime_error&) {
      rep.ok = false;
      rep.mismatches.push_back(rel + ": missing");
      continue;
    }
    if (got != want.get<std::string>()) {
      rep.ok = false;
      rep.mismatches.push_back(rel + ": checksum " + got + " != " + want.get<std::string>());
    }
  }
  return rep;
}

}  // namespace otoclab::io
