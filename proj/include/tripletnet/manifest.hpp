#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace tripletnet {

// FNV-1a 64 over the file bytes; used for input provenance in manifests.
std::uint64_t file_digest(const std::string& path);
std::string file_digest_hex(const std::string& path);

// Writes to a temp file in the same directory, then renames into place.
void write_json_atomic(const nlohmann::json& doc, const std::string& path);

}  // namespace tripletnet
