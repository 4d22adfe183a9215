#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "pangle/transforms.hpp"

namespace pangle::tools {

/// Transform container: one JSON header line
///   {"method", "m", "n", "seed", "config", "config_hash", "iterations", "final_objective"}
/// followed by m lines of n comma-separated decimals (row-major, shortest round-trip form).
struct TransformFile {
    LinearTransform transform;
    nlohmann::json config;
    std::string config_hash;
};

/// "fnv1a64:<16 hex digits>" of the compact JSON dump (keys sorted, so the hash is stable).
std::string config_hash(const nlohmann::json& config);

void write_transform(std::ostream& os, const LinearTransform& transform, const nlohmann::json& config);
void save_transform(const std::filesystem::path& path, const LinearTransform& transform,
                    const nlohmann::json& config);

/// Throws ParseError (with line number) on a malformed header or matrix row.
TransformFile read_transform(std::istream& is);
TransformFile load_transform(const std::filesystem::path& path);

}  // namespace pangle::tools
