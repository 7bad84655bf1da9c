#pragma once

// File formats: score vectors (CSV or JSON array), partitions (JSON list of index
// arrays), decision JSON with base64-packed masks, and atomic file output.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "emp/bounds.hpp"
#include "emp/core.hpp"

namespace emp::io {

/// Numbers separated by commas, semicolons, or whitespace; '#' starts a comment line.
ScoreVector parse_scores_csv(std::string_view text);

/// A JSON array of numbers, or an object with a "scores" array.
ScoreVector parse_scores_json(std::string_view text);

/// Picks the parser by extension (.json) or by a leading '[' / '{'.
ScoreVector load_scores(const std::filesystem::path& path);

/// [[0,1,2],[3,4]] -> Partition.
Partition parse_partition_json(std::string_view text);
Partition load_partition(const std::filesystem::path& path);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Bit i of the mask is bit (i % 8) of byte i / 8, least significant bit first.
std::vector<std::uint8_t> pack_mask(const std::vector<bool>& mask);
std::vector<bool> unpack_mask(std::span<const std::uint8_t> bytes, std::size_t n);

nlohmann::json to_json(const EmpDecision& d);
nlohmann::json to_json(const PartitionedDecision& d);
nlohmann::json to_json(const bounds::BoundReport& r);

/// Inverse of to_json(EmpDecision); used by consumers of decision files.
EmpDecision decision_from_json(const nlohmann::json& j);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over the destination.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace emp::io
