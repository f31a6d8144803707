#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "synthograph/origin.hpp"
#include "synthograph/screen.hpp"
#include "synthograph/tagger.hpp"

namespace synthograph {

// Container layout (all integers and floats little-endian):
//   "SYGM" | u32 container version | u32 model type | u32 schema version
//   | u64 payload size | payload | u32 CRC-32 of payload
// Floats are IEEE-754 binary64; matrices are u64 rows, u64 cols, then
// column-major values; strings are u32 length then UTF-8 bytes.

inline constexpr std::uint32_t kContainerVersion = 1;
inline constexpr std::uint32_t kTaggerSchemaVersion = 1;
inline constexpr std::uint32_t kOriginSchemaVersion = 1;

enum class ModelType : std::uint32_t { kScreener = 1, kTagger = 2, kOrigin = 3 };

std::string_view model_type_name(ModelType t);

std::string serialize_model(const TaggerModel& m);
std::string serialize_model(const ScreenerModel& m);
std::string serialize_model(const OriginModel& m);

/// Throws ModelFormatError on truncation, checksum failure, version or type mismatch.
TaggerModel deserialize_tagger(std::string_view bytes);
ScreenerModel deserialize_screener(std::string_view bytes);
OriginModel deserialize_origin(std::string_view bytes);
ModelType peek_model_type(std::string_view bytes);

void save_model(const std::filesystem::path& path, const TaggerModel& m);
void save_model(const std::filesystem::path& path, const ScreenerModel& m);
void save_model(const std::filesystem::path& path, const OriginModel& m);

TaggerModel load_tagger_model(const std::filesystem::path& path);
ScreenerModel load_screener_model(const std::filesystem::path& path);
OriginModel load_origin_model(const std::filesystem::path& path);

std::string read_file_bytes(const std::filesystem::path& path);

}  // namespace synthograph
