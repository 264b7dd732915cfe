#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "toonwarp/field.hpp"

namespace toonwarp {

/// ATF1 layout: "ATF1", u32 rows, u32 cols, then rows*cols cells of
/// (dx, dy) as little-endian float32. All integers little-endian.
inline constexpr char kFieldMagic[4] = {'A', 'T', 'F', '1'};
inline constexpr std::size_t kFieldHeaderBytes = 12;

std::vector<std::uint8_t> encode_field(const CoarseField& field);
CoarseField decode_field(const std::vector<std::uint8_t>& bytes);

void save_field(const CoarseField& field, const std::filesystem::path& path);
CoarseField load_field(const std::filesystem::path& path);

// Shared by the checkpoint codec.
namespace le {
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_f32(std::vector<std::uint8_t>& out, float v);
std::uint32_t get_u32(const std::uint8_t* p);
float get_f32(const std::uint8_t* p);
}  // namespace le

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace toonwarp
