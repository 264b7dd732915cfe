#include "toonwarp/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace toonwarp {

namespace le {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_u32(p)); }

}  // namespace le

std::vector<std::uint8_t> encode_field(const CoarseField& field) {
  std::vector<std::uint8_t> out;
  out.reserve(kFieldHeaderBytes + field.values().size() * 4);
  out.insert(out.end(), std::begin(kFieldMagic), std::end(kFieldMagic));
  le::put_u32(out, static_cast<std::uint32_t>(field.rows()));
  le::put_u32(out, static_cast<std::uint32_t>(field.cols()));
  for (float v : field.values()) le::put_f32(out, v);
  return out;
}

CoarseField decode_field(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kFieldHeaderBytes) {
    throw Error(ErrorCode::Format, "field header truncated: expected " + std::to_string(kFieldHeaderBytes) +
                                       " bytes, got " + std::to_string(bytes.size()));
  }
  if (std::memcmp(bytes.data(), kFieldMagic, 4) != 0) {
    throw Error(ErrorCode::Format, "bad field magic '" + std::string(bytes.begin(), bytes.begin() + 4) +
                                       "', expected 'ATF1'");
  }
  const std::uint32_t rows = le::get_u32(bytes.data() + 4);
  const std::uint32_t cols = le::get_u32(bytes.data() + 8);
  if (rows < 2 || cols < 2) {
    throw Error(ErrorCode::Format, "field dimensions " + std::to_string(rows) + "x" + std::to_string(cols) +
                                       " below the 2x2 minimum");
  }
  const std::size_t payload = static_cast<std::size_t>(rows) * cols * 2 * 4;
  const std::size_t actual = bytes.size() - kFieldHeaderBytes;
  if (actual != payload) {
    throw Error(ErrorCode::Format, "field payload size mismatch: expected " + std::to_string(payload) +
                                       " bytes, got " + std::to_string(actual));
  }
  CoarseField field(rows, cols);
  auto values = field.values();
  const std::uint8_t* p = bytes.data() + kFieldHeaderBytes;
  for (std::size_t i = 0; i < values.size(); ++i, p += 4) {
    values[i] = le::get_f32(p);
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::Format, "non-finite displacement at payload index " + std::to_string(i));
    }
  }
  return field;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

void save_field(const CoarseField& field, const std::filesystem::path& path) {
  if (!field.all_finite()) throw Error(ErrorCode::InvalidArgument, "refusing to save a non-finite field");
  write_file_bytes(path, encode_field(field));
}

CoarseField load_field(const std::filesystem::path& path) {
  try {
    return decode_field(read_file_bytes(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Format) throw Error(ErrorCode::Format, path.string() + ": " + e.what());
    throw;
  }
}

}  // namespace toonwarp
