#include "srl/srlf.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "srl/errors.hpp"

namespace srl {

namespace {

constexpr char kMagic[4] = {'S', 'R', 'L', 'F'};
constexpr std::uint32_t kSrlfVersion = 1;
constexpr std::size_t kHeaderBytes = 20;
// Guards the h*w*d product against overflow and absurd allocations.
constexpr std::uint64_t kMaxElements = 1ull << 31;

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void write_u32le(std::uint32_t v, unsigned char* p) {
  p[0] = static_cast<unsigned char>(v & 0xFF);
  p[1] = static_cast<unsigned char>((v >> 8) & 0xFF);
  p[2] = static_cast<unsigned char>((v >> 16) & 0xFF);
  p[3] = static_cast<unsigned char>((v >> 24) & 0xFF);
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t offset,
                       const std::string& what) {
  throw DataError(path.string() + ": offset " + std::to_string(offset) + ": " + what);
}

}  // namespace

FeatureGrid load_feature_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");

  unsigned char header[kHeaderBytes];
  in.read(reinterpret_cast<char*>(header), kHeaderBytes);
  if (in.gcount() != static_cast<std::streamsize>(kHeaderBytes)) {
    fail(path, static_cast<std::size_t>(in.gcount()), "truncated header");
  }
  if (std::memcmp(header, kMagic, 4) != 0) {
    fail(path, 0, std::string("bad magic '") + std::string(reinterpret_cast<char*>(header), 4) +
                      "', expected 'SRLF'");
  }
  const std::uint32_t version = read_u32le(header + 4);
  if (version != kSrlfVersion) {
    fail(path, 4, "unsupported format version " + std::to_string(version) + ", expected " +
                      std::to_string(kSrlfVersion));
  }
  const std::uint32_t h = read_u32le(header + 8);
  const std::uint32_t w = read_u32le(header + 12);
  const std::uint32_t d = read_u32le(header + 16);
  if (h == 0 || w == 0 || d == 0) {
    fail(path, 8, "dimensions must be positive, got " + std::to_string(h) + "x" +
                      std::to_string(w) + "x" + std::to_string(d));
  }
  const std::uint64_t count = static_cast<std::uint64_t>(h) * w * d;
  if (count > kMaxElements) {
    fail(path, 8, "element count " + std::to_string(count) + " exceeds limit");
  }

  std::vector<unsigned char> payload(count * 4);
  in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (in.gcount() != static_cast<std::streamsize>(payload.size())) {
    fail(path, kHeaderBytes + static_cast<std::size_t>(in.gcount()),
         "truncated payload, expected " + std::to_string(payload.size()) + " bytes after header");
  }

  FeatureGrid grid;
  grid.height = static_cast<int>(h);
  grid.width = static_cast<int>(w);
  grid.depth = static_cast<int>(d);
  grid.values.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const float v = std::bit_cast<float>(read_u32le(payload.data() + i * 4));
    if (!std::isfinite(v)) {
      fail(path, kHeaderBytes + static_cast<std::size_t>(i) * 4, "non-finite value");
    }
    grid.values[i] = static_cast<double>(v);
  }
  return grid;
}

void save_feature_grid(const FeatureGrid& grid, const std::filesystem::path& path) {
  validate_grid(grid);
  std::vector<unsigned char> bytes(kHeaderBytes + grid.values.size() * 4);
  std::memcpy(bytes.data(), kMagic, 4);
  write_u32le(kSrlfVersion, bytes.data() + 4);
  write_u32le(static_cast<std::uint32_t>(grid.height), bytes.data() + 8);
  write_u32le(static_cast<std::uint32_t>(grid.width), bytes.data() + 12);
  write_u32le(static_cast<std::uint32_t>(grid.depth), bytes.data() + 16);
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const float v = static_cast<float>(grid.values[i]);
    if (!std::isfinite(v)) {
      throw ArgumentError("value " + std::to_string(i) + " (" + std::to_string(grid.values[i]) +
                          ") overflows the float32 payload");
    }
    write_u32le(std::bit_cast<std::uint32_t>(v), bytes.data() + kHeaderBytes + i * 4);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path.string() + ": cannot open file for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError(path.string() + ": write failed");
}

}  // namespace srl
