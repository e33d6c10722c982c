#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "oldb/field.hpp"

namespace oldb {

// Writes through a temporary sibling file and renames it into place, so a
// failed writer never leaves a partial artifact at `path`.
void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer, bool binary = false);

// Binary field snapshot. Each record is a 32-byte header followed by the
// real-space samples as little-endian float64, component-major, each
// component row-major over the grid. Header layout:
//   [0,4)   magic "OLDB"
//   [4,6)   format version (u16)
//   [6]     dimension n (u8)
//   [7]     rank code (u8: 0 scalar, 1 vector, 2 sym-tensor, 3 tensor)
//   [8,12)  points per axis N (u32)
//   [12,20) simulation time (f64), part of the reserved block
//   [20,32) reserved, zero
// A state snapshot is the velocity record followed by the stress record.
inline constexpr std::uint16_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 32;

struct SnapshotHeader {
  std::uint16_t version = kSnapshotVersion;
  int dim = 2;
  Rank rank = Rank::Scalar;
  int points = 0;
  double time = 0.0;
};

std::vector<std::uint8_t> encode_header(const SnapshotHeader& header);
SnapshotHeader decode_header(std::span<const std::uint8_t> bytes);

void write_snapshot(const std::filesystem::path& path, std::span<const Field> fields, double time);

struct SnapshotContents {
  double time = 0.0;
  std::vector<Field> fields;
};

SnapshotContents read_snapshot(const std::filesystem::path& path);

}  // namespace oldb
