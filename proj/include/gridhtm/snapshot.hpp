#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace gridhtm {

/// Snapshot layout, all integers little-endian:
///
///   magic    4 bytes   "GHSP" spatial pooler, "GHTM" temporal memory,
///                      "GHGM" grid model
///   version  u32
///   length   u64       payload byte count
///   crc32    u32       zlib CRC-32 of the payload
///   payload  length bytes, cereal portable binary archive
inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 20;

struct SnapshotHeader {
  std::string magic;
  std::uint32_t version = 0;
  std::uint64_t payload_bytes = 0;
  std::uint32_t checksum = 0;
};

/// Parses and checks the header and checksum. Throws SnapshotError on
/// malformed input and UnsupportedVersionError on a version mismatch.
SnapshotHeader read_snapshot_header(std::span<const std::byte> bytes);

}  // namespace gridhtm
