#pragma once

// On-disk cache of target records.
//
// Layout (all integers little-endian):
//   "PFTC v1\n"                   8 bytes
//   u64 key hash (FNV-1a of the key), u64 key length, key bytes
//   u64 record count, then per record:
//     u64 region count, regions as 4 x i32 (i0 j0 i1 j1)
//     u64 cells, u64 samples, f64 dt
//     ez, bx, by: cells * samples f64 each
//   u64 FNV-1a of every preceding byte

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "photonic_forge/evaluation.hpp"

namespace pforge {

inline constexpr std::string_view kTargetCacheMagic = "PFTC v1\n";

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull);

/// "targets-<16 hex digits>.pftc"
std::string target_cache_name(const std::string& key);

void write_target_cache(std::ostream& os, const std::string& key, const std::vector<FieldRecord>& records);
/// Throws ParseError on any corruption or when the stored key differs.
std::vector<FieldRecord> read_target_cache(std::istream& is, const std::string& key);

struct CachedTargets {
  std::vector<FieldRecord> records;
  std::string path;
  bool hit = false;
};

using CacheLog = std::function<void(const std::string&)>;

/// Reads the cache file for (setup, gate) under dir, or simulates and writes
/// it. A corrupt file is reported through `log` and regenerated.
CachedTargets cached_targets(const std::string& dir, const SimulationSetup& setup, const UnitarySpec& gate,
                             int workers, const CacheLog& log = {});

}  // namespace pforge
