// Copyright 2026 The s3lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cassert>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "s3lab/minfat.hpp"

namespace s3lab {

enum class ViolationKind {
  OverflowWrite,
  OverflowRead,
  UnderflowWrite,
  UnderflowRead,
  NullArgument,
  ZeroLength,
  Overlap,
  UntaggedArgument,
  UnmappedAccess,
};

enum class ViolationAction {
  Saturated,  // access redirected into the allocation's padding
  Aborted,    // call terminated by the constraint handler
  Ignored,    // access suppressed (early return, or overwritten by a later one)
  Proceeded,  // executed unchecked (foreign pointer passthrough, degrade)
};

const char* to_string(ViolationKind kind);
const char* to_string(ViolationAction action);

struct ViolationRecord {
  ViolationKind kind;
  std::string function;
  uint64_t attempted_addr = 0;
  std::optional<uint64_t> clamped_addr;  // within bounds when present
  int64_t byte_offset = 0;               // index within the operation
  ViolationAction action = ViolationAction::Saturated;
};

/// Append-only violation log. `size()` counts every record ever appended;
/// only the first `stored_cap` are materialized (fuzzing produces large
/// logs), the rest are counted.
class ViolationLog {
 public:
  explicit ViolationLog(size_t stored_cap = 65536) : cap_(stored_cap) {}

  void append(ViolationRecord record);

  /// Records `count` consecutive per-byte repetitions of `proto`:
  /// byte_offset and attempted_addr advance by one per copy, everything
  /// else is shared. Used when an optimized transfer skips writes whose
  /// effect the final write overlaps.
  void append_run(const ViolationRecord& proto, uint64_t count);

  uint64_t size() const { return total_; }
  std::span<const ViolationRecord> stored() const { return records_; }
  void clear();

 private:
  std::vector<ViolationRecord> records_;
  uint64_t total_ = 0;
  size_t cap_;
};

/// Clamps `addr` into [lower, upper): identity in range, upper-1 above,
/// lower below. Requires lower < upper.
constexpr uint64_t saturate(uint64_t addr, uint64_t lower, uint64_t upper) {
  if (addr >= upper) return upper - 1;
  if (addr < lower) return lower;
  return addr;
}

namespace detail {

inline std::optional<ViolationRecord> clamp_target(TaggedAddress p,
                                                   int64_t offset,
                                                   bool is_write,
                                                   ViolationLog& log,
                                                   std::string_view function,
                                                   uint64_t& target) {
  if (!p.tagged())
    throw NoMetadataError("saturation access through untagged address");
  auto [lower, upper] = bounds_of(p);
  uint64_t attempted =
      (p.addr() + static_cast<uint64_t>(offset)) & kAddressMask;
  target = saturate(attempted, lower, upper);
  if (target == attempted) return std::nullopt;
  ViolationKind kind =
      attempted >= upper
          ? (is_write ? ViolationKind::OverflowWrite
                      : ViolationKind::OverflowRead)
          : (is_write ? ViolationKind::UnderflowWrite
                      : ViolationKind::UnderflowRead);
  ViolationRecord rec{kind,   std::string(function), attempted,
                      target, offset,                ViolationAction::Saturated};
  log.append(rec);
  return rec;
}

}  // namespace detail

/// Writes one byte at saturate(addr(dest)+offset, bounds_of(dest)). Appends
/// and returns a violation record when the address was clamped; bytes outside
/// the destination allocation are never touched. Throws NoMetadataError on a
/// tag-0 destination.
inline std::optional<ViolationRecord> sma_write(AddressSpace& space,
                                                TaggedAddress dest,
                                                int64_t offset, uint8_t value,
                                                ViolationLog& log,
                                                std::string_view function) {
  uint64_t target = 0;
  auto rec = detail::clamp_target(dest, offset, true, log, function, target);
  space.write_byte(target, value);
  return rec;
}

/// Read counterpart of sma_write.
inline std::optional<ViolationRecord> sma_read(AddressSpace& space,
                                               TaggedAddress src,
                                               int64_t offset, uint8_t& value,
                                               ViolationLog& log,
                                               std::string_view function) {
  uint64_t target = 0;
  auto rec = detail::clamp_target(src, offset, false, log, function, target);
  value = space.read_byte(target);
  return rec;
}

}  // namespace s3lab
