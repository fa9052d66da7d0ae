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

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "s3lab/errors.hpp"

namespace s3lab {

/// Addresses occupy the low 58 bits of a 64-bit word; the upper 6 bits are
/// reserved for size tags.
inline constexpr unsigned kAddressBits = 58;
inline constexpr uint64_t kAddressLimit = uint64_t{1} << kAddressBits;
inline constexpr uint64_t kAddressMask = kAddressLimit - 1;

enum class RegionKind { Stack, Heap, Global };
inline constexpr std::array<RegionKind, 3> kRegionKinds = {
    RegionKind::Stack, RegionKind::Heap, RegionKind::Global};

const char* to_string(RegionKind kind);
std::optional<RegionKind> region_kind_from_string(std::string_view name);

/// Lane bases for deterministic bump placement. Each base must be distinct,
/// 2^16-aligned and below 2^58. A lane extends up to the next-higher base
/// (or the end of the address space for the highest one).
struct SpaceConfig {
  uint64_t heap_base = 0x1000'0000;
  uint64_t stack_base = 0x2000'0000;
  uint64_t global_base = 0x3000'0000;
};

struct MappedRegion {
  uint64_t start = 0;
  uint64_t length = 0;
  RegionKind kind = RegionKind::Heap;
  std::vector<uint8_t> bytes;  // always exactly `length` entries
};

/// Simulated 64-bit virtual address space over byte arenas.
///
/// Regions are pairwise disjoint, never unmapped, and zero-initialized on
/// mapping, so every byte effect of a run is observable and reproducible.
/// Raw access performs no bounds checking beyond "is this byte mapped":
/// an unmapped byte raises UnmappedFault, and a multi-byte raw_write commits
/// the maximal in-bounds prefix before faulting.
///
/// Instances are single-threaded; distinct instances may be used from
/// different threads concurrently.
class AddressSpace {
 public:
  explicit AddressSpace(const SpaceConfig& config = {});

  /// Maps [start, start+length) as a zero-filled region. Returns the region
  /// id (its start address). Throws MapError on overlap, zero length, or a
  /// range extending past the 58-bit space.
  uint64_t map_region(uint64_t start, uint64_t length, RegionKind kind);

  /// Advances the lane cursor of `kind` to the next alloc_size-aligned
  /// address and reserves alloc_size bytes. Placement is a pure function of
  /// the call sequence. Throws OutOfMemoryError when the lane is exhausted.
  uint64_t bump(RegionKind kind, uint64_t alloc_size);

  uint8_t read_byte(uint64_t addr) const;
  void write_byte(uint64_t addr, uint8_t value);

  std::vector<uint8_t> raw_read(uint64_t addr, uint64_t len) const;
  void raw_write(uint64_t addr, std::span<const uint8_t> bytes);

  bool mapped(uint64_t addr) const { return find(addr) != nullptr; }
  size_t region_count() const { return regions_.size(); }
  uint64_t cursor(RegionKind kind) const { return lane(kind).next; }

  /// Visits regions in ascending start order.
  template <typename Fn>
  void for_each_region(Fn&& fn) const {
    for (const auto& [start, region] : regions_) fn(region);
  }

  /// Copy of all mapped bytes, keyed by region start. Used for diff-based
  /// containment checks.
  std::map<uint64_t, std::vector<uint8_t>> snapshot() const;

 private:
  struct Lane {
    uint64_t next = 0;
    uint64_t limit = 0;
  };

  const Lane& lane(RegionKind kind) const {
    return lanes_[static_cast<size_t>(kind)];
  }
  Lane& lane(RegionKind kind) { return lanes_[static_cast<size_t>(kind)]; }

  MappedRegion* find(uint64_t addr) const;

  std::map<uint64_t, MappedRegion> regions_;
  std::array<Lane, 3> lanes_{};
  // One-entry lookup cache; map nodes are stable and regions are never
  // unmapped, so a cached pointer stays valid.
  mutable MappedRegion* cache_ = nullptr;
};

inline uint8_t AddressSpace::read_byte(uint64_t addr) const {
  MappedRegion* r = cache_;
  if (r == nullptr || addr - r->start >= r->length) {
    r = find(addr);
    if (r == nullptr) throw UnmappedFault(addr);
  }
  return r->bytes[addr - r->start];
}

inline void AddressSpace::write_byte(uint64_t addr, uint8_t value) {
  MappedRegion* r = cache_;
  if (r == nullptr || addr - r->start >= r->length) {
    r = find(addr);
    if (r == nullptr) throw UnmappedFault(addr);
  }
  r->bytes[addr - r->start] = value;
}

}  // namespace s3lab
