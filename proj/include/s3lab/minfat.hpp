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

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "s3lab/address_space.hpp"

namespace s3lab {

inline constexpr unsigned kTagShift = kAddressBits;  // 58
inline constexpr unsigned kMinTag = 1;
// A 58-bit space cannot hold anything larger than 2^57 bytes, so tags stop
// there even though the 6-bit field could express more.
inline constexpr unsigned kMaxTag = 57;

/// 64-bit word carrying a 6-bit size tag above a 58-bit virtual address.
/// An allocation tagged B has allocation size 2^B and is 2^B-aligned, so the
/// base and both bounds are recoverable from any interior address with pure
/// arithmetic. Tag 0 marks a foreign address with no metadata.
class TaggedAddress {
 public:
  constexpr TaggedAddress() = default;

  static constexpr TaggedAddress from_word(uint64_t word) {
    TaggedAddress t;
    t.word_ = word;
    return t;
  }

  constexpr uint64_t word() const { return word_; }
  constexpr unsigned tag() const {
    return static_cast<unsigned>(word_ >> kTagShift);
  }
  constexpr uint64_t addr() const { return word_ & kAddressMask; }
  constexpr bool tagged() const { return tag() != 0; }

  friend constexpr bool operator==(TaggedAddress, TaggedAddress) = default;

 private:
  uint64_t word_ = 0;
};

struct RoundedSize {
  uint64_t alloc_size;
  unsigned tag;
};

/// Smallest power of two strictly greater than `requested`, with its log2.
/// Strictly greater: at least one padding byte always exists, even when the
/// request is itself a power of two. Throws SizeError outside [1, 2^57).
RoundedSize round_alloc_size(uint64_t requested);

/// word = (tag << 58) | addr. Throws EncodeError unless tag in [1, 57] and
/// addr < 2^58.
TaggedAddress encode(uint64_t addr, unsigned tag);

struct Decoded {
  unsigned tag;
  uint64_t alloc_size;  // 2^tag; 0 marks "no metadata" when tag == 0
  uint64_t addr;
};

/// Total: splits any word into tag / allocation size / address.
Decoded decode(TaggedAddress p);

/// base(p) = (addr(p) / allocSize(p)) * allocSize(p), computed by masking
/// since allocation sizes are powers of two. Throws NoMetadataError on tag 0.
inline uint64_t base_of(TaggedAddress p) {
  if (!p.tagged()) throw NoMetadataError("base_of on untagged address");
  return p.addr() & ~((uint64_t{1} << p.tag()) - 1);
}

struct AllocationBounds {
  uint64_t lower;  // base
  uint64_t upper;  // base + alloc_size, exclusive
};

inline AllocationBounds bounds_of(TaggedAddress p) {
  uint64_t lower = base_of(p);
  return {lower, lower + (uint64_t{1} << p.tag())};
}

/// Address arithmetic preserves the tag; the address wraps mod 2^58.
/// Out-of-bounds intermediate values are allowed.
constexpr TaggedAddress ptr_add(TaggedAddress p, int64_t delta) {
  uint64_t moved = (p.addr() + static_cast<uint64_t>(delta)) & kAddressMask;
  return TaggedAddress::from_word((uint64_t{p.tag()} << kTagShift) | moved);
}

/// Orders by masked address; tags are stripped before comparison.
constexpr std::strong_ordering ptr_compare(TaggedAddress a, TaggedAddress b) {
  return a.addr() <=> b.addr();
}

struct Allocation {
  uint64_t base = 0;
  uint64_t alloc_size = 0;
  uint64_t object_size = 0;
  RegionKind kind = RegionKind::Heap;
  bool live = false;
};

/// Power-of-two padding allocator. Every allocation is rounded up with
/// round_alloc_size, placed at an alloc_size-aligned address on the lane of
/// its region kind, mapped zero-filled, and returned as a tagged base
/// address. Freed allocations are quarantined: marked dead, never unmapped,
/// never reused, so later accesses stay observable.
class MinFatAllocator {
 public:
  explicit MinFatAllocator(AddressSpace& space) : space_(&space) {}

  TaggedAddress allocate(uint64_t requested, RegionKind kind);

  /// `p` must be the tagged base address of a live allocation; anything else
  /// (interior address, unknown base, double free) throws FreeError.
  void deallocate(TaggedAddress p);

  const Allocation* find(uint64_t base) const;
  std::span<const Allocation> allocations() const { return allocations_; }

 private:
  AddressSpace* space_;
  std::vector<Allocation> allocations_;
  std::map<uint64_t, size_t> by_base_;
};

}  // namespace s3lab
