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

#include "s3lab/address_space.hpp"

#include <algorithm>

#include "s3lab/fmt_util.hpp"

namespace s3lab {

UnmappedFault::UnmappedFault(uint64_t address)
    : Error("unmapped address " + hex(address)), address_(address) {}

SchemaError::SchemaError(std::string path, const std::string& message)
    : Error(path + ": " + message), path_(std::move(path)) {}

const char* to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::Stack:
      return "stack";
    case RegionKind::Heap:
      return "heap";
    case RegionKind::Global:
      return "global";
  }
  return "?";
}

std::optional<RegionKind> region_kind_from_string(std::string_view name) {
  if (name == "stack") return RegionKind::Stack;
  if (name == "heap") return RegionKind::Heap;
  if (name == "global") return RegionKind::Global;
  return std::nullopt;
}

AddressSpace::AddressSpace(const SpaceConfig& config) {
  const std::array<std::pair<RegionKind, uint64_t>, 3> bases = {{
      {RegionKind::Stack, config.stack_base},
      {RegionKind::Heap, config.heap_base},
      {RegionKind::Global, config.global_base},
  }};
  for (auto [kind, base] : bases) {
    if (base >= kAddressLimit)
      throw ConfigError("lane base " + hex(base) + " outside 58-bit space");
    if (base % 0x1'0000 != 0)
      throw ConfigError("lane base " + hex(base) + " not 2^16-aligned");
  }
  for (size_t i = 0; i < bases.size(); ++i)
    for (size_t j = i + 1; j < bases.size(); ++j)
      if (bases[i].second == bases[j].second)
        throw ConfigError("lane bases overlap at " + hex(bases[i].second));

  for (auto [kind, base] : bases) {
    uint64_t limit = kAddressLimit;
    for (auto [other_kind, other_base] : bases)
      if (other_base > base) limit = std::min(limit, other_base);
    lane(kind) = Lane{base, limit};
  }
}

uint64_t AddressSpace::map_region(uint64_t start, uint64_t length,
                                  RegionKind kind) {
  if (length == 0) throw MapError("zero-length region at " + hex(start));
  if (start >= kAddressLimit || length > kAddressLimit - start)
    throw MapError("region " + hex(start) + "+" + std::to_string(length) +
                   " outside 58-bit space");

  auto next = regions_.lower_bound(start);
  if (next != regions_.begin()) {
    const auto& prev = std::prev(next)->second;
    if (prev.start + prev.length > start)
      throw MapError("region " + hex(start) + " overlaps " + hex(prev.start));
  }
  if (next != regions_.end() && next->first < start + length)
    throw MapError("region " + hex(start) + " overlaps " + hex(next->first));

  MappedRegion region{start, length, kind, std::vector<uint8_t>(length, 0)};
  regions_.emplace(start, std::move(region));
  return start;
}

uint64_t AddressSpace::bump(RegionKind kind, uint64_t alloc_size) {
  Lane& l = lane(kind);
  uint64_t base = (l.next + alloc_size - 1) & ~(alloc_size - 1);
  if (base < l.next || base >= l.limit || alloc_size > l.limit - base)
    throw OutOfMemoryError(std::string(to_string(kind)) + " lane exhausted");
  l.next = base + alloc_size;
  return base;
}

MappedRegion* AddressSpace::find(uint64_t addr) const {
  auto it = regions_.upper_bound(addr);
  if (it == regions_.begin()) return nullptr;
  --it;
  MappedRegion& region = const_cast<MappedRegion&>(it->second);
  if (addr - region.start >= region.length) return nullptr;
  cache_ = &region;
  return &region;
}

std::vector<uint8_t> AddressSpace::raw_read(uint64_t addr, uint64_t len) const {
  std::vector<uint8_t> out;
  out.reserve(len);
  for (uint64_t i = 0; i < len; ++i) out.push_back(read_byte(addr + i));
  return out;
}

void AddressSpace::raw_write(uint64_t addr, std::span<const uint8_t> bytes) {
  // Byte-stepped so a fault leaves exactly the in-bounds prefix committed.
  for (size_t i = 0; i < bytes.size(); ++i) write_byte(addr + i, bytes[i]);
}

std::map<uint64_t, std::vector<uint8_t>> AddressSpace::snapshot() const {
  std::map<uint64_t, std::vector<uint8_t>> out;
  for (const auto& [start, region] : regions_) out.emplace(start, region.bytes);
  return out;
}

}  // namespace s3lab
