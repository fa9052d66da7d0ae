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

#include "s3lab/minfat.hpp"

#include <bit>

#include "s3lab/fmt_util.hpp"

namespace s3lab {

RoundedSize round_alloc_size(uint64_t requested) {
  if (requested == 0 || requested >= (uint64_t{1} << kMaxTag))
    throw SizeError("requested size " + std::to_string(requested) +
                    " outside [1, 2^57)");
  uint64_t alloc_size = std::bit_ceil(requested + 1);
  auto tag = static_cast<unsigned>(std::countr_zero(alloc_size));
  return {alloc_size, tag};
}

TaggedAddress encode(uint64_t addr, unsigned tag) {
  if (tag < kMinTag || tag > kMaxTag)
    throw EncodeError("tag " + std::to_string(tag) + " outside [1, 57]");
  if (addr >= kAddressLimit)
    throw EncodeError("address " + hex(addr) + " outside 58-bit space");
  return TaggedAddress::from_word((uint64_t{tag} << kTagShift) | addr);
}

Decoded decode(TaggedAddress p) {
  unsigned tag = p.tag();
  uint64_t alloc_size = tag == 0 ? 0 : uint64_t{1} << tag;
  return {tag, alloc_size, p.addr()};
}


TaggedAddress MinFatAllocator::allocate(uint64_t requested, RegionKind kind) {
  auto [alloc_size, tag] = round_alloc_size(requested);
  uint64_t base = space_->bump(kind, alloc_size);
  space_->map_region(base, alloc_size, kind);
  by_base_[base] = allocations_.size();
  allocations_.push_back({base, alloc_size, requested, kind, true});
  return encode(base, tag);
}

void MinFatAllocator::deallocate(TaggedAddress p) {
  if (!p.tagged()) throw FreeError("free of untagged address");
  if (p.addr() != base_of(p))
    throw FreeError("free of interior address " + hex(p.addr()));
  auto it = by_base_.find(p.addr());
  if (it == by_base_.end())
    throw FreeError("free of unknown address " + hex(p.addr()));
  Allocation& a = allocations_[it->second];
  if (!a.live) throw FreeError("double free of " + hex(p.addr()));
  a.live = false;
}

const Allocation* MinFatAllocator::find(uint64_t base) const {
  auto it = by_base_.find(base);
  return it == by_base_.end() ? nullptr : &allocations_[it->second];
}

}  // namespace s3lab
