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

#include "s3lab/corpus.hpp"

#include <bit>
#include <stdexcept>

#include "s3lab/minfat.hpp"

namespace s3lab {

namespace {

std::vector<uint8_t> filler(uint64_t count) {
  std::vector<uint8_t> out;
  out.reserve(count);
  for (uint64_t i = 0; i < count; ++i)
    out.push_back(static_cast<uint8_t>('a' + i % 26));
  return out;
}

InitSpec ascii_init(uint64_t count) {
  return {InitSpec::Kind::Ascii, filler(count)};
}

// Destination request size paired with each magnitude index.
constexpr uint64_t kDestSizes[] = {4, 10, 20};

Scenario corpus_scenario(RegionKind region, const std::string& fn,
                         uint64_t magnitude, size_t mag_index, bool bad) {
  uint64_t d = kDestSizes[mag_index];
  uint64_t a = std::bit_ceil(d + 1);  // dest allocation size

  // Geometry the prevention/attack expectations rely on: the guard requests
  // one byte (allocation size 2), so it lands exactly at dest_base + a and
  // its canary is its byte 0. Any transfer of a + magnitude bytes therefore
  // crosses into the canary.
  if (a % 2 != 0 || magnitude == 0 || d < 3)
    throw std::logic_error("corpus geometry violated");

  // Bytes the call writes from the dest argument onward.
  uint64_t write_span = bad ? a + magnitude : d;

  Scenario sc;
  sc.name = std::string(to_string(region)) + "_" + fn + "_m" +
            std::to_string(magnitude) + (bad ? "_bad" : "_good");

  AllocationSpec src;
  src.id = "src";
  src.region = region;
  AllocationSpec dest;
  dest.id = "dest";
  dest.region = region;
  dest.size = d;
  AllocationSpec guard;
  guard.id = "guard";
  guard.region = region;
  guard.size = 1;
  guard.init = {InitSpec::Kind::Zero, {}};
  guard.canary = uint8_t{0xc3};

  CallSpec call;
  call.fn = fn + "_ss";
  call.dest = ArgRef{"dest", 0};
  call.src = SrcArg(ArgRef{"src", 0});

  if (fn == "memcpy") {
    dest.init = {InitSpec::Kind::Zero, {}};
    src.size = write_span;
    src.init = ascii_init(write_span);
    call.n = write_span;
  } else if (fn == "strcpy") {
    dest.init = {InitSpec::Kind::Zero, {}};
    src.size = write_span;                // string + terminator
    src.init = ascii_init(write_span - 1);
  } else {  // strcat appends after the two-byte prefix
    dest.init = {InitSpec::Kind::Ascii, {'a', 'b'}};
    src.size = write_span - 2;
    src.init = ascii_init(write_span - 3);
  }

  sc.allocations = {src, dest, guard};
  sc.calls = {call};

  if (bad) {
    sc.expect[Policy::Legacy] = {std::nullopt, std::nullopt, false};
    sc.expect[Policy::AnnexK] = {"aborted", std::nullopt, std::nullopt};
    sc.expect[Policy::SMA] = {"completed", 1, true};
  } else {
    Expectation clean{"completed", std::nullopt, true};
    sc.expect[Policy::Legacy] = clean;
    sc.expect[Policy::AnnexK] = clean;
    sc.expect[Policy::SMA] = clean;
  }
  return sc;
}

struct SplitMix {
  uint64_t state;

  uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  uint64_t below(uint64_t n) { return next() % n; }
};

}  // namespace

std::vector<Scenario> gen_corpus(const CorpusSpec& spec) {
  std::vector<Scenario> out;
  for (RegionKind region : spec.regions)
    for (const std::string& fn : spec.functions)
      for (size_t mi = 0; mi < spec.magnitudes.size(); ++mi) {
        size_t size_index = mi % std::size(kDestSizes);
        out.push_back(
            corpus_scenario(region, fn, spec.magnitudes[mi], size_index, true));
        out.push_back(corpus_scenario(region, fn, spec.magnitudes[mi],
                                      size_index, false));
      }
  return out;
}

Scenario random_scenario(uint64_t seed) {
  SplitMix rng{seed * 0x9e3779b97f4a7c15ull + 0x243f6a8885a308d3ull};
  Scenario sc;
  sc.name = "fuzz_" + std::to_string(seed);

  size_t nalloc = 1 + rng.below(4);
  std::vector<uint64_t> sizes;
  for (size_t i = 0; i < nalloc; ++i) {
    AllocationSpec a;
    a.id = "a" + std::to_string(i);
    a.region = kRegionKinds[rng.below(3)];
    a.size = 1 + rng.below(128);
    sizes.push_back(a.size);
    uint64_t style = rng.below(10);
    if (style < 4) {
      a.init = {InitSpec::Kind::Zero, {}};
    } else if (style < 8) {
      std::vector<uint8_t> bytes;
      uint64_t len = rng.below(a.size + 1);
      for (uint64_t j = 0; j < len; ++j)
        bytes.push_back(static_cast<uint8_t>('a' + rng.below(26)));
      a.init = {InitSpec::Kind::Ascii, std::move(bytes)};
    } else {
      std::vector<uint8_t> bytes;
      uint64_t len = rng.below(a.size + 1);
      for (uint64_t j = 0; j < len; ++j)
        bytes.push_back(static_cast<uint8_t>(rng.below(256)));
      a.init = {InitSpec::Kind::Hex, std::move(bytes)};
    }
    if (rng.below(2) == 0)
      a.canary = static_cast<uint8_t>(1 + rng.below(255));
    sc.allocations.push_back(std::move(a));
  }

  // Offsets stay inside the allocation (the bounds window of an
  // out-of-allocation tagged address no longer matches its object); padding
  // offsets exercise small remaining capacities.
  auto pick_ref = [&](bool object_only) {
    size_t idx = rng.below(nalloc);
    uint64_t size = sizes[idx];
    uint64_t alloc = std::bit_ceil(size + 1);
    int64_t offset = 0;
    if (object_only || rng.below(100) < 80)
      offset = static_cast<int64_t>(rng.below(size));
    else
      offset = static_cast<int64_t>(rng.below(alloc));
    return ArgRef{"a" + std::to_string(idx), offset};
  };

  auto pick_src = [&]() -> SrcArg {
    if (rng.below(4) == 0) {
      std::vector<uint8_t> bytes;
      uint64_t len = rng.below(33);
      for (uint64_t j = 0; j < len; ++j)
        bytes.push_back(static_cast<uint8_t>('a' + rng.below(26)));
      return SrcArg(std::move(bytes));
    }
    return SrcArg(pick_ref(false));
  };

  auto pick_count = [&](const ArgRef& dest) {
    size_t idx = dest.id[1] - '0';
    uint64_t alloc = std::bit_ceil(sizes[idx] + 1);
    return rng.below(alloc + 65);
  };

  static const char* kFns[] = {"strcpy_ss",  "strncpy_ss", "strcat_ss",
                               "strncat_ss", "strnlen_ss", "strtok_ss",
                               "memcpy_ss",  "memmove_ss", "memset_ss",
                               "gets_ss"};
  static const char kDelimSet[] = ",;: |";

  size_t ncalls = 1 + rng.below(6);
  for (size_t i = 0; i < ncalls; ++i) {
    CallSpec c;
    c.fn = kFns[rng.below(10)];
    if (c.fn == "strcpy_ss" || c.fn == "strcat_ss") {
      c.dest = pick_ref(false);
      c.src = pick_src();
    } else if (c.fn == "strncpy_ss" || c.fn == "strncat_ss" ||
               c.fn == "memcpy_ss" || c.fn == "memmove_ss") {
      c.dest = pick_ref(false);
      c.src = pick_src();
      c.n = pick_count(*c.dest);
    } else if (c.fn == "strnlen_ss") {
      ArgRef s = pick_ref(false);
      c.n = pick_count(s);
      c.src = SrcArg(std::move(s));
    } else if (c.fn == "strtok_ss") {
      if (rng.below(10) < 7) c.src = SrcArg(pick_ref(true));
      std::string delims;
      uint64_t len = 1 + rng.below(3);
      for (uint64_t j = 0; j < len; ++j)
        delims.push_back(kDelimSet[rng.below(sizeof(kDelimSet) - 1)]);
      c.delims = std::move(delims);
    } else if (c.fn == "memset_ss") {
      c.dest = pick_ref(false);
      c.value = static_cast<uint8_t>(rng.below(256));
      c.n = pick_count(*c.dest);
    } else {  // gets_ss
      c.dest = pick_ref(false);
      std::string line;
      uint64_t len = rng.below(49);
      for (uint64_t j = 0; j < len; ++j)
        line.push_back(static_cast<char>('a' + rng.below(26)));
      c.line = std::move(line);
    }
    sc.calls.push_back(std::move(c));
  }
  return sc;
}

}  // namespace s3lab
