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

#include "s3lab/oracle.hpp"

#include <map>
#include <stdexcept>
#include <variant>
#include <vector>

namespace s3lab {

namespace {

constexpr uint64_t kMask = (uint64_t{1} << 58) - 1;

struct Ptr {
  uint64_t addr = 0;
  unsigned tag = 0;
  bool valid = false;
};

uint64_t plo(const Ptr& p) {
  uint64_t a = uint64_t{1} << p.tag;
  return p.addr / a * a;
}

uint64_t phi(const Ptr& p) { return plo(p) + (uint64_t{1} << p.tag); }

uint64_t clamp(uint64_t addr, uint64_t lower, uint64_t upper) {
  if (addr < lower) return lower;
  if (addr >= upper) return upper - 1;
  return addr;
}

struct Arena {
  std::map<uint64_t, std::vector<uint8_t>> regions;
  uint64_t cursor_stack = 0x2000'0000;
  uint64_t cursor_heap = 0x1000'0000;
  uint64_t cursor_global = 0x3000'0000;

  uint64_t& cursor(RegionKind kind) {
    switch (kind) {
      case RegionKind::Stack:
        return cursor_stack;
      case RegionKind::Heap:
        return cursor_heap;
      case RegionKind::Global:
        return cursor_global;
    }
    return cursor_heap;
  }

  Ptr allocate(uint64_t requested, RegionKind kind) {
    uint64_t alloc = 2;
    unsigned tag = 1;
    while (alloc <= requested) {
      alloc <<= 1;
      ++tag;
    }
    uint64_t& cur = cursor(kind);
    uint64_t base = (cur + alloc - 1) / alloc * alloc;
    cur = base + alloc;
    regions.emplace(base, std::vector<uint8_t>(alloc, 0));
    return {base, tag, true};
  }

  uint8_t* byte(uint64_t addr) {
    auto it = regions.upper_bound(addr);
    if (it == regions.begin()) return nullptr;
    --it;
    if (addr - it->first >= it->second.size()) return nullptr;
    return &it->second[addr - it->first];
  }

  uint8_t rd(const Ptr& p, uint64_t i) {
    uint64_t at = clamp((p.addr + i) & kMask, plo(p), phi(p));
    uint8_t* b = byte(at);
    if (!b) throw std::logic_error("oracle read outside arena");
    return *b;
  }

  void wr(const Ptr& p, uint64_t i, uint8_t v) {
    uint64_t at = clamp((p.addr + i) & kMask, plo(p), phi(p));
    uint8_t* b = byte(at);
    if (!b) throw std::logic_error("oracle write outside arena");
    *b = v;
  }

  uint64_t digest() const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& [start, bytes] : regions)
      for (uint8_t b : bytes) h = (h ^ b) * 0x100000001b3ull;
    return h;
  }
};

bool overlap(uint64_t a, uint64_t alen, uint64_t b, uint64_t blen) {
  return alen != 0 && blen != 0 && a < b + blen && b < a + alen;
}

struct Interp {
  const Scenario& sc;
  Arena arena;
  std::map<std::string, Ptr> by_id;
  std::map<size_t, Ptr> literals;
  Ptr tok_state;

  explicit Interp(const Scenario& scenario) : sc(scenario) {
    for (const AllocationSpec& a : sc.allocations) {
      Ptr p = arena.allocate(a.size, a.region);
      by_id[a.id] = p;
      for (size_t i = 0; i < a.init.bytes.size(); ++i)
        *arena.byte(p.addr + i) = a.init.bytes[i];
      if (a.canary) *arena.byte(p.addr + a.size - 1) = *a.canary;
    }
    for (size_t i = 0; i < sc.calls.size(); ++i) {
      const CallSpec& c = sc.calls[i];
      if (!c.src) continue;
      if (const auto* bytes = std::get_if<std::vector<uint8_t>>(&*c.src)) {
        Ptr p = arena.allocate(bytes->size() + 1, RegionKind::Global);
        for (size_t j = 0; j < bytes->size(); ++j)
          *arena.byte(p.addr + j) = (*bytes)[j];
        literals[i] = p;
      }
    }
  }

  Ptr resolve_dest(const CallSpec& c) {
    if (!c.dest) return {};
    Ptr p = by_id.at(c.dest->id);
    p.addr = (p.addr + static_cast<uint64_t>(c.dest->offset)) & kMask;
    return p;
  }

  Ptr resolve_src(size_t index) {
    const CallSpec& c = sc.calls[index];
    if (!c.src) return {};
    if (const ArgRef* ref = std::get_if<ArgRef>(&*c.src)) {
      Ptr p = by_id.at(ref->id);
      p.addr = (p.addr + static_cast<uint64_t>(ref->offset)) & kMask;
      return p;
    }
    return literals.at(index);
  }

  // Bytes a string copy would read from s, terminator included, capped at
  // the remaining capacity.
  uint64_t extent(const Ptr& s) {
    uint64_t rem = phi(s) > s.addr ? phi(s) - s.addr : 0;
    for (uint64_t i = 0; i < rem; ++i)
      if (arena.rd(s, i) == 0) return i + 1;
    return rem;
  }

  // Copy stopping at the first zero byte; once both streams have saturated,
  // one more iteration reaches the stable state.
  void cstring_copy(const Ptr& d, uint64_t t, const Ptr& s) {
    uint64_t d_rem = phi(d) > d.addr + t ? phi(d) - d.addr - t : 0;
    uint64_t s_rem = phi(s) > s.addr ? phi(s) - s.addr : 0;
    uint64_t limit = d_rem > s_rem ? d_rem : s_rem;
    for (uint64_t i = 0;; ++i) {
      uint8_t b = arena.rd(s, i);
      arena.wr(d, t + i, b);
      if (b == 0) break;
      if (i >= limit) break;
    }
  }

  // Append point: offset of d's terminator, or the last in-bounds byte when
  // none exists before the upper bound.
  uint64_t append_point(const Ptr& d) {
    uint64_t rem = phi(d) > d.addr ? phi(d) - d.addr : 0;
    for (uint64_t i = 0; i < rem; ++i)
      if (arena.rd(d, i) == 0) return i;
    return rem > 0 ? rem - 1 : 0;
  }

  void run_call(size_t index) {
    const CallSpec& c = sc.calls[index];
    if (c.fn == "strcpy_ss") {
      Ptr d = resolve_dest(c), s = resolve_src(index);
      if (!d.valid || !s.valid) return;
      uint64_t m = extent(s);
      if (overlap(d.addr, m, s.addr, m)) return;
      cstring_copy(d, 0, s);
    } else if (c.fn == "strncpy_ss") {
      Ptr d = resolve_dest(c), s = resolve_src(index);
      uint64_t n = *c.n;
      if (!d.valid || !s.valid || n == 0) return;
      if (overlap(d.addr, n, s.addr, n)) return;
      bool seen = false;
      for (uint64_t i = 0; i < n; ++i) {
        uint8_t b = 0;
        if (!seen) {
          b = arena.rd(s, i);
          if (b == 0) seen = true;
        }
        arena.wr(d, i, b);
      }
    } else if (c.fn == "strcat_ss" || c.fn == "strncat_ss") {
      Ptr d = resolve_dest(c), s = resolve_src(index);
      if (!d.valid || !s.valid) return;
      if (c.fn == "strncat_ss" && *c.n == 0) return;
      uint64_t t = append_point(d);
      if (c.fn == "strcat_ss") {
        uint64_t m = extent(s);
        if (overlap(d.addr + t, m, s.addr, m)) return;
        cstring_copy(d, t, s);
      } else {
        uint64_t n = *c.n;
        uint64_t m = extent(s);
        if (m > n) m = n;
        if (overlap(d.addr + t, m + 1, s.addr, m)) return;
        uint64_t i = 0;
        bool done = false;
        for (; i < n; ++i) {
          uint8_t b = arena.rd(s, i);
          if (b == 0) {
            arena.wr(d, t + i, 0);
            done = true;
            break;
          }
          arena.wr(d, t + i, b);
        }
        if (!done) arena.wr(d, t + n, 0);
      }
    } else if (c.fn == "strnlen_ss") {
      // no arena effect
    } else if (c.fn == "strtok_ss") {
      Ptr start = c.src ? resolve_src(index) : tok_state;
      if (!start.valid) {
        tok_state = {};
        return;
      }
      auto is_delim = [&](uint8_t b) {
        return c.delims->find(static_cast<char>(b)) != std::string::npos;
      };
      uint64_t hi = phi(start);
      uint64_t i = 0;
      for (;; ++i) {
        if (start.addr + i >= hi) {
          tok_state = {};
          return;
        }
        uint8_t b = arena.rd(start, i);
        if (b == 0) {
          tok_state = {};
          return;
        }
        if (!is_delim(b)) break;
      }
      for (;; ++i) {
        if (start.addr + i >= hi) {
          arena.wr(start, i, 0);  // clamps onto the last byte
          tok_state = {};
          return;
        }
        uint8_t b = arena.rd(start, i);
        if (b == 0) {
          tok_state = {};
          return;
        }
        if (is_delim(b)) {
          arena.wr(start, i, 0);
          uint64_t next = start.addr + i + 1;
          if (next >= hi)
            tok_state = {};
          else
            tok_state = {next, start.tag, true};
          return;
        }
      }
    } else if (c.fn == "memcpy_ss" || c.fn == "memmove_ss") {
      Ptr d = resolve_dest(c), s = resolve_src(index);
      uint64_t n = *c.n;
      if (!d.valid || !s.valid || n == 0) return;
      bool as_move = c.fn == "memmove_ss" || overlap(d.addr, n, s.addr, n);
      if (as_move) {
        std::vector<uint8_t> buf(n);
        for (uint64_t i = 0; i < n; ++i) buf[i] = arena.rd(s, i);
        for (uint64_t i = 0; i < n; ++i) arena.wr(d, i, buf[i]);
      } else {
        for (uint64_t i = 0; i < n; ++i) arena.wr(d, i, arena.rd(s, i));
      }
    } else if (c.fn == "memset_ss") {
      Ptr d = resolve_dest(c);
      uint64_t n = *c.n;
      if (!d.valid || n == 0) return;
      for (uint64_t i = 0; i < n; ++i) arena.wr(d, i, *c.value);
    } else if (c.fn == "gets_ss") {
      Ptr d = resolve_dest(c);
      if (!d.valid) return;
      const std::string& line = *c.line;
      for (size_t i = 0; i < line.size(); ++i)
        arena.wr(d, i, static_cast<uint8_t>(line[i]));
      arena.wr(d, line.size(), 0);
    }
  }
};

}  // namespace

uint64_t oracle_run(const Scenario& scenario) {
  Interp interp(scenario);
  for (size_t i = 0; i < scenario.calls.size(); ++i) interp.run_call(i);
  return interp.arena.digest();
}

}  // namespace s3lab
