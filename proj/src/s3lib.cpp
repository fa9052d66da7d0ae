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

#include "s3lab/s3lib.hpp"

#include <algorithm>
#include <vector>

namespace s3lab {

const char* to_string(Policy policy) {
  switch (policy) {
    case Policy::Legacy:
      return "legacy";
    case Policy::AnnexK:
      return "annexk";
    case Policy::SMA:
      return "sma";
  }
  return "?";
}

const char* to_string(Status status) {
  switch (status) {
    case Status::Ok:
      return "Ok";
    case Status::ErrNull:
      return "ErrNull";
    case Status::ErrZeroLen:
      return "ErrZeroLen";
    case Status::ErrOverlap:
      return "ErrOverlap";
    case Status::ErrBounds:
      return "ErrBounds";
    case Status::ErrUntagged:
      return "ErrUntagged";
  }
  return "?";
}

std::optional<Policy> policy_from_string(std::string_view name) {
  if (name == "legacy") return Policy::Legacy;
  if (name == "annexk") return Policy::AnnexK;
  if (name == "sma") return Policy::SMA;
  return std::nullopt;
}

AbortSignal::AbortSignal(std::string function, ViolationRecord record)
    : std::runtime_error(function + ": runtime-constraint violation"),
      function_(std::move(function)),
      record_(std::move(record)) {}

HandleResult handle_violation(LibraryContext& ctx, ViolationRecord record) {
  ctx.violation_log.append(std::move(record));
  return ctx.policy == Policy::AnnexK ? HandleResult::Abort
                                      : HandleResult::Continue;
}

namespace {

constexpr uint64_t kNoBound = UINT64_MAX;

void require_rsize(uint64_t n) {
  if (n > kRSizeMax) throw SizeError("count exceeds 2^57-1");
}

bool ranges_overlap(uint64_t a, uint64_t alen, uint64_t b, uint64_t blen) {
  return alen != 0 && blen != 0 && a < b + blen && b < a + alen;
}

/// Resolved pointer argument. `checked` means bounds are known and enforced;
/// tag-0 arguments run unchecked through raw access.
struct PtrArg {
  TaggedAddress ta;
  uint64_t addr = 0;
  bool is_null = true;
  bool checked = false;
  uint64_t lower = 0;
  uint64_t upper = 0;
};

/// Per-call plumbing shared by every function: status bookkeeping, the
/// runtime-constraint dispatch and the policy-specific byte accessors.
class Call {
 public:
  Call(LibraryContext& ctx, AddressSpace& space, const char* fn,
       bool zero_dest_on_abort)
      : ctx_(ctx), space_(space), fn_(fn), zero_dest_(zero_dest_on_abort) {
    ctx_.last_status = Status::Ok;
  }

  Policy policy() const { return ctx_.policy; }

  PtrArg arg(TaggedAddress ta) const {
    PtrArg a;
    a.ta = ta;
    a.addr = ta.addr();
    a.is_null = a.addr == 0;
    a.checked = ta.tagged();
    if (a.checked) {
      auto [lower, upper] = bounds_of(ta);
      a.lower = lower;
      a.upper = upper;
    }
    return a;
  }

  void set_dest(const PtrArg& d) {
    dest_ = d;
    have_dest_ = true;
  }

  void note(Status st) {
    if (ctx_.last_status == Status::Ok) ctx_.last_status = st;
  }

  /// Null / zero-length stop: records, sets the status, and under AnnexK
  /// terminates the call. The caller returns early afterwards.
  void fail_early(ViolationKind kind, Status st, uint64_t attempted) {
    ViolationAction action = policy() == Policy::AnnexK
                                 ? ViolationAction::Aborted
                                 : ViolationAction::Ignored;
    raise({kind, std::string(fn_), attempted, std::nullopt, 0, action}, st);
  }

  /// Tag-0 argument: record-and-proceed by default, constraint violation in
  /// strict mode.
  void untagged_check(const PtrArg& a) {
    if (a.ta.tagged() || a.is_null) return;
    note(Status::ErrUntagged);
    ViolationRecord rec{ViolationKind::UntaggedArgument,
                        std::string(fn_),
                        a.addr,
                        std::nullopt,
                        0,
                        ctx_.untagged_strict ? ViolationAction::Aborted
                                             : ViolationAction::Proceeded};
    if (ctx_.untagged_strict) {
      ctx_.violation_log.append(rec);
      abort_with(rec);
    }
    ctx_.violation_log.append(std::move(rec));
  }

  /// Overlap on a string function: no transfer takes place.
  void overlap_stop(uint64_t attempted) {
    ViolationAction action = policy() == Policy::AnnexK
                                 ? ViolationAction::Aborted
                                 : ViolationAction::Ignored;
    raise({ViolationKind::Overlap, std::string(fn_), attempted, std::nullopt,
           0, action},
          Status::ErrOverlap);
  }

  /// Overlap on memcpy_ss: the transfer continues with move semantics.
  void overlap_degrade(uint64_t attempted) {
    ViolationAction action = policy() == Policy::AnnexK
                                 ? ViolationAction::Aborted
                                 : ViolationAction::Proceeded;
    raise({ViolationKind::Overlap, std::string(fn_), attempted, std::nullopt,
           0, action},
          Status::ErrOverlap);
  }

  /// Scan ran into the allocation's upper bound (strcat_ss append-point
  /// search, strtok_ss token scans).
  void boundary_read(const PtrArg& a, int64_t offset) {
    uint64_t attempted = (a.addr + static_cast<uint64_t>(offset)) & kAddressMask;
    if (policy() == Policy::AnnexK) {
      raise({ViolationKind::OverflowRead, std::string(fn_), attempted,
             std::nullopt, offset, ViolationAction::Aborted},
            Status::ErrBounds);
      return;
    }
    note(Status::ErrBounds);
    ctx_.violation_log.append({ViolationKind::OverflowRead, std::string(fn_),
                               attempted, a.upper - 1, offset,
                               ViolationAction::Saturated});
  }

  uint8_t load(const PtrArg& a, int64_t i) {
    uint64_t attempted = (a.addr + static_cast<uint64_t>(i)) & kAddressMask;
    if (!a.checked) return space_.read_byte(attempted);
    if (policy() == Policy::SMA) {
#ifdef S3LAB_SMA_DEST_ONLY
      return space_.read_byte(attempted);
#else
      uint8_t v = 0;
      if (sma_read(space_, a.ta, i, v, ctx_.violation_log, fn_))
        note(Status::ErrBounds);
      return v;
#endif
    }
    if (attempted >= a.upper)
      raise({ViolationKind::OverflowRead, std::string(fn_), attempted,
             std::nullopt, i, ViolationAction::Aborted},
            Status::ErrBounds);
    if (attempted < a.lower)
      raise({ViolationKind::UnderflowRead, std::string(fn_), attempted,
             std::nullopt, i, ViolationAction::Aborted},
            Status::ErrBounds);
    return space_.read_byte(attempted);
  }

  void store(const PtrArg& a, int64_t i, uint8_t v) {
    uint64_t attempted = (a.addr + static_cast<uint64_t>(i)) & kAddressMask;
    if (!a.checked) {
      space_.write_byte(attempted, v);
      return;
    }
    if (policy() == Policy::SMA) {
      if (sma_write(space_, a.ta, i, v, ctx_.violation_log, fn_))
        note(Status::ErrBounds);
      return;
    }
    if (attempted >= a.upper)
      raise({ViolationKind::OverflowWrite, std::string(fn_), attempted,
             std::nullopt, i, ViolationAction::Aborted},
            Status::ErrBounds);
    if (attempted < a.lower)
      raise({ViolationKind::UnderflowWrite, std::string(fn_), attempted,
             std::nullopt, i, ViolationAction::Aborted},
            Status::ErrBounds);
    space_.write_byte(attempted, v);
  }

  /// Accounts writes an optimized transfer skipped because the final write
  /// overlaps them all at upper-1.
  void ignored_overflow_run(const PtrArg& dest, int64_t first_offset,
                            uint64_t count) {
    if (count == 0) return;
    note(Status::ErrBounds);
    ViolationRecord proto{ViolationKind::OverflowWrite,
                          std::string(fn_),
                          (dest.addr + static_cast<uint64_t>(first_offset)) &
                              kAddressMask,
                          dest.upper - 1,
                          first_offset,
                          ViolationAction::Ignored};
    ctx_.violation_log.append_run(proto, count);
  }

  void raise(ViolationRecord rec, Status st) {
    note(st);
    ViolationRecord copy = rec;
    if (handle_violation(ctx_, std::move(rec)) == HandleResult::Abort)
      abort_with(copy);
  }

  [[noreturn]] void abort_with(const ViolationRecord& rec) {
    if (zero_dest_ && have_dest_ && dest_.checked && !dest_.is_null)
      space_.write_byte(saturate(dest_.addr, dest_.lower, dest_.upper), 0);
    throw AbortSignal(std::string(fn_), rec);
  }

  LibraryContext& ctx_;
  AddressSpace& space_;
  const char* fn_;
  bool zero_dest_;
  PtrArg dest_;
  bool have_dest_ = false;
};

/// First write index (relative to dest_from) from which every write lands on
/// the same clamped byte.
uint64_t write_static_from(const PtrArg& dest, int64_t dest_from) {
  if (!dest.checked) return kNoBound;
  int64_t rem = static_cast<int64_t>(dest.upper) -
                static_cast<int64_t>(dest.addr) - dest_from;
  return rem <= 0 ? 0 : static_cast<uint64_t>(rem);
}

/// First read index from which every read returns the same clamped byte.
uint64_t read_static_from(const Call& call, const PtrArg& src) {
  if (!src.checked) return kNoBound;
#ifdef S3LAB_SMA_DEST_ONLY
  if (call.policy() == Policy::SMA) return kNoBound;
#endif
  (void)call;
  int64_t rem =
      static_cast<int64_t>(src.upper) - static_cast<int64_t>(src.addr);
  return rem <= 0 ? 0 : static_cast<uint64_t>(rem);
}

/// Counted transfer shared by the checked policies. produce(i) supplies the
/// value of byte i, performing any source reads; `value_static_from` is the
/// first index from which produce repeats one value with no fresh source
/// access. Once both the value and the write target are static, only the
/// final byte is written and the skipped repetitions are logged as Ignored —
/// the arena result is byte-identical to the plain per-byte loop.
template <typename Produce>
void transfer_counted(Call& call, const PtrArg& dest, int64_t dest_from,
                      uint64_t n, uint64_t value_static_from,
                      Produce&& produce) {
  uint64_t write_static = write_static_from(dest, dest_from);
  uint64_t live = n;
  if (write_static != kNoBound && value_static_from != kNoBound)
    live = std::min(n, std::max(write_static, value_static_from));
  for (uint64_t i = 0; i < live; ++i)
    call.store(dest, dest_from + static_cast<int64_t>(i), produce(i));
  if (live < n) {
    uint8_t v = produce(n - 1);
    if (n - 1 > live)
      call.ignored_overflow_run(dest, dest_from + static_cast<int64_t>(live),
                                n - 1 - live);
    call.store(dest, dest_from + static_cast<int64_t>(n - 1), v);
  }
}

/// Move semantics: all reads happen before any write.
void transfer_move(Call& call, const PtrArg& dest, const PtrArg& src,
                   uint64_t n) {
  uint64_t write_static = write_static_from(dest, 0);
  uint64_t value_static = read_static_from(call, src);
  uint64_t live = n;
  if (write_static != kNoBound && value_static != kNoBound)
    live = std::min(n, std::max(write_static, value_static));
  std::vector<uint8_t> buf;
  for (uint64_t i = 0; i < live; ++i)
    buf.push_back(call.load(src, static_cast<int64_t>(i)));
  bool tail = live < n;
  uint8_t last = tail ? call.load(src, static_cast<int64_t>(n - 1)) : 0;
  for (uint64_t i = 0; i < live; ++i)
    call.store(dest, static_cast<int64_t>(i), buf[i]);
  if (tail) {
    if (n - 1 > live)
      call.ignored_overflow_run(dest, static_cast<int64_t>(live),
                                n - 1 - live);
    call.store(dest, static_cast<int64_t>(n - 1), last);
  }
}

/// Terminator-driven copy. Stops after writing the first 0 byte; when both
/// streams have saturated past their upper bounds, any further iteration
/// would repeat the same read and write verbatim, so the loop stops at that
/// fixpoint.
void copy_cstring(Call& call, const PtrArg& dest, int64_t dest_from,
                  const PtrArg& src) {
  uint64_t write_static = write_static_from(dest, dest_from);
  uint64_t value_static = read_static_from(call, src);
  bool bounded = write_static != kNoBound && value_static != kNoBound;
  uint64_t limit = bounded ? std::max(write_static, value_static) : 0;
  for (uint64_t i = 0;; ++i) {
    uint8_t b = call.load(src, static_cast<int64_t>(i));
    call.store(dest, dest_from + static_cast<int64_t>(i), b);
    if (b == 0) break;
    if (bounded && i >= limit) break;
  }
}

/// String extent for the overlap constraint: bytes the copy would read from
/// src, terminator included, capped at the remaining capacity. Mirrors the
/// transfer's clamped read sequence without logging.
uint64_t cstr_extent(AddressSpace& space, const PtrArg& src) {
  uint64_t rem = src.upper > src.addr ? src.upper - src.addr : 0;
  for (uint64_t i = 0; i < rem; ++i) {
    uint64_t at =
        saturate((src.addr + i) & kAddressMask, src.lower, src.upper);
    if (space.read_byte(at) == 0) return i + 1;
  }
  return rem;
}

// Unchecked reference behavior: raw access through masked addresses, exactly
// what the deprecated functions do. May corrupt neighbors or fault.
namespace legacy {

inline uint64_t m(uint64_t a) { return a & kAddressMask; }

void do_strcpy(AddressSpace& s, uint64_t d, uint64_t src) {
  for (uint64_t i = 0;; ++i) {
    uint8_t b = s.read_byte(m(src + i));
    s.write_byte(m(d + i), b);
    if (b == 0) break;
  }
}

void do_strncpy(AddressSpace& s, uint64_t d, uint64_t src, uint64_t n) {
  bool seen = false;
  for (uint64_t i = 0; i < n; ++i) {
    uint8_t b = 0;
    if (!seen) {
      b = s.read_byte(m(src + i));
      if (b == 0) seen = true;
    }
    s.write_byte(m(d + i), b);
  }
}

uint64_t do_strlen(AddressSpace& s, uint64_t p) {
  for (uint64_t i = 0;; ++i)
    if (s.read_byte(m(p + i)) == 0) return i;
}

void do_strncat(AddressSpace& s, uint64_t d, uint64_t src, uint64_t n) {
  uint64_t t = do_strlen(s, d);
  uint64_t i = 0;
  for (; i < n; ++i) {
    uint8_t b = s.read_byte(m(src + i));
    if (b == 0) break;
    s.write_byte(m(d + t + i), b);
  }
  s.write_byte(m(d + t + i), 0);
}

void do_memcpy(AddressSpace& s, uint64_t d, uint64_t src, uint64_t n) {
  for (uint64_t i = 0; i < n; ++i)
    s.write_byte(m(d + i), s.read_byte(m(src + i)));
}

void do_memmove(AddressSpace& s, uint64_t d, uint64_t src, uint64_t n) {
  std::vector<uint8_t> buf;
  for (uint64_t i = 0; i < n; ++i) buf.push_back(s.read_byte(m(src + i)));
  for (uint64_t i = 0; i < n; ++i) s.write_byte(m(d + i), buf[i]);
}

void do_memset(AddressSpace& s, uint64_t d, uint8_t v, uint64_t n) {
  for (uint64_t i = 0; i < n; ++i) s.write_byte(m(d + i), v);
}

void do_gets(AddressSpace& s, uint64_t d, std::span<const uint8_t> line) {
  for (size_t i = 0; i < line.size(); ++i) s.write_byte(m(d + i), line[i]);
  s.write_byte(m(d + line.size()), 0);
}

}  // namespace legacy

}  // namespace

TaggedAddress strcpy_ss(LibraryContext& ctx, AddressSpace& space,
                        TaggedAddress dest, TaggedAddress src) {
  Call call(ctx, space, "strcpy_ss", true);
  if (ctx.policy == Policy::Legacy) {
    legacy::do_strcpy(space, dest.addr(), src.addr());
    return dest;
  }
  PtrArg d = call.arg(dest);
  call.set_dest(d);
  PtrArg s = call.arg(src);
  if (d.is_null) {
    call.fail_early(ViolationKind::NullArgument, Status::ErrNull, 0);
    return dest;
  }
  if (s.is_null) {
    call.fail_early(ViolationKind::NullArgument, Status::ErrNull, 0);
    return dest;
  }
  call.untagged_check(d);
  call.untagged_check(s);
  if (d.checked && s.checked) {
    uint64_t m = cstr_extent(space, s);
    if (ranges_overlap(d.addr, m, s.addr, m)) {
      call.overlap_stop(d.addr);
      return dest;
    }
  }
  copy_cstring(call, d, 0, s);
  return dest;
}

TaggedAddress strncpy_ss(LibraryContext& ctx, AddressSpace& space,
                         TaggedAddress dest, TaggedAddress src, uint64_t n) {
  require_rsize(n);
  Call call(ctx, space, "strncpy_ss", true);
  if (ctx.policy == Policy::Legacy) {
    legacy::do_strncpy(space, dest.addr(), src.addr(), n);
    return dest;
  }
  PtrArg d = call.arg(dest);
  call.set_dest(d);
  PtrArg s = call.arg(src);
  if (d.is_null || s.is_null) {
    call.fail_early(ViolationKind::NullArgument, Status::ErrNull, 0);
    return dest;
  }
  if (n == 0) {
    call.fail_early(ViolationKind::ZeroLength, Status::ErrZeroLen, d.addr);
    return dest;
  }
  call.untagged_check(d);
  call.untagged_check(s);
  if (d.checked && s.checked &&
      ranges_overlap(d.addr, n, s.addr, n)) {
    call.overlap_stop(d.addr);
    return dest;
  }
  bool seen = false;
  transfer_counted(call, d, 0, n, read_static_from(call, s), [&](uint64_t i) {
    if (seen) return uint8_t{0};
    uint8_t b = call.load(s, static_cast<int64_t>(i));
    if (b == 0) seen = true;
    return b;
  });
  return dest;
}

namespace {

/// Finds the append point for the concatenating functions: offset of dest's
/// terminator, or the last in-bounds byte (with an OverflowRead record) when
/// no terminator exists before the upper bound.
int64_t append_point(Call& call, AddressSpace& space, const PtrArg& d) {
  if (!d.checked) {
    // foreign pointer: raw scan, unbounded
    for (int64_t i = 0;; ++i)
      if (space.read_byte((d.addr + static_cast<uint64_t>(i)) & kAddressMask) ==
          0)
        return i;
  }
  for (int64_t i = 0;; ++i) {
    uint64_t attempted = (d.addr + static_cast<uint64_t>(i)) & kAddressMask;
    if (attempted >= d.upper) {
      call.boundary_read(d, i);
      return i > 0 ? i - 1 : 0;
    }
    uint8_t b = call.load(d, i);
    if (b == 0) return i;
  }
}

}  // namespace

TaggedAddress strcat_ss(LibraryContext& ctx, AddressSpace& space,
                        TaggedAddress dest, TaggedAddress src) {
  Call call(ctx, space, "strcat_ss", true);
  if (ctx.policy == Policy::Legacy) {
    uint64_t t = legacy::do_strlen(space, dest.addr());
    legacy::do_strcpy(space, dest.addr() + t, src.addr());
    return dest;
  }
  PtrArg d = call.arg(dest);
  call.set_dest(d);
  PtrArg s = call.arg(src);
  if (d.is_null || s.is_null) {
    call.fail_early(ViolationKind::NullArgument, Status::ErrNull, 0);
    return dest;
  }
  call.untagged_check(d);
  call.untagged_check(s);
  // The append point determines the write range, so the scan precedes the
  // overlap constraint.
  int64_t t = append_point(call, space, d);
  if (d.checked && s.checked) {
    uint64_t m = cstr_extent(space, s);
    if (ranges_overlap(d.addr + static_cast<uint64_t>(t), m, s.addr, m)) {
      call.overlap_stop(d.addr);
      return dest;
    }
  }
  copy_cstring(call, d, t, s);
  return dest;
}

TaggedAddress strncat_ss(LibraryContext& ctx, AddressSpace& space,
                         TaggedAddress dest, TaggedAddress src, uint64_t n) {
  require_rsize(n);
  Call call(ctx, space, "strncat_ss", true);
  if (ctx.policy == Policy::Legacy) {
    legacy::do_strncat(space, dest.addr(), src.addr(), n);
    return dest;
  }
  PtrArg d = call.arg(dest);
  call.set_dest(d);
  PtrArg s = call.arg(src);
  if (d.is_null || s.is_null) {
    call.fail_early(ViolationKind::NullArgument, Status::ErrNull, 0);
    return dest;
  }
  if (n == 0) {
    call.fail_early(ViolationKind::ZeroLength, Status::ErrZeroLen, d.addr);
    return dest;
  }
  call.untagged_check(d);
  call.untagged_check(s);
  int64_t t = append_point(call, space, d);
  if (d.checked && s.checked) {
    uint64_t m = std::min(cstr_extent(space, s), n);
    if (ranges_overlap(d.addr + static_cast<uint64_t>(t), m + 1, s.addr, m)) {
      call.overlap_stop(d.addr);
      return dest;
    }
  }
  // At most n source bytes, then always a terminator.
  uint64_t write_static = write_static_from(d, t);
  uint64_t value_static = read_static_from(call, s);
  bool seen = false;
  uint64_t i = 0;
  while (i < n) {
    if (write_static != kNoBound && value_static != kNoBound &&
        i >= write_static && i >= value_static) {
      // Every remaining data write lands on the clamped last byte and is
      // then overwritten by the terminator.
      uint8_t c = call.load(s, static_cast<int64_t>(i));
      if (c == 0) {
        call.store(d, t + static_cast<int64_t>(i), 0);
        seen = true;
      } else {
        call.ignored_overflow_run(d, t + static_cast<int64_t>(i), n - i);
      }
      break;
    }
    uint8_t b = call.load(s, static_cast<int64_t>(i));
    if (b == 0) {
      call.store(d, t + static_cast<int64_t>(i), 0);
      seen = true;
      break;
    }
    call.store(d, t + static_cast<int64_t>(i), b);
    ++i;
  }
  if (!seen) call.store(d, t + static_cast<int64_t>(n), 0);
  return dest;
}

uint64_t strnlen_ss(LibraryContext& ctx, AddressSpace& space, TaggedAddress s,
                    uint64_t maxsize) {
  require_rsize(maxsize);
  Call call(ctx, space, "strnlen_ss", false);
  if (ctx.policy == Policy::Legacy) {
    for (uint64_t i = 0; i < maxsize; ++i)
      if (space.read_byte((s.addr() + i) & kAddressMask) == 0) return i;
    return maxsize;
  }
  PtrArg a = call.arg(s);
  if (a.is_null) {
    call.fail_early(ViolationKind::NullArgument, Status::ErrNull, 0);
    return 0;
  }
  call.untagged_check(a);
  if (!a.checked) {
    for (uint64_t i = 0; i < maxsize; ++i)
      if (space.read_byte((a.addr + i) & kAddressMask) == 0) return i;
    return maxsize;
  }
  uint64_t capacity = a.upper > a.addr ? a.upper - a.addr : 0;
  uint64_t bound = std::min(maxsize, capacity);
  for (uint64_t i = 0; i < bound; ++i)
    if (call.load(a, static_cast<int64_t>(i)) == 0) return i;
  return bound;
}

std::optional<TaggedAddress> strtok_ss(LibraryContext& ctx, AddressSpace& space,
                                       std::optional<TaggedAddress> s,
                                       std::string_view delims) {
  Call call(ctx, space, "strtok_ss", false);
  std::optional<TaggedAddress> start = s.has_value() ? s : ctx.strtok_state;
  auto is_delim = [&](uint8_t b) {
    return delims.find(static_cast<char>(b)) != std::string_view::npos;
  };

  if (ctx.policy == Policy::Legacy) {
    if (!start) {
      ctx.strtok_state.reset();
      return std::nullopt;
    }
    uint64_t p = start->addr();
    uint64_t i = 0;
    for (;; ++i) {
      uint8_t b = space.read_byte(legacy::m(p + i));
      if (b == 0) {
        ctx.strtok_state.reset();
        return std::nullopt;
      }
      if (!is_delim(b)) break;
    }
    uint64_t tok = i;
    for (;; ++i) {
      uint8_t b = space.read_byte(legacy::m(p + i));
      if (b == 0) {
        ctx.strtok_state.reset();
        return ptr_add(*start, static_cast<int64_t>(tok));
      }
      if (is_delim(b)) {
        space.write_byte(legacy::m(p + i), 0);
        ctx.strtok_state = ptr_add(*start, static_cast<int64_t>(i + 1));
        return ptr_add(*start, static_cast<int64_t>(tok));
      }
    }
  }

  if (!start) {
    ctx.strtok_state.reset();
    return std::nullopt;
  }
  PtrArg a = call.arg(*start);
  if (a.is_null) {
    call.fail_early(ViolationKind::NullArgument, Status::ErrNull, 0);
    ctx.strtok_state.reset();
    return std::nullopt;
  }
  call.untagged_check(a);

  auto at_bound = [&](int64_t i) {
    return a.checked &&
           ((a.addr + static_cast<uint64_t>(i)) & kAddressMask) >= a.upper;
  };

  // skip leading delimiters
  int64_t i = 0;
  for (;; ++i) {
    if (at_bound(i)) {
      call.boundary_read(a, i);
      ctx.strtok_state.reset();
      return std::nullopt;
    }
    uint8_t b = call.load(a, i);
    if (b == 0) {
      ctx.strtok_state.reset();
      return std::nullopt;
    }
    if (!is_delim(b)) break;
  }
  int64_t tok = i;
  for (;; ++i) {
    if (at_bound(i)) {
      // unterminated: the token ends at the last in-bounds byte
      call.boundary_read(a, i);
      call.store(a, i, 0);
      ctx.strtok_state.reset();
      return ptr_add(*start, tok);
    }
    uint8_t b = call.load(a, i);
    if (b == 0) {
      ctx.strtok_state.reset();
      return ptr_add(*start, tok);
    }
    if (is_delim(b)) {
      call.store(a, i, 0);
      uint64_t next = (a.addr + static_cast<uint64_t>(i) + 1) & kAddressMask;
      if (a.checked && next >= a.upper)
        ctx.strtok_state.reset();
      else
        ctx.strtok_state = ptr_add(*start, i + 1);
      return ptr_add(*start, tok);
    }
  }
}

TaggedAddress memcpy_ss(LibraryContext& ctx, AddressSpace& space,
                        TaggedAddress dest, TaggedAddress src, uint64_t n) {
  require_rsize(n);
  Call call(ctx, space, "memcpy_ss", false);
  if (ctx.policy == Policy::Legacy) {
    legacy::do_memcpy(space, dest.addr(), src.addr(), n);
    return dest;
  }
  PtrArg d = call.arg(dest);
  call.set_dest(d);
  PtrArg s = call.arg(src);
  if (d.is_null || s.is_null) {
    call.fail_early(ViolationKind::NullArgument, Status::ErrNull, 0);
    return dest;
  }
  if (n == 0) {
    call.fail_early(ViolationKind::ZeroLength, Status::ErrZeroLen, d.addr);
    return dest;
  }
  call.untagged_check(d);
  call.untagged_check(s);
  if (ranges_overlap(d.addr, n, s.addr, n)) {
    call.overlap_degrade(d.addr);
    transfer_move(call, d, s, n);
    return dest;
  }
  transfer_counted(call, d, 0, n, read_static_from(call, s),
                   [&](uint64_t i) { return call.load(s, static_cast<int64_t>(i)); });
  return dest;
}

TaggedAddress memmove_ss(LibraryContext& ctx, AddressSpace& space,
                         TaggedAddress dest, TaggedAddress src, uint64_t n) {
  require_rsize(n);
  Call call(ctx, space, "memmove_ss", false);
  if (ctx.policy == Policy::Legacy) {
    legacy::do_memmove(space, dest.addr(), src.addr(), n);
    return dest;
  }
  PtrArg d = call.arg(dest);
  call.set_dest(d);
  PtrArg s = call.arg(src);
  if (d.is_null || s.is_null) {
    call.fail_early(ViolationKind::NullArgument, Status::ErrNull, 0);
    return dest;
  }
  if (n == 0) {
    call.fail_early(ViolationKind::ZeroLength, Status::ErrZeroLen, d.addr);
    return dest;
  }
  call.untagged_check(d);
  call.untagged_check(s);
  transfer_move(call, d, s, n);
  return dest;
}

TaggedAddress memset_ss(LibraryContext& ctx, AddressSpace& space,
                        TaggedAddress dest, uint8_t value, uint64_t n) {
  require_rsize(n);
  Call call(ctx, space, "memset_ss", false);
  if (ctx.policy == Policy::Legacy) {
    legacy::do_memset(space, dest.addr(), value, n);
    return dest;
  }
  PtrArg d = call.arg(dest);
  call.set_dest(d);
  if (d.is_null) {
    call.fail_early(ViolationKind::NullArgument, Status::ErrNull, 0);
    return dest;
  }
  if (n == 0) {
    call.fail_early(ViolationKind::ZeroLength, Status::ErrZeroLen, d.addr);
    return dest;
  }
  call.untagged_check(d);
  transfer_counted(call, d, 0, n, 0, [&](uint64_t) { return value; });
  return dest;
}

std::optional<TaggedAddress> gets_ss(LibraryContext& ctx, AddressSpace& space,
                                     TaggedAddress dest,
                                     std::span<const uint8_t> line) {
  Call call(ctx, space, "gets_ss", true);
  if (ctx.policy == Policy::Legacy) {
    legacy::do_gets(space, dest.addr(), line);
    return dest;
  }
  PtrArg d = call.arg(dest);
  call.set_dest(d);
  if (d.is_null) {
    call.fail_early(ViolationKind::NullArgument, Status::ErrNull, 0);
    return std::nullopt;
  }
  call.untagged_check(d);
  transfer_counted(call, d, 0, line.size() + 1, line.size(), [&](uint64_t i) {
    return i < line.size() ? line[i] : uint8_t{0};
  });
  return dest;
}

}  // namespace s3lab
