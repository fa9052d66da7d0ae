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

#include <optional>
#include <span>
#include <string_view>

#include "s3lab/sma.hpp"

namespace s3lab {

/// Violation-handling policy of the string/memory suite.
///  - Legacy: no checks at all; raw access through masked addresses. May
///    corrupt neighboring regions or fault.
///  - AnnexK: detect and abort. Any runtime-constraint violation sets the
///    status, zeroes the destination's first in-bounds byte (string
///    functions) and raises AbortSignal.
///  - SMA: eliminate. Out-of-bounds accesses are clamped into the
///    allocation's padding and execution continues; null / zero-length
///    return early with a status since there is no address to saturate.
enum class Policy { Legacy, AnnexK, SMA };

enum class Status { Ok, ErrNull, ErrZeroLen, ErrOverlap, ErrBounds, ErrUntagged };

const char* to_string(Policy policy);
const char* to_string(Status status);
std::optional<Policy> policy_from_string(std::string_view name);

/// Counts must stay below 2^57; larger values throw SizeError.
inline constexpr uint64_t kRSizeMax = (uint64_t{1} << 57) - 1;

/// Raised when the AnnexK constraint handler terminates a call. Recoverable
/// so a harness can record the outcome instead of dying with the scenario.
class AbortSignal : public std::runtime_error {
 public:
  AbortSignal(std::string function, ViolationRecord record);
  const std::string& function() const { return function_; }
  const ViolationRecord& record() const { return record_; }

 private:
  std::string function_;
  ViolationRecord record_;
};

/// Per-caller library state. Statuses travel here instead of the return
/// value, keeping the legacy return types intact.
struct LibraryContext {
  explicit LibraryContext(Policy p = Policy::SMA) : policy(p) {}

  Policy policy;
  ViolationLog violation_log;
  Status last_status = Status::Ok;
  std::optional<TaggedAddress> strtok_state;
  // When set, tag-0 pointer arguments are treated as a constraint violation
  // instead of the default record-and-proceed passthrough.
  bool untagged_strict = false;
};

enum class HandleResult { Continue, Abort };

/// Appends the record and returns the policy verdict: Abort under AnnexK,
/// Continue otherwise. Legacy code paths never call it.
HandleResult handle_violation(LibraryContext& ctx, ViolationRecord record);

// The function suite. All take the caller context plus the simulated space;
// dest/src are tagged addresses and every function returns its dest argument
// unless noted, matching the legacy signatures. Runtime-constraint checks
// run in order: null argument, zero length (where a count applies), untagged
// argument, overlap (copy functions), then per-byte bounds during transfer.

TaggedAddress strcpy_ss(LibraryContext& ctx, AddressSpace& space,
                        TaggedAddress dest, TaggedAddress src);

TaggedAddress strncpy_ss(LibraryContext& ctx, AddressSpace& space,
                         TaggedAddress dest, TaggedAddress src, uint64_t n);

TaggedAddress strcat_ss(LibraryContext& ctx, AddressSpace& space,
                        TaggedAddress dest, TaggedAddress src);

TaggedAddress strncat_ss(LibraryContext& ctx, AddressSpace& space,
                         TaggedAddress dest, TaggedAddress src, uint64_t n);

/// Returns min(index of first 0 byte, maxsize, capacity up to the
/// allocation's upper bound); never reads past the upper bound.
uint64_t strnlen_ss(LibraryContext& ctx, AddressSpace& space, TaggedAddress s,
                    uint64_t maxsize);

/// Legacy strtok shape: pass `s` on the first call, nullopt to continue from
/// the saved position. Scans and terminator writes are bounds-limited by the
/// source allocation.
std::optional<TaggedAddress> strtok_ss(LibraryContext& ctx, AddressSpace& space,
                                       std::optional<TaggedAddress> s,
                                       std::string_view delims);

TaggedAddress memcpy_ss(LibraryContext& ctx, AddressSpace& space,
                        TaggedAddress dest, TaggedAddress src, uint64_t n);

TaggedAddress memmove_ss(LibraryContext& ctx, AddressSpace& space,
                         TaggedAddress dest, TaggedAddress src, uint64_t n);

TaggedAddress memset_ss(LibraryContext& ctx, AddressSpace& space,
                        TaggedAddress dest, uint8_t value, uint64_t n);

/// Writes `line` (newline already stripped) plus a terminator. Returns
/// nullopt with ErrNull on a null dest.
std::optional<TaggedAddress> gets_ss(LibraryContext& ctx, AddressSpace& space,
                                     TaggedAddress dest,
                                     std::span<const uint8_t> line);

}  // namespace s3lab
