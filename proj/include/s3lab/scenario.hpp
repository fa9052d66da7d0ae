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

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "s3lab/fnv.hpp"
#include "s3lab/s3lib.hpp"

namespace s3lab {

// ---------------------------------------------------------------------------
// Scenario model. The document form is JSON:
//
// { "name": str,
//   "allocations": [ { "id": str, "region": "stack"|"heap"|"global",
//                      "size": int,
//                      "init": {"zero": true} | {"ascii": str} | {"hex": str},
//                      "canary": "hh"? } ],
//   "calls": [ { "fn": str, "dest": {"id": str, "offset": int}?,
//                "src": {"id": str, "offset": int} | {"ascii": str}?,
//                "n": int?, "delims": str?, "line": str?, "value": int? } ],
//   "expect": { "<policy>": { "status": str?, "min_violations": int?,
//                             "neighbor_intact": bool? } }? }
//
// Omitted dest/src model null pointer arguments (for strtok_ss an omitted
// src is the continuation call). A {"ascii": ...} source is materialized as
// a global allocation of size len+1 before the calls run.
// ---------------------------------------------------------------------------

struct InitSpec {
  enum class Kind { Zero, Ascii, Hex };
  Kind kind = Kind::Zero;
  std::vector<uint8_t> bytes;  // empty for Zero

  friend bool operator==(const InitSpec&, const InitSpec&) = default;
};

struct AllocationSpec {
  std::string id;
  RegionKind region = RegionKind::Heap;
  uint64_t size = 0;
  InitSpec init;
  std::optional<uint8_t> canary;  // placed on the last object byte

  friend bool operator==(const AllocationSpec&, const AllocationSpec&) =
      default;
};

struct ArgRef {
  std::string id;
  int64_t offset = 0;

  friend bool operator==(const ArgRef&, const ArgRef&) = default;
};

using SrcArg = std::variant<ArgRef, std::vector<uint8_t>>;  // ref | ascii

struct CallSpec {
  std::string fn;
  std::optional<ArgRef> dest;
  std::optional<SrcArg> src;
  std::optional<uint64_t> n;
  std::optional<std::string> delims;
  std::optional<std::string> line;
  std::optional<uint8_t> value;

  friend bool operator==(const CallSpec&, const CallSpec&) = default;
};

struct Expectation {
  std::optional<std::string> status;
  std::optional<uint64_t> min_violations;
  std::optional<bool> neighbor_intact;

  friend bool operator==(const Expectation&, const Expectation&) = default;
};

struct Scenario {
  std::string name;
  std::vector<AllocationSpec> allocations;
  std::vector<CallSpec> calls;
  std::map<Policy, Expectation> expect;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

enum class RunStatus { Completed, Aborted, Faulted };
const char* to_string(RunStatus status);

struct ViolationSummary {
  std::string kind;
  std::string fn;
  int64_t offset = 0;
};

struct Report {
  std::string name;
  Policy policy = Policy::SMA;
  RunStatus status = RunStatus::Completed;
  std::vector<ViolationSummary> violations;  // stored records
  uint64_t violation_count = 0;              // total, may exceed the stored list
  bool neighbor_intact = true;
  uint64_t digest = 0;
  Status last_status = Status::Ok;
};

/// Validates and loads a scenario document. Unknown fields, unresolved ids,
/// inits longer than the allocation and out-of-range numbers all raise
/// SchemaError with the offending field path.
Scenario parse_scenario(const std::string& text);

/// Canonical document form: serialize(parse(serialize(s))) == serialize(s).
std::string serialize_scenario(const Scenario& scenario);

std::string serialize_report(const Report& report);

/// FNV-1a over all mapped bytes in ascending address order.
uint64_t arena_digest(const AddressSpace& space);

/// Executes one scenario call at a time so harnesses can snapshot the arena
/// around each step. Construction performs the whole setup: allocations in
/// declaration order, inits, canaries, then the literal pool.
class ScenarioRunner {
 public:
  ScenarioRunner(const Scenario& scenario, Policy policy);
  ~ScenarioRunner();

  size_t call_count() const;
  RunStatus step(size_t index);

  /// [lower, upper) allocation ranges the call may legitimately modify.
  std::vector<std::pair<uint64_t, uint64_t>> write_ranges(size_t index) const;

  const AddressSpace& space() const;
  const LibraryContext& context() const;
  uint64_t digest() const;
  bool neighbors_intact() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Report run_scenario(const Scenario& scenario, Policy policy);

/// Mismatches between the report and the scenario's expect block for the
/// report's policy, one human-readable line each. Empty means pass.
std::vector<std::string> expectation_failures(const Scenario& scenario,
                                              const Report& report);

}  // namespace s3lab
