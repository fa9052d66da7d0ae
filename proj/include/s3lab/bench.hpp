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

#include <iosfwd>
#include <span>
#include <vector>

#include "s3lab/s3lib.hpp"

namespace s3lab {

struct BenchRow {
  std::string function;
  RegionKind dest_region;
  uint64_t bytes_copied = 0;
  Policy policy = Policy::Legacy;
  double median_ns = 0;
  unsigned repetitions = 0;
};

struct BenchConfig {
  std::vector<uint64_t> sizes = {8, 32, 128, 512, 2048, 8192, 65536};
  unsigned repetitions = 11;
  unsigned warmup = 3;  // discarded batches per cell
};

/// memcpy_ss timings from a stack buffer into a stack, global and heap
/// destination, per policy. Timing wraps the library call only; calls are
/// batched until a batch is long enough to measure, and the per-call median
/// over `repetitions` batches is reported. Sizes must be ascending and
/// repetitions at least 11.
std::vector<BenchRow> run_bench(const BenchConfig& config = {});

/// Header: function,region,bytes,policy,median_ns,reps
void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);

}  // namespace s3lab
