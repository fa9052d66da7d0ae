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

#include "s3lab/scenario.hpp"

namespace s3lab {

/// Corpus dimensions: destination region x abused function x overflow
/// magnitude. Each combination yields a bad scenario (transfer exceeds the
/// destination allocation by `magnitude` bytes and reaches an adjacent
/// canary allocation) and a good twin (the same shape, in bounds).
struct CorpusSpec {
  std::vector<RegionKind> regions = {RegionKind::Stack, RegionKind::Heap,
                                     RegionKind::Global};
  std::vector<std::string> functions = {"memcpy", "strcpy", "strcat"};
  std::vector<uint64_t> magnitudes = {1, 8, 64};
};

std::vector<Scenario> gen_corpus(const CorpusSpec& spec = {});

/// Deterministic function of the seed: 1-4 allocations (sizes 1-128),
/// 1-6 calls over the whole function suite, offsets possibly interior,
/// counts possibly overflowing. Never emits null or untagged arguments.
Scenario random_scenario(uint64_t seed);

}  // namespace s3lab
