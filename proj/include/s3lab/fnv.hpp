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

#include <cstdint>
#include <span>

namespace s3lab {

inline constexpr uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ull;
inline constexpr uint64_t kFnvPrime = 0x100000001b3ull;

/// Incremental FNV-1a (64-bit).
constexpr uint64_t fnv1a64(uint64_t state, uint8_t byte) {
  return (state ^ byte) * kFnvPrime;
}

constexpr uint64_t fnv1a64(std::span<const uint8_t> bytes,
                           uint64_t state = kFnvOffsetBasis) {
  for (uint8_t b : bytes) state = fnv1a64(state, b);
  return state;
}

}  // namespace s3lab
