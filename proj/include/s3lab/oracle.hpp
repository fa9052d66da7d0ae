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

/// Reference interpreter for differential testing: executes the scenario
/// under saturation semantics with plain per-byte loops and returns the
/// final arena digest. Shares only the Scenario model with the production
/// path — it has its own arena, allocator arithmetic, clamping and function
/// interpreters, and applies no transfer optimizations. Intended for
/// generated (desk-scale) scenarios.
uint64_t oracle_run(const Scenario& scenario);

}  // namespace s3lab
