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

#include "s3lab/sma.hpp"

namespace s3lab {

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::OverflowWrite:
      return "OverflowWrite";
    case ViolationKind::OverflowRead:
      return "OverflowRead";
    case ViolationKind::UnderflowWrite:
      return "UnderflowWrite";
    case ViolationKind::UnderflowRead:
      return "UnderflowRead";
    case ViolationKind::NullArgument:
      return "NullArgument";
    case ViolationKind::ZeroLength:
      return "ZeroLength";
    case ViolationKind::Overlap:
      return "Overlap";
    case ViolationKind::UntaggedArgument:
      return "UntaggedArgument";
    case ViolationKind::UnmappedAccess:
      return "UnmappedAccess";
  }
  return "?";
}

const char* to_string(ViolationAction action) {
  switch (action) {
    case ViolationAction::Saturated:
      return "Saturated";
    case ViolationAction::Aborted:
      return "Aborted";
    case ViolationAction::Ignored:
      return "Ignored";
    case ViolationAction::Proceeded:
      return "Proceeded";
  }
  return "?";
}

void ViolationLog::append(ViolationRecord record) {
  ++total_;
  if (records_.size() < cap_) records_.push_back(std::move(record));
}

void ViolationLog::append_run(const ViolationRecord& proto, uint64_t count) {
  for (uint64_t i = 0; i < count && records_.size() < cap_; ++i) {
    ViolationRecord rec = proto;
    rec.byte_offset += static_cast<int64_t>(i);
    rec.attempted_addr = (rec.attempted_addr + i) & kAddressMask;
    records_.push_back(std::move(rec));
  }
  total_ += count;
}

void ViolationLog::clear() {
  records_.clear();
  total_ = 0;
}

}  // namespace s3lab
