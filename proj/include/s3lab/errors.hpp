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
#include <stdexcept>
#include <string>

namespace s3lab {

/// Base class for every recoverable error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid address-space configuration (overlapping, misaligned or
/// out-of-range lane bases).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Region mapping failure (overlap with an existing region, zero length,
/// or range outside the 58-bit space).
class MapError : public Error {
 public:
  using Error::Error;
};

/// Requested size outside the supported range.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Tag or address field out of range for the tagged-word encoding.
class EncodeError : public Error {
 public:
  using Error::Error;
};

/// Operation needs bounds metadata but the address carries tag 0.
class NoMetadataError : public Error {
 public:
  using Error::Error;
};

/// Deallocation of an address that is not the base of a live allocation.
class FreeError : public Error {
 public:
  using Error::Error;
};

/// Placement lane exhausted.
class OutOfMemoryError : public Error {
 public:
  using Error::Error;
};

/// Raised when a raw (unchecked) access touches an unmapped address.
/// For multi-byte writes, every byte before `address()` has already been
/// committed, which models partial corruption before a crash.
class UnmappedFault : public Error {
 public:
  explicit UnmappedFault(uint64_t address);
  uint64_t address() const { return address_; }

 private:
  uint64_t address_;
};

/// Scenario document validation failure; `path()` names the offending field.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace s3lab
