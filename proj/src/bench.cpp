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

#include "s3lab/bench.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <stdexcept>

#include "s3lab/minfat.hpp"

namespace s3lab {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kTargetBatchNs = 100'000.0;

double time_batch(LibraryContext& ctx, AddressSpace& space, TaggedAddress dest,
                  TaggedAddress src, uint64_t n, uint64_t iters) {
  auto start = Clock::now();
  for (uint64_t i = 0; i < iters; ++i) memcpy_ss(ctx, space, dest, src, n);
  auto stop = Clock::now();
  return std::chrono::duration<double, std::nano>(stop - start).count();
}

double median(std::vector<double> samples) {
  size_t mid = samples.size() / 2;
  std::nth_element(samples.begin(), samples.begin() + mid, samples.end());
  return samples[mid];
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  if (config.repetitions < 11)
    throw std::invalid_argument("repetitions must be at least 11");
  if (!std::is_sorted(config.sizes.begin(), config.sizes.end()))
    throw std::invalid_argument("sizes must be ascending");

  // Figure-style sweep: destination region x copy size x policy.
  const RegionKind regions[] = {RegionKind::Stack, RegionKind::Global,
                                RegionKind::Heap};
  const Policy policies[] = {Policy::Legacy, Policy::AnnexK, Policy::SMA};

  std::vector<BenchRow> rows;
  for (RegionKind region : regions) {
    for (uint64_t size : config.sizes) {
      AddressSpace space;
      MinFatAllocator allocator(space);
      TaggedAddress src = allocator.allocate(size, RegionKind::Stack);
      TaggedAddress dest = allocator.allocate(size, region);
      std::vector<uint8_t> pattern(size);
      for (uint64_t i = 0; i < size; ++i)
        pattern[i] = static_cast<uint8_t>(i * 31 + 7);
      space.raw_write(src.addr(), pattern);

      // Shared batch size per cell so each policy does identical work.
      uint64_t iters = 1;
      {
        LibraryContext probe(Policy::Legacy);
        double once = time_batch(probe, space, dest, src, size, 1);
        once = std::max(once, 1.0);
        iters = std::clamp<uint64_t>(
            static_cast<uint64_t>(kTargetBatchNs / once), 1, 1u << 20);
      }

      for (Policy policy : policies) {
        LibraryContext ctx(policy);
        for (unsigned w = 0; w < config.warmup; ++w)
          time_batch(ctx, space, dest, src, size, iters);
        std::vector<double> samples;
        samples.reserve(config.repetitions);
        for (unsigned r = 0; r < config.repetitions; ++r)
          samples.push_back(
              time_batch(ctx, space, dest, src, size, iters) / iters);
        rows.push_back({"memcpy", region, size, policy, median(samples),
                        config.repetitions});
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << "function,region,bytes,policy,median_ns,reps\n";
  char buf[64];
  for (const BenchRow& row : rows) {
    std::snprintf(buf, sizeof(buf), "%.1f", row.median_ns);
    out << row.function << ',' << to_string(row.dest_region) << ','
        << row.bytes_copied << ',' << to_string(row.policy) << ',' << buf
        << ',' << row.repetitions << '\n';
  }
}

}  // namespace s3lab
