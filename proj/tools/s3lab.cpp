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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "s3lab/bench.hpp"
#include "s3lab/corpus.hpp"
#include "s3lab/oracle.hpp"
#include "s3lab/scenario.hpp"

namespace {

using namespace s3lab;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;   // expectation or fuzz mismatch
constexpr int kExitUsage = 2;  // usage, I/O or schema error

std::vector<Policy> parse_policies(const std::string& csv) {
  std::vector<Policy> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto p = policy_from_string(item);
    if (!p) throw CLI::ValidationError("--policy", "unknown policy '" + item + "'");
    out.push_back(*p);
  }
  if (out.empty()) throw CLI::ValidationError("--policy", "empty policy list");
  return out;
}

int cmd_run(const std::string& path, const std::string& policy_csv) {
  std::vector<Policy> policies = parse_policies(policy_csv);
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    return kExitUsage;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  Scenario sc;
  try {
    sc = parse_scenario(buffer.str());
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kExitUsage;
  }
  bool failed = false;
  for (Policy policy : policies) {
    Report rep = run_scenario(sc, policy);
    std::cout << serialize_report(rep);
    for (const std::string& line : expectation_failures(sc, rep)) {
      std::cerr << sc.name << ": " << line << "\n";
      failed = true;
    }
  }
  return failed ? kExitFail : kExitPass;
}

struct PolicyTally {
  uint64_t completed = 0;
  uint64_t aborted = 0;
  uint64_t faulted = 0;
  uint64_t corrupted = 0;
};

int cmd_corpus(const std::string& out_dir, const std::string& regions_csv,
               const std::string& functions_csv,
               const std::string& magnitudes_csv) {
  CorpusSpec spec;
  auto split = [](const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
  };
  if (!regions_csv.empty()) {
    spec.regions.clear();
    for (const std::string& name : split(regions_csv)) {
      auto kind = region_kind_from_string(name);
      if (!kind) {
        std::cerr << "error: unknown region '" << name << "'\n";
        return kExitUsage;
      }
      spec.regions.push_back(*kind);
    }
  }
  if (!functions_csv.empty()) {
    spec.functions.clear();
    for (const std::string& name : split(functions_csv)) {
      if (name != "memcpy" && name != "strcpy" && name != "strcat") {
        std::cerr << "error: unknown function '" << name
                  << "' (memcpy|strcpy|strcat)\n";
        return kExitUsage;
      }
      spec.functions.push_back(name);
    }
  }
  if (!magnitudes_csv.empty()) {
    spec.magnitudes.clear();
    for (const std::string& item : split(magnitudes_csv)) {
      try {
        spec.magnitudes.push_back(std::stoull(item));
      } catch (const std::exception&) {
        std::cerr << "error: bad magnitude '" << item << "'\n";
        return kExitUsage;
      }
      if (spec.magnitudes.back() == 0) {
        std::cerr << "error: magnitude must be positive\n";
        return kExitUsage;
      }
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << out_dir << ": " << ec.message()
              << "\n";
    return kExitUsage;
  }

  std::vector<Scenario> corpus = gen_corpus(spec);
  for (const Scenario& sc : corpus) {
    std::ofstream out(std::filesystem::path(out_dir) / (sc.name + ".json"));
    if (!out) {
      std::cerr << "error: cannot write scenario " << sc.name << "\n";
      return kExitUsage;
    }
    out << serialize_scenario(sc);
  }

  const Policy policies[] = {Policy::Legacy, Policy::AnnexK, Policy::SMA};
  PolicyTally tally[3];
  for (const Scenario& sc : corpus) {
    for (size_t pi = 0; pi < 3; ++pi) {
      Report rep = run_scenario(sc, policies[pi]);
      switch (rep.status) {
        case RunStatus::Completed:
          ++tally[pi].completed;
          break;
        case RunStatus::Aborted:
          ++tally[pi].aborted;
          break;
        case RunStatus::Faulted:
          ++tally[pi].faulted;
          break;
      }
      if (!rep.neighbor_intact) ++tally[pi].corrupted;
    }
  }

  std::cout << "policy,completed,aborted,faulted,corrupted\n";
  for (size_t pi = 0; pi < 3; ++pi)
    std::cout << to_string(policies[pi]) << ',' << tally[pi].completed << ','
              << tally[pi].aborted << ',' << tally[pi].faulted << ','
              << tally[pi].corrupted << '\n';
  std::cout << corpus.size() << " scenarios written to " << out_dir << "\n";

  const PolicyTally& sma = tally[2];
  return (sma.corrupted == 0 && sma.faulted == 0) ? kExitPass : kExitFail;
}

int cmd_fuzz(uint64_t count, uint64_t seed0) {
  for (uint64_t k = 0; k < count; ++k) {
    uint64_t seed = seed0 + k;
    Scenario sc = random_scenario(seed);
    std::string why;

    ScenarioRunner runner(sc, Policy::SMA);
    for (size_t i = 0; i < runner.call_count() && why.empty(); ++i) {
      auto before = runner.space().snapshot();
      runner.step(i);
      auto after = runner.space().snapshot();
      auto ranges = runner.write_ranges(i);
      for (const auto& [start, bytes] : before) {
        const auto& now = after.at(start);
        for (size_t b = 0; b < bytes.size(); ++b) {
          if (bytes[b] == now[b]) continue;
          uint64_t addr = start + b;
          bool allowed = false;
          for (auto [lo, hi] : ranges)
            if (addr >= lo && addr < hi) allowed = true;
          if (!allowed) {
            why = "call " + std::to_string(i) + " modified byte outside the "
                  "destination allocation";
            break;
          }
        }
        if (!why.empty()) break;
      }
    }
    if (why.empty() && runner.digest() != oracle_run(sc))
      why = "digest mismatch against the reference interpreter";

    if (!why.empty()) {
      std::string file = "fuzz_fail_" + std::to_string(seed) + ".json";
      std::ofstream out(file);
      out << serialize_scenario(sc);
      std::cerr << "seed " << seed << ": " << why << " (repro: " << file
                << ")\n";
      return kExitFail;
    }
  }
  std::cout << count << " seeds, zero mismatches\n";
  return kExitPass;
}

int cmd_bench(const std::string& sizes_csv, unsigned reps,
              const std::string& out_file) {
  BenchConfig config;
  config.repetitions = reps;
  if (!sizes_csv.empty()) {
    config.sizes.clear();
    std::stringstream ss(sizes_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        config.sizes.push_back(std::stoull(item));
      } catch (const std::exception&) {
        std::cerr << "error: bad size '" << item << "'\n";
        return kExitUsage;
      }
    }
    if (!std::is_sorted(config.sizes.begin(), config.sizes.end())) {
      std::cerr << "error: sizes must be ascending\n";
      return kExitUsage;
    }
  }
  std::vector<BenchRow> rows = run_bench(config);
  if (out_file.empty()) {
    write_bench_csv(std::cout, rows);
  } else {
    std::ofstream out(out_file);
    if (!out) {
      std::cerr << "error: cannot write " << out_file << "\n";
      return kExitUsage;
    }
    write_bench_csv(out, rows);
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic laboratory for tagged-address bounds checking "
               "and saturation memory access"};
  app.require_subcommand(1);

  std::string run_path;
  std::string run_policies = "legacy,annexk,sma";
  CLI::App* run = app.add_subcommand("run", "run one scenario per policy");
  run->add_option("file", run_path, "scenario document")->required();
  run->add_option("--policy", run_policies, "comma-separated policy subset");

  std::string corpus_out;
  std::string corpus_regions, corpus_functions, corpus_magnitudes;
  CLI::App* corpus =
      app.add_subcommand("corpus", "generate and evaluate the overflow corpus");
  corpus->add_option("--out", corpus_out, "output directory")->required();
  corpus->add_option("--regions", corpus_regions, "region subset (csv)");
  corpus->add_option("--functions", corpus_functions, "function subset (csv)");
  corpus->add_option("--magnitudes", corpus_magnitudes, "magnitude subset (csv)");

  uint64_t fuzz_count = 1000;
  uint64_t fuzz_seed = 1;
  CLI::App* fuzz =
      app.add_subcommand("fuzz", "differential fuzz against the reference "
                                 "interpreter");
  fuzz->add_option("--count", fuzz_count, "number of seeds")
      ->check(CLI::PositiveNumber);
  fuzz->add_option("--seed", fuzz_seed, "first seed");

  std::string bench_sizes, bench_out;
  unsigned bench_reps = 11;
  CLI::App* bench = app.add_subcommand("bench", "memcpy policy microbenchmark");
  bench->add_option("--sizes", bench_sizes, "ascending byte sizes (csv)");
  bench->add_option("--reps", bench_reps, "timed repetitions per cell")
      ->check(CLI::Range(11u, 10000u));
  bench->add_option("--out", bench_out, "CSV output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_path, run_policies);
    if (corpus->parsed())
      return cmd_corpus(corpus_out, corpus_regions, corpus_functions,
                        corpus_magnitudes);
    if (fuzz->parsed()) return cmd_fuzz(fuzz_count, fuzz_seed);
    if (bench->parsed()) return cmd_bench(bench_sizes, bench_reps, bench_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
