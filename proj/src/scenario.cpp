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

#include "s3lab/scenario.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "s3lab/fmt_util.hpp"
#include "s3lab/minfat.hpp"

namespace s3lab {

namespace {

using json = nlohmann::ordered_json;

// Backing bytes are materialized per region, so scenario documents may not
// request arbitrarily large allocations.
constexpr uint64_t kMaxScenarioAllocation = uint64_t{1} << 20;

const std::set<std::string>& function_names() {
  static const std::set<std::string> names = {
      "strcpy_ss",  "strncpy_ss", "strcat_ss",  "strncat_ss", "strnlen_ss",
      "strtok_ss",  "memcpy_ss",  "memmove_ss", "memset_ss",  "gets_ss"};
  return names;
}

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw SchemaError(path, message);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) known = true;
    if (!known) fail(path + "." + item.key(), "unknown field");
  }
}

const json& require(const json& obj, const std::string& path,
                    const char* key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing field");
  return obj.at(key);
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

uint64_t get_uint(const json& v, const std::string& path, uint64_t max) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(path, "expected an integer");
  if (v.is_number_integer() && v.get<int64_t>() < 0)
    fail(path, "expected a non-negative integer");
  uint64_t value = v.get<uint64_t>();
  if (value > max) fail(path, "value exceeds " + std::to_string(max));
  return value;
}

int64_t get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(path, "expected an integer");
  return v.get<int64_t>();
}

bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected a boolean");
  return v.get<bool>();
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::vector<uint8_t> parse_hex(const std::string& text,
                               const std::string& path) {
  if (text.size() % 2 != 0) fail(path, "odd-length hex string");
  std::vector<uint8_t> out;
  out.reserve(text.size() / 2);
  for (size_t i = 0; i < text.size(); i += 2) {
    int hi = hex_digit(text[i]);
    int lo = hex_digit(text[i + 1]);
    if (hi < 0 || lo < 0) fail(path, "invalid hex digit");
    out.push_back(static_cast<uint8_t>(hi << 4 | lo));
  }
  return out;
}

std::string to_hex(std::span<const uint8_t> bytes) {
  static const char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

InitSpec parse_init(const json& v, const std::string& path, uint64_t size) {
  if (!v.is_object()) fail(path, "expected an object");
  check_keys(v, path, {"zero", "ascii", "hex"});
  if (v.size() != 1) fail(path, "expected exactly one of zero|ascii|hex");
  InitSpec init;
  if (v.contains("zero")) {
    if (!get_bool(v.at("zero"), path + ".zero"))
      fail(path + ".zero", "must be true");
    init.kind = InitSpec::Kind::Zero;
  } else if (v.contains("ascii")) {
    std::string s = get_string(v.at("ascii"), path + ".ascii");
    init.kind = InitSpec::Kind::Ascii;
    init.bytes.assign(s.begin(), s.end());
  } else {
    init.kind = InitSpec::Kind::Hex;
    init.bytes = parse_hex(get_string(v.at("hex"), path + ".hex"), path + ".hex");
  }
  if (init.bytes.size() > size) fail(path, "init longer than allocation size");
  return init;
}

ArgRef parse_ref(const json& v, const std::string& path,
                 const std::set<std::string>& ids) {
  if (!v.is_object()) fail(path, "expected an object");
  check_keys(v, path, {"id", "offset"});
  ArgRef ref;
  ref.id = get_string(require(v, path, "id"), path + ".id");
  if (ids.find(ref.id) == ids.end())
    fail(path + ".id", "undeclared allocation '" + ref.id + "'");
  if (v.contains("offset")) ref.offset = get_int(v.at("offset"), path + ".offset");
  return ref;
}

struct FieldSet {
  bool dest = false, src = false, n = false, delims = false, line = false,
       value = false;
  bool n_required = false, delims_required = false, line_required = false,
       value_required = false;
};

FieldSet fields_for(const std::string& fn) {
  FieldSet f;
  if (fn == "strcpy_ss" || fn == "strcat_ss") {
    f.dest = f.src = true;
  } else if (fn == "strncpy_ss" || fn == "strncat_ss" || fn == "memcpy_ss" ||
             fn == "memmove_ss") {
    f.dest = f.src = f.n = true;
    f.n_required = true;
  } else if (fn == "strnlen_ss") {
    f.src = f.n = true;
    f.n_required = true;
  } else if (fn == "strtok_ss") {
    f.src = f.delims = true;
    f.delims_required = true;
  } else if (fn == "memset_ss") {
    f.dest = f.n = f.value = true;
    f.n_required = f.value_required = true;
  } else {  // gets_ss
    f.dest = f.line = true;
    f.line_required = true;
  }
  return f;
}

CallSpec parse_call(const json& v, const std::string& path,
                    const std::set<std::string>& ids) {
  if (!v.is_object()) fail(path, "expected an object");
  check_keys(v, path, {"fn", "dest", "src", "n", "delims", "line", "value"});
  CallSpec call;
  call.fn = get_string(require(v, path, "fn"), path + ".fn");
  if (function_names().find(call.fn) == function_names().end())
    fail(path + ".fn", "unknown function '" + call.fn + "'");
  FieldSet f = fields_for(call.fn);

  auto applicable = [&](const char* key, bool ok) {
    if (v.contains(key) && !ok)
      fail(path + "." + key, "field not applicable to " + call.fn);
  };
  applicable("dest", f.dest);
  applicable("src", f.src);
  applicable("n", f.n);
  applicable("delims", f.delims);
  applicable("line", f.line);
  applicable("value", f.value);

  if (v.contains("dest")) call.dest = parse_ref(v.at("dest"), path + ".dest", ids);
  if (v.contains("src")) {
    const json& s = v.at("src");
    if (!s.is_object()) fail(path + ".src", "expected an object");
    if (s.contains("ascii")) {
      check_keys(s, path + ".src", {"ascii"});
      std::string text = get_string(s.at("ascii"), path + ".src.ascii");
      if (text.size() + 1 > kMaxScenarioAllocation)
        fail(path + ".src.ascii", "literal too long");
      call.src = SrcArg(std::vector<uint8_t>(text.begin(), text.end()));
    } else {
      call.src = SrcArg(parse_ref(s, path + ".src", ids));
    }
  }
  if (f.n_required && !v.contains("n")) fail(path + ".n", "missing field");
  if (v.contains("n")) call.n = get_uint(v.at("n"), path + ".n", kRSizeMax);
  if (f.delims_required && !v.contains("delims"))
    fail(path + ".delims", "missing field");
  if (v.contains("delims"))
    call.delims = get_string(v.at("delims"), path + ".delims");
  if (f.line_required && !v.contains("line"))
    fail(path + ".line", "missing field");
  if (v.contains("line")) {
    std::string line = get_string(v.at("line"), path + ".line");
    if (line.find('\n') != std::string::npos)
      fail(path + ".line", "embedded newline");
    if (line.size() + 1 > kMaxScenarioAllocation)
      fail(path + ".line", "line too long");
    call.line = std::move(line);
  }
  if (f.value_required && !v.contains("value"))
    fail(path + ".value", "missing field");
  if (v.contains("value"))
    call.value = static_cast<uint8_t>(get_uint(v.at("value"), path + ".value", 255));
  return call;
}

}  // namespace

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed:
      return "completed";
    case RunStatus::Aborted:
      return "aborted";
    case RunStatus::Faulted:
      return "faulted";
  }
  return "?";
}

Scenario parse_scenario(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) fail("$", "invalid JSON");
  if (!doc.is_object()) fail("$", "expected an object");
  check_keys(doc, "$", {"name", "allocations", "calls", "expect"});

  Scenario sc;
  sc.name = get_string(require(doc, "$", "name"), "$.name");
  if (sc.name.empty()) fail("$.name", "empty name");

  const json& allocs = require(doc, "$", "allocations");
  if (!allocs.is_array()) fail("$.allocations", "expected an array");
  std::set<std::string> ids;
  for (size_t i = 0; i < allocs.size(); ++i) {
    std::string path = "$.allocations[" + std::to_string(i) + "]";
    const json& a = allocs[i];
    if (!a.is_object()) fail(path, "expected an object");
    check_keys(a, path, {"id", "region", "size", "init", "canary"});
    AllocationSpec spec;
    spec.id = get_string(require(a, path, "id"), path + ".id");
    if (spec.id.empty()) fail(path + ".id", "empty id");
    if (!ids.insert(spec.id).second) fail(path + ".id", "duplicate id");
    auto region = region_kind_from_string(
        get_string(require(a, path, "region"), path + ".region"));
    if (!region) fail(path + ".region", "expected stack|heap|global");
    spec.region = *region;
    spec.size = get_uint(require(a, path, "size"), path + ".size",
                         kMaxScenarioAllocation);
    if (spec.size == 0) fail(path + ".size", "size must be positive");
    spec.init = parse_init(require(a, path, "init"), path + ".init", spec.size);
    if (a.contains("canary")) {
      auto bytes = parse_hex(get_string(a.at("canary"), path + ".canary"),
                             path + ".canary");
      if (bytes.size() != 1) fail(path + ".canary", "expected one hex byte");
      spec.canary = bytes[0];
    }
    sc.allocations.push_back(std::move(spec));
  }

  const json& calls = require(doc, "$", "calls");
  if (!calls.is_array()) fail("$.calls", "expected an array");
  for (size_t i = 0; i < calls.size(); ++i)
    sc.calls.push_back(
        parse_call(calls[i], "$.calls[" + std::to_string(i) + "]", ids));

  if (doc.contains("expect")) {
    const json& exp = doc.at("expect");
    if (!exp.is_object()) fail("$.expect", "expected an object");
    for (const auto& item : exp.items()) {
      std::string path = "$.expect." + item.key();
      auto policy = policy_from_string(item.key());
      if (!policy) fail(path, "expected legacy|annexk|sma");
      const json& e = item.value();
      if (!e.is_object()) fail(path, "expected an object");
      check_keys(e, path, {"status", "min_violations", "neighbor_intact"});
      Expectation ex;
      if (e.contains("status")) {
        std::string st = get_string(e.at("status"), path + ".status");
        if (st != "completed" && st != "aborted" && st != "faulted")
          fail(path + ".status", "expected completed|aborted|faulted");
        ex.status = st;
      }
      if (e.contains("min_violations"))
        ex.min_violations = get_uint(e.at("min_violations"),
                                     path + ".min_violations", UINT64_MAX);
      if (e.contains("neighbor_intact"))
        ex.neighbor_intact =
            get_bool(e.at("neighbor_intact"), path + ".neighbor_intact");
      sc.expect[*policy] = ex;
    }
  }
  return sc;
}

std::string serialize_scenario(const Scenario& sc) {
  json doc;
  doc["name"] = sc.name;
  doc["allocations"] = json::array();
  for (const AllocationSpec& a : sc.allocations) {
    json ja;
    ja["id"] = a.id;
    ja["region"] = to_string(a.region);
    ja["size"] = a.size;
    switch (a.init.kind) {
      case InitSpec::Kind::Zero:
        ja["init"] = json{{"zero", true}};
        break;
      case InitSpec::Kind::Ascii:
        ja["init"] = json{
            {"ascii", std::string(a.init.bytes.begin(), a.init.bytes.end())}};
        break;
      case InitSpec::Kind::Hex:
        ja["init"] = json{{"hex", to_hex(a.init.bytes)}};
        break;
    }
    if (a.canary) ja["canary"] = to_hex({&*a.canary, 1});
    doc["allocations"].push_back(std::move(ja));
  }
  doc["calls"] = json::array();
  for (const CallSpec& c : sc.calls) {
    json jc;
    jc["fn"] = c.fn;
    if (c.dest)
      jc["dest"] = json{{"id", c.dest->id}, {"offset", c.dest->offset}};
    if (c.src) {
      if (const ArgRef* ref = std::get_if<ArgRef>(&*c.src))
        jc["src"] = json{{"id", ref->id}, {"offset", ref->offset}};
      else {
        const auto& bytes = std::get<std::vector<uint8_t>>(*c.src);
        jc["src"] = json{{"ascii", std::string(bytes.begin(), bytes.end())}};
      }
    }
    if (c.n) jc["n"] = *c.n;
    if (c.delims) jc["delims"] = *c.delims;
    if (c.line) jc["line"] = *c.line;
    if (c.value) jc["value"] = static_cast<uint64_t>(*c.value);
    doc["calls"].push_back(std::move(jc));
  }
  if (!sc.expect.empty()) {
    json je;
    for (const auto& [policy, e] : sc.expect) {
      json jp;
      if (e.status) jp["status"] = *e.status;
      if (e.min_violations) jp["min_violations"] = *e.min_violations;
      if (e.neighbor_intact) jp["neighbor_intact"] = *e.neighbor_intact;
      je[to_string(policy)] = std::move(jp);
    }
    doc["expect"] = std::move(je);
  }
  return doc.dump(2) + "\n";
}

std::string serialize_report(const Report& rep) {
  json doc;
  doc["name"] = rep.name;
  doc["policy"] = to_string(rep.policy);
  doc["status"] = to_string(rep.status);
  doc["violations"] = json::array();
  for (const ViolationSummary& v : rep.violations)
    doc["violations"].push_back(
        json{{"kind", v.kind}, {"fn", v.fn}, {"offset", v.offset}});
  doc["neighbor_intact"] = rep.neighbor_intact;
  doc["digest"] = hex16(rep.digest);
  doc["last_status"] = to_string(rep.last_status);
  return doc.dump(2) + "\n";
}

uint64_t arena_digest(const AddressSpace& space) {
  uint64_t h = kFnvOffsetBasis;
  space.for_each_region(
      [&](const MappedRegion& r) { h = fnv1a64(r.bytes, h); });
  return h;
}

struct ScenarioRunner::Impl {
  const Scenario& scenario;
  AddressSpace space;
  MinFatAllocator allocator{space};
  LibraryContext ctx;
  std::map<std::string, TaggedAddress> by_id;
  std::map<size_t, TaggedAddress> literal_pool;  // call index -> literal
  std::set<std::string> write_target_ids;

  Impl(const Scenario& sc, Policy policy) : scenario(sc), ctx(policy) {
    for (const AllocationSpec& a : sc.allocations) {
      TaggedAddress ta = allocator.allocate(a.size, a.region);
      by_id[a.id] = ta;
      if (!a.init.bytes.empty()) space.raw_write(ta.addr(), a.init.bytes);
      if (a.canary) space.write_byte(ta.addr() + a.size - 1, *a.canary);
    }
    // literal pool after the declared allocations, in call order
    for (size_t i = 0; i < sc.calls.size(); ++i) {
      const CallSpec& c = sc.calls[i];
      if (!c.src) continue;
      if (const auto* bytes = std::get_if<std::vector<uint8_t>>(&*c.src)) {
        TaggedAddress lit =
            allocator.allocate(bytes->size() + 1, RegionKind::Global);
        if (!bytes->empty()) space.raw_write(lit.addr(), *bytes);
        literal_pool[i] = lit;
      }
    }
    for (const CallSpec& c : sc.calls) {
      if (c.fn == "strtok_ss") {
        if (c.src)
          if (const ArgRef* ref = std::get_if<ArgRef>(&*c.src))
            write_target_ids.insert(ref->id);
      } else if (c.dest) {
        write_target_ids.insert(c.dest->id);
      }
    }
  }

  TaggedAddress resolve(const ArgRef& ref) const {
    return ptr_add(by_id.at(ref.id), ref.offset);
  }

  TaggedAddress resolve_dest(const CallSpec& c) const {
    return c.dest ? resolve(*c.dest) : TaggedAddress{};
  }

  TaggedAddress resolve_src(size_t index) const {
    const CallSpec& c = scenario.calls[index];
    if (!c.src) return TaggedAddress{};
    if (const ArgRef* ref = std::get_if<ArgRef>(&*c.src)) return resolve(*ref);
    return literal_pool.at(index);
  }

  void dispatch(size_t index) {
    const CallSpec& c = scenario.calls[index];
    TaggedAddress dest = resolve_dest(c);
    if (c.fn == "strcpy_ss") {
      strcpy_ss(ctx, space, dest, resolve_src(index));
    } else if (c.fn == "strncpy_ss") {
      strncpy_ss(ctx, space, dest, resolve_src(index), *c.n);
    } else if (c.fn == "strcat_ss") {
      strcat_ss(ctx, space, dest, resolve_src(index));
    } else if (c.fn == "strncat_ss") {
      strncat_ss(ctx, space, dest, resolve_src(index), *c.n);
    } else if (c.fn == "strnlen_ss") {
      strnlen_ss(ctx, space, resolve_src(index), *c.n);
    } else if (c.fn == "strtok_ss") {
      std::optional<TaggedAddress> s;
      if (c.src) s = resolve_src(index);
      strtok_ss(ctx, space, s, c.delims.value_or(""));
    } else if (c.fn == "memcpy_ss") {
      memcpy_ss(ctx, space, dest, resolve_src(index), *c.n);
    } else if (c.fn == "memmove_ss") {
      memmove_ss(ctx, space, dest, resolve_src(index), *c.n);
    } else if (c.fn == "memset_ss") {
      memset_ss(ctx, space, dest, *c.value, *c.n);
    } else if (c.fn == "gets_ss") {
      const std::string& line = *c.line;
      gets_ss(ctx, space, dest,
              std::span<const uint8_t>(
                  reinterpret_cast<const uint8_t*>(line.data()), line.size()));
    }
  }
};

ScenarioRunner::ScenarioRunner(const Scenario& scenario, Policy policy)
    : impl_(std::make_unique<Impl>(scenario, policy)) {}

ScenarioRunner::~ScenarioRunner() = default;

size_t ScenarioRunner::call_count() const { return impl_->scenario.calls.size(); }

RunStatus ScenarioRunner::step(size_t index) {
  const CallSpec& c = impl_->scenario.calls[index];
  try {
    impl_->dispatch(index);
    return RunStatus::Completed;
  } catch (const AbortSignal&) {
    return RunStatus::Aborted;  // record already logged by the handler
  } catch (const UnmappedFault& fault) {
    impl_->ctx.violation_log.append({ViolationKind::UnmappedAccess, c.fn,
                                     fault.address(), std::nullopt, 0,
                                     ViolationAction::Aborted});
    return RunStatus::Faulted;
  }
}

std::vector<std::pair<uint64_t, uint64_t>> ScenarioRunner::write_ranges(
    size_t index) const {
  const CallSpec& c = impl_->scenario.calls[index];
  std::vector<std::pair<uint64_t, uint64_t>> out;
  TaggedAddress target;
  if (c.fn == "strtok_ss") {
    if (c.src)
      target = impl_->resolve_src(index);
    else if (impl_->ctx.strtok_state)
      target = *impl_->ctx.strtok_state;
  } else if (c.fn != "strnlen_ss" && c.dest) {
    target = impl_->resolve(*c.dest);
  }
  if (target.tagged()) {
    auto [lower, upper] = bounds_of(target);
    out.emplace_back(lower, upper);
  }
  return out;
}

const AddressSpace& ScenarioRunner::space() const { return impl_->space; }
const LibraryContext& ScenarioRunner::context() const { return impl_->ctx; }
uint64_t ScenarioRunner::digest() const { return arena_digest(impl_->space); }

bool ScenarioRunner::neighbors_intact() const {
  for (const AllocationSpec& a : impl_->scenario.allocations) {
    if (!a.canary) continue;
    if (impl_->write_target_ids.count(a.id)) continue;
    uint64_t at = impl_->by_id.at(a.id).addr() + a.size - 1;
    if (impl_->space.read_byte(at) != *a.canary) return false;
  }
  return true;
}

Report run_scenario(const Scenario& scenario, Policy policy) {
  ScenarioRunner runner(scenario, policy);
  Report rep;
  rep.name = scenario.name;
  rep.policy = policy;
  for (size_t i = 0; i < runner.call_count(); ++i) {
    RunStatus st = runner.step(i);
    if (st != RunStatus::Completed) {
      rep.status = st;
      break;
    }
  }
  const LibraryContext& ctx = runner.context();
  for (const ViolationRecord& r : ctx.violation_log.stored())
    rep.violations.push_back(
        {to_string(r.kind), r.function, r.byte_offset});
  rep.violation_count = ctx.violation_log.size();
  rep.neighbor_intact = runner.neighbors_intact();
  rep.digest = runner.digest();
  rep.last_status = ctx.last_status;
  return rep;
}

std::vector<std::string> expectation_failures(const Scenario& scenario,
                                              const Report& report) {
  std::vector<std::string> out;
  auto it = scenario.expect.find(report.policy);
  if (it == scenario.expect.end()) return out;
  const Expectation& e = it->second;
  std::string prefix = std::string(to_string(report.policy)) + ": expected ";
  if (e.status && *e.status != to_string(report.status))
    out.push_back(prefix + "status=" + *e.status +
                  ", actual=" + to_string(report.status));
  if (e.min_violations && report.violation_count < *e.min_violations)
    out.push_back(prefix + "min_violations=" +
                  std::to_string(*e.min_violations) +
                  ", actual=" + std::to_string(report.violation_count));
  if (e.neighbor_intact && *e.neighbor_intact != report.neighbor_intact)
    out.push_back(prefix +
                  "neighbor_intact=" + (*e.neighbor_intact ? "true" : "false") +
                  ", actual=" + (report.neighbor_intact ? "true" : "false"));
  return out;
}

}  // namespace s3lab
