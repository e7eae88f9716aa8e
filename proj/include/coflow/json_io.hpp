// Copyright 2026 The coflow-dag Authors
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

// JSON encoding of instances, schedules and metrics (nlohmann::json).
//
// Instance:
//   {"num_servers": m, "jobs": [{"id", "weight", "release_time",
//     "coflows": [{"id", "flows": [{"src", "dst", "size"}]}],
//     "edges": [[a, b], ...]}]}
// Weights are numbers (read to the nearest 1e-6) or exact "p/q" strings.
//
// Schedule:
//   {"num_servers": m, "matchings": [{"start", "duration",
//     "assignments": [{"src", "dst", "job", "coflow"}]}]}

#ifndef COFLOW_JSON_IO_HPP_
#define COFLOW_JSON_IO_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "coflow/model.hpp"

namespace coflow {

using Json = nlohmann::json;

namespace detail {

inline const Json& field(const Json& obj, const char* name, const std::string& where) {
  if (!obj.is_object() || !obj.contains(name))
    throw InvalidInput(where + ": missing field '" + name + "'");
  return obj.at(name);
}

inline std::int64_t integer(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (std::isfinite(x) && x == std::floor(x) && std::fabs(x) < 9e15)
      return static_cast<std::int64_t>(x);
  }
  throw InvalidInput(where + ": expected an integer, got " + v.dump());
}

inline int small_integer(const Json& v, const std::string& where) {
  const auto x = integer(v, where);
  if (x < INT32_MIN || x > INT32_MAX) throw InvalidInput(where + ": integer out of range");
  return static_cast<int>(x);
}

inline Rational parse_weight(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_number_float()) {
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InvalidInput(where + ": weight is not finite");
    return Rational(static_cast<std::int64_t>(std::llround(x * 1e6))) / Rational(1000000);
  }
  if (v.is_string()) {
    try {
      return Rational(v.get<std::string>());
    } catch (const std::exception&) {
      throw InvalidInput(where + ": weight string must look like \"p/q\"");
    }
  }
  throw InvalidInput(where + ": weight must be a number or a \"p/q\" string");
}

inline Json weight_json(const Rational& w) {
  using boost::multiprecision::cpp_int;
  const cpp_int num = boost::multiprecision::numerator(w);
  const cpp_int den = boost::multiprecision::denominator(w);
  if (den == 1 && boost::multiprecision::abs(num) < cpp_int(1) << 53)
    return static_cast<std::int64_t>(num);
  if (cpp_int(1000000) % den == 0 && boost::multiprecision::abs(num) < cpp_int(1) << 40)
    return static_cast<double>(static_cast<std::int64_t>(num)) /
           static_cast<double>(static_cast<std::int64_t>(den));
  return w.str();
}

}  // namespace detail

/// Parses an instance. Structural problems throw InvalidInput; semantic
/// ones (cycles, bad ranges) are left to validate_instance.
inline Instance instance_from_json(const Json& doc) {
  using detail::field;
  Instance inst;
  inst.m = detail::small_integer(field(doc, "num_servers", "instance"), "num_servers");
  if (inst.m < 1) throw InvalidInput("num_servers must be at least 1");
  const Json& jobs = field(doc, "jobs", "instance");
  if (!jobs.is_array()) throw InvalidInput("instance: 'jobs' must be an array");
  for (const auto& jj : jobs) {
    Job job;
    job.id = detail::small_integer(field(jj, "id", "job"), "job id");
    const std::string where = "job " + std::to_string(job.id);
    job.weight = jj.contains("weight") ? detail::parse_weight(jj.at("weight"), where)
                                       : Rational(1);
    job.release = jj.contains("release_time")
                      ? detail::integer(jj.at("release_time"), where + " release_time")
                      : 0;
    const Json& coflows = field(jj, "coflows", where);
    if (!coflows.is_array()) throw InvalidInput(where + ": 'coflows' must be an array");
    for (const auto& cj : coflows) {
      Coflow c{detail::small_integer(field(cj, "id", where), where + " coflow id"),
               DemandMatrix(inst.m)};
      const std::string cw = where + " coflow " + std::to_string(c.id);
      const Json& flows = cj.contains("flows") ? cj.at("flows") : Json::array();
      if (!flows.is_array()) throw InvalidInput(cw + ": 'flows' must be an array");
      for (const auto& fj : flows) {
        const int src = detail::small_integer(field(fj, "src", cw), cw + " src");
        const int dst = detail::small_integer(field(fj, "dst", cw), cw + " dst");
        const auto size = detail::integer(field(fj, "size", cw), cw + " size");
        c.demand.add(src, dst, size);
      }
      job.coflows.push_back(std::move(c));
    }
    if (jj.contains("edges")) {
      const Json& edges = jj.at("edges");
      if (!edges.is_array()) throw InvalidInput(where + ": 'edges' must be an array");
      for (const auto& e : edges) {
        if (!e.is_array() || e.size() != 2)
          throw InvalidInput(where + ": each edge must be [from, to]");
        job.edges.emplace_back(detail::small_integer(e[0], where + " edge"),
                               detail::small_integer(e[1], where + " edge"));
      }
    }
    inst.jobs.push_back(std::move(job));
  }
  return inst;
}

inline Json to_json(const Instance& inst) {
  Json jobs = Json::array();
  for (const auto& job : inst.jobs) {
    Json coflows = Json::array();
    for (const auto& c : job.coflows) {
      Json flows = Json::array();
      for (const auto& [pair, size] : c.demand.entries())
        flows.push_back({{"src", pair.src}, {"dst", pair.dst}, {"size", size}});
      coflows.push_back({{"id", c.id}, {"flows", flows}});
    }
    Json edges = Json::array();
    for (const auto& [a, b] : job.edges) edges.push_back({a, b});
    jobs.push_back({{"id", job.id},
                    {"weight", detail::weight_json(job.weight)},
                    {"release_time", job.release},
                    {"coflows", coflows},
                    {"edges", edges}});
  }
  return {{"num_servers", inst.m}, {"jobs", jobs}};
}

inline Json to_json(const Schedule& sched) {
  Json items = Json::array();
  for (const auto& item : sched.items()) {
    Json assignments = Json::array();
    for (const auto& a : item.assignments)
      assignments.push_back({{"src", a.src}, {"dst", a.dst}, {"job", a.job}, {"coflow", a.coflow}});
    items.push_back(
        {{"start", item.start}, {"duration", item.duration}, {"assignments", assignments}});
  }
  return {{"num_servers", sched.m()}, {"matchings", items}};
}

inline Schedule schedule_from_json(const Json& doc) {
  using detail::field;
  Schedule sched(detail::small_integer(field(doc, "num_servers", "schedule"), "num_servers"));
  const Json& items = field(doc, "matchings", "schedule");
  if (!items.is_array()) throw InvalidInput("schedule: 'matchings' must be an array");
  for (const auto& ij : items) {
    TimedMatching item;
    item.start = detail::integer(field(ij, "start", "matching"), "matching start");
    item.duration = detail::integer(field(ij, "duration", "matching"), "matching duration");
    for (const auto& aj : field(ij, "assignments", "matching"))
      item.assignments.push_back({detail::small_integer(field(aj, "src", "assignment"), "src"),
                                  detail::small_integer(field(aj, "dst", "assignment"), "dst"),
                                  detail::small_integer(field(aj, "job", "assignment"), "job"),
                                  detail::small_integer(field(aj, "coflow", "assignment"), "coflow")});
    // Kept verbatim (even if empty or non-positive) so the verifier sees it.
    sched.mutable_items().push_back(std::move(item));
  }
  return sched;
}

inline Json to_json(const Metrics& m) {
  Json per_job = Json::object();
  for (const auto& [id, c] : m.per_job_completion) per_job[std::to_string(id)] = c;
  return {{"makespan", m.makespan},
          {"total_weighted_completion", m.total_weighted_completion.convert_to<double>()},
          {"total_weighted_completion_exact", m.total_weighted_completion.str()},
          {"per_job_completion", per_job}};
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace coflow

#endif  // COFLOW_JSON_IO_HPP_
