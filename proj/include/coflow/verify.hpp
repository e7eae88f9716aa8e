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

// Feasibility checking and objective computation. Everything here is
// derived from the raw assignments of a schedule; no scheduler bookkeeping
// is consulted.

#ifndef COFLOW_VERIFY_HPP_
#define COFLOW_VERIFY_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "coflow/dagstats.hpp"
#include "coflow/model.hpp"

namespace coflow {

enum class ScheduleViolationKind {
  kDimension,
  kBadItem,
  kUnknownFlow,
  kSenderCapacity,
  kReceiverCapacity,
  kDemandMismatch,
  kPrecedence,
  kRelease,
};

struct ScheduleViolation {
  ScheduleViolationKind kind;
  std::string message;
};

/// Raised when objectives are requested for a schedule that fails
/// verification.
class InfeasibleSchedule : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Completion slot (exclusive end) of every coflow. A coflow without
/// packets completes when its last predecessor does, or at its job's
/// release if it has none.
inline std::map<CoflowKey, Slot> coflow_completions(const Instance& inst,
                                                    const Schedule& sched) {
  const auto last = sched.last_packet_end();
  std::map<CoflowKey, Slot> out;
  for (const auto& job : inst.jobs) {
    const auto preds = predecessors(job);
    const auto order = detail::kahn_order(job);
    if (!order) continue;
    for (int id : *order) {
      Slot done = job.release;
      for (int p : preds.at(id)) done = std::max(done, out.at({job.id, p}));
      auto it = last.find({job.id, id});
      if (it != last.end()) done = std::max(done, it->second);
      out[{job.id, id}] = done;
    }
  }
  return out;
}

inline std::vector<ScheduleViolation> verify_schedule(const Instance& inst,
                                                      const Schedule& sched,
                                                      bool check_release = true) {
  std::vector<ScheduleViolation> out;
  auto report = [&](ScheduleViolationKind kind, std::string msg) {
    out.push_back({kind, std::move(msg)});
  };
  if (sched.m() != inst.m)
    report(ScheduleViolationKind::kDimension,
           "schedule has " + std::to_string(sched.m()) + " servers, instance " +
               std::to_string(inst.m));

  std::map<FlowKey, std::int64_t> demand;
  for (const auto& job : inst.jobs)
    for (const auto& c : job.coflows)
      for (const auto& [pair, size] : c.demand.entries())
        demand[{job.id, c.id, pair.src, pair.dst}] = size;

  std::map<int, std::vector<std::pair<Slot, Slot>>> sender_busy;
  std::map<int, std::vector<std::pair<Slot, Slot>>> receiver_busy;
  std::map<FlowKey, std::int64_t> sent;
  for (const auto& item : sched.items()) {
    if (item.duration <= 0 || item.start < 0) {
      report(ScheduleViolationKind::kBadItem,
             "item at " + std::to_string(item.start) + " has duration " +
                 std::to_string(item.duration));
      continue;
    }
    for (const auto& a : item.assignments) {
      const FlowKey key{a.job, a.coflow, a.src, a.dst};
      if (!demand.count(key)) {
        report(ScheduleViolationKind::kUnknownFlow,
               "slot " + std::to_string(item.start) + ": job " +
                   std::to_string(a.job) + " coflow " + std::to_string(a.coflow) +
                   " has no flow " + std::to_string(a.src) + "->" +
                   std::to_string(a.dst));
        continue;
      }
      sent[key] += item.duration;
      sender_busy[a.src].emplace_back(item.start, item.end());
      receiver_busy[a.dst].emplace_back(item.start, item.end());
    }
  }

  auto check_port = [&](auto& busy, ScheduleViolationKind kind,
                        const char* role) {
    for (auto& [port, spans] : busy) {
      std::sort(spans.begin(), spans.end());
      Slot reach = spans.front().first;
      for (const auto& [s, e] : spans) {
        if (s < reach) {
          report(kind, std::string(role) + " " + std::to_string(port) +
                           " used twice at slot " + std::to_string(s));
          break;
        }
        reach = e;
      }
    }
  };
  check_port(sender_busy, ScheduleViolationKind::kSenderCapacity, "sender");
  check_port(receiver_busy, ScheduleViolationKind::kReceiverCapacity, "receiver");

  for (const auto& [key, size] : demand) {
    auto it = sent.find(key);
    const std::int64_t got = it == sent.end() ? 0 : it->second;
    if (got != size)
      report(ScheduleViolationKind::kDemandMismatch,
             "job " + std::to_string(key.job) + " coflow " +
                 std::to_string(key.coflow) + " flow " + std::to_string(key.src) +
                 "->" + std::to_string(key.dst) + " sent " + std::to_string(got) +
                 " of " + std::to_string(size));
  }

  const auto first = sched.first_packet_start();
  const auto done = coflow_completions(inst, sched);
  for (const auto& job : inst.jobs) {
    for (const auto& [a, b] : job.edges) {
      auto fb = first.find({job.id, b});
      auto ca = done.find({job.id, a});
      if (fb == first.end() || ca == done.end()) continue;
      if (fb->second < ca->second)
        report(ScheduleViolationKind::kPrecedence,
               "job " + std::to_string(job.id) + ": coflow " + std::to_string(b) +
                   " starts at " + std::to_string(fb->second) + " before coflow " +
                   std::to_string(a) + " completes at " +
                   std::to_string(ca->second));
    }
    if (!check_release) continue;
    for (const auto& c : job.coflows) {
      auto it = first.find({job.id, c.id});
      if (it != first.end() && it->second < job.release)
        report(ScheduleViolationKind::kRelease,
               "job " + std::to_string(job.id) + " sends at " +
                   std::to_string(it->second) + " before its release " +
                   std::to_string(job.release));
    }
  }
  return out;
}

inline std::string describe(const std::vector<ScheduleViolation>& violations) {
  std::string out;
  for (const auto& v : violations) out += v.message + "\n";
  return out;
}

/// Job completion times and objectives. With `online`, completion is
/// measured from each job's release.
inline Metrics metrics(const Instance& inst, const Schedule& sched,
                       bool online = false) {
  auto violations = verify_schedule(inst, sched);
  if (!violations.empty())
    throw InfeasibleSchedule("metrics: infeasible schedule\n" + describe(violations));
  const auto done = coflow_completions(inst, sched);
  Metrics out;
  for (const auto& job : inst.jobs) {
    Slot c = job.release;
    for (const auto& cf : job.coflows) c = std::max(c, done.at({job.id, cf.id}));
    if (online) c -= job.release;
    out.per_job_completion[job.id] = c;
    out.makespan = std::max(out.makespan, c);
    out.total_weighted_completion += job.weight * c;
  }
  return out;
}

struct LowerBounds {
  std::int64_t aggregate = 0;      // Delta over all jobs
  std::int64_t critical_path = 0;  // max_j T_j
  std::int64_t max() const { return std::max(aggregate, critical_path); }
};

inline LowerBounds lower_bounds(const Instance& inst) {
  LowerBounds lb;
  DemandMatrix sum(inst.m);
  for (const auto& job : inst.jobs) {
    for (const auto& c : job.coflows) sum += c.demand;
    lb.critical_path = std::max(lb.critical_path, critical_path_size(job));
  }
  lb.aggregate = effective_size(sum);
  return lb;
}

}  // namespace coflow

#endif  // COFLOW_VERIFY_HPP_
