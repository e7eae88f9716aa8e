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

// Domain types for multi-stage coflow scheduling on an m x m non-blocking
// switch: demand matrices, coflows, DAG jobs, instances and run-length
// encoded schedules.
//
// Ports are 1-based throughout the public API (sender s in [1, m], receiver
// r in [1, m]). Time is measured in integer slots starting at 0; a packet
// sent in slot t occupies [t, t+1).

#ifndef COFLOW_MODEL_HPP_
#define COFLOW_MODEL_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace coflow {

using Rational = boost::multiprecision::cpp_rational;
using Slot = std::int64_t;

/// Thrown when an input violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an algorithm detects that one of its own invariants broke.
/// Seeing this means a bug, not bad input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct PortPair {
  int src = 0;
  int dst = 0;
  friend auto operator<=>(const PortPair&, const PortPair&) = default;
};

/// Sparse m x m matrix of nonnegative integer flow sizes.
class DemandMatrix {
 public:
  DemandMatrix() = default;
  explicit DemandMatrix(int m) : m_(m) {
    if (m < 0) throw InvalidInput("DemandMatrix: negative dimension");
  }

  int size() const { return m_; }

  /// Sets entry (src, dst); a zero size erases it. Range-checked.
  void set(int src, int dst, std::int64_t size) {
    check_index(src, dst);
    if (size < 0) throw InvalidInput("DemandMatrix: negative flow size");
    if (size == 0) {
      entries_.erase({src, dst});
    } else {
      entries_[{src, dst}] = size;
    }
  }

  void add(int src, int dst, std::int64_t size) {
    check_index(src, dst);
    if (size < 0) throw InvalidInput("DemandMatrix: negative flow size");
    if (size == 0) return;
    entries_[{src, dst}] += size;
  }

  std::int64_t at(int src, int dst) const {
    auto it = entries_.find({src, dst});
    return it == entries_.end() ? 0 : it->second;
  }

  /// Positive entries in (src, dst) lexicographic order.
  const std::map<PortPair, std::int64_t>& entries() const { return entries_; }

  bool empty() const { return entries_.empty(); }

  std::int64_t total() const {
    std::int64_t sum = 0;
    for (const auto& [pair, size] : entries_) sum += size;
    return sum;
  }

  DemandMatrix& operator+=(const DemandMatrix& other) {
    if (other.m_ != m_) throw InvalidInput("DemandMatrix: dimension mismatch");
    for (const auto& [pair, size] : other.entries_) entries_[pair] += size;
    return *this;
  }

  DemandMatrix scaled(std::int64_t factor) const {
    DemandMatrix out(m_);
    if (factor == 0) return out;
    for (const auto& [pair, size] : entries_) out.entries_[pair] = size * factor;
    return out;
  }

  friend bool operator==(const DemandMatrix&, const DemandMatrix&) = default;

  /// Builds a matrix from a dense row-major table (rows = senders).
  static DemandMatrix from_dense(
      const std::vector<std::vector<std::int64_t>>& rows) {
    const int m = static_cast<int>(rows.size());
    DemandMatrix d(m);
    for (int s = 0; s < m; ++s) {
      if (static_cast<int>(rows[s].size()) != m)
        throw InvalidInput("DemandMatrix::from_dense: table is not square");
      for (int r = 0; r < m; ++r) d.set(s + 1, r + 1, rows[s][r]);
    }
    return d;
  }

 private:
  void check_index(int src, int dst) const {
    if (src < 1 || src > m_ || dst < 1 || dst > m_) {
      std::ostringstream os;
      os << "DemandMatrix: index (" << src << "," << dst
         << ") outside [1," << m_ << "]";
      throw InvalidInput(os.str());
    }
  }

  int m_ = 0;
  std::map<PortPair, std::int64_t> entries_;
};

struct Coflow {
  int id = 0;
  DemandMatrix demand;
  friend bool operator==(const Coflow&, const Coflow&) = default;
};

/// A multi-stage job: a DAG of coflows. Edge (a, b) means coflow a must
/// finish before any flow of coflow b starts.
struct Job {
  int id = 0;
  Rational weight = 1;
  Slot release = 0;
  std::vector<Coflow> coflows;
  std::vector<std::pair<int, int>> edges;

  /// Position of the coflow with the given id, or nullopt.
  std::optional<std::size_t> index_of(int coflow_id) const {
    for (std::size_t i = 0; i < coflows.size(); ++i)
      if (coflows[i].id == coflow_id) return i;
    return std::nullopt;
  }

  const Coflow& coflow(int coflow_id) const {
    auto idx = index_of(coflow_id);
    if (!idx) throw InvalidInput("Job: unknown coflow id");
    return coflows[*idx];
  }

  friend bool operator==(const Job&, const Job&) = default;
};

struct Instance {
  int m = 1;
  std::vector<Job> jobs;

  const Job* find_job(int job_id) const {
    for (const auto& job : jobs)
      if (job.id == job_id) return &job;
    return nullptr;
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct Assignment {
  int src = 0;
  int dst = 0;
  int job = 0;
  int coflow = 0;
  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

/// One matching of the switch held for `duration` consecutive slots.
struct TimedMatching {
  Slot start = 0;
  Slot duration = 0;
  std::vector<Assignment> assignments;

  Slot end() const { return start + duration; }

  /// True when no sender and no receiver repeats.
  bool is_matching() const {
    std::set<int> senders;
    std::set<int> receivers;
    for (const auto& a : assignments) {
      if (!senders.insert(a.src).second) return false;
      if (!receivers.insert(a.dst).second) return false;
    }
    return true;
  }

  friend bool operator==(const TimedMatching&, const TimedMatching&) = default;
};

struct FlowKey {
  int job = 0;
  int coflow = 0;
  int src = 0;
  int dst = 0;
  friend auto operator<=>(const FlowKey&, const FlowKey&) = default;
};

struct CoflowKey {
  int job = 0;
  int coflow = 0;
  friend auto operator<=>(const CoflowKey&, const CoflowKey&) = default;
};

/// Run-length encoded schedule. Items may appear in any order; queries do
/// not assume sorting.
class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(int m) : m_(m) {}

  int m() const { return m_; }
  const std::vector<TimedMatching>& items() const { return items_; }
  std::vector<TimedMatching>& mutable_items() { return items_; }

  void add(TimedMatching item) {
    if (item.duration <= 0 || item.assignments.empty()) return;
    items_.push_back(std::move(item));
  }

  void append(const Schedule& other, Slot offset) {
    for (auto item : other.items_) {
      item.start += offset;
      add(std::move(item));
    }
  }

  /// Shifts every item by `offset` slots.
  void shift(Slot offset) {
    for (auto& item : items_) item.start += offset;
  }

  bool empty() const { return items_.empty(); }

  /// One past the last occupied slot (0 for an empty schedule).
  Slot span_end() const {
    Slot end = 0;
    for (const auto& item : items_) end = std::max(end, item.end());
    return end;
  }

  Slot first_start() const {
    if (items_.empty()) return 0;
    Slot start = items_.front().start;
    for (const auto& item : items_) start = std::min(start, item.start);
    return start;
  }

  /// Packets sent per flow.
  std::map<FlowKey, std::int64_t> transmitted() const {
    std::map<FlowKey, std::int64_t> out;
    for (const auto& item : items_)
      for (const auto& a : item.assignments)
        out[{a.job, a.coflow, a.src, a.dst}] += item.duration;
    return out;
  }

  std::int64_t transmitted(const FlowKey& key) const {
    std::int64_t sum = 0;
    for (const auto& item : items_)
      for (const auto& a : item.assignments)
        if (a.job == key.job && a.coflow == key.coflow && a.src == key.src &&
            a.dst == key.dst)
          sum += item.duration;
    return sum;
  }

  /// Packets sent by sender `port` in slot t.
  int sender_load(int port, Slot t) const {
    int load = 0;
    for (const auto& item : items_)
      if (item.start <= t && t < item.end())
        for (const auto& a : item.assignments) load += (a.src == port);
    return load;
  }

  /// Packets received by receiver `port` in slot t.
  int receiver_load(int port, Slot t) const {
    int load = 0;
    for (const auto& item : items_)
      if (item.start <= t && t < item.end())
        for (const auto& a : item.assignments) load += (a.dst == port);
    return load;
  }

  std::int64_t packet_count() const {
    std::int64_t sum = 0;
    for (const auto& item : items_)
      sum += item.duration * static_cast<std::int64_t>(item.assignments.size());
    return sum;
  }

  /// Exclusive end of the last packet of each coflow that sent anything.
  std::map<CoflowKey, Slot> last_packet_end() const {
    std::map<CoflowKey, Slot> out;
    for (const auto& item : items_)
      for (const auto& a : item.assignments) {
        auto [it, inserted] = out.try_emplace({a.job, a.coflow}, item.end());
        if (!inserted) it->second = std::max(it->second, item.end());
      }
    return out;
  }

  std::map<CoflowKey, Slot> first_packet_start() const {
    std::map<CoflowKey, Slot> out;
    for (const auto& item : items_)
      for (const auto& a : item.assignments) {
        auto [it, inserted] = out.try_emplace({a.job, a.coflow}, item.start);
        if (!inserted) it->second = std::min(it->second, item.start);
      }
    return out;
  }

  /// Sorts items by start and assignments within each item; canonical form
  /// for comparisons and serialization.
  void normalize() {
    for (auto& item : items_)
      std::sort(item.assignments.begin(), item.assignments.end());
    std::stable_sort(items_.begin(), items_.end(),
                     [](const TimedMatching& a, const TimedMatching& b) {
                       return a.start < b.start;
                     });
  }

  friend bool operator==(const Schedule&, const Schedule&) = default;

 private:
  int m_ = 0;
  std::vector<TimedMatching> items_;
};

struct Metrics {
  Slot makespan = 0;
  std::map<int, Slot> per_job_completion;
  Rational total_weighted_completion = 0;
};

enum class ViolationKind {
  kServerCount,
  kDimension,
  kIndexRange,
  kNegativeSize,
  kNonPositiveWeight,
  kNegativeRelease,
  kDuplicateJob,
  kDuplicateCoflow,
  kUnknownEdgeEndpoint,
  kSelfLoop,
  kCycle,
};

struct InstanceViolation {
  ViolationKind kind;
  int job = 0;
  std::string message;
};

namespace detail {

/// Kahn's algorithm with lowest-id-first tie-breaking. Returns nullopt when
/// the graph has a cycle. Edges with unknown endpoints are ignored.
inline std::optional<std::vector<int>> kahn_order(const Job& job) {
  std::map<int, int> indegree;
  std::map<int, std::vector<int>> out;
  for (const auto& c : job.coflows) indegree[c.id] = 0;
  for (const auto& [a, b] : job.edges) {
    if (!indegree.count(a) || !indegree.count(b)) continue;
    out[a].push_back(b);
    ++indegree[b];
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (const auto& [id, deg] : indegree)
    if (deg == 0) ready.push(id);
  std::vector<int> order;
  order.reserve(indegree.size());
  while (!ready.empty()) {
    int id = ready.top();
    ready.pop();
    order.push_back(id);
    for (int next : out[id])
      if (--indegree[next] == 0) ready.push(next);
  }
  if (order.size() != indegree.size()) return std::nullopt;
  return order;
}

}  // namespace detail

/// Structural checks of an instance. An empty result means valid.
inline std::vector<InstanceViolation> validate_instance(const Instance& inst) {
  std::vector<InstanceViolation> out;
  auto report = [&](ViolationKind kind, int job, std::string msg) {
    out.push_back({kind, job, std::move(msg)});
  };
  if (inst.m < 1) report(ViolationKind::kServerCount, 0, "num_servers < 1");

  std::set<int> job_ids;
  for (const auto& job : inst.jobs) {
    const std::string where = "job " + std::to_string(job.id) + ": ";
    if (!job_ids.insert(job.id).second)
      report(ViolationKind::kDuplicateJob, job.id, where + "duplicate job id");
    if (job.weight <= 0)
      report(ViolationKind::kNonPositiveWeight, job.id,
             where + "weight must be positive");
    if (job.release < 0)
      report(ViolationKind::kNegativeRelease, job.id,
             where + "release time must be nonnegative");

    std::set<int> coflow_ids;
    for (const auto& c : job.coflows) {
      if (!coflow_ids.insert(c.id).second)
        report(ViolationKind::kDuplicateCoflow, job.id,
               where + "duplicate coflow id " + std::to_string(c.id));
      if (c.demand.size() != inst.m)
        report(ViolationKind::kDimension, job.id,
               where + "coflow " + std::to_string(c.id) +
                   " demand matrix is not m x m");
      for (const auto& [pair, size] : c.demand.entries()) {
        if (pair.src < 1 || pair.src > inst.m || pair.dst < 1 ||
            pair.dst > inst.m)
          report(ViolationKind::kIndexRange, job.id,
                 where + "flow (" + std::to_string(pair.src) + "," +
                     std::to_string(pair.dst) + ") outside [1," +
                     std::to_string(inst.m) + "]");
        if (size < 0)
          report(ViolationKind::kNegativeSize, job.id,
                 where + "negative flow size");
      }
    }

    bool endpoints_ok = true;
    for (const auto& [a, b] : job.edges) {
      if (!coflow_ids.count(a) || !coflow_ids.count(b)) {
        endpoints_ok = false;
        report(ViolationKind::kUnknownEdgeEndpoint, job.id,
               where + "edge (" + std::to_string(a) + "," + std::to_string(b) +
                   ") references unknown coflow");
      } else if (a == b) {
        report(ViolationKind::kSelfLoop, job.id,
               where + "self loop on coflow " + std::to_string(a));
      }
    }
    if (endpoints_ok && !detail::kahn_order(job))
      report(ViolationKind::kCycle, job.id, where + "precedence graph has a cycle");
  }
  return out;
}

/// Throws InvalidInput listing every violation, if any.
inline void require_valid(const Instance& inst) {
  auto violations = validate_instance(inst);
  if (violations.empty()) return;
  std::string msg = "invalid instance:";
  for (const auto& v : violations) msg += "\n  " + v.message;
  throw InvalidInput(msg);
}

inline std::size_t max_coflows_per_job(const Instance& inst) {
  std::size_t mu = 0;
  for (const auto& job : inst.jobs) mu = std::max(mu, job.coflows.size());
  return mu;
}

inline Slot latest_release(const Instance& inst) {
  Slot r = 0;
  for (const auto& job : inst.jobs) r = std::max(r, job.release);
  return r;
}

}  // namespace coflow

#endif  // COFLOW_MODEL_HPP_
