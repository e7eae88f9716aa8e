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

// Delay-and-merge scheduling of general DAG jobs.
//
//   1. Each job gets an isolated schedule: its coflows in topological order,
//      each decomposed with BNA and placed back to back.
//   2. Every isolated schedule is delayed by an independent uniform integer
//      in [0, floor(Delta / beta)].
//   3. The delayed schedules are summed. Ports may be oversubscribed.
//   4. The sum is cut at every breakpoint into intervals over which the set
//      of active matchings is constant; each interval's demand
//      l_I * D_I is re-decomposed with BNA and the pieces are laid out in
//      time order. The result is feasible and keeps precedence because
//      intervals never straddle a coflow boundary.

#ifndef COFLOW_DMA_HPP_
#define COFLOW_DMA_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "coflow/bna.hpp"
#include "coflow/dagstats.hpp"
#include "coflow/model.hpp"
#include "coflow/rng.hpp"

namespace coflow {

inline void require_beta(const Rational& beta) {
  // beta is rational and 1/e is not, so strict comparison in double is exact
  // enough: no rational with a small denominator lands within 1e-16 of 1/e.
  if (!(beta.convert_to<double>() > std::exp(-1.0)))
    throw InvalidInput("beta must exceed 1/e");
}

/// floor(delta / beta), the largest delay that can be drawn.
inline Slot max_delay(std::int64_t delta, const Rational& beta) {
  require_beta(beta);
  Rational q = Rational(delta) / beta;
  return static_cast<Slot>(
      boost::multiprecision::cpp_int(numerator(q) / denominator(q)));
}

struct CoflowSegment {
  int coflow = 0;
  Slot start = 0;  // relative to the job's schedule, before the delay
  BnaResult bna;
};

struct IsolatedSchedule {
  int job = 0;
  std::vector<CoflowSegment> segments;  // topological order
  Slot delay = 0;

  Slot span() const {
    return segments.empty() ? 0 : segments.back().start + segments.back().bna.span();
  }

  /// The delayed schedule as timed matchings.
  Schedule to_schedule(int m) const {
    Schedule out(m);
    for (const auto& seg : segments)
      out.append(bna_schedule(seg.bna, m, job, seg.coflow), seg.start + delay);
    return out;
  }
};

inline IsolatedSchedule isolated_schedule(const Job& job) {
  IsolatedSchedule iso;
  iso.job = job.id;
  Slot cursor = 0;
  for (int id : topological_order(job)) {
    CoflowSegment seg{id, cursor, bna_decompose(job.coflow(id).demand)};
    cursor += seg.bna.span();
    iso.segments.push_back(std::move(seg));
  }
  return iso;
}

/// Effective size of the sum of every coflow of every job.
inline std::int64_t instance_aggregate_size(const Instance& inst) {
  DemandMatrix sum(inst.m);
  for (const auto& job : inst.jobs)
    for (const auto& c : job.coflows) sum += c.demand;
  return effective_size(sum);
}

/// One independent uniform delay in [0, floor(delta/beta)] per job. The
/// stream for a job depends only on (seed, job id).
inline std::map<int, Slot> draw_delays(const std::vector<Job>& jobs,
                                       std::int64_t delta,
                                       const Rational& beta,
                                       std::uint64_t seed) {
  const Slot bound = max_delay(delta, beta);
  const Stream master(seed);
  std::map<int, Slot> delays;
  for (const auto& job : jobs) {
    Stream s = master.child({0x6a6f62ULL, static_cast<std::uint64_t>(job.id)});
    delays[job.id] = static_cast<Slot>(s.uniform_to(static_cast<std::uint64_t>(bound)));
  }
  return delays;
}

/// Interval [start, start + length) of a merged timeline. Each active
/// assignment stands for `length` packets of its flow.
struct TimelineInterval {
  Slot start = 0;
  Slot length = 0;
  std::vector<Assignment> active;

  /// Max number of active assignments sharing a port (alpha for every slot
  /// in the interval).
  int port_load() const {
    std::map<int, int> senders;
    std::map<int, int> receivers;
    int load = 0;
    for (const auto& a : active) {
      load = std::max(load, ++senders[a.src]);
      load = std::max(load, ++receivers[a.dst]);
    }
    return load;
  }

  DemandMatrix demand(int m) const {
    DemandMatrix d(m);
    for (const auto& a : active) d.add(a.src, a.dst, length);
    return d;
  }
};

struct MergedTimeline {
  int m = 0;
  std::vector<Slot> breakpoints;
  std::vector<TimelineInterval> intervals;

  /// Length of the merged (possibly infeasible) schedule measured from 0.
  Slot span() const { return breakpoints.empty() ? 0 : breakpoints.back(); }
};

/// Sums a set of (already delayed) schedules. Every start and end becomes
/// a breakpoint, so within an interval each contributing matching is
/// constant.
inline MergedTimeline merge(int m, const std::vector<Schedule>& delayed) {
  MergedTimeline tl;
  tl.m = m;
  std::set<Slot> points;
  for (const auto& sched : delayed)
    for (const auto& item : sched.items()) {
      if (item.start < 0) throw InvalidInput("merge: negative start time");
      points.insert(item.start);
      points.insert(item.end());
    }
  tl.breakpoints.assign(points.begin(), points.end());
  if (tl.breakpoints.size() < 2) return tl;

  tl.intervals.resize(tl.breakpoints.size() - 1);
  for (std::size_t k = 0; k + 1 < tl.breakpoints.size(); ++k) {
    tl.intervals[k].start = tl.breakpoints[k];
    tl.intervals[k].length = tl.breakpoints[k + 1] - tl.breakpoints[k];
  }
  for (const auto& sched : delayed)
    for (const auto& item : sched.items()) {
      auto lo = std::lower_bound(tl.breakpoints.begin(), tl.breakpoints.end(),
                                 item.start) - tl.breakpoints.begin();
      auto hi = std::lower_bound(tl.breakpoints.begin(), tl.breakpoints.end(),
                                 item.end()) - tl.breakpoints.begin();
      for (auto k = lo; k < hi; ++k) {
        auto& active = tl.intervals[k].active;
        active.insert(active.end(), item.assignments.begin(),
                      item.assignments.end());
      }
    }
  for (auto& interval : tl.intervals)
    std::sort(interval.active.begin(), interval.active.end());
  return tl;
}

namespace detail {

struct FlowQuota {
  int job = 0;
  int coflow = 0;
  Slot remaining = 0;
};

// Lays a BNA decomposition of a multi-flow demand out in time. `queues`
// lists, per port pair, which flows own how many of the pair's packets;
// each pair's packets are handed to its flows in queue order, splitting a
// matching wherever the owning flow changes.
inline void layout_attributed(const BnaResult& bna,
                              std::map<PortPair, std::vector<FlowQuota>> queues,
                              Slot origin, Schedule& out) {
  std::map<PortPair, std::size_t> head;
  for (std::size_t k = 0; k < bna.matchings.size(); ++k) {
    const Slot dur = bna.duration(k);
    struct Piece {
      Slot begin, end;
      Assignment a;
    };
    std::vector<Piece> pieces;
    std::set<Slot> cuts{0, dur};
    for (const auto& pair : bna.matchings[k]) {
      auto& queue = queues.at(pair);
      auto& h = head[pair];
      Slot offset = 0;
      while (offset < dur) {
        if (h >= queue.size())
          throw InternalError("feasibilize: decomposition exceeds flow demand");
        auto& quota = queue[h];
        const Slot take = std::min(quota.remaining, dur - offset);
        pieces.push_back({offset, offset + take,
                          {pair.src, pair.dst, quota.job, quota.coflow}});
        offset += take;
        quota.remaining -= take;
        if (quota.remaining == 0) ++h;
        cuts.insert(offset);
      }
    }
    std::vector<Slot> cut_list(cuts.begin(), cuts.end());
    for (std::size_t c = 0; c + 1 < cut_list.size(); ++c) {
      TimedMatching item{origin + bna.times[k] + cut_list[c],
                         cut_list[c + 1] - cut_list[c], {}};
      for (const auto& p : pieces)
        if (p.begin <= cut_list[c] && cut_list[c + 1] <= p.end)
          item.assignments.push_back(p.a);
      out.add(std::move(item));
    }
  }
}

}  // namespace detail

/// Turns a merged timeline into a feasible schedule. Each interval with
/// demand takes exactly effective_size(l_I * D_I) slots; idle intervals
/// (including the lead-in before the first breakpoint) keep their length,
/// so a timeline that is already feasible comes back unchanged.
inline Schedule feasibilize(const MergedTimeline& tl, Slot origin = 0) {
  Schedule out(tl.m);
  if (tl.breakpoints.empty()) return out;
  Slot cursor = origin + tl.breakpoints.front();
  for (const auto& interval : tl.intervals) {
    if (interval.active.empty()) {
      cursor += interval.length;
      continue;
    }
    std::map<PortPair, std::vector<detail::FlowQuota>> queues;
    for (const auto& a : interval.active)
      queues[{a.src, a.dst}].push_back({a.job, a.coflow, interval.length});
    const BnaResult bna = bna_decompose(interval.demand(tl.m));
    detail::layout_attributed(bna, std::move(queues), cursor, out);
    cursor += bna.span();
  }
  return out;
}

struct DmaOptions {
  Rational beta = 2;
  std::uint64_t seed = 0;
  /// Shift the output so nothing starts before the latest release time.
  bool gate_release = false;
};

struct DmaResult {
  Schedule schedule;
  MergedTimeline timeline;
  std::map<int, Slot> delays;
  std::int64_t delta = 0;  // aggregate size of the whole instance
  std::size_t mu = 0;      // max coflows per job
  Slot merged_span = 0;
};

/// Upper bound (mu + 1/beta) * Delta on the merged timeline length.
inline Rational merged_span_bound(std::size_t mu, std::int64_t delta,
                                  const Rational& beta) {
  return (Rational(static_cast<std::int64_t>(mu)) + Rational(1) / beta) *
         Rational(delta);
}

inline DmaResult dma(const Instance& inst, const DmaOptions& opts = {}) {
  require_valid(inst);
  require_beta(opts.beta);
  DmaResult result;
  result.schedule = Schedule(inst.m);
  result.timeline.m = inst.m;
  result.delta = instance_aggregate_size(inst);
  result.mu = max_coflows_per_job(inst);
  if (inst.jobs.empty()) return result;

  result.delays = draw_delays(inst.jobs, result.delta, opts.beta, opts.seed);
  std::vector<Schedule> delayed;
  delayed.reserve(inst.jobs.size());
  for (const auto& job : inst.jobs) {
    IsolatedSchedule iso = isolated_schedule(job);
    iso.delay = result.delays.at(job.id);
    delayed.push_back(iso.to_schedule(inst.m));
  }
  result.timeline = merge(inst.m, delayed);
  result.merged_span = result.timeline.span();
  result.schedule = feasibilize(result.timeline);
  if (opts.gate_release) result.schedule.shift(latest_release(inst));
  return result;
}

}  // namespace coflow

#endif  // COFLOW_DMA_HPP_
