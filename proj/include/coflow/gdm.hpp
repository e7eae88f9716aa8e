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

// Total weighted completion time pipelines.
//
// G-DM orders the jobs with the primal-dual rule, computes each job's key
// T_j + rho_j + D_j, groups jobs geometrically by key and runs DMA (or
// DMA-RT for G-DM-RT) on one group after another. Group b starts once the
// previous group is done and every job of group b has been released.
//
// Also here: greedy backfilling of idle port pairs, and the online driver
// that re-plans all unfinished work at every arrival.

#ifndef COFLOW_GDM_HPP_
#define COFLOW_GDM_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coflow/baseline.hpp"
#include "coflow/dagstats.hpp"
#include "coflow/dma.hpp"
#include "coflow/grouping.hpp"
#include "coflow/model.hpp"
#include "coflow/ordering.hpp"
#include "coflow/rng.hpp"
#include "coflow/rooted.hpp"
#include "coflow/verify.hpp"

namespace coflow {

// ---------------------------------------------------------------------------
// Backfilling

/// Fills port pairs the base schedule leaves idle with packets of released,
/// precedence-ready, unfinished flows. Candidates are scanned by job
/// `priority`, then the job's topological order, then (src, dst).
///
/// Every packet the base schedule sends is still sent in the same slot
/// unless its flow already finished through backfilled packets, so each
/// flow's progress never lags the base schedule and no job completes later.
inline Schedule backfill(const Instance& inst, const Schedule& base,
                         const std::vector<int>& priority) {
  struct FlowState {
    FlowKey key;
    std::int64_t remaining = 0;
    int coflow_index = 0;
  };
  struct CoflowState {
    int job = 0;
    int id = 0;
    Slot release = 0;
    std::vector<int> preds;  // coflow indices
    std::vector<int> succs;
    int open_flows = 0;
    bool done = false;
  };

  std::vector<int> job_order = priority;
  for (const auto& job : inst.jobs)
    if (std::find(job_order.begin(), job_order.end(), job.id) == job_order.end())
      job_order.push_back(job.id);

  std::vector<FlowState> flows;
  std::vector<CoflowState> coflows;
  std::map<CoflowKey, int> coflow_index;
  std::map<FlowKey, int> flow_index;
  for (int id : job_order) {
    const Job* job = inst.find_job(id);
    if (!job) continue;
    for (int c : topological_order(*job)) {
      const int ci = static_cast<int>(coflows.size());
      coflow_index[{job->id, c}] = ci;
      coflows.push_back({job->id, c, job->release, {}, {}, 0, false});
      for (const auto& [pair, size] : job->coflow(c).demand.entries()) {
        flow_index[{job->id, c, pair.src, pair.dst}] = static_cast<int>(flows.size());
        flows.push_back({{job->id, c, pair.src, pair.dst}, size, ci});
        ++coflows[ci].open_flows;
      }
    }
    for (const auto& [a, b] : job->edges) {
      const int ia = coflow_index.at({job->id, a});
      const int ib = coflow_index.at({job->id, b});
      coflows[ib].preds.push_back(ia);
      coflows[ia].succs.push_back(ib);
    }
  }

  auto ready = [&](int ci, Slot t) {
    const auto& c = coflows[ci];
    if (t < c.release) return false;
    for (int p : c.preds)
      if (!coflows[p].done) return false;
    return true;
  };
  // Empty coflows finish as soon as their predecessors have.
  auto settle = [&](Slot t) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t ci = 0; ci < coflows.size(); ++ci) {
        auto& c = coflows[ci];
        if (!c.done && c.open_flows == 0 && ready(static_cast<int>(ci), t)) {
          c.done = true;
          changed = true;
        }
      }
    }
  };

  std::set<Slot> points{0};
  for (const auto& item : base.items()) {
    points.insert(item.start);
    points.insert(item.end());
  }
  std::set<Slot> releases;
  for (const auto& c : coflows) releases.insert(c.release);

  std::vector<Slot> bp(points.begin(), points.end());
  std::vector<std::vector<int>> active(bp.size());
  for (const auto& item : base.items()) {
    auto lo = std::lower_bound(bp.begin(), bp.end(), item.start) - bp.begin();
    auto hi = std::lower_bound(bp.begin(), bp.end(), item.end()) - bp.begin();
    for (const auto& a : item.assignments) {
      auto it = flow_index.find({a.job, a.coflow, a.src, a.dst});
      if (it == flow_index.end())
        throw InvalidInput("backfill: base schedule sends an unknown flow");
      for (auto k = lo; k < hi; ++k) active[k].push_back(it->second);
    }
  }

  Schedule out(base.m());
  settle(0);
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    Slot cur = bp[k];
    const Slot seg_end = bp[k + 1];
    while (cur < seg_end) {
      settle(cur);
      std::vector<int> chosen;
      std::set<int> senders;
      std::set<int> receivers;
      for (int f : active[k]) {
        if (flows[f].remaining == 0) continue;
        if (!ready(flows[f].coflow_index, cur))
          throw InternalError("backfill: base packet of a flow that is not ready");
        chosen.push_back(f);
        senders.insert(flows[f].key.src);
        receivers.insert(flows[f].key.dst);
      }
      for (std::size_t f = 0; f < flows.size(); ++f) {
        const auto& fs = flows[f];
        if (fs.remaining == 0 || senders.count(fs.key.src) ||
            receivers.count(fs.key.dst) || !ready(fs.coflow_index, cur))
          continue;
        chosen.push_back(static_cast<int>(f));
        senders.insert(fs.key.src);
        receivers.insert(fs.key.dst);
      }
      Slot run = seg_end - cur;
      for (int f : chosen) run = std::min(run, flows[f].remaining);
      auto next_release = releases.upper_bound(cur);
      if (next_release != releases.end()) run = std::min(run, *next_release - cur);
      if (chosen.empty()) {
        cur += run;
        continue;
      }
      TimedMatching item{cur, run, {}};
      for (int f : chosen) {
        auto& fs = flows[f];
        item.assignments.push_back({fs.key.src, fs.key.dst, fs.key.job, fs.key.coflow});
        fs.remaining -= run;
        if (fs.remaining == 0) --coflows[fs.coflow_index].open_flows;
      }
      cur += run;
      for (auto& c : coflows)
        if (!c.done && c.open_flows == 0 && std::all_of(c.preds.begin(), c.preds.end(),
                                                        [&](int p) { return coflows[p].done; }))
          c.done = true;
      out.add(std::move(item));
    }
  }
  for (const auto& fs : flows)
    if (fs.remaining != 0)
      throw InternalError("backfill: base schedule does not deliver every flow");
  return out;
}

// ---------------------------------------------------------------------------
// G-DM

struct GdmOptions {
  Rational beta = 2;
  std::uint64_t seed = 0;
  bool rooted = false;    // DMA-RT per group instead of DMA
  bool backfill = false;
};

struct GdmResult {
  Schedule schedule;  // final (backfilled when requested)
  Schedule base;      // before backfilling
  Metrics metrics;
  OrderingResult ordering;
  std::map<int, std::int64_t> prefix_sizes;  // D_j
  Grouping grouping;
  std::map<int, Slot> group_start;  // b -> first slot the group may use
};

inline GdmResult g_dm(const Instance& inst, const GdmOptions& opts = {}) {
  require_valid(inst);
  if (opts.rooted) require_rooted_trees(inst);
  require_beta(opts.beta);

  GdmResult out;
  out.base = Schedule(inst.m);
  out.ordering = order_jobs(inst);
  out.prefix_sizes = prefix_effective_sizes(inst, out.ordering.sigma);
  std::map<int, std::int64_t> keys;
  // Jobs with nothing to send are keyed on T_j + rho_j alone.
  for (const auto& job : inst.jobs) {
    const bool empty = aggregate_size(job) == 0;
    keys[job.id] = critical_path_size(job) + job.release +
                   (empty ? 0 : out.prefix_sizes.at(job.id));
  }
  out.grouping = partition(inst, keys, out.ordering.sigma);

  // Groups are scheduled from J_0 upward; J_0 is not skipped.
  Slot cursor = 0;
  for (std::size_t b = 0; b < out.grouping.groups.size(); ++b) {
    const auto& ids = out.grouping.groups[b];
    if (ids.empty()) continue;
    Instance group{inst.m, {}};
    for (int id : ids) group.jobs.push_back(*inst.find_job(id));
    const Slot start = std::max(cursor, latest_release(group));
    for (auto& job : group.jobs) job.release = 0;
    const DmaOptions dopts{opts.beta, opts.seed, false};
    const Schedule part =
        opts.rooted ? dma_rt(group, dopts).schedule : dma(group, dopts).schedule;
    out.group_start[static_cast<int>(b)] = start;
    out.base.append(part, start);
    cursor = start + part.span_end();
  }

  out.schedule = opts.backfill ? backfill(inst, out.base, out.ordering.sigma)
                               : out.base;
  out.metrics = metrics(inst, out.schedule);
  return out;
}

inline GdmResult g_dm_rt(const Instance& inst, GdmOptions opts = {}) {
  opts.rooted = true;
  return g_dm(inst, opts);
}

// ---------------------------------------------------------------------------
// Algorithm selection and the online driver

enum class Algorithm { kDma, kDmaRt, kGdm, kGdmRt, kBaseline };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kDma: return "dma";
    case Algorithm::kDmaRt: return "dma-rt";
    case Algorithm::kGdm: return "gdm";
    case Algorithm::kGdmRt: return "gdm-rt";
    case Algorithm::kBaseline: return "baseline";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& name) {
  for (auto a : {Algorithm::kDma, Algorithm::kDmaRt, Algorithm::kGdm,
                 Algorithm::kGdmRt, Algorithm::kBaseline})
    if (to_string(a) == name) return a;
  return std::nullopt;
}

inline bool needs_rooted_trees(Algorithm a) {
  return a == Algorithm::kDmaRt || a == Algorithm::kGdmRt;
}

struct RunOptions {
  Rational beta = 2;
  std::uint64_t seed = 0;
  bool backfill = false;
};

/// Runs one algorithm offline and returns a feasible schedule. Makespan
/// algorithms are gated at the latest release so the result respects every
/// release time.
inline Schedule run_algorithm(const Instance& inst, Algorithm algo,
                              const RunOptions& opts) {
  Schedule base;
  switch (algo) {
    case Algorithm::kGdm:
    case Algorithm::kGdmRt:
      return g_dm(inst, {opts.beta, opts.seed, algo == Algorithm::kGdmRt,
                         opts.backfill})
          .schedule;
    case Algorithm::kDma:
      base = dma(inst, {opts.beta, opts.seed, true}).schedule;
      break;
    case Algorithm::kDmaRt:
      base = dma_rt(inst, {opts.beta, opts.seed, true}).schedule;
      break;
    case Algorithm::kBaseline:
      base = sequential_baseline(inst, true).schedule;
      break;
  }
  if (!opts.backfill) return base;
  return backfill(inst, base, order_jobs(inst).sigma);
}

/// Seed of the re-plan at the e-th arrival epoch: the run seed itself for
/// the first epoch, an independent split stream after that.
inline std::uint64_t online_epoch_seed(std::uint64_t seed, std::size_t epoch) {
  return epoch == 0 ? seed : Stream(seed).child({0x6f6e6c, epoch}).next();
}

struct OnlineResult {
  Schedule schedule;
  Metrics metrics;  // completion measured from each job's arrival
  int replans = 0;
};

/// Online execution: at every distinct arrival epoch, freezes what has been
/// sent, rebuilds the residual demand of every arrived unfinished job
/// (finished coflows stay as empty nodes so job graphs keep their shape) and
/// re-plans all of it from the current clock with `algo`.
inline OnlineResult simulate_online(const Instance& inst, Algorithm algo,
                                    const RunOptions& opts) {
  require_valid(inst);
  if (needs_rooted_trees(algo)) require_rooted_trees(inst);
  std::set<Slot> epochs;
  for (const auto& job : inst.jobs) epochs.insert(job.release);
  const std::vector<Slot> epoch_list(epochs.begin(), epochs.end());

  OnlineResult out;
  out.schedule = Schedule(inst.m);
  std::map<FlowKey, std::int64_t> sent;

  for (std::size_t e = 0; e < epoch_list.size(); ++e) {
    const Slot now = epoch_list[e];
    // Only the part of the plan before the next arrival is executed.
    const Slot horizon = e + 1 < epoch_list.size() ? epoch_list[e + 1] - now
                                                   : std::numeric_limits<Slot>::max();
    Instance residual{inst.m, {}};
    for (const auto& job : inst.jobs) {
      if (job.release > now) continue;
      Job r = job;
      r.release = 0;
      bool open = false;
      for (auto& c : r.coflows) {
        DemandMatrix left(inst.m);
        for (const auto& [pair, size] : c.demand.entries()) {
          auto it = sent.find({job.id, c.id, pair.src, pair.dst});
          const std::int64_t rem = size - (it == sent.end() ? 0 : it->second);
          if (rem > 0) {
            left.set(pair.src, pair.dst, rem);
            open = true;
          }
        }
        c.demand = std::move(left);
      }
      if (open) residual.jobs.push_back(std::move(r));
    }
    if (residual.jobs.empty()) continue;

    RunOptions run = opts;
    run.seed = online_epoch_seed(opts.seed, e);
    Schedule plan = run_algorithm(residual, algo, run);
    ++out.replans;
    for (auto item : plan.items()) {
      if (item.start >= horizon) continue;
      item.duration = std::min(item.end(), horizon) - item.start;
      for (const auto& a : item.assignments)
        sent[{a.job, a.coflow, a.src, a.dst}] += item.duration;
      item.start += now;
      out.schedule.add(std::move(item));
    }
  }
  out.schedule.normalize();
  out.metrics = metrics(inst, out.schedule, /*online=*/true);
  return out;
}

}  // namespace coflow

#endif  // COFLOW_GDM_HPP_
