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

// Delay-and-merge for rooted-tree jobs.
//
// A single tree is split into its path sub-jobs, one per leaf. Each path
// draws its own delay d_p, which proposes a start for every coflow on it:
//   t_{c,p} = d_p + (sizes of the coflows before c on p).
// Walking the levels in order, a coflow starts at the earliest proposal
// that is not before any parent has finished. The coflows are then placed
// with BNA, merged and made feasible exactly as in dma().
//
// Several trees are handled by scheduling each alone, delaying the whole
// schedules once more, and merging again.

#ifndef COFLOW_ROOTED_HPP_
#define COFLOW_ROOTED_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "coflow/bna.hpp"
#include "coflow/dagstats.hpp"
#include "coflow/dma.hpp"
#include "coflow/model.hpp"
#include "coflow/rng.hpp"

namespace coflow {

struct CoflowStartPlan {
  std::vector<PathSubJob> paths;  // delay filled in
  std::map<std::pair<int, std::size_t>, Slot> candidates;  // (coflow, path)
  std::map<int, Slot> starts;
  std::map<int, std::size_t> scheduled_by;  // path index chosen for each coflow
};

namespace detail {

inline Job mirrored(const Job& job) {
  Job out = job;
  for (auto& [a, b] : out.edges) std::swap(a, b);
  return out;
}

// Start plan for a fan-in tree (or path / single coflow).
inline CoflowStartPlan fan_in_plan(const Job& job, Slot max_path_delay,
                                   const Stream& stream) {
  CoflowStartPlan plan;
  plan.paths = path_sub_jobs(job);
  const auto sizes = coflow_sizes(job);
  const auto preds = predecessors(job);

  for (std::size_t p = 0; p < plan.paths.size(); ++p) {
    Stream s = stream.child(p);
    auto& path = plan.paths[p];
    path.delay = static_cast<Slot>(s.uniform_to(static_cast<std::uint64_t>(max_path_delay)));
    Slot t = path.delay;
    for (int c : path.coflows) {
      plan.candidates[{c, p}] = t;
      t += sizes.at(c);
    }
  }

  for (const auto& level : levels(job).sets)
    for (int c : level) {
      Slot ready = std::numeric_limits<Slot>::min();
      for (int parent : preds.at(c))
        ready = std::max(ready, plan.starts.at(parent) + sizes.at(parent));
      std::optional<Slot> best;
      std::size_t best_path = 0;
      for (auto it = plan.candidates.lower_bound({c, 0});
           it != plan.candidates.end() && it->first.first == c; ++it) {
        if (it->second < ready) continue;
        if (!best || it->second < *best) {
          best = it->second;
          best_path = it->first.second;
        }
      }
      if (!best)
        throw InternalError("dma_srt: no path proposes a start after the parents");
      plan.starts[c] = *best;
      plan.scheduled_by[c] = best_path;
    }
  return plan;
}

}  // namespace detail

/// Start plan of DMA-SRT. Fan-out trees are planned on the mirrored fan-in
/// tree and reflected in time: a coflow that finishes at f in the mirror
/// starts at H - f, which keeps every gap between parent and child.
inline CoflowStartPlan plan_rooted_tree(const Job& job, const Rational& beta,
                                        std::uint64_t seed) {
  const auto orientation = tree_orientation(job);
  if (orientation == TreeOrientation::kNone)
    throw InvalidInput("job " + std::to_string(job.id) + " is not a rooted tree");
  const Slot bound = max_delay(aggregate_size(job), beta);
  const Stream stream =
      Stream(seed).child({0x70617468ULL, static_cast<std::uint64_t>(job.id)});
  if (orientation == TreeOrientation::kFanIn)
    return detail::fan_in_plan(job, bound, stream);

  CoflowStartPlan plan = detail::fan_in_plan(detail::mirrored(job), bound, stream);
  const auto sizes = coflow_sizes(job);
  Slot horizon = 0;
  for (const auto& [c, t] : plan.starts) horizon = std::max(horizon, t + sizes.at(c));
  for (auto& [c, t] : plan.starts) t = horizon - t - sizes.at(c);
  for (auto& [key, t] : plan.candidates) t = horizon - t - sizes.at(key.first);
  for (auto& path : plan.paths)
    std::reverse(path.coflows.begin(), path.coflows.end());
  return plan;
}

struct SrtResult {
  CoflowStartPlan plan;
  MergedTimeline timeline;
  Schedule schedule;
};

/// DMA-SRT on one rooted-tree job. The schedule starts at slot 0 (release
/// times are not applied here).
inline SrtResult dma_srt(const Job& job, int m, const Rational& beta,
                         std::uint64_t seed) {
  require_beta(beta);
  SrtResult result;
  result.plan = plan_rooted_tree(job, beta, seed);
  std::vector<Schedule> placed;
  for (const auto& c : job.coflows)
    placed.push_back(bna_schedule(bna_decompose(c.demand), m, job.id, c.id,
                                  result.plan.starts.at(c.id)));
  result.timeline = merge(m, placed);
  result.schedule = feasibilize(result.timeline);
  return result;
}

struct DmaRtResult {
  Schedule schedule;
  MergedTimeline timeline;
  std::map<int, Slot> delays;
  std::map<int, SrtResult> per_job;
  std::int64_t delta = 0;
};

inline void require_rooted_trees(const Instance& inst) {
  for (const auto& job : inst.jobs)
    if (!is_rooted_tree(job))
      throw InvalidInput("job " + std::to_string(job.id) + " is not a rooted tree");
}

/// DMA-RT: DMA-SRT per job, then one more round of delay, merge and
/// feasibilize across jobs.
inline DmaRtResult dma_rt(const Instance& inst, const DmaOptions& opts = {}) {
  require_valid(inst);
  require_rooted_trees(inst);
  require_beta(opts.beta);
  DmaRtResult result;
  result.schedule = Schedule(inst.m);
  result.timeline.m = inst.m;
  result.delta = instance_aggregate_size(inst);
  if (inst.jobs.empty()) return result;

  result.delays = draw_delays(inst.jobs, result.delta, opts.beta, opts.seed);
  std::vector<Schedule> delayed;
  for (const auto& job : inst.jobs) {
    SrtResult srt = dma_srt(job, inst.m, opts.beta, opts.seed);
    Schedule s = srt.schedule;
    s.shift(result.delays.at(job.id));
    delayed.push_back(std::move(s));
    result.per_job.emplace(job.id, std::move(srt));
  }
  result.timeline = merge(inst.m, delayed);
  result.schedule = feasibilize(result.timeline);
  if (opts.gate_release) result.schedule.shift(latest_release(inst));
  return result;
}

}  // namespace coflow

#endif  // COFLOW_ROOTED_HPP_
