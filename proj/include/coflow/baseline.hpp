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

// Naive comparison scheduler: one job at a time, each job's coflows one at
// a time in topological order, each coflow by BNA. No two jobs ever share
// a slot. This is a stand-in for comparisons only; it is not the O(m)
// approximation algorithm from prior work.

#ifndef COFLOW_BASELINE_HPP_
#define COFLOW_BASELINE_HPP_

#include <algorithm>
#include <vector>

#include "coflow/bna.hpp"
#include "coflow/dagstats.hpp"
#include "coflow/model.hpp"
#include "coflow/ordering.hpp"
#include "coflow/verify.hpp"

namespace coflow {

inline constexpr const char* kBaselineLabel =
    "naive sequential baseline (not the O(m)-approximation of prior work)";

struct BaselineResult {
  Schedule schedule;
  Metrics metrics;
  std::vector<int> order;
};

/// Jobs in primal-dual order when `use_ordering`, else by ascending id.
inline BaselineResult sequential_baseline(const Instance& inst,
                                          bool use_ordering = true) {
  require_valid(inst);
  BaselineResult out;
  out.schedule = Schedule(inst.m);
  if (use_ordering) {
    out.order = order_jobs(inst).sigma;
  } else {
    for (const auto& job : inst.jobs) out.order.push_back(job.id);
    std::sort(out.order.begin(), out.order.end());
  }
  Slot cursor = 0;
  for (int id : out.order) {
    const Job& job = *inst.find_job(id);
    cursor = std::max(cursor, job.release);
    for (int c : topological_order(job)) {
      const BnaResult bna = bna_decompose(job.coflow(c).demand);
      out.schedule.append(bna_schedule(bna, inst.m, job.id, c), cursor);
      cursor += bna.span();
    }
  }
  out.metrics = metrics(inst, out.schedule);
  return out;
}

}  // namespace coflow

#endif  // COFLOW_BASELINE_HPP_
