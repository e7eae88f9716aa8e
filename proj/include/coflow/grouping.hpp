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

// Geometric grouping of ordered jobs. With gamma the smallest flow size,
// a_b = gamma * 2^b, job j lands in group b when its key
// T_j + rho_j + D_j lies in (a_{b-1}, a_b]; D_j is the effective size of
// the jobs up to and including j in the permutation.

#ifndef COFLOW_GROUPING_HPP_
#define COFLOW_GROUPING_HPP_

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "coflow/bna.hpp"
#include "coflow/dagstats.hpp"
#include "coflow/model.hpp"

namespace coflow {

/// D_j per job: effective size of the summed demand of sigma(1..position(j)).
inline std::map<int, std::int64_t> prefix_effective_sizes(
    const Instance& inst, const std::vector<int>& sigma) {
  std::map<int, std::int64_t> out;
  DemandMatrix sum(inst.m);
  for (int id : sigma) {
    const Job* job = inst.find_job(id);
    if (!job) throw InvalidInput("prefix_effective_sizes: unknown job in order");
    for (const auto& c : job->coflows) sum += c.demand;
    out[id] = effective_size(sum);
  }
  if (out.size() != inst.jobs.size())
    throw InvalidInput("prefix_effective_sizes: order is not a permutation");
  return out;
}

/// Smallest positive flow size in the instance, 1 when there is none.
inline std::int64_t smallest_flow(const Instance& inst) {
  std::int64_t gamma = std::numeric_limits<std::int64_t>::max();
  for (const auto& job : inst.jobs)
    for (const auto& c : job.coflows)
      for (const auto& [pair, size] : c.demand.entries())
        gamma = std::min(gamma, size);
  return gamma == std::numeric_limits<std::int64_t>::max() ? 1 : gamma;
}

struct Grouping {
  std::int64_t gamma = 1;
  std::int64_t horizon = 0;  // T = max release + total flow size
  int B = 0;
  std::vector<std::vector<int>> groups;  // J_0 .. J_B, job ids
  std::map<int, std::int64_t> keys;
  std::vector<int> excluded;  // zero-key jobs: nothing to send, done at rho

  /// a_b = gamma * 2^b as an exact rational (b may be -1).
  Rational boundary(int b) const {
    if (b >= 0) return Rational(gamma) * Rational(boost::multiprecision::cpp_int(1) << b);
    return Rational(gamma) / Rational(boost::multiprecision::cpp_int(1) << -b);
  }

  /// Group index holding job `id`, or -1.
  int group_of(int id) const {
    for (std::size_t b = 0; b < groups.size(); ++b)
      if (std::find(groups[b].begin(), groups[b].end(), id) != groups[b].end())
        return static_cast<int>(b);
    return -1;
  }
};

/// Assigns each job to the group whose interval (a_{b-1}, a_b] holds its
/// key. `keys` maps job id -> key; group member lists follow the iteration
/// order of `order` (e.g. the permutation) when given, else ascending id.
inline Grouping partition(const Instance& inst,
                          const std::map<int, std::int64_t>& keys,
                          const std::vector<int>& order = {}) {
  Grouping g;
  g.gamma = smallest_flow(inst);
  g.keys = keys;
  std::int64_t total = 0;
  for (const auto& job : inst.jobs)
    for (const auto& c : job.coflows) total += c.demand.total();
  g.horizon = latest_release(inst) + total;

  // Smallest B with gamma 2^B >= T, widened until every key fits.
  std::int64_t cover = g.horizon;
  for (const auto& [id, k] : keys) cover = std::max(cover, k);
  g.B = 0;
  while (Rational(g.gamma) * Rational(boost::multiprecision::cpp_int(1) << g.B) <
         Rational(cover))
    ++g.B;
  g.groups.assign(g.B + 1, {});

  std::vector<int> ids = order;
  if (ids.empty())
    for (const auto& [id, k] : keys) ids.push_back(id);
  for (int id : ids) {
    const std::int64_t key = keys.at(id);
    if (key <= 0) {
      g.excluded.push_back(id);
      continue;
    }
    int b = 0;
    while (Rational(key) > g.boundary(b)) ++b;
    g.groups[b].push_back(id);
  }
  return g;
}

}  // namespace coflow

#endif  // COFLOW_GROUPING_HPP_
