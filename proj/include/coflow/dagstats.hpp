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

// Structural quantities of job DAGs: topological order, critical path,
// aggregate size, levels and the path sub-jobs of rooted trees.

#ifndef COFLOW_DAGSTATS_HPP_
#define COFLOW_DAGSTATS_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "coflow/bna.hpp"
#include "coflow/model.hpp"

namespace coflow {

/// Kahn order, lowest coflow id first among ready nodes.
inline std::vector<int> topological_order(const Job& job) {
  auto order = detail::kahn_order(job);
  if (!order)
    throw InvalidInput("job " + std::to_string(job.id) +
                       ": precedence graph has a cycle");
  return *order;
}

inline std::map<int, std::vector<int>> predecessors(const Job& job) {
  std::map<int, std::vector<int>> preds;
  for (const auto& c : job.coflows) preds[c.id];
  for (const auto& [a, b] : job.edges) preds[b].push_back(a);
  for (auto& [id, list] : preds) std::sort(list.begin(), list.end());
  return preds;
}

inline std::map<int, std::vector<int>> successors(const Job& job) {
  std::map<int, std::vector<int>> succ;
  for (const auto& c : job.coflows) succ[c.id];
  for (const auto& [a, b] : job.edges) succ[a].push_back(b);
  for (auto& [id, list] : succ) std::sort(list.begin(), list.end());
  return succ;
}

inline std::map<int, std::int64_t> coflow_sizes(const Job& job) {
  std::map<int, std::int64_t> sizes;
  for (const auto& c : job.coflows) sizes[c.id] = effective_size(c.demand);
  return sizes;
}

/// Largest sum of effective sizes along any directed path.
inline std::int64_t critical_path_size(const Job& job) {
  const auto sizes = coflow_sizes(job);
  const auto preds = predecessors(job);
  std::map<int, std::int64_t> best;
  std::int64_t T = 0;
  for (int id : topological_order(job)) {
    std::int64_t before = 0;
    for (int p : preds.at(id)) before = std::max(before, best[p]);
    best[id] = before + sizes.at(id);
    T = std::max(T, best[id]);
  }
  return T;
}

/// Effective size of the entry-wise sum of the given coflows.
inline std::int64_t aggregate_size(const std::vector<Coflow>& coflows) {
  if (coflows.empty()) return 0;
  DemandMatrix sum(coflows.front().demand.size());
  for (const auto& c : coflows) sum += c.demand;
  return effective_size(sum);
}

inline DemandMatrix aggregate_demand(const Job& job, int m) {
  DemandMatrix sum(m);
  for (const auto& c : job.coflows) sum += c.demand;
  return sum;
}

inline std::int64_t aggregate_size(const Job& job) {
  return aggregate_size(job.coflows);
}

struct Levels {
  int height = 0;
  std::vector<std::vector<int>> sets;  // S_0 .. S_{H-1}, ids ascending
};

/// S_0 holds the coflows without in-edges; S_i those whose longest path
/// from S_0 has i edges.
inline Levels levels(const Job& job) {
  const auto preds = predecessors(job);
  std::map<int, int> depth;
  int height = 0;
  for (int id : topological_order(job)) {
    int d = 0;
    for (int p : preds.at(id)) d = std::max(d, depth[p] + 1);
    depth[id] = d;
    height = std::max(height, d + 1);
  }
  Levels out;
  out.height = job.coflows.empty() ? 0 : height;
  out.sets.resize(out.height);
  for (const auto& [id, d] : depth) out.sets[d].push_back(id);
  return out;
}

enum class TreeOrientation { kNone, kFanIn, kFanOut };

/// Fan-in: one node of out-degree 0 (the root), every other node has
/// out-degree exactly 1. Fan-out is the mirror on in-degrees. A single
/// coflow or a path counts as fan-in.
inline TreeOrientation tree_orientation(const Job& job) {
  if (job.coflows.empty() || !detail::kahn_order(job))
    return TreeOrientation::kNone;
  std::map<int, int> outdeg;
  std::map<int, int> indeg;
  for (const auto& c : job.coflows) outdeg[c.id] = indeg[c.id] = 0;
  for (const auto& [a, b] : job.edges) {
    ++outdeg[a];
    ++indeg[b];
  }
  auto check = [](const std::map<int, int>& deg) {
    int zeros = 0;
    for (const auto& [id, d] : deg) {
      if (d == 0) {
        ++zeros;
      } else if (d != 1) {
        return false;
      }
    }
    return zeros == 1;
  };
  if (check(outdeg)) return TreeOrientation::kFanIn;
  if (check(indeg)) return TreeOrientation::kFanOut;
  return TreeOrientation::kNone;
}

inline bool is_rooted_tree(const Job& job) {
  return tree_orientation(job) != TreeOrientation::kNone;
}

/// Root of a rooted tree (the sink of a fan-in tree, source of a fan-out).
inline int tree_root(const Job& job) {
  const auto orientation = tree_orientation(job);
  if (orientation == TreeOrientation::kNone)
    throw InvalidInput("job " + std::to_string(job.id) + " is not a rooted tree");
  const auto adj = orientation == TreeOrientation::kFanIn ? successors(job)
                                                          : predecessors(job);
  for (const auto& [id, list] : adj)
    if (list.empty()) return id;
  throw InternalError("rooted tree without root");
}

struct PathSubJob {
  std::vector<int> coflows;  // in precedence order
  Slot delay = 0;
};

/// One path per leaf of a rooted tree. For fan-in trees the path runs from
/// a source coflow to the root; for fan-out trees from the root to a leaf.
/// Paths are listed by ascending leaf id.
inline std::vector<PathSubJob> path_sub_jobs(const Job& job) {
  const auto orientation = tree_orientation(job);
  if (orientation == TreeOrientation::kNone)
    throw InvalidInput("job " + std::to_string(job.id) + " is not a rooted tree");
  const bool fan_in = orientation == TreeOrientation::kFanIn;
  // Work on the fan-in view: `next` points towards the root.
  const auto next = fan_in ? successors(job) : predecessors(job);
  const auto prev = fan_in ? predecessors(job) : successors(job);

  std::vector<PathSubJob> paths;
  for (const auto& [leaf, incoming] : prev) {
    if (!incoming.empty()) continue;
    PathSubJob path;
    for (int id = leaf;;) {
      path.coflows.push_back(id);
      const auto& out = next.at(id);
      if (out.empty()) break;
      id = out.front();
    }
    if (!fan_in) std::reverse(path.coflows.begin(), path.coflows.end());
    paths.push_back(std::move(path));
  }
  return paths;
}

struct JobStats {
  std::vector<int> topo_order;
  std::int64_t critical_path = 0;  // T_j
  std::int64_t aggregate = 0;      // Delta_j
  Levels level_sets;
};

inline JobStats job_stats(const Job& job) {
  return {topological_order(job), critical_path_size(job), aggregate_size(job),
          levels(job)};
}

}  // namespace coflow

#endif  // COFLOW_DAGSTATS_HPP_
