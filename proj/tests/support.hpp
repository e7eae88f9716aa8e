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

// Test helpers: instance builders, random generators, and reference
// checks that share no code with the library's verifier or oracle.

#ifndef COFLOW_TESTS_SUPPORT_HPP_
#define COFLOW_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "coflow/coflow.hpp"

namespace coflow::testing {

inline DemandMatrix mat(const std::vector<std::vector<std::int64_t>>& rows) {
  return DemandMatrix::from_dense(rows);
}

inline Coflow single_flow(int id, int m, int src, int dst, std::int64_t size) {
  Coflow c{id, DemandMatrix(m)};
  c.demand.set(src, dst, size);
  return c;
}

/// Job whose coflows 1..k form the chain 1 -> 2 -> ... -> k.
inline Job path_job(int id, const std::vector<DemandMatrix>& demands) {
  Job job;
  job.id = id;
  for (std::size_t i = 0; i < demands.size(); ++i) {
    job.coflows.push_back({static_cast<int>(i) + 1, demands[i]});
    if (i > 0) job.edges.emplace_back(static_cast<int>(i), static_cast<int>(i) + 1);
  }
  return job;
}

// ---------------------------------------------------------------------------
// Random builders

inline DemandMatrix random_matrix(Stream& rng, int m, std::int64_t max_entry,
                                  double density = 0.5) {
  DemandMatrix d(m);
  for (int s = 1; s <= m; ++s)
    for (int r = 1; r <= m; ++r)
      if (rng.bernoulli(density)) d.set(s, r, rng.uniform_int(1, max_entry));
  if (d.empty())
    d.set(static_cast<int>(rng.uniform_int(1, m)), static_cast<int>(rng.uniform_int(1, m)),
          rng.uniform_int(1, max_entry));
  return d;
}

/// Random DAG on coflows 1..k; edges only go from lower to higher id, and
/// ids are shuffled afterwards so topological order is not the id order.
inline Job random_dag_job(Stream& rng, int id, int m, int k, std::int64_t max_entry,
                          double density = 0.4) {
  Job job;
  job.id = id;
  std::vector<int> label(k);
  for (int i = 0; i < k; ++i) label[i] = i + 1;
  rng.shuffle(label.begin(), label.end());
  for (int i = 0; i < k; ++i) job.coflows.push_back({label[i], random_matrix(rng, m, max_entry, density)});
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      if (rng.bernoulli(0.4)) job.edges.emplace_back(label[a], label[b]);
  return job;
}

/// Random rooted tree: fan-in when `fan_in`, else fan-out.
inline Job random_tree_job(Stream& rng, int id, int m, int k, std::int64_t max_entry,
                           bool fan_in, double density = 0.4) {
  Job job;
  job.id = id;
  for (int c = 1; c <= k; ++c) job.coflows.push_back({c, random_matrix(rng, m, max_entry, density)});
  // Node c (c >= 2) attaches to a uniformly random earlier node.
  for (int c = 2; c <= k; ++c) {
    const int parent = static_cast<int>(rng.uniform_int(1, c - 1));
    if (fan_in) {
      job.edges.emplace_back(c, parent);
    } else {
      job.edges.emplace_back(parent, c);
    }
  }
  return job;
}

struct RandomInstanceOptions {
  int max_m = 4;
  int max_jobs = 4;
  int max_coflows = 4;
  std::int64_t max_entry = 4;
  bool trees = false;
  bool releases = false;
  bool random_weights = true;
  double density = 0.4;
};

inline Instance random_instance(std::uint64_t seed, const RandomInstanceOptions& o = {}) {
  Stream rng(seed);
  Instance inst;
  inst.m = static_cast<int>(rng.uniform_int(1, o.max_m));
  const int n = static_cast<int>(rng.uniform_int(1, o.max_jobs));
  for (int j = 1; j <= n; ++j) {
    const int k = static_cast<int>(rng.uniform_int(1, o.max_coflows));
    Job job = o.trees ? random_tree_job(rng, j, inst.m, k, o.max_entry, rng.bernoulli(0.5), o.density)
                      : random_dag_job(rng, j, inst.m, k, o.max_entry, o.density);
    if (o.random_weights) job.weight = Rational(rng.uniform_int(1, 20)) / Rational(rng.uniform_int(1, 5));
    if (o.releases) job.release = rng.uniform_int(0, 6);
    inst.jobs.push_back(std::move(job));
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Reference feasibility check: expands the schedule slot by slot.

inline std::string reference_check(const Instance& inst, const Schedule& sched) {
  Slot horizon = 0;
  for (const auto& item : sched.items()) {
    if (item.duration <= 0 || item.start < 0) return "bad item";
    horizon = std::max(horizon, item.start + item.duration);
  }
  const int m = inst.m;
  std::vector<std::vector<int>> send(horizon, std::vector<int>(m + 1, 0));
  std::vector<std::vector<int>> recv(horizon, std::vector<int>(m + 1, 0));
  std::map<std::tuple<int, int, int, int>, std::int64_t> sent;
  std::map<std::pair<int, int>, Slot> first, last;
  for (const auto& item : sched.items())
    for (const auto& a : item.assignments) {
      if (a.src < 1 || a.src > m || a.dst < 1 || a.dst > m) return "port out of range";
      for (Slot t = item.start; t < item.start + item.duration; ++t) {
        if (++send[t][a.src] > 1) return "sender conflict at " + std::to_string(t);
        if (++recv[t][a.dst] > 1) return "receiver conflict at " + std::to_string(t);
      }
      sent[{a.job, a.coflow, a.src, a.dst}] += item.duration;
      const std::pair<int, int> key{a.job, a.coflow};
      if (!first.count(key) || item.start < first[key]) first[key] = item.start;
      last[key] = std::max(last[key], item.start + item.duration);
    }
  std::int64_t expected_flows = 0;
  for (const auto& job : inst.jobs)
    for (const auto& c : job.coflows)
      for (const auto& [pair, size] : c.demand.entries()) {
        ++expected_flows;
        auto it = sent.find({job.id, c.id, pair.src, pair.dst});
        if (it == sent.end() || it->second != size) return "demand mismatch";
      }
  if (static_cast<std::int64_t>(sent.size()) != expected_flows) return "unknown flow sent";

  for (const auto& job : inst.jobs) {
    // Completion of a coflow: its last packet, or (if empty) the latest of
    // its predecessors' completions and the release.
    std::map<int, Slot> done;
    std::map<int, std::vector<int>> preds;
    for (const auto& [a, b] : job.edges) preds[b].push_back(a);
    bool progress = true;
    while (progress && done.size() < job.coflows.size()) {
      progress = false;
      for (const auto& c : job.coflows) {
        if (done.count(c.id)) continue;
        bool ready = true;
        Slot t = job.release;
        for (int p : preds[c.id]) {
          if (!done.count(p)) {
            ready = false;
            break;
          }
          t = std::max(t, done[p]);
        }
        if (!ready) continue;
        if (last.count({job.id, c.id})) t = std::max(t, last[{job.id, c.id}]);
        done[c.id] = t;
        progress = true;
      }
    }
    for (const auto& [a, b] : job.edges)
      if (first.count({job.id, b}) && first[{job.id, b}] < done[a])
        return "precedence violated in job " + std::to_string(job.id);
    for (const auto& c : job.coflows)
      if (first.count({job.id, c.id}) && first[{job.id, c.id}] < job.release)
        return "release violated in job " + std::to_string(job.id);
  }
  return "";
}

// ---------------------------------------------------------------------------
// Reference minimum span of one coflow: breadth-first search over residual
// matrices, one (any) matching per slot. Tiny matrices only.

inline int reference_min_span(const DemandMatrix& d) {
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> start;
  for (const auto& [p, size] : d.entries()) {
    pairs.emplace_back(p.src, p.dst);
    start.push_back(static_cast<int>(size));
  }
  const int n = static_cast<int>(pairs.size());
  std::map<std::vector<int>, int> dist{{start, 0}};
  std::queue<std::vector<int>> q;
  q.push(start);
  while (!q.empty()) {
    auto cur = q.front();
    q.pop();
    if (std::all_of(cur.begin(), cur.end(), [](int x) { return x == 0; })) return dist[cur];
    for (int mask = 1; mask < (1 << n); ++mask) {
      std::set<int> s, r;
      bool ok = true;
      auto next = cur;
      for (int i = 0; i < n && ok; ++i) {
        if (!(mask >> i & 1)) continue;
        ok = cur[i] > 0 && s.insert(pairs[i].first).second && r.insert(pairs[i].second).second;
        --next[i];
      }
      if (!ok || dist.count(next)) continue;
      dist[next] = dist[cur] + 1;
      q.push(next);
    }
  }
  return -1;
}

/// Job completion times read straight off the assignments (last packet,
/// at least the release).
inline std::map<int, Slot> reference_completions(const Instance& inst, const Schedule& sched) {
  std::map<int, Slot> out;
  for (const auto& job : inst.jobs) out[job.id] = job.release;
  for (const auto& item : sched.items())
    for (const auto& a : item.assignments) out[a.job] = std::max(out[a.job], item.end());
  return out;
}

}  // namespace coflow::testing

#endif  // COFLOW_TESTS_SUPPORT_HPP_
