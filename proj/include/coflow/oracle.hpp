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

// Exact optimum by exhaustive search, for tiny instances only, and the
// tightness family: a job whose optimal makespan is (2K+1)/2 times
// max(aggregate size, critical path).

#ifndef COFLOW_ORACLE_HPP_
#define COFLOW_ORACLE_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "coflow/dagstats.hpp"
#include "coflow/model.hpp"

namespace coflow {

struct OracleGuard {
  int max_servers = 3;
  std::int64_t max_packets = 10;
  std::size_t max_coflows = 5;
};

template <typename Value>
struct OracleResult {
  Value value{};
  Schedule witness;
};

namespace detail {

// Slot-by-slot search. Each slot sends one maximal matching of the flows
// that are released and whose coflow's predecessors are done; an idle slot
// happens only when nothing is ready. States are keyed on the residual
// sizes and the clock capped at the last release, after which the future
// no longer depends on the clock.
class ExhaustiveSearch {
 public:
  enum class Objective { kMakespan, kWeightedCompletion };

  ExhaustiveSearch(const Instance& inst, Objective objective, const OracleGuard& guard)
      : inst_(inst), objective_(objective) {
    require_valid(inst);
    if (inst.m > guard.max_servers)
      throw InvalidInput("oracle: more than " + std::to_string(guard.max_servers) +
                         " servers");
    std::size_t coflow_count = 0;
    std::int64_t packets = 0;
    for (const auto& job : inst.jobs) {
      coflow_count += job.coflows.size();
      for (const auto& c : job.coflows) packets += c.demand.total();
    }
    if (coflow_count > guard.max_coflows)
      throw InvalidInput("oracle: more than " + std::to_string(guard.max_coflows) +
                         " coflows");
    if (packets > guard.max_packets)
      throw InvalidInput("oracle: more than " + std::to_string(guard.max_packets) +
                         " packets");

    for (std::size_t j = 0; j < inst.jobs.size(); ++j) {
      const Job& job = inst.jobs[j];
      last_release_ = std::max(last_release_, job.release);
      std::map<int, int> local;
      for (const auto& c : job.coflows) {
        local[c.id] = static_cast<int>(coflows_.size());
        coflows_.push_back({static_cast<int>(j), {}, {}});
      }
      for (const auto& [a, b] : job.edges)
        coflows_[local.at(b)].preds.push_back(local.at(a));
      for (const auto& c : job.coflows)
        for (const auto& [pair, size] : c.demand.entries()) {
          coflows_[local.at(c.id)].flows.push_back(static_cast<int>(flows_.size()));
          flows_.push_back({pair.src, pair.dst, local.at(c.id), static_cast<int>(j),
                            {job.id, c.id, pair.src, pair.dst}});
          initial_.push_back(static_cast<int>(size));
        }
    }
    // Coflows in an order where predecessors come first.
    for (const auto& job : inst.jobs) {
      std::map<int, int> local;
      int base = 0;
      for (const auto& other : inst.jobs) {
        if (&other == &job) break;
        base += static_cast<int>(other.coflows.size());
      }
      for (std::size_t i = 0; i < job.coflows.size(); ++i)
        local[job.coflows[i].id] = base + static_cast<int>(i);
      for (int id : topological_order(job)) topo_.push_back(local.at(id));
    }
  }

  Rational solve() { return value({initial_, 0}); }

  Schedule witness() {
    Schedule out(inst_.m);
    Key key{initial_, 0};
    Slot t = 0;
    while (!finished(key.residual)) {
      const Entry& e = memo_.at(key);
      TimedMatching item{t, 1, {}};
      for (int f : e.choice) {
        const auto& fl = flows_[f];
        item.assignments.push_back({fl.src, fl.dst, fl.key.job, fl.key.coflow});
      }
      out.add(std::move(item));
      key = step(key, t, e.choice);
      ++t;
    }
    out.normalize();
    return out;
  }

 private:
  struct Flow {
    int src, dst, coflow, job;
    FlowKey key;
  };
  struct CoflowNode {
    int job;
    std::vector<int> preds;
    std::vector<int> flows;
  };
  struct Key {
    std::vector<int> residual;
    Slot clock;  // min(t, last release)
    friend auto operator<=>(const Key&, const Key&) = default;
  };
  struct Entry {
    Rational value;
    std::vector<int> choice;
  };

  static bool finished(const std::vector<int>& residual) {
    return std::all_of(residual.begin(), residual.end(), [](int r) { return r == 0; });
  }

  Key step(const Key& key, Slot t, const std::vector<int>& choice) const {
    Key next = key;
    for (int f : choice) --next.residual[f];
    next.clock = std::min<Slot>(t + 1, last_release_);
    return next;
  }

  std::vector<int> ready_flows(const std::vector<int>& residual, Slot t) const {
    std::vector<char> done(coflows_.size(), 0);
    std::vector<int> out;
    for (int c : topo_) {
      bool preds_done = true;
      for (int p : coflows_[c].preds) preds_done = preds_done && done[p];
      bool own_done = true;
      for (int f : coflows_[c].flows) own_done = own_done && residual[f] == 0;
      done[c] = preds_done && own_done;
      if (!preds_done || t < inst_.jobs[coflows_[c].job].release) continue;
      for (int f : coflows_[c].flows)
        if (residual[f] > 0) out.push_back(f);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  void maximal_matchings(const std::vector<int>& ready, std::size_t i,
                         std::vector<int>& pick, std::vector<std::vector<int>>& out) const {
    if (i == ready.size()) {
      for (int f : ready) {
        if (std::find(pick.begin(), pick.end(), f) != pick.end()) continue;
        if (compatible(pick, f)) return;  // could be extended: not maximal
      }
      out.push_back(pick);
      return;
    }
    const int f = ready[i];
    if (compatible(pick, f)) {
      pick.push_back(f);
      maximal_matchings(ready, i + 1, pick, out);
      pick.pop_back();
    }
    maximal_matchings(ready, i + 1, pick, out);
  }

  bool compatible(const std::vector<int>& pick, int f) const {
    for (int g : pick)
      if (flows_[g].src == flows_[f].src || flows_[g].dst == flows_[f].dst) return false;
    return true;
  }

  // Unfinished weight (or 1 for makespan) paid for this slot.
  Rational slot_cost(const std::vector<int>& residual) const {
    if (objective_ == Objective::kMakespan) return 1;
    std::vector<char> open(inst_.jobs.size(), 0);
    for (std::size_t f = 0; f < flows_.size(); ++f)
      if (residual[f] > 0) open[flows_[f].job] = 1;
    Rational w = 0;
    for (std::size_t j = 0; j < open.size(); ++j)
      if (open[j]) w += inst_.jobs[j].weight;
    return w;
  }

  // Cost from the current slot on; the actual clock is key.clock whenever
  // key.clock < last release, and is irrelevant otherwise.
  Rational value(const Key& key) {
    if (finished(key.residual)) return 0;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second.value;
    const Slot t = key.clock;
    const auto ready = ready_flows(key.residual, t);
    std::vector<std::vector<int>> options;
    std::vector<int> pick;
    maximal_matchings(ready, 0, pick, options);
    const Rational here = slot_cost(key.residual);
    Entry best;
    bool have = false;
    for (const auto& choice : options) {
      Rational v = here + value(step(key, t, choice));
      if (!have || v < best.value) {
        best = {v, choice};
        have = true;
      }
    }
    memo_[key] = best;
    return best.value;
  }

  const Instance& inst_;
  Objective objective_;
  Slot last_release_ = 0;
  std::vector<Flow> flows_;
  std::vector<CoflowNode> coflows_;
  std::vector<int> topo_;
  std::vector<int> initial_;
  std::map<Key, Entry> memo_;
};

}  // namespace detail

/// Minimal makespan max_j C_j (C_j is at least rho_j) and a witness.
inline OracleResult<Slot> optimal_makespan(const Instance& inst,
                                           const OracleGuard& guard = {}) {
  detail::ExhaustiveSearch search(inst, detail::ExhaustiveSearch::Objective::kMakespan,
                                  guard);
  const Rational v = search.solve();
  OracleResult<Slot> out;
  out.value = static_cast<Slot>(boost::multiprecision::numerator(v));
  for (const auto& job : inst.jobs) out.value = std::max(out.value, job.release);
  out.witness = search.witness();
  return out;
}

/// Minimal sum of w_j C_j and a witness.
inline OracleResult<Rational> optimal_weighted_completion(
    const Instance& inst, const OracleGuard& guard = {}) {
  detail::ExhaustiveSearch search(
      inst, detail::ExhaustiveSearch::Objective::kWeightedCompletion, guard);
  OracleResult<Rational> out;
  // Every slot an unfinished job waits, its weight is paid once; jobs never
  // finish before their release.
  out.value = search.solve();
  out.witness = search.witness();
  std::map<int, Slot> last;
  for (const auto& item : out.witness.items())
    for (const auto& a : item.assignments) last[a.job] = std::max(last[a.job], item.end());
  Rational total = 0;
  for (const auto& job : inst.jobs) {
    auto it = last.find(job.id);
    total += job.weight * std::max(job.release, it == last.end() ? Slot{0} : it->second);
  }
  out.value = total;
  return out;
}

// ---------------------------------------------------------------------------
// Tightness family

inline void check_tightness_args(int K, std::int64_t d) {
  if (K < 1) throw InvalidInput("tightness: K must be at least 1");
  if (d < 1) throw InvalidInput("tightness: d must be at least 1");
}

/// (2K)^2 coflows on 2K+1 servers, each a single flow of size d. Block i
/// (coflows i*2K+1 .. (i+1)*2K) sends from server i+1 to i+2. In block
/// i >= 1, a coflow c in the first half waits for c-2K .. c-K-1 and one in
/// the second half for c-3K+1 .. c-2K. Critical path and aggregate size
/// are both 2Kd; the optimum is (2K+1)Kd.
inline Job tightness_instance(int K, std::int64_t d) {
  check_tightness_args(K, d);
  const int width = 2 * K;
  const int m = width + 1;
  Job job;
  job.id = 1;
  for (int i = 0; i < width; ++i) {
    for (int c = i * width + 1; c <= (i + 1) * width; ++c) {
      Coflow cf{c, DemandMatrix(m)};
      cf.demand.set(i + 1, i + 2, d);
      job.coflows.push_back(std::move(cf));
      if (i == 0) continue;
      const bool first_half = c <= i * width + K;
      const int lo = first_half ? c - width : c - 3 * K + 1;
      const int hi = first_half ? c - K - 1 : c - width;
      for (int p = lo; p <= hi; ++p) job.edges.emplace_back(p, c);
    }
  }
  return job;
}

inline Instance tightness_instance_as_instance(int K, std::int64_t d) {
  return Instance{2 * K + 1, {tightness_instance(K, d)}};
}

/// The optimal schedule of the tightness job: coflows 1..K one after
/// another, then for i = 1..2K-1 and c = 1..K the pair
/// ((2i-1)K + c, 2iK + c) together, then the last K coflows.
inline Schedule tightness_witness(int K, std::int64_t d) {
  check_tightness_args(K, d);
  const Job job = tightness_instance(K, d);
  Schedule out(2 * K + 1);
  Slot t = 0;
  auto send = [&](std::vector<int> ids) {
    TimedMatching item{t, d, {}};
    for (int c : ids) {
      const auto& [pair, size] = *job.coflow(c).demand.entries().begin();
      item.assignments.push_back({pair.src, pair.dst, job.id, c});
    }
    out.add(std::move(item));
    t += d;
  };
  for (int c = 1; c <= K; ++c) send({c});
  for (int i = 1; i <= 2 * K - 1; ++i)
    for (int c = 1; c <= K; ++c) send({(2 * i - 1) * K + c, 2 * i * K + c});
  const int mu = 4 * K * K;
  for (int c = mu - K + 1; c <= mu; ++c) send({c});
  return out;
}

}  // namespace coflow

#endif  // COFLOW_ORACLE_HPP_
