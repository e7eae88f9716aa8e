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

// Combinatorial primal-dual job ordering.
//
// Each job j is collapsed into its aggregate coflow with load d_i^j on
// every server i (senders and receivers, 2m servers). The relaxation
//
//   min  sum_j w_j C_j
//   s.t. sum_{j in J} d_i^j C_j >= f_i(J)      for every server i, set J
//        C_j >= T_j + rho_j
//   f_i(J) = ( sum_{j in J} (d_i^j)^2 + (sum_{j in J} d_i^j)^2 ) / 2
//
// is never solved. Instead the permutation is built back to front: each
// round either raises eta_j of the job with the largest T_j + rho_j, or
// raises lambda for the busiest server and the current unscheduled set,
// until one job's dual constraint
//   sum_i sum_{J ∋ j} d_i^j lambda_{i,J} + eta_j <= w_j
// is tight; that job goes last. Only sets of the form {sigma(1..k)} ever
// receive a lambda, so the duals are stored sparsely per round.

#ifndef COFLOW_ORDERING_HPP_
#define COFLOW_ORDERING_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "coflow/bna.hpp"
#include "coflow/dagstats.hpp"
#include "coflow/model.hpp"

namespace coflow {

/// Server index in [0, 2m): senders first (port s -> s-1), then receivers
/// (port r -> m + r - 1).
using ServerIndex = int;

struct LambdaRecord {
  int position = 0;        // k: the set is sigma(1..k)
  ServerIndex server = 0;  // phi(k)
  int set_size = 0;        // == k
  Rational value = 0;
};

struct OrderingResult {
  std::vector<int> sigma;  // sigma[k-1] = job id at position k
  std::map<int, Rational> eta;
  std::vector<LambdaRecord> lambdas;
  std::map<int, ServerIndex> phi;  // position -> chosen server

  int position_of(int job_id) const {
    for (std::size_t k = 0; k < sigma.size(); ++k)
      if (sigma[k] == job_id) return static_cast<int>(k) + 1;
    return 0;
  }
};

/// d_i^j for every server of the aggregate coflow of `job`.
inline std::vector<std::int64_t> job_server_loads(const Job& job, int m) {
  auto loads = server_loads(aggregate_demand(job, m));
  std::vector<std::int64_t> out = loads.sender;
  out.insert(out.end(), loads.receiver.begin(), loads.receiver.end());
  return out;
}

inline OrderingResult order_jobs(const Instance& inst) {
  require_valid(inst);
  const int n = static_cast<int>(inst.jobs.size());
  const int servers = 2 * inst.m;

  std::vector<std::vector<std::int64_t>> load(n);
  std::vector<std::int64_t> key(n);  // T_j + rho_j
  std::vector<Rational> residual(n);
  std::vector<std::int64_t> total(servers, 0);
  for (int j = 0; j < n; ++j) {
    const Job& job = inst.jobs[j];
    load[j] = job_server_loads(job, inst.m);
    key[j] = critical_path_size(job) + job.release;
    residual[j] = job.weight;
    for (int i = 0; i < servers; ++i) total[i] += load[j][i];
  }

  // Unscheduled jobs, kept in ascending id order for tie-breaking.
  std::vector<int> open(n);
  for (int j = 0; j < n; ++j) open[j] = j;
  std::sort(open.begin(), open.end(), [&](int a, int b) {
    return inst.jobs[a].id < inst.jobs[b].id;
  });

  OrderingResult result;
  result.sigma.assign(n, 0);
  for (const auto& job : inst.jobs) result.eta[job.id] = 0;

  for (int k = n; k >= 1; --k) {
    ServerIndex phi = 0;
    for (int i = 1; i < servers; ++i)
      if (total[i] > total[phi]) phi = i;
    result.phi[k] = phi;

    int heavy = open.front();
    for (int j : open)
      if (key[j] > key[heavy]) heavy = j;

    int chosen;
    if (key[heavy] > total[phi] || total[phi] == 0) {
      result.eta[inst.jobs[heavy].id] = residual[heavy];
      residual[heavy] = 0;
      chosen = heavy;
    } else {
      std::optional<Rational> best;
      int best_job = -1;
      for (int j : open) {
        if (load[j][phi] == 0) continue;
        Rational ratio = residual[j] / load[j][phi];
        if (!best || ratio < *best) {
          best = ratio;
          best_job = j;
        }
      }
      if (!best) throw InternalError("order_jobs: busy server with no load");
      for (int j : open) residual[j] -= *best * load[j][phi];
      result.lambdas.push_back({k, phi, k, *best});
      chosen = best_job;
    }

    result.sigma[k - 1] = inst.jobs[chosen].id;
    open.erase(std::find(open.begin(), open.end(), chosen));
    for (int i = 0; i < servers; ++i) total[i] -= load[chosen][i];
  }
  return result;
}

/// f_i(J) for a given set of jobs.
inline Rational capacity_rhs(const std::vector<std::int64_t>& loads_on_server) {
  Rational squares = 0;
  Rational sum = 0;
  for (auto d : loads_on_server) {
    squares += Rational(d) * d;
    sum += d;
  }
  return (squares + sum * sum) / 2;
}

struct DualReport {
  bool feasible = true;
  std::vector<int> violated_jobs;  // w_j != eta_j + sum d * lambda
  bool nonnegative = true;
  Rational objective = 0;
};

/// Re-derives every job's dual constraint from the sparse duals and checks
/// that it holds with equality, plus nonnegativity. Also evaluates the dual
/// objective sum lambda f_i(J) + sum eta_j (T_j + rho_j).
inline DualReport check_dual_feasibility(const Instance& inst,
                                         const OrderingResult& result) {
  DualReport report;
  std::map<int, std::vector<std::int64_t>> load;
  for (const auto& job : inst.jobs) load[job.id] = job_server_loads(job, inst.m);

  for (const auto& [id, eta] : result.eta)
    if (eta < 0) report.nonnegative = false;
  for (const auto& rec : result.lambdas)
    if (rec.value < 0) report.nonnegative = false;

  for (const auto& job : inst.jobs) {
    const int pos = result.position_of(job.id);
    Rational lhs = 0;
    auto eta_it = result.eta.find(job.id);
    if (eta_it != result.eta.end()) lhs += eta_it->second;
    if (pos > 0)
      for (const auto& rec : result.lambdas)
        if (rec.position >= pos) lhs += rec.value * load[job.id][rec.server];
    if (pos == 0 || lhs != job.weight) report.violated_jobs.push_back(job.id);
    const Rational key = critical_path_size(job) + job.release;
    if (eta_it != result.eta.end()) report.objective += eta_it->second * key;
  }

  for (const auto& rec : result.lambdas) {
    std::vector<std::int64_t> on_server;
    for (int k = 0; k < rec.position && k < static_cast<int>(result.sigma.size()); ++k)
      on_server.push_back(load[result.sigma[k]][rec.server]);
    report.objective += rec.value * capacity_rhs(on_server);
  }
  report.feasible = report.violated_jobs.empty() && report.nonnegative;
  return report;
}

}  // namespace coflow

#endif  // COFLOW_ORDERING_HPP_
