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

// Workloads: flow-trace ingestion, random coflows, random partition of
// coflows into multi-stage jobs, Poisson arrivals and random weights.

#ifndef COFLOW_WORKLOAD_HPP_
#define COFLOW_WORKLOAD_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "coflow/bna.hpp"
#include "coflow/model.hpp"
#include "coflow/rng.hpp"

namespace coflow {

/// Reads "coflow_id src dst size" lines. Ports outside 1..m are folded
/// onto ((x-1) mod m) + 1. Blank lines and lines starting with '#' are
/// skipped; repeated (src, dst) pairs within a coflow are summed. Coflows
/// come back sorted by id.
inline std::vector<Coflow> parse_flow_trace(std::istream& in, int m) {
  if (m < 1) throw InvalidInput("flow trace: m must be positive");
  std::map<int, DemandMatrix> by_id;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    long long id = 0, src = 0, dst = 0, size = 0;
    std::string extra;
    if (!(row >> id >> src >> dst >> size) || (row >> extra))
      throw InvalidInput("flow trace line " + std::to_string(lineno) +
                         ": expected 'coflow_id src dst size'");
    if (src < 1 || dst < 1 || size < 0)
      throw InvalidInput("flow trace line " + std::to_string(lineno) +
                         ": ports must be >= 1 and size >= 0");
    auto fold = [m](long long x) { return static_cast<int>((x - 1) % m) + 1; };
    auto [it, inserted] = by_id.try_emplace(static_cast<int>(id), m);
    it->second.add(fold(src), fold(dst), size);
  }
  std::vector<Coflow> out;
  for (auto& [id, demand] : by_id) out.push_back({id, std::move(demand)});
  return out;
}

inline std::vector<Coflow> load_flow_trace(const std::string& path, int m) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open flow trace " + path);
  return parse_flow_trace(in, m);
}

struct CoflowShape {
  int max_width = 4;              // flows per coflow, uniform in [1, max_width]
  std::int64_t max_size = 10;     // flow size, uniform in [1, max_size]
};

/// `count` coflows with ids 1..count. Each has a uniform number of flows on
/// distinct random port pairs with uniform sizes.
inline std::vector<Coflow> random_coflows(int count, int m, const CoflowShape& shape,
                                          std::uint64_t seed) {
  if (m < 1 || shape.max_width < 1 || shape.max_size < 1)
    throw InvalidInput("random_coflows: m, max_width and max_size must be positive");
  Stream rng = Stream(seed).child(0x636f666c);
  std::vector<Coflow> out;
  const int cap = std::min<std::int64_t>(shape.max_width,
                                         static_cast<std::int64_t>(m) * m);
  for (int c = 1; c <= count; ++c) {
    Coflow cf{c, DemandMatrix(m)};
    const auto width = rng.uniform_int(1, cap);
    while (static_cast<std::int64_t>(cf.demand.entries().size()) < width) {
      const int s = static_cast<int>(rng.uniform_int(1, m));
      const int r = static_cast<int>(rng.uniform_int(1, m));
      if (cf.demand.at(s, r) == 0) cf.demand.set(s, r, rng.uniform_int(1, shape.max_size));
    }
    out.push_back(std::move(cf));
  }
  return out;
}

enum class JobShape { kDag, kTree };

namespace detail {

/// Block size: geometric with mean `mean_mu`, clamped to [1, 2 mean_mu].
inline std::size_t draw_block(Stream& rng, double mean_mu) {
  const auto cap = std::max<std::int64_t>(1, static_cast<std::int64_t>(2 * mean_mu));
  return static_cast<std::size_t>(std::clamp<std::int64_t>(rng.geometric(mean_mu), 1, cap));
}

/// Renumbers `coflows` 1..k and draws edges. Each ordered pair a < b gets
/// the edge a -> b with probability 1/2. For trees, every coflow but the
/// last keeps one of its drawn out-edges, chosen uniformly, or is linked to
/// the last coflow when it drew none; the result is a fan-in tree rooted at
/// the last coflow.
inline Job build_job(int id, std::vector<Coflow> coflows, JobShape shape, Stream rng) {
  Job job;
  job.id = id;
  const int k = static_cast<int>(coflows.size());
  for (int i = 0; i < k; ++i) coflows[i].id = i + 1;
  job.coflows = std::move(coflows);
  std::vector<std::vector<int>> out_edges(k + 1);
  for (int a = 1; a <= k; ++a)
    for (int b = a + 1; b <= k; ++b)
      if (rng.bernoulli(0.5)) out_edges[a].push_back(b);
  for (int a = 1; a <= k; ++a) {
    if (shape == JobShape::kDag) {
      for (int b : out_edges[a]) job.edges.emplace_back(a, b);
    } else if (a < k) {
      const auto& opts = out_edges[a];
      const int b = opts.empty() ? k
                                 : opts[rng.uniform_to(opts.size() - 1)];
      job.edges.emplace_back(a, b);
    }
  }
  return job;
}

}  // namespace detail

/// Shuffles the coflows and cuts them into consecutive blocks, one job per
/// block, with ids 1, 2, ... and weight 1, release 0.
inline std::vector<Job> partition_into_jobs(std::vector<Coflow> coflows, double mean_mu,
                                            JobShape shape, std::uint64_t seed) {
  if (!(mean_mu >= 1.0)) throw InvalidInput("partition_into_jobs: mean_mu must be >= 1");
  Stream rng = Stream(seed).child(0x7061727469);
  rng.shuffle(coflows.begin(), coflows.end());
  std::vector<Job> jobs;
  std::size_t pos = 0;
  while (pos < coflows.size()) {
    const std::size_t take = std::min(detail::draw_block(rng, mean_mu), coflows.size() - pos);
    std::vector<Coflow> block(coflows.begin() + static_cast<std::ptrdiff_t>(pos),
                              coflows.begin() + static_cast<std::ptrdiff_t>(pos + take));
    pos += take;
    const int id = static_cast<int>(jobs.size()) + 1;
    jobs.push_back(detail::build_job(id, std::move(block), shape,
                                     Stream(seed).child({0x65646765, static_cast<std::uint64_t>(id)})));
  }
  return jobs;
}

/// Poisson arrivals with rate a * theta_0, where theta_0 is the total
/// coflow count over the total coflow effective size. Jobs arrive in the
/// given order; epochs are rounded to the nearest slot.
inline std::vector<Slot> gen_arrivals(const std::vector<Job>& jobs, double a,
                                      std::uint64_t seed) {
  if (!(a > 0)) throw InvalidInput("gen_arrivals: a must be positive");
  double coflow_count = 0;
  double size_sum = 0;
  for (const auto& job : jobs) {
    coflow_count += static_cast<double>(job.coflows.size());
    for (const auto& c : job.coflows) size_sum += static_cast<double>(effective_size(c.demand));
  }
  std::vector<Slot> out;
  if (size_sum == 0 || coflow_count == 0) {
    out.assign(jobs.size(), 0);
    return out;
  }
  const double rate = a * coflow_count / size_sum;
  Stream rng = Stream(seed).child(0x617272);
  double clock = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    clock += rng.exponential(rate);
    out.push_back(static_cast<Slot>(std::llround(clock)));
  }
  return out;
}

enum class WeightMode { kEqual, kUniform01 };

/// Equal weights are 1. Uniform weights are k / 10^6 with k uniform in
/// [1, 10^6], so they lie in (0, 1] and stay exact.
inline std::vector<Rational> gen_weights(std::size_t count, WeightMode mode,
                                         std::uint64_t seed) {
  std::vector<Rational> out;
  Stream rng = Stream(seed).child(0x776774);
  for (std::size_t i = 0; i < count; ++i) {
    if (mode == WeightMode::kEqual) {
      out.emplace_back(1);
    } else {
      out.push_back(Rational(rng.uniform_int(1, 1000000)) / Rational(1000000));
    }
  }
  return out;
}

/// Parameters of a synthetic instance: `jobs` jobs whose coflow counts are
/// geometric with mean `mean_mu` (clamped to [1, 2 mean_mu]).
struct GenSpec {
  int m = 10;
  int jobs = 10;
  double mean_mu = 3;
  JobShape shape = JobShape::kDag;
  CoflowShape coflow;
  WeightMode weights = WeightMode::kEqual;
  double arrival_a = 0;  // 0: every job released at 0
  std::uint64_t seed = 0;
};

inline Instance generate_instance(const GenSpec& spec) {
  if (spec.m < 1 || spec.jobs < 0 || !(spec.mean_mu >= 1.0))
    throw InvalidInput("generate_instance: need m >= 1, jobs >= 0, mean_mu >= 1");
  Stream sizes = Stream(spec.seed).child(0x73697a65);
  std::vector<std::size_t> blocks;
  int total = 0;
  for (int j = 0; j < spec.jobs; ++j) {
    blocks.push_back(detail::draw_block(sizes, spec.mean_mu));
    total += static_cast<int>(blocks.back());
  }
  const auto pool = random_coflows(total, spec.m, spec.coflow, spec.seed);
  Instance inst{spec.m, {}};
  std::size_t pos = 0;
  for (int j = 0; j < spec.jobs; ++j) {
    std::vector<Coflow> block(pool.begin() + static_cast<std::ptrdiff_t>(pos),
                              pool.begin() + static_cast<std::ptrdiff_t>(pos + blocks[j]));
    pos += blocks[j];
    inst.jobs.push_back(detail::build_job(
        j + 1, std::move(block), spec.shape,
        Stream(spec.seed).child({0x65646765, static_cast<std::uint64_t>(j + 1)})));
  }
  const auto w = gen_weights(inst.jobs.size(), spec.weights, spec.seed);
  for (std::size_t j = 0; j < inst.jobs.size(); ++j) inst.jobs[j].weight = w[j];
  if (spec.arrival_a > 0) {
    const auto rho = gen_arrivals(inst.jobs, spec.arrival_a, spec.seed);
    for (std::size_t j = 0; j < inst.jobs.size(); ++j) inst.jobs[j].release = rho[j];
  }
  return inst;
}

}  // namespace coflow

#endif  // COFLOW_WORKLOAD_HPP_
