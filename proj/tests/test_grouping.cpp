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

#include <gtest/gtest.h>

#include "support.hpp"

namespace coflow {
namespace {

using testing::single_flow;

Instance jobs_with_flows(int m, const std::vector<std::tuple<int, int, std::int64_t>>& flows) {
  Instance inst{m, {}};
  int id = 1;
  for (const auto& [s, r, size] : flows) {
    Job job;
    job.id = id++;
    job.coflows = {single_flow(1, m, s, r, size)};
    inst.jobs.push_back(job);
  }
  return inst;
}

// Membership by integer arithmetic only: key in (gamma 2^(b-1), gamma 2^b]
// is 2 key in (gamma 2^b, gamma 2^(b+1)].
bool in_group(std::int64_t key, std::int64_t gamma, int b) {
  const std::int64_t hi2 = gamma << (b + 1);
  const std::int64_t lo2 = gamma << b;
  return 2 * key > lo2 && 2 * key <= hi2;
}

TEST(PrefixEffectiveSizes, Examples) {
  auto one = jobs_with_flows(2, {{1, 2, 3}});
  EXPECT_EQ(prefix_effective_sizes(one, {1}).at(1), 3);
  auto disjoint = jobs_with_flows(2, {{1, 1, 1}, {2, 2, 1}});
  EXPECT_EQ(prefix_effective_sizes(disjoint, {1, 2}).at(2), 1);
  auto stacked = jobs_with_flows(2, {{1, 1, 1}, {1, 1, 1}});
  EXPECT_EQ(prefix_effective_sizes(stacked, {1, 2}).at(2), 2);
  EXPECT_THROW(prefix_effective_sizes(stacked, {1}), InvalidInput);
}

TEST(Partition, KeyThreeWithUnitGammaIsGroupTwo) {
  const auto inst = jobs_with_flows(2, {{1, 1, 1}});
  const auto g = partition(inst, {{1, 3}});
  EXPECT_EQ(g.gamma, 1);
  EXPECT_EQ(g.group_of(1), 2);
}

TEST(Partition, KeyOneWithUnitGammaIsGroupZero) {
  const auto inst = jobs_with_flows(2, {{1, 1, 1}});
  const auto g = partition(inst, {{1, 1}});
  EXPECT_EQ(g.group_of(1), 0);
  EXPECT_EQ(g.boundary(-1), Rational(1, 2));
}

TEST(Partition, GammaTwoKeysTwoAndEight) {
  const auto inst = jobs_with_flows(2, {{1, 1, 2}, {2, 2, 3}});
  const auto g = partition(inst, {{1, 2}, {2, 8}});
  EXPECT_EQ(g.gamma, 2);
  EXPECT_EQ(g.group_of(1), 0);
  EXPECT_EQ(g.group_of(2), 2);
}

TEST(Partition, HorizonAndMinimalB) {
  auto inst = jobs_with_flows(2, {{1, 1, 2}, {2, 2, 3}});
  inst.jobs[1].release = 4;
  const auto g = partition(inst, {{1, 2}, {2, 3}});
  EXPECT_EQ(g.horizon, 4 + 5);
  EXPECT_EQ(g.B, 3);  // 2 * 2^3 = 16 >= 9 > 8
}

TEST(Partition, ZeroKeyIsExcluded) {
  Instance inst = jobs_with_flows(2, {{1, 1, 1}});
  Job empty;
  empty.id = 2;
  inst.jobs.push_back(empty);
  const auto g = partition(inst, {{1, 1}, {2, 0}});
  EXPECT_EQ(g.excluded, std::vector<int>{2});
  EXPECT_EQ(g.group_of(2), -1);
}

TEST(Partition, RandomInstancesArePartitionedByKey) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Instance inst = testing::random_instance(
        seed, {.max_m = 4, .max_jobs = 8, .max_entry = 9, .releases = true});
    const auto sigma = order_jobs(inst).sigma;
    const auto D = prefix_effective_sizes(inst, sigma);
    std::map<int, std::int64_t> keys;
    for (const auto& job : inst.jobs) keys[job.id] = critical_path_size(job) + job.release + D.at(job.id);
    const auto g = partition(inst, keys, sigma);
    std::multiset<int> seen;
    for (std::size_t b = 0; b < g.groups.size(); ++b)
      for (int id : g.groups[b]) {
        seen.insert(id);
        EXPECT_TRUE(in_group(keys.at(id), g.gamma, static_cast<int>(b))) << seed;
      }
    EXPECT_EQ(seen.size(), inst.jobs.size());
    EXPECT_EQ(std::set<int>(seen.begin(), seen.end()).size(), inst.jobs.size());
    // Prefix sizes never decrease along sigma.
    for (std::size_t k = 1; k < sigma.size(); ++k) EXPECT_LE(D.at(sigma[k - 1]), D.at(sigma[k]));
  }
}

TEST(Grouping, GeometricSumStaysBelowTwiceLast) {
  Grouping g;
  g.gamma = 3;
  for (int l = 0; l < 20; ++l) {
    Rational sum = 0;
    for (int b = 0; b <= l; ++b) sum += g.boundary(b);
    EXPECT_LT(sum, 2 * g.boundary(l));
  }
}

}  // namespace
}  // namespace coflow
