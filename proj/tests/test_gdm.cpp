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

std::set<std::pair<Slot, Assignment>> expand(const Schedule& s) {
  std::set<std::pair<Slot, Assignment>> out;
  for (const auto& item : s.items())
    for (Slot t = item.start; t < item.end(); ++t)
      for (const auto& a : item.assignments) out.insert({t, a});
  return out;
}

Job unit_job(int id, int m, int s, int r, std::int64_t size = 1) {
  Job job;
  job.id = id;
  job.coflows = {single_flow(1, m, s, r, size)};
  return job;
}

TEST(GDm, SingleJobIsDmaGatedAtRelease) {
  Stream rng(2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Job job = testing::random_dag_job(rng, 1, 3, 4, 3);
    job.release = 5;
    Instance inst{3, {job}};
    Schedule expected = dma(inst, {2, seed}).schedule;
    expected.shift(5);
    const auto g = g_dm(inst, {2, seed});
    EXPECT_EQ(expand(g.schedule), expand(expected));
  }
}

TEST(GDm, TwoJobsInOneGroupEqualDma) {
  // Identical keys T + rho + D land both jobs in one group.
  Instance inst{2, {unit_job(1, 2, 1, 1, 2), unit_job(2, 2, 2, 2, 2)}};
  const auto g = g_dm(inst, {2, 13});
  ASSERT_EQ(g.grouping.group_of(1), g.grouping.group_of(2));
  EXPECT_EQ(expand(g.schedule), expand(dma(inst, {2, 13}).schedule));
}

TEST(GDm, RandomFiveJobInstanceIsNoBetterThanOptimum) {
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 20 && seed < 500; ++seed) {
    const Instance inst = testing::random_instance(
        seed, {.max_m = 2, .max_jobs = 5, .max_coflows = 1, .max_entry = 2, .releases = true,
               .density = 0.3});
    if (inst.jobs.size() < 3) continue;
    OracleResult<Rational> opt;
    try {
      opt = optimal_weighted_completion(inst);
    } catch (const InvalidInput&) {
      continue;
    }
    const auto g = g_dm(inst, {2, seed});
    EXPECT_EQ(testing::reference_check(inst, g.schedule), "");
    EXPECT_GE(g.metrics.total_weighted_completion, opt.value) << seed;
    ++checked;
  }
  EXPECT_GE(checked, 20);
}

TEST(GDmRt, SinglePathJobWithoutDelays) {
  DemandMatrix a(2), b(2);
  a.set(1, 2, 3);
  b.set(2, 1, 2);
  Instance inst{2, {testing::path_job(1, {a, b})}};
  const auto g = g_dm_rt(inst, {Rational(1000), 3});
  EXPECT_EQ(g.metrics.per_job_completion.at(1), 3 + 2);
}

TEST(GDmRt, SingleTreeJobIsDmaRtGatedAtRelease) {
  Stream rng(6);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Job job = testing::random_tree_job(rng, 1, 3, 5, 3, seed % 2 == 0);
    job.release = 2;
    Instance inst{3, {job}};
    const auto g = g_dm_rt(inst, {2, seed});
    EXPECT_EQ(expand(g.schedule), expand(dma_rt(inst, {2, seed, true}).schedule));
  }
}

TEST(GDmRt, RejectsDagJobs) {
  Job job;
  job.id = 1;
  for (int c = 1; c <= 3; ++c) job.coflows.push_back(single_flow(c, 2, 1, 1, 1));
  job.edges = {{1, 2}, {1, 3}, {2, 3}};
  EXPECT_THROW(g_dm_rt(Instance{2, {job}}), InvalidInput);
}

TEST(GDm, GroupGatingAndFeasibilityOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const bool trees = seed % 2 == 0;
    const Instance inst = testing::random_instance(
        seed, {.max_m = 4, .max_jobs = 5, .max_coflows = 4, .trees = trees, .releases = true});
    const auto g = trees ? g_dm_rt(inst, {2, seed}) : g_dm(inst, {2, seed});
    EXPECT_EQ(testing::reference_check(inst, g.schedule), "") << seed;
    const auto first = g.schedule.first_packet_start();
    for (std::size_t b = 0; b < g.grouping.groups.size(); ++b) {
      Slot gate = 0;
      for (int id : g.grouping.groups[b]) gate = std::max(gate, inst.find_job(id)->release);
      for (const auto& [key, t] : first)
        if (g.grouping.group_of(key.job) == static_cast<int>(b)) {
          EXPECT_GE(t, gate) << seed;
        }
    }
  }
}

TEST(GDm, DeterministicForFixedSeed) {
  const Instance inst = testing::random_instance(5, {.max_jobs = 6, .releases = true});
  EXPECT_EQ(g_dm(inst, {2, 8}).schedule, g_dm(inst, {2, 8}).schedule);
}

TEST(Backfill, FullyPackedScheduleIsUnchanged) {
  Instance inst{2, {unit_job(1, 2, 1, 1, 3), unit_job(2, 2, 2, 2, 3)}};
  Schedule base(2);
  base.add({0, 3, {{1, 1, 1, 1}, {2, 2, 2, 1}}});
  EXPECT_EQ(expand(backfill(inst, base, {1, 2})), expand(base));
}

TEST(Backfill, IdleSwitchSendsReadyFlowAtOnce) {
  Instance inst{2, {unit_job(1, 2, 1, 2, 2)}};
  Schedule base(2);
  base.add({5, 2, {{1, 2, 1, 1}}});
  const auto out = backfill(inst, base, {1});
  EXPECT_EQ(out.first_start(), 0);
  EXPECT_EQ(out.span_end(), 2);
  EXPECT_TRUE(verify_schedule(inst, out).empty());
}

TEST(Backfill, SharedDestinationGoesToHigherPriority) {
  Instance inst{2, {unit_job(1, 2, 1, 1), unit_job(2, 2, 2, 1)}};
  Schedule base(2);
  base.add({4, 1, {{1, 1, 1, 1}}});
  base.add({5, 1, {{2, 1, 2, 1}}});
  const auto out = expand(backfill(inst, base, {2, 1}));
  std::vector<Assignment> at_zero;
  for (const auto& [t, a] : out)
    if (t == 0) at_zero.push_back(a);
  ASSERT_EQ(at_zero.size(), 1u);
  EXPECT_EQ(at_zero[0].job, 2);
}

TEST(Backfill, RespectsReleaseAndPrecedence) {
  Job job;
  job.id = 1;
  job.release = 3;
  job.coflows = {single_flow(1, 2, 1, 1, 1), single_flow(2, 2, 2, 2, 1)};
  job.edges = {{1, 2}};
  Instance inst{2, {job}};
  Schedule base(2);
  base.add({8, 1, {{1, 1, 1, 1}}});
  base.add({9, 1, {{2, 2, 1, 2}}});
  const auto out = backfill(inst, base, {1});
  EXPECT_EQ(testing::reference_check(inst, out), "");
  EXPECT_EQ(out.first_start(), 3);
  EXPECT_EQ(out.span_end(), 5);
}

TEST(Backfill, NeverDelaysAnyJob) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const Instance inst = testing::random_instance(
        seed, {.max_m = 4, .max_jobs = 6, .max_coflows = 4, .releases = seed % 2 == 0});
    const auto plain = g_dm(inst, {2, seed});
    const auto filled = g_dm(inst, {2, seed, false, true});
    EXPECT_EQ(testing::reference_check(inst, filled.schedule), "") << seed;
    const auto a = testing::reference_completions(inst, plain.schedule);
    const auto b = testing::reference_completions(inst, filled.schedule);
    for (const auto& [id, c] : a) EXPECT_LE(b.at(id), c) << seed;
  }
}

TEST(SimulateOnline, SingleArrivalMatchesOfflineRun) {
  const Instance inst = testing::random_instance(12, {.max_jobs = 4});
  for (auto algo : {Algorithm::kDma, Algorithm::kGdm, Algorithm::kBaseline}) {
    const auto on = simulate_online(inst, algo, {2, 4});
    EXPECT_EQ(expand(on.schedule), expand(run_algorithm(inst, algo, {2, 4}))) << to_string(algo);
    EXPECT_EQ(on.replans, 1);
  }
}

TEST(SimulateOnline, LateSecondArrivalRunsSeparately) {
  Stream rng(1);
  Job a = testing::random_dag_job(rng, 1, 3, 3, 3);
  Job b = testing::random_dag_job(rng, 2, 3, 3, 3);
  b.release = 1000;
  const Instance inst{3, {a, b}};
  const auto on = simulate_online(inst, Algorithm::kGdm, {2, 7});
  Schedule expected = run_algorithm(Instance{3, {a}}, Algorithm::kGdm, {2, 7});
  Job b0 = b;
  b0.release = 0;
  expected.append(run_algorithm(Instance{3, {b0}}, Algorithm::kGdm, {2, online_epoch_seed(7, 1)}),
                  1000);
  EXPECT_EQ(expand(on.schedule), expand(expected));
  // Online completion is measured from arrival.
  EXPECT_EQ(on.metrics.per_job_completion.at(2),
            testing::reference_completions(inst, on.schedule).at(2) - 1000);
}

TEST(SimulateOnline, RandomArrivalsStayFeasible) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const bool trees = seed % 2 == 1;
    const Instance inst = testing::random_instance(
        seed, {.max_m = 4, .max_jobs = 5, .max_coflows = 4, .trees = trees, .releases = true});
    for (auto algo : {Algorithm::kDma, Algorithm::kGdm, Algorithm::kBaseline, Algorithm::kDmaRt,
                      Algorithm::kGdmRt}) {
      if (needs_rooted_trees(algo) && !trees) continue;
      for (bool bf : {false, true}) {
        const auto on = simulate_online(inst, algo, {2, seed, bf});
        EXPECT_EQ(testing::reference_check(inst, on.schedule), "") << seed << to_string(algo);
      }
    }
  }
}

TEST(Algorithms, NamesRoundTrip) {
  for (auto a : {Algorithm::kDma, Algorithm::kDmaRt, Algorithm::kGdm, Algorithm::kGdmRt,
                 Algorithm::kBaseline})
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  EXPECT_FALSE(parse_algorithm("fifo").has_value());
}

}  // namespace
}  // namespace coflow
