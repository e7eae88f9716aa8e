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

using testing::mat;

/// Replays a decomposition: every step is a matching of positive residual
/// entries, and everything is sent exactly.
void expect_exact(const DemandMatrix& d, const BnaResult& r) {
  ASSERT_EQ(r.times.size(), r.matchings.size() + 1);
  EXPECT_EQ(r.times.front(), 0);
  DemandMatrix left = d;
  for (std::size_t k = 0; k < r.matchings.size(); ++k) {
    ASSERT_GT(r.duration(k), 0);
    std::set<int> s, t;
    for (const auto& p : r.matchings[k]) {
      EXPECT_TRUE(s.insert(p.src).second);
      EXPECT_TRUE(t.insert(p.dst).second);
      ASSERT_GE(left.at(p.src, p.dst), r.duration(k)) << "residual would go negative";
      left.set(p.src, p.dst, left.at(p.src, p.dst) - r.duration(k));
    }
  }
  EXPECT_TRUE(left.empty());
  EXPECT_EQ(r.span(), effective_size(d));
  const auto m = static_cast<std::size_t>(d.size());
  EXPECT_LE(r.matchings.size(), m * m);
}

TEST(ServerLoads, RowAndColumnSums) {
  auto l = server_loads(mat({{2, 1}, {0, 1}}));
  EXPECT_EQ(l.sender, (std::vector<std::int64_t>{3, 1}));
  EXPECT_EQ(l.receiver, (std::vector<std::int64_t>{2, 2}));
  l = server_loads(mat({{0, 0}, {0, 0}}));
  EXPECT_EQ(l.sender, (std::vector<std::int64_t>{0, 0}));
  EXPECT_EQ(l.receiver, (std::vector<std::int64_t>{0, 0}));
  l = server_loads(mat({{0, 5}, {0, 0}}));
  EXPECT_EQ(l.sender, (std::vector<std::int64_t>{5, 0}));
  EXPECT_EQ(l.receiver, (std::vector<std::int64_t>{0, 5}));
}

TEST(EffectiveSize, Examples) {
  EXPECT_EQ(effective_size(mat({{1, 1}, {1, 1}})), 2);
  EXPECT_EQ(effective_size(mat({{2, 1}, {0, 1}})), 3);
  EXPECT_EQ(effective_size(mat({{0, 0}, {0, 0}})), 0);
}

TEST(BnaDecompose, AllOnesTwoByTwoTakesTwoSlots) {
  const auto d = mat({{1, 1}, {1, 1}});
  const auto r = bna_decompose(d);
  expect_exact(d, r);
  EXPECT_EQ(r.span(), 2);
}

TEST(BnaDecompose, SingleFlowIsOneMatching) {
  const auto d = mat({{3}});
  const auto r = bna_decompose(d);
  ASSERT_EQ(r.matchings.size(), 1u);
  EXPECT_EQ(r.matchings[0], (std::vector<PortPair>{{1, 1}}));
  EXPECT_EQ(r.duration(0), 3);
}

TEST(BnaDecompose, UpperTriangularMatchesBruteForceMinimum) {
  const auto d = mat({{2, 1}, {0, 1}});
  const int best = testing::reference_min_span(d);
  EXPECT_EQ(best, 3);
  const auto r = bna_decompose(d);
  expect_exact(d, r);
  EXPECT_EQ(r.span(), best);
}

TEST(BnaDecompose, ZeroMatrixIsEmpty) {
  const auto r = bna_decompose(DemandMatrix(3));
  EXPECT_TRUE(r.matchings.empty());
  EXPECT_EQ(r.span(), 0);
}

TEST(BnaDecompose, RandomMatricesAreExact) {
  Stream rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = static_cast<int>(rng.uniform_int(1, 8));
    const auto d = testing::random_matrix(rng, m, 10, rng.uniform01());
    expect_exact(d, bna_decompose(d));
  }
}

TEST(BnaDecompose, SmallRandomMatricesMatchBruteForce) {
  Stream rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const auto d = testing::random_matrix(rng, 2 + trial % 2, 2, 0.6);
    if (d.total() > 7) continue;
    EXPECT_EQ(bna_decompose(d).span(), testing::reference_min_span(d));
  }
}

TEST(BnaDecompose, IsDeterministic) {
  Stream rng(3);
  const auto d = testing::random_matrix(rng, 6, 9);
  const auto a = bna_decompose(d);
  const auto b = bna_decompose(d);
  EXPECT_EQ(a.matchings, b.matchings);
  EXPECT_EQ(a.times, b.times);
}

TEST(BnaSchedule, PassesVerifier) {
  Stream rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = static_cast<int>(rng.uniform_int(1, 6));
    Instance inst{m, {}};
    Job job;
    job.id = 4;
    job.coflows = {{9, testing::random_matrix(rng, m, 6)}};
    inst.jobs = {job};
    const auto s = bna_schedule(bna_decompose(job.coflows[0].demand), m, 4, 9);
    EXPECT_TRUE(verify_schedule(inst, s).empty());
    EXPECT_EQ(testing::reference_check(inst, s), "");
    EXPECT_EQ(metrics(inst, s).makespan, effective_size(job.coflows[0].demand));
  }
}

}  // namespace
}  // namespace coflow
