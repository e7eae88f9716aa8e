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

// Optimal single-coflow scheduling by Birkhoff-von Neumann style
// decomposition. A coflow with effective size D is split into at most m^2
// matchings whose durations add up to exactly D.

#ifndef COFLOW_BNA_HPP_
#define COFLOW_BNA_HPP_

#include <algorithm>
#include <cstdint>
#include <vector>

#include "coflow/model.hpp"

namespace coflow {

struct ServerLoads {
  std::vector<std::int64_t> sender;    // index s-1
  std::vector<std::int64_t> receiver;  // index r-1
};

inline ServerLoads server_loads(const DemandMatrix& d) {
  ServerLoads loads{std::vector<std::int64_t>(d.size(), 0),
                    std::vector<std::int64_t>(d.size(), 0)};
  for (const auto& [pair, size] : d.entries()) {
    loads.sender[pair.src - 1] += size;
    loads.receiver[pair.dst - 1] += size;
  }
  return loads;
}

/// Max over all ports of the load the coflow places on it.
inline std::int64_t effective_size(const DemandMatrix& d) {
  auto loads = server_loads(d);
  std::int64_t D = 0;
  for (auto v : loads.sender) D = std::max(D, v);
  for (auto v : loads.receiver) D = std::max(D, v);
  return D;
}

/// Matching L[k] is held during [times[k], times[k+1]).
struct BnaResult {
  std::vector<std::vector<PortPair>> matchings;
  std::vector<Slot> times{0};

  Slot span() const { return times.back(); }
  Slot duration(std::size_t k) const { return times[k + 1] - times[k]; }
};

namespace detail {

// Perfect matching on the line-balanced extension
//
//        | A           diag(D - r) |
//   B =  |                         |
//        | diag(D - c) A^T         |
//
// of the residual matrix A (row sums r, column sums c, effective size D).
// Every line of B sums to D, so its positive support has a perfect
// matching. A tight row i has D - r_i = 0 and a tight column j has
// D - c_j = 0, so both must be matched inside the A block: restricting the
// matching to A covers every tight node.
class BalancedMatcher {
 public:
  explicit BalancedMatcher(int m)
      : m_(m), match_row_(2 * m, -1), match_col_(2 * m, -1) {}

  // Recomputes a perfect matching, keeping every previously matched pair
  // whose B entry is still positive.
  void rematch(const std::vector<std::vector<std::int64_t>>& a,
               const std::vector<std::int64_t>& row_sum,
               const std::vector<std::int64_t>& col_sum, std::int64_t D) {
    a_ = &a;
    row_sum_ = &row_sum;
    col_sum_ = &col_sum;
    D_ = D;
    const int n = 2 * m_;
    for (int u = 0; u < n; ++u) {
      int v = match_row_[u];
      if (v >= 0 && weight(u, v) <= 0) {
        match_row_[u] = -1;
        match_col_[v] = -1;
      }
    }
    for (int u = 0; u < n; ++u) {
      if (match_row_[u] >= 0) continue;
      visited_.assign(n, 0);
      if (!augment(u))
        throw InternalError("bna: balanced extension has no perfect matching");
    }
  }

  // Matched (row, col) pairs inside the A block, 0-based.
  std::vector<std::pair<int, int>> a_block() const {
    std::vector<std::pair<int, int>> out;
    for (int s = 0; s < m_; ++s)
      if (match_row_[s] >= 0 && match_row_[s] < m_)
        out.emplace_back(s, match_row_[s]);
    return out;
  }

 private:
  std::int64_t weight(int u, int v) const {
    const auto& a = *a_;
    if (u < m_ && v < m_) return a[u][v];
    if (u < m_) return v - m_ == u ? D_ - (*row_sum_)[u] : 0;
    if (v < m_) return u - m_ == v ? D_ - (*col_sum_)[v] : 0;
    return a[v - m_][u - m_];
  }

  // Kuhn augmentation scanning columns lowest index first.
  bool augment(int u) {
    const int n = 2 * m_;
    for (int v = 0; v < n; ++v) {
      if (visited_[v] || weight(u, v) <= 0) continue;
      visited_[v] = 1;
      if (match_col_[v] < 0 || augment(match_col_[v])) {
        match_row_[u] = v;
        match_col_[v] = u;
        return true;
      }
    }
    return false;
  }

  int m_;
  std::vector<int> match_row_;
  std::vector<int> match_col_;
  std::vector<char> visited_;
  const std::vector<std::vector<std::int64_t>>* a_ = nullptr;
  const std::vector<std::int64_t>* row_sum_ = nullptr;
  const std::vector<std::int64_t>* col_sum_ = nullptr;
  std::int64_t D_ = 0;
};

}  // namespace detail

/// Decomposes a coflow into timed matchings of total length
/// effective_size(d).
///
/// Each round takes the tight ports (load equal to the current effective
/// size), picks a matching on positive entries that covers all of them,
/// and holds it for
///   t = min( min matched entry,
///            min over unmatched senders of D - d_s,
///            min over unmatched receivers of D - d_r ).
/// After the round every tight port is still tight and D has dropped by t.
inline BnaResult bna_decompose(const DemandMatrix& d) {
  const int m = d.size();
  BnaResult result;
  if (m == 0 || d.empty()) return result;

  std::vector<std::vector<std::int64_t>> a(m, std::vector<std::int64_t>(m, 0));
  for (const auto& [pair, size] : d.entries())
    a[pair.src - 1][pair.dst - 1] = size;

  std::vector<std::int64_t> row(m, 0);
  std::vector<std::int64_t> col(m, 0);
  for (int s = 0; s < m; ++s)
    for (int r = 0; r < m; ++r) {
      row[s] += a[s][r];
      col[r] += a[s][r];
    }

  detail::BalancedMatcher matcher(m);
  while (true) {
    std::int64_t D = 0;
    for (int i = 0; i < m; ++i) D = std::max({D, row[i], col[i]});
    if (D == 0) break;

    matcher.rematch(a, row, col, D);
    auto pairs = matcher.a_block();

    std::vector<char> row_matched(m, 0);
    std::vector<char> col_matched(m, 0);
    std::int64_t t = D;
    for (auto [s, r] : pairs) {
      row_matched[s] = col_matched[r] = 1;
      t = std::min(t, a[s][r]);
    }
    for (int i = 0; i < m; ++i) {
      if (row[i] == D && !row_matched[i])
        throw InternalError("bna: tight sender left unmatched");
      if (col[i] == D && !col_matched[i])
        throw InternalError("bna: tight receiver left unmatched");
      if (!row_matched[i]) t = std::min(t, D - row[i]);
      if (!col_matched[i]) t = std::min(t, D - col[i]);
    }
    if (t <= 0) throw InternalError("bna: non-positive step length");

    std::vector<PortPair> matching;
    matching.reserve(pairs.size());
    for (auto [s, r] : pairs) {
      a[s][r] -= t;
      row[s] -= t;
      col[r] -= t;
      matching.push_back({s + 1, r + 1});
    }
    result.matchings.push_back(std::move(matching));
    result.times.push_back(result.times.back() + t);
  }
  return result;
}

/// Lays a decomposition out as a schedule for one coflow starting at
/// `start`.
inline Schedule bna_schedule(const BnaResult& bna, int m, int job, int coflow,
                             Slot start = 0) {
  Schedule out(m);
  for (std::size_t k = 0; k < bna.matchings.size(); ++k) {
    TimedMatching item{start + bna.times[k], bna.duration(k), {}};
    for (const auto& p : bna.matchings[k])
      item.assignments.push_back({p.src, p.dst, job, coflow});
    out.add(std::move(item));
  }
  return out;
}

}  // namespace coflow

#endif  // COFLOW_BNA_HPP_
