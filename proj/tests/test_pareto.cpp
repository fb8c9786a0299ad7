// Copyright 2026 The robust_psi Authors.
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

#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "robust_psi/errors.hpp"
#include "robust_psi/pareto.hpp"

using namespace robust_psi;

namespace {

using V = std::vector<double>;

std::vector<std::size_t> literal_front(const std::vector<V>& rows) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < rows.size() && !dominated; ++j) {
      if (j == i) continue;
      bool le = true;
      for (std::size_t d = 0; d < rows[i].size(); ++d) le = le && rows[i][d] <= rows[j][d];
      dominated = le;
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

std::vector<V> random_rows(std::mt19937_64& rng, std::size_t k, std::size_t m, bool coarse) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> g(0, 3);
  std::vector<V> rows(k, V(m));
  for (auto& r : rows) {
    for (double& x : r) x = coarse ? g(rng) : u(rng);
  }
  return rows;
}

}  // namespace

TEST_CASE("weakly_dominated") {
  CHECK(weakly_dominated(V{1, 2}, V{1, 3}));
  CHECK_FALSE(weakly_dominated(V{1, 2}, V{0, 3}));
  CHECK(weakly_dominated(V{1, 2}, V{1, 2}));
  CHECK(not_weakly_dominated(V{1, 2}, V{0, 3}));
  CHECK_THROWS_AS(weakly_dominated(V{1, 2}, V{1}), DomainError);
}

TEST_CASE("weak dominance is a preorder") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const auto r = random_rows(rng, 3, 1 + trial % 4, true);
    CHECK(weakly_dominated(r[0], r[0]));
    if (weakly_dominated(r[0], r[1]) && weakly_dominated(r[1], r[2])) {
      CHECK(weakly_dominated(r[0], r[2]));
    }
  }
}

TEST_CASE("shift") {
  CHECK(shift(V{1, 2}, 0.5) == V{1.5, 2.5});
  CHECK(shift(V{1, 2}, 0.0) == V{1, 2});
  CHECK(shift(shift(V{1, 2}, 0.25), -0.25) == V{1, 2});
  const V x{0.3, 0.9};
  const V y{0.1, 0.5};
  CHECK(weakly_dominated(shift(x, -0.4), y) == (x[0] - 0.4 <= y[0] && x[1] - 0.4 <= y[1]));
}

TEST_CASE("MedianMatrix validation") {
  CHECK_THROWS_AS(MedianMatrix(std::vector<V>{}), DomainError);
  CHECK_THROWS_AS(MedianMatrix(std::vector<V>{{1, 2}, {1}}), DomainError);
  CHECK_THROWS_AS(MedianMatrix(std::vector<V>{{}}), DomainError);
  const MedianMatrix m({{1, 2}, {3, 4}, {5, 6}});
  CHECK(m.arms() == 3);
  CHECK(m.objectives() == 2);
}

TEST_CASE("pareto_front examples") {
  const MedianMatrix m({{1, 2}, {2, 1}, {0, 0}});
  CHECK(pareto_front(m) == std::vector<std::size_t>{0, 1});
  CHECK(pareto_front(MedianMatrix({{4.2, -1.0}})) == std::vector<std::size_t>{0});
  // Identical vectors weakly dominate each other.
  CHECK(pareto_front(MedianMatrix({{1, 1}, {1, 1}, {0, 2}})) == std::vector<std::size_t>{2});
  CHECK(pareto_front(MedianMatrix({{1, 1}, {1, 1}})).empty());
}

TEST_CASE("pareto_front equals the literal double loop") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + trial % 20;
    const std::size_t m = 1 + trial % 5;
    const auto rows = random_rows(rng, k, m, trial % 2 == 0);
    const MedianMatrix mm(rows);
    const auto front = pareto_front(mm);
    CHECK(front == literal_front(rows));
    for (std::size_t i = 0; i < k; ++i) {
      if (std::find(front.begin(), front.end(), i) != front.end()) continue;
      bool certified = false;
      for (std::size_t j = 0; j < k; ++j) certified = certified || (j != i && weakly_dominated(rows[i], rows[j]));
      CHECK(certified);
    }
    if (trial % 2 == 1) CHECK_FALSE(front.empty());
  }
}

TEST_CASE("subopt gaps") {
  CHECK(subopt_gap_pair(V{0, 0}, V{1, 2}) == 1.0);
  CHECK(subopt_gap_pair(V{2, 0}, V{1, 2}) == 0.0);
  CHECK(subopt_gap_pair(V{3, 3}, V{3, 3}) == 0.0);
  CHECK_THROWS_AS(subopt_gap_pair(V{1}, V{1, 2}), DomainError);

  const MedianMatrix m({{1, 2}, {2, 1}, {0, 0}});
  CHECK(subopt_gap(2, m) == 1.0);
  CHECK(subopt_gap(0, m) == 0.0);
  CHECK(subopt_gap(1, m) == 0.0);
  CHECK(subopt_gap(0, MedianMatrix({{5, 5}})) == 0.0);
  CHECK(subopt_gaps(m) == std::vector<double>{0.0, 0.0, 1.0});
}

TEST_CASE("gap properties and translation invariance") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + trial % 12;
    const std::size_t m = 1 + trial % 4;
    const auto rows = random_rows(rng, k, m, false);
    const MedianMatrix mm(rows);
    const auto front = pareto_front(mm);
    const auto gaps = subopt_gaps(mm);
    for (std::size_t i : front) CHECK(gaps[i] == 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(gaps[i] == subopt_gap(i, mm));
      if (gaps[i] > 0.0) CHECK(std::find(front.begin(), front.end(), i) == front.end());
    }
    // Dyadic offsets keep the arithmetic exact.
    V offset(m);
    for (double& x : offset) x = std::round(u(rng) * 8.0) / 8.0;
    std::vector<V> moved = rows;
    for (auto& r : moved) {
      for (std::size_t d = 0; d < m; ++d) r[d] += offset[d];
    }
    const MedianMatrix mm2(moved);
    CHECK(pareto_front(mm2) == front);
    const auto gaps2 = subopt_gaps(mm2);
    for (std::size_t i = 0; i < k; ++i) CHECK(gaps2[i] == doctest::Approx(gaps[i]).epsilon(1e-12));
  }
}
