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

#include "robust_psi/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robust_psi/errors.hpp"

namespace robust_psi {
namespace {

void require_same_length(std::span<const double> x, std::span<const double> y,
                         const char* op) {
  if (x.size() != y.size()) {
    throw DomainError(std::string(op) + ": objective vectors differ in length (" +
                      std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
  }
}

double gap_against(std::span<const double> m_i, const MedianMatrix& medians,
                   const std::vector<std::size_t>& front) {
  double best = 0.0;
  for (std::size_t j : front) best = std::max(best, subopt_gap_pair(m_i, medians.row(j)));
  return best;
}

}  // namespace

MedianMatrix::MedianMatrix(std::vector<ObjectiveVector> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw DomainError("MedianMatrix: at least one arm required");
  const std::size_t m = rows_.front().size();
  if (m == 0) throw DomainError("MedianMatrix: at least one objective required");
  for (const auto& r : rows_) {
    if (r.size() != m) throw DomainError("MedianMatrix: rows differ in length");
    for (double v : r) {
      if (!std::isfinite(v)) throw DomainError("MedianMatrix: non-finite entry");
    }
  }
}

bool weakly_dominated(std::span<const double> x, std::span<const double> y) {
  require_same_length(x, y, "weakly_dominated");
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (x[d] > y[d]) return false;
  }
  return true;
}

ObjectiveVector shift(std::span<const double> x, double a) {
  ObjectiveVector out(x.begin(), x.end());
  for (double& v : out) v += a;
  return out;
}

std::vector<std::size_t> pareto_front(const MedianMatrix& medians) {
  const std::size_t k = medians.arms();
  // Sorting by the first objective (descending) lets each arm only look at
  // candidates that can possibly dominate it.
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return medians.row(a)[0] > medians.row(b)[0];
  });

  std::vector<std::size_t> front;
  for (std::size_t pos = 0; pos < k; ++pos) {
    const std::size_t i = order[pos];
    const auto& mi = medians.row(i);
    bool dominated = false;
    // Dominators need m_j^0 >= m_i^0: every earlier arm plus ties after pos.
    for (std::size_t q = 0; q < k && !dominated; ++q) {
      const std::size_t j = order[q];
      if (q > pos && medians.row(j)[0] < mi[0]) break;
      if (j != i && weakly_dominated(mi, medians.row(j))) dominated = true;
    }
    if (!dominated) front.push_back(i);
  }
  std::sort(front.begin(), front.end());
  return front;
}

double subopt_gap_pair(std::span<const double> m_i, std::span<const double> m_j) {
  require_same_length(m_i, m_j, "subopt_gap_pair");
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < m_i.size(); ++d) lowest = std::min(lowest, m_j[d] - m_i[d]);
  return std::max(0.0, lowest);
}

double subopt_gap(std::size_t i, const MedianMatrix& medians) {
  if (i >= medians.arms()) throw DomainError("subopt_gap: arm index out of range");
  return gap_against(medians.row(i), medians, pareto_front(medians));
}

std::vector<double> subopt_gaps(const MedianMatrix& medians) {
  const auto front = pareto_front(medians);
  std::vector<double> gaps(medians.arms());
  for (std::size_t i = 0; i < gaps.size(); ++i) gaps[i] = gap_against(medians.row(i), medians, front);
  return gaps;
}

}  // namespace robust_psi
