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

#pragma once

// Componentwise order on objective vectors, Pareto front extraction and
// suboptimality gaps. Comparisons are exact: no hidden tolerance.

#include <cstddef>
#include <span>
#include <vector>

namespace robust_psi {

using ObjectiveVector = std::vector<double>;

// K rows of M objective values; row i is the median vector of arm i.
class MedianMatrix {
 public:
  MedianMatrix() = default;
  explicit MedianMatrix(std::vector<ObjectiveVector> rows);

  std::size_t arms() const noexcept { return rows_.size(); }
  std::size_t objectives() const noexcept { return rows_.empty() ? 0 : rows_.front().size(); }
  const ObjectiveVector& row(std::size_t i) const { return rows_.at(i); }
  const std::vector<ObjectiveVector>& rows() const noexcept { return rows_; }

 private:
  std::vector<ObjectiveVector> rows_;
};

// x <= y componentwise.
bool weakly_dominated(std::span<const double> x, std::span<const double> y);
inline bool not_weakly_dominated(std::span<const double> x, std::span<const double> y) {
  return !weakly_dominated(x, y);
}

ObjectiveVector shift(std::span<const double> x, double a);

// Arms whose median vector is not weakly dominated by any other arm. Arms with
// identical vectors dominate each other and are all excluded.
std::vector<std::size_t> pareto_front(const MedianMatrix& medians);

// max{0, min_d (m_j^d - m_i^d)}.
double subopt_gap_pair(std::span<const double> m_i, std::span<const double> m_j);

// max over Pareto-optimal j of subopt_gap_pair(m_i, m_j).
double subopt_gap(std::size_t i, const MedianMatrix& medians);

// Gap of every arm, computing the front once.
std::vector<double> subopt_gaps(const MedianMatrix& medians);

}  // namespace robust_psi
