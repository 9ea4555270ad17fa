// Copyright 2026 The nodedp Authors.
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

#include "nodedp/assignment.h"

#include <limits>

namespace nodedp {

Assignment SolveMinCostAssignment(
    const std::vector<std::vector<double>>& cost) {
  const int dim = static_cast<int>(cost.size());
  Assignment result;
  if (dim == 0) return result;

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a virtual source.
  std::vector<double> row_potential(dim + 1, 0.0);
  std::vector<double> col_potential(dim + 1, 0.0);
  std::vector<int> col_match(dim + 1, 0);
  std::vector<int> way(dim + 1, 0);

  for (int row = 1; row <= dim; ++row) {
    col_match[0] = row;
    int col0 = 0;
    std::vector<double> min_slack(dim + 1, kInf);
    std::vector<bool> used(dim + 1, false);
    do {
      used[col0] = true;
      const int row0 = col_match[col0];
      double delta = kInf;
      int col1 = 0;
      for (int col = 1; col <= dim; ++col) {
        if (used[col]) continue;
        const double reduced =
            cost[row0 - 1][col - 1] - row_potential[row0] - col_potential[col];
        if (reduced < min_slack[col]) {
          min_slack[col] = reduced;
          way[col] = col0;
        }
        if (min_slack[col] < delta) {
          delta = min_slack[col];
          col1 = col;
        }
      }
      for (int col = 0; col <= dim; ++col) {
        if (used[col]) {
          row_potential[col_match[col]] += delta;
          col_potential[col] -= delta;
        } else {
          min_slack[col] -= delta;
        }
      }
      col0 = col1;
    } while (col_match[col0] != 0);
    // Augment along the alternating path.
    do {
      const int col1 = way[col0];
      col_match[col0] = col_match[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  result.row_to_col.assign(dim, -1);
  for (int col = 1; col <= dim; ++col) {
    result.row_to_col[col_match[col] - 1] = col - 1;
  }
  for (int row = 0; row < dim; ++row) {
    result.cost += cost[row][result.row_to_col[row]];
  }
  return result;
}

}  // namespace nodedp
