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

#ifndef NODEDP_ASSIGNMENT_H_
#define NODEDP_ASSIGNMENT_H_

#include <vector>

namespace nodedp {

struct Assignment {
  // row_to_col[i] is the column assigned to row i.
  std::vector<int> row_to_col;
  double cost = 0.0;
};

// Minimum-cost perfect matching on a square cost matrix (Hungarian method with
// potentials, O(dim^3)). `cost` is row-major, cost[i][j] = cost of row i doing
// column j. An empty matrix yields an empty assignment.
Assignment SolveMinCostAssignment(const std::vector<std::vector<double>>& cost);

}  // namespace nodedp

#endif  // NODEDP_ASSIGNMENT_H_
