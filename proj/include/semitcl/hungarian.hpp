#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

namespace semitcl {

struct AssignmentResult {
  // Feasible (row, col) pairs, sorted by row. Rows or columns whose entries
  // are all infeasible stay unassigned.
  std::vector<std::pair<int, int>> pairs;
  double total_cost = 0.0;
};

// Minimum-cost one-to-one assignment on a rectangular matrix. Entries set to
// +infinity are infeasible. The solver first maximizes the number of feasible
// pairs, then minimizes their total cost; ties between optimal assignments
// are broken lexicographically by (row, col).
AssignmentResult hungarian(const Eigen::MatrixXd& cost);

}  // namespace semitcl
