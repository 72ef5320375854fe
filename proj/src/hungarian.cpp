#include "semitcl/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace semitcl {

namespace {

// Jonker-Volgenant style shortest augmenting path solver on a square matrix.
// Returns col_of_row and the dual potentials (u, v).
void solve_square(const std::vector<std::vector<double>>& cost, int n,
                  std::vector<int>& col_of_row, std::vector<double>& u,
                  std::vector<double>& v) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  u.assign(n + 1, 0.0);
  v.assign(n + 1, 0.0);
  std::vector<int> p(n + 1, 0);  // p[j] = row matched to column j (1-based)
  std::vector<int> way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  col_of_row.assign(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j]) col_of_row[p[j] - 1] = j - 1;
  }
}

// Augmenting path search restricted to tight edges, skipping fixed rows and
// forbidden columns. Used by the lexicographic refinement below.
bool try_augment(int row, const std::vector<std::vector<char>>& tight, int n,
                 std::vector<int>& row_of_col, std::vector<int>& col_of_row,
                 std::vector<char>& visited, const std::vector<char>& row_fixed,
                 const std::vector<char>& col_forbidden) {
  for (int c = 0; c < n; ++c) {
    if (!tight[row][c] || visited[c] || col_forbidden[c]) continue;
    visited[c] = 1;
    const int owner = row_of_col[c];
    if (owner < 0 || (!row_fixed[owner] &&
                      try_augment(owner, tight, n, row_of_col, col_of_row, visited,
                                  row_fixed, col_forbidden))) {
      row_of_col[c] = row;
      col_of_row[row] = c;
      return true;
    }
  }
  return false;
}

}  // namespace

AssignmentResult hungarian(const Eigen::MatrixXd& cost) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  AssignmentResult result;
  if (rows == 0 || cols == 0) return result;
  const int n = std::max(rows, cols);

  // Pad to square and replace infeasible entries by a sentinel larger than
  // any achievable feasible total, so the solver maximizes the number of
  // feasible pairs before minimizing cost.
  double sum_abs = 0.0;
  double max_abs = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double v = cost(r, c);
      if (std::isfinite(v)) {
        sum_abs += std::abs(v);
        max_abs = std::max(max_abs, std::abs(v));
      }
    }
  }
  const double big = 2.0 * sum_abs + 1.0;
  std::vector<std::vector<double>> padded(n, std::vector<double>(n, big));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double v = cost(r, c);
      if (std::isfinite(v)) padded[r][c] = v;
    }
  }

  std::vector<int> col_of_row;
  std::vector<double> u, v;
  solve_square(padded, n, col_of_row, u, v);

  // Every optimal assignment uses only edges with zero reduced cost under a
  // fixed optimal dual. Re-pick the assignment inside that tight subgraph,
  // preferring the smallest column for each row in order.
  const double tol = 1e-9 * std::max(1.0, std::max(max_abs, big));
  std::vector<std::vector<char>> tight(n, std::vector<char>(n, 0));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (padded[r][c] - u[r + 1] - v[c + 1] <= tol) tight[r][c] = 1;
    }
  }
  std::vector<int> row_of_col(n, -1);
  for (int r = 0; r < n; ++r) row_of_col[col_of_row[r]] = r;
  std::vector<char> row_fixed(n, 0);
  std::vector<char> col_forbidden(n, 0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (c == col_of_row[r]) break;  // current choice is the smallest reachable
      if (!tight[r][c] || col_forbidden[c]) continue;
      // Tentatively move row r onto column c and reroute the current owner.
      const int owner = row_of_col[c];
      const int old_col = col_of_row[r];
      col_of_row[r] = c;
      row_of_col[c] = r;
      row_of_col[old_col] = -1;
      bool ok = true;
      if (owner >= 0) {
        col_of_row[owner] = -1;
        std::vector<char> visited(n, 0);
        visited[c] = 1;
        ok = try_augment(owner, tight, n, row_of_col, col_of_row, visited,
                         row_fixed, col_forbidden);
      }
      if (ok) break;
      col_of_row[r] = old_col;
      row_of_col[old_col] = r;
      row_of_col[c] = owner;
      if (owner >= 0) col_of_row[owner] = c;
    }
    row_fixed[r] = 1;
    col_forbidden[col_of_row[r]] = 1;
  }

  for (int r = 0; r < rows; ++r) {
    const int c = col_of_row[r];
    if (c < cols && std::isfinite(cost(r, c))) {
      result.pairs.emplace_back(r, c);
      result.total_cost += cost(r, c);
    }
  }
  return result;
}

}  // namespace semitcl
