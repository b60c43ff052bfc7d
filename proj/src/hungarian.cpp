#include "mobman/error.hpp"
#include "mobman/tracking.hpp"

#include <cmath>
#include <limits>

namespace mobman {

namespace {

// Square assignment (e-maxx formulation, 1-based internally). On return
// row_to_col holds a minimum-cost perfect matching and (u, v) are dual
// potentials with cost(i,j) - u[i] - v[j] >= 0, tight on matched pairs.
void solve_square(const Eigen::MatrixXd& a, std::vector<int>& row_to_col, std::vector<double>& u,
                  std::vector<double>& v) {
  const int n = static_cast<int>(a.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> uu(n + 1, 0.0), vv(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - uu[i0] - vv[j];
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
          uu[p[j]] += delta;
          vv[j] -= delta;
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
    } while (j0 != 0);
  }
  row_to_col.assign(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  u.assign(uu.begin() + 1, uu.end());
  v.assign(vv.begin() + 1, vv.end());
}

}  // namespace

double assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& assignment) {
  double total = 0.0;
  for (std::size_t r = 0; r < assignment.size(); ++r)
    if (assignment[r] >= 0) total += cost(static_cast<Eigen::Index>(r), assignment[r]);
  return total;
}

std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  if (rows == 0 || cols == 0) return std::vector<int>(static_cast<std::size_t>(rows), -1);
  if (!cost.allFinite()) fail(ErrorCode::InvalidArgument, "cost matrix has non-finite entries");

  // pad with zero-cost dummies to a square problem
  const int n = std::max(rows, cols);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  a.topLeftCorner(rows, cols) = cost;

  std::vector<int> match_row;
  std::vector<double> u, v;
  solve_square(a, match_row, u, v);

  const double eps = 1e-9 * std::max(1.0, cost.cwiseAbs().maxCoeff());
  auto tight = [&](int i, int j) { return a(i, j) - u[i] - v[j] <= eps; };

  std::vector<int> match_col(n, -1);
  for (int i = 0; i < n; ++i) match_col[match_row[i]] = i;
  std::vector<char> fixed_col(n, 0);

  // Walk the real rows in order and pin each to the smallest column that still
  // admits an optimal completion (a perfect matching on tight edges).
  std::vector<char> visited(n, 0);
  auto augment = [&](auto&& self, int r) -> bool {
    for (int k = 0; k < n; ++k) {
      if (fixed_col[k] || visited[k] || !tight(r, k)) continue;
      visited[k] = 1;
      if (match_col[k] < 0 || self(self, match_col[k])) {
        match_col[k] = r;
        match_row[r] = k;
        return true;
      }
    }
    return false;
  };

  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < n; ++j) {
      if (fixed_col[j] || !tight(i, j)) continue;
      if (match_row[i] == j) {
        fixed_col[j] = 1;
        break;
      }
      const auto saved_row = match_row;
      const auto saved_col = match_col;
      const int displaced = match_col[j];
      const int freed = match_row[i];
      match_row[i] = j;
      match_col[j] = i;
      match_col[freed] = -1;
      fixed_col[j] = 1;
      std::fill(visited.begin(), visited.end(), 0);
      if (augment(augment, displaced)) break;
      match_row = saved_row;
      match_col = saved_col;
      fixed_col[j] = 0;
    }
  }

  std::vector<int> out(static_cast<std::size_t>(rows), -1);
  for (int i = 0; i < rows; ++i)
    if (match_row[i] < cols) out[static_cast<std::size_t>(i)] = match_row[i];
  return out;
}

}  // namespace mobman
