#include "modal/assignment.hpp"

#include <algorithm>
#include <limits>

namespace modal {

namespace {

// Jonker–Volgenant style shortest-augmenting-path solver, square cost matrix,
// minimization. 1-based internals as in the classic formulation.
std::vector<int> min_cost_square(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = std::numeric_limits<double>::infinity();
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
    std::vector<int> rowsol(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j]) rowsol[p[j] - 1] = j - 1;
    }
    return rowsol;
}

}  // namespace

std::vector<int> max_benefit_assignment(const Eigen::MatrixXd& benefit) {
    const int rows = static_cast<int>(benefit.rows());
    const int cols = static_cast<int>(benefit.cols());
    if (rows == 0 || cols == 0) return std::vector<int>(rows, -1);

    const int n = std::max(rows, cols);
    // Pad to square; padding entries carry zero benefit.
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) cost[i][j] = -benefit(i, j);
    }
    std::vector<int> sol = min_cost_square(cost);
    sol.resize(rows);
    for (int i = 0; i < rows; ++i) {
        if (sol[i] >= cols) sol[i] = -1;  // matched to a padding column
    }
    return sol;
}

}  // namespace modal
