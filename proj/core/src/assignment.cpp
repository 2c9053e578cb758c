#include "plg/assignment.hpp"

#include <algorithm>
#include <limits>

#include "plg/error.hpp"

namespace plg {

// Shortest augmenting path with row/column potentials, O(n^3).
Assignment hungarian_assign(const Eigen::MatrixXd& cost) {
    if (!cost.allFinite()) throw Error("hungarian_assign: costs must be finite");
    const int rows = static_cast<int>(cost.rows()), cols = static_cast<int>(cost.cols());
    Assignment out;
    if (rows == 0 || cols == 0) return out;
    const int n = std::max(rows, cols);
    auto c = [&](int i, int j) { return (i < rows && j < cols) ? cost(i, j) : 0.0; };

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);  // p[j]: row matched to column j (1-based)
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = c(i0 - 1, j - 1) - u[i0] - v[j];
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
        } while (j0 != 0);
    }
    for (int j = 1; j <= n; ++j) {
        const int i = p[j] - 1;
        if (i < rows && j - 1 < cols) {
            out.pairs.emplace_back(i, j - 1);
            out.cost += cost(i, j - 1);
        }
    }
    std::sort(out.pairs.begin(), out.pairs.end());
    return out;
}

}  // namespace plg
