#pragma once

// Dense phase-1 simplex for LP feasibility with Bland's anti-cycling rule.

#include <cmath>
#include <optional>
#include <vector>

#include "cpdptw/common.hpp"

namespace cpdptw {

/// Feasibility problem over free variables x: rows_le . x <= rhs_le, rows_eq . x = rhs_eq.
struct FeasibilityLP {
    std::vector<std::vector<double>> rows_le;
    std::vector<double> rhs_le;
    std::vector<std::vector<double>> rows_eq;
    std::vector<double> rhs_eq;
    int n_vars = 0;
};

struct FeasibilityResult {
    bool feasible = false;
    std::vector<double> x;
    double infeasibility = 0.0;  // phase-1 optimum (sum of artificials)
    int pivots = 0;
};

/// Each free variable is split as x = x+ - x-. Every row gets an artificial variable after its
/// right-hand side has been made nonnegative; phase 1 minimises their sum.
inline FeasibilityResult phase_one(const FeasibilityLP& lp, double tol = 1e-9, int max_pivots = 100000) {
    const int n = lp.n_vars;
    const int m_le = static_cast<int>(lp.rows_le.size());
    const int m_eq = static_cast<int>(lp.rows_eq.size());
    const int m = m_le + m_eq;
    if (static_cast<int>(lp.rhs_le.size()) != m_le || static_cast<int>(lp.rhs_eq.size()) != m_eq)
        throw ContractViolation("phase_one: row/rhs count mismatch");
    // columns: [x+ (n) | x- (n) | slack (m_le) | artificial (m)] then rhs
    const int n_cols = 2 * n + m_le + m;
    const int rhs_col = n_cols;
    std::vector<std::vector<double>> T(m + 1, std::vector<double>(n_cols + 1, 0.0));
    std::vector<int> basis(m);
    for (int r = 0; r < m; ++r) {
        const bool le = r < m_le;
        const auto& row = le ? lp.rows_le[r] : lp.rows_eq[r - m_le];
        if (static_cast<int>(row.size()) != n) throw ContractViolation("phase_one: row width mismatch");
        double rhs = le ? lp.rhs_le[r] : lp.rhs_eq[r - m_le];
        const double sign = rhs < 0 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) {
            T[r][j] = sign * row[j];
            T[r][n + j] = -sign * row[j];
        }
        if (le) T[r][2 * n + r] = sign;
        T[r][2 * n + m_le + r] = 1.0;
        T[r][rhs_col] = sign * rhs;
        basis[r] = 2 * n + m_le + r;
    }
    // objective row: minimise sum of artificials, expressed in reduced form
    auto& obj = T[m];
    for (int r = 0; r < m; ++r)
        for (int j = 0; j <= n_cols; ++j)
            if (j < 2 * n + m_le || j == rhs_col) obj[j] -= T[r][j];

    FeasibilityResult res;
    for (;;) {
        int enter = -1;
        for (int j = 0; j < n_cols; ++j)
            if (obj[j] < -tol) {
                enter = j;
                break;
            }
        if (enter < 0) break;
        int leave = -1;
        double best_ratio = kInf;
        for (int r = 0; r < m; ++r) {
            if (T[r][enter] <= tol) continue;
            const double ratio = T[r][rhs_col] / T[r][enter];
            if (ratio < best_ratio - 1e-12 || (std::abs(ratio - best_ratio) <= 1e-12 && leave >= 0 && basis[r] < basis[leave])) {
                best_ratio = ratio;
                leave = r;
            }
        }
        if (leave < 0) break;  // unbounded direction cannot occur in phase 1; stop defensively
        if (++res.pivots > max_pivots) throw NumericError("phase_one: pivot limit reached", -obj[rhs_col]);
        const double piv = T[leave][enter];
        for (double& v : T[leave]) v /= piv;
        for (int r = 0; r <= m; ++r) {
            if (r == leave) continue;
            const double f = T[r][enter];
            if (f == 0.0) continue;
            for (int j = 0; j <= n_cols; ++j) T[r][j] -= f * T[leave][j];
        }
        basis[leave] = enter;
    }
    res.infeasibility = -obj[rhs_col];
    res.x.assign(n, 0.0);
    for (int r = 0; r < m; ++r) {
        if (basis[r] < n) res.x[basis[r]] += T[r][rhs_col];
        else if (basis[r] < 2 * n) res.x[basis[r] - n] -= T[r][rhs_col];
    }
    double scale = 1.0;
    for (double b : lp.rhs_le) scale = std::max(scale, std::abs(b));
    for (double b : lp.rhs_eq) scale = std::max(scale, std::abs(b));
    const double feas_tol = 1e-9 * scale * std::max(1, m);
    if (res.infeasibility <= feas_tol) {
        res.feasible = true;
    } else if (res.infeasibility <= 1e3 * feas_tol) {
        throw NumericError("phase_one: degenerate verdict, residual near tolerance", res.infeasibility);
    }
    return res;
}

}  // namespace cpdptw
