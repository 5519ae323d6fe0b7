#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "latdecor/error.hpp"

namespace latdecor {

using Rational = mpq_class;

/// "num/den" rendering used in every report, integers included.
inline std::string to_fraction_string(const Rational& q) {
    Rational c = q;
    c.canonicalize();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

inline Rational parse_fraction(const std::string& s) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw DomainError("parse_fraction: malformed rational '" + s + "'");
    q.canonicalize();
    return q;
}

/// minimize c.x subject to A x = b, x >= 0, over the rationals.
struct LinearProgram {
    std::vector<std::vector<Rational>> a;  // rows
    std::vector<Rational> b;
    std::vector<Rational> c;

    std::size_t rows() const { return a.size(); }
    std::size_t cols() const { return c.size(); }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<Rational> x;
    Rational objective;
    /// Dual multipliers y with A^T y <= c and b.y == objective.
    std::vector<Rational> y;
};

namespace detail {

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : t_(rows, std::vector<Rational>(cols + 1)), cost_(cols + 1), basis_(rows) {}

    std::vector<Rational>& row(std::size_t i) { return t_[i]; }
    std::vector<Rational>& cost() { return cost_; }
    std::vector<std::size_t>& basis() { return basis_; }
    std::size_t rows() const { return t_.size(); }
    std::size_t rhs() const { return cost_.size() - 1; }

    void pivot(std::size_t r, std::size_t e) {
        const Rational p = t_[r][e];
        for (auto& v : t_[r]) v /= p;
        for (std::size_t i = 0; i < t_.size(); ++i) {
            if (i == r || t_[i][e] == 0) continue;
            const Rational f = t_[i][e];
            for (std::size_t j = 0; j < t_[i].size(); ++j) t_[i][j] -= f * t_[r][j];
        }
        if (cost_[e] != 0) {
            const Rational f = cost_[e];
            for (std::size_t j = 0; j < cost_.size(); ++j) cost_[j] -= f * t_[r][j];
        }
        basis_[r] = e;
    }

    /// Bland's rule over columns [0, limit). Returns false when unbounded.
    bool optimize(std::size_t limit) {
        while (true) {
            std::size_t e = limit;
            for (std::size_t j = 0; j < limit; ++j)
                if (cost_[j] < 0) {
                    e = j;
                    break;
                }
            if (e == limit) return true;
            std::size_t r = rows();
            Rational best;
            for (std::size_t i = 0; i < rows(); ++i) {
                if (t_[i][e] <= 0) continue;
                Rational ratio = t_[i][rhs()] / t_[i][e];
                if (r == rows() || ratio < best || (ratio == best && basis_[i] < basis_[r])) {
                    r = i;
                    best = ratio;
                }
            }
            if (r == rows()) return false;
            pivot(r, e);
        }
    }

    void erase_row(std::size_t i) {
        t_.erase(t_.begin() + static_cast<std::ptrdiff_t>(i));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
    }

private:
    std::vector<std::vector<Rational>> t_;
    std::vector<Rational> cost_;  // reduced costs; last entry is -objective
    std::vector<std::size_t> basis_;
};

// Solve M^T y = rhs for square rational M (columns given), by Gauss-Jordan.
inline std::vector<Rational> solve_transposed(const std::vector<std::vector<Rational>>& cols,
                                              const std::vector<Rational>& rhs) {
    const std::size_t k = cols.size();
    // Row i of M^T is column i of M.
    std::vector<std::vector<Rational>> aug(k, std::vector<Rational>(k + 1));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) aug[i][j] = cols[i][j];
        aug[i][k] = rhs[i];
    }
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t p = c;
        while (p < k && aug[p][c] == 0) ++p;
        if (p == k) throw InternalError("simplex: singular basis matrix");
        std::swap(aug[p], aug[c]);
        const Rational piv = aug[c][c];
        for (auto& v : aug[c]) v /= piv;
        for (std::size_t i = 0; i < k; ++i) {
            if (i == c || aug[i][c] == 0) continue;
            const Rational f = aug[i][c];
            for (std::size_t j = c; j <= k; ++j) aug[i][j] -= f * aug[c][j];
        }
    }
    std::vector<Rational> y(k);
    for (std::size_t i = 0; i < k; ++i) y[i] = aug[i][k];
    return y;
}

}  // namespace detail

/// Two-phase primal simplex with Bland's anti-cycling rule, exact arithmetic.
inline LpSolution solve_lp(const LinearProgram& lp) {
    const std::size_t m = lp.rows(), n = lp.cols();
    for (const auto& r : lp.a)
        if (r.size() != n) throw DomainError("solve_lp: ragged constraint matrix");
    if (lp.b.size() != m) throw DomainError("solve_lp: rhs size mismatch");

    // Phase 1 on [A | I] with artificial columns n..n+m-1 and b >= 0.
    detail::Tableau tab(m, n + m);
    std::vector<int> sign(m, 1);
    for (std::size_t i = 0; i < m; ++i) {
        if (lp.b[i] < 0) sign[i] = -1;
        auto& row = tab.row(i);
        for (std::size_t j = 0; j < n; ++j) row[j] = sign[i] * lp.a[i][j];
        row[n + i] = 1;
        row[n + m] = sign[i] * lp.b[i];
        tab.basis()[i] = n + i;
    }
    auto& cost = tab.cost();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j <= n + m; ++j)
            if (j < n || j == n + m) cost[j] -= tab.row(i)[j];
    tab.optimize(n + m);

    LpSolution sol;
    if (-cost[n + m] != 0) {
        sol.status = LpStatus::infeasible;
        return sol;
    }

    // Drive artificials out of the basis; rows where that is impossible are redundant.
    std::vector<std::size_t> kept(m);
    for (std::size_t i = 0; i < m; ++i) kept[i] = i;
    for (std::size_t i = 0; i < tab.rows();) {
        if (tab.basis()[i] < n) {
            ++i;
            continue;
        }
        std::size_t e = n;
        for (std::size_t j = 0; j < n; ++j)
            if (tab.row(i)[j] != 0) {
                e = j;
                break;
            }
        if (e < n) {
            tab.pivot(i, e);
            ++i;
        } else {
            tab.erase_row(i);
            kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
        }
    }

    // Phase 2: reduced costs of the true objective, artificial columns barred.
    for (auto& v : cost) v = 0;
    for (std::size_t j = 0; j < n; ++j) cost[j] = lp.c[j];
    for (std::size_t i = 0; i < tab.rows(); ++i) {
        const Rational cb = lp.c[tab.basis()[i]];
        if (cb == 0) continue;
        for (std::size_t j = 0; j <= n + m; ++j) cost[j] -= cb * tab.row(i)[j];
    }
    if (!tab.optimize(n)) {
        sol.status = LpStatus::unbounded;
        return sol;
    }

    sol.status = LpStatus::optimal;
    sol.x.assign(n, 0);
    for (std::size_t i = 0; i < tab.rows(); ++i) sol.x[tab.basis()[i]] = tab.row(i)[n + m];
    sol.objective = 0;
    for (std::size_t j = 0; j < n; ++j) sol.objective += lp.c[j] * sol.x[j];

    // Duals from B^T y = c_B on the kept (sign-normalized) rows.
    std::vector<std::vector<Rational>> cols;
    std::vector<Rational> cb;
    for (std::size_t i = 0; i < tab.rows(); ++i) {
        const std::size_t j = tab.basis()[i];
        std::vector<Rational> col(kept.size());
        for (std::size_t r = 0; r < kept.size(); ++r) col[r] = sign[kept[r]] * lp.a[kept[r]][j];
        cols.push_back(std::move(col));
        cb.push_back(lp.c[j]);
    }
    const auto y_kept = detail::solve_transposed(cols, cb);
    sol.y.assign(m, 0);
    for (std::size_t r = 0; r < kept.size(); ++r) sol.y[kept[r]] = sign[kept[r]] * y_kept[r];
    return sol;
}

/// Re-check optimality from scratch: primal feasibility, dual feasibility and
/// equal objectives. Returns an empty string on success, else the failed check.
inline std::string check_lp_certificate(const LinearProgram& lp, const std::vector<Rational>& x,
                                        const std::vector<Rational>& y) {
    if (x.size() != lp.cols() || y.size() != lp.rows()) return "certificate size mismatch";
    for (const auto& v : x)
        if (v < 0) return "primal variable negative";
    for (std::size_t i = 0; i < lp.rows(); ++i) {
        Rational s = 0;
        for (std::size_t j = 0; j < lp.cols(); ++j) s += lp.a[i][j] * x[j];
        if (s != lp.b[i]) return "primal constraint " + std::to_string(i) + " violated";
    }
    for (std::size_t j = 0; j < lp.cols(); ++j) {
        Rational s = 0;
        for (std::size_t i = 0; i < lp.rows(); ++i) s += lp.a[i][j] * y[i];
        if (s > lp.c[j]) return "dual constraint " + std::to_string(j) + " violated";
    }
    Rational primal = 0, dual = 0;
    for (std::size_t j = 0; j < lp.cols(); ++j) primal += lp.c[j] * x[j];
    for (std::size_t i = 0; i < lp.rows(); ++i) dual += lp.b[i] * y[i];
    if (primal != dual) return "duality gap " + to_fraction_string(primal - dual);
    return {};
}

}  // namespace latdecor
