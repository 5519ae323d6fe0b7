#pragma once

#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "latdecor/core/flow.hpp"
#include "latdecor/core/matrix.hpp"
#include "latdecor/core/reduction.hpp"
#include "latdecor/error.hpp"

namespace latdecor {

/// Relative tolerance for |det(basis)| == 1.
inline constexpr double kUnimodularTolerance = 1e-9;

/// A point B of the torus Mat_{m x n}(R/Z), stored row-major with entries in [0, 1).
class TorusPoint {
public:
    TorusPoint(int m, int n, std::vector<double> entries) : m_(m), n_(n), entries_(std::move(entries)) {
        detail::require(m >= 1 && n >= 1, "TorusPoint: bad dimensions");
        detail::require(static_cast<int>(entries_.size()) == m * n, "TorusPoint: expected m*n entries");
        for (double& x : entries_) {
            detail::require(std::isfinite(x), "TorusPoint: non-finite entry");
            x -= std::floor(x);
            if (x >= 1.0) x = 0.0;  // -tiny wraps to 1.0 in floating point
        }
    }
    static TorusPoint zero(int m, int n) { return {m, n, std::vector<double>(m * n, 0.0)}; }

    int m() const { return m_; }
    int n() const { return n_; }
    double operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i * n_ + j)]; }
    std::span<const double> entries() const { return entries_; }

private:
    int m_;
    int n_;
    std::vector<double> entries_;
};

/// A lattice of covolume one in R^d; the columns of `basis()` generate it.
class UnimodularLattice {
public:
    explicit UnimodularLattice(Matrix basis) : basis_(std::move(basis)), cache_(std::make_shared<Cache>()) {
        detail::require(basis_.rows() == basis_.cols() && basis_.rows() >= 1 &&
                            basis_.rows() <= kMaxLatticeDim,
                        "UnimodularLattice: basis must be square with dimension <= 8");
        const double det = basis_.determinant();
        if (!std::isfinite(det) || std::abs(std::abs(det) - 1.0) > kUnimodularTolerance)
            throw InvariantError("UnimodularLattice: |det| = " + std::to_string(std::abs(det)) + " != 1");
    }

    static UnimodularLattice standard(int d) { return UnimodularLattice(Matrix::Identity(d, d)); }

    int dim() const { return static_cast<int>(basis_.rows()); }
    const Matrix& basis() const { return basis_; }

    /// LLL-reduced basis, computed once and shared between copies.
    const Reduction& reduction() const {
        std::call_once(cache_->once, [this] { cache_->value = lll_reduce(basis_); });
        return *cache_->value;
    }
    bool has_cached_reduction() const { return cache_->value.has_value(); }

    /// Membership test for a vector, up to `tol` in the coefficient space.
    bool contains(const Vector& v, double tol = 1e-6) const {
        const Vector c = basis_.partialPivLu().solve(v);
        for (int i = 0; i < c.size(); ++i)
            if (std::abs(c(i) - std::round(c(i))) > tol) return false;
        return true;
    }

private:
    struct Cache {
        std::once_flag once;
        std::optional<Reduction> value;
    };

    Matrix basis_;
    std::shared_ptr<Cache> cache_;
};

/// Basis [[I_m, B], [0, I_n]] of Lambda_B = {(p + Bq, q)}.
inline UnimodularLattice lattice_from_matrix(const TorusPoint& b) {
    const int m = b.m(), n = b.n();
    detail::require(m + n <= kMaxLatticeDim, "lattice_from_matrix: dimension exceeds lattice limit");
    Matrix basis = Matrix::Identity(m + n, m + n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) basis(i, m + j) = b(i, j);
    return UnimodularLattice(std::move(basis));
}

/// a(t) applied to every lattice vector.
inline UnimodularLattice apply_flow(const FlowParam& t, const UnimodularLattice& lattice) {
    if (t.dim() != lattice.dim())
        throw DomainError("apply_flow: flow dimension " + std::to_string(t.dim()) +
                          " != lattice dimension " + std::to_string(lattice.dim()));
    Matrix basis = lattice.basis();
    for (int i = 0; i < t.dim(); ++i) basis.row(i) *= i < t.m() ? std::exp(t[i]) : std::exp(-t[i]);
    return UnimodularLattice(std::move(basis));
}

/// Dual lattice, basis = inverse transpose.
inline UnimodularLattice dual_lattice(const UnimodularLattice& lattice) {
    Eigen::FullPivLU<Matrix> lu(lattice.basis());
    if (!lu.isInvertible()) throw NumericalError("dual_lattice: singular basis");
    return UnimodularLattice(Matrix(lu.inverse().transpose()));
}

/// Minimum sup-norm over nonzero lattice vectors.
inline double shortest_vector_length(const UnimodularLattice& lattice) {
    return shortest_vector_length(lattice.reduction());
}

}  // namespace latdecor
