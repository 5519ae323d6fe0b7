#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "latdecor/core/matrix.hpp"
#include "latdecor/error.hpp"

namespace latdecor {

/// Lovasz parameter of the LLL reduction.
inline constexpr double kLllDelta = 0.99;

/// LLL output: `reduced == basis * transform` with `transform` integral and
/// unimodular. `inverse` and `inverse_row_l1` bound coefficient boxes.
struct Reduction {
    Matrix reduced;
    IntMatrix transform;
    Matrix inverse;
    Vector inverse_row_l1;
};

/// Exact determinant of a small integer matrix (fraction-free Bareiss).
inline __int128 integer_determinant(const IntMatrix& a) {
    const int d = static_cast<int>(a.rows());
    std::array<std::array<__int128, kMaxLatticeDim>, kMaxLatticeDim> m{};
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m[i][j] = a(i, j);
    int sign = 1;
    __int128 prev = 1;
    for (int k = 0; k < d - 1; ++k) {
        if (m[k][k] == 0) {
            int p = k + 1;
            while (p < d && m[p][k] == 0) ++p;
            if (p == d) return 0;
            std::swap(m[k], m[p]);
            sign = -sign;
        }
        for (int i = k + 1; i < d; ++i)
            for (int j = k + 1; j < d; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign * m[d - 1][d - 1];
}

namespace detail {

struct GramSchmidt {
    Matrix mu;
    Vector norm2;  // |b*_i|^2
};

inline GramSchmidt gram_schmidt(const Matrix& b) {
    const int d = static_cast<int>(b.cols());
    GramSchmidt gs{Matrix::Zero(d, d), Vector::Zero(d)};
    Matrix star = b;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < i; ++j) {
            gs.mu(i, j) = b.col(i).dot(star.col(j)) / gs.norm2(j);
            star.col(i) -= gs.mu(i, j) * star.col(j);
        }
        gs.norm2(i) = star.col(i).squaredNorm();
    }
    return gs;
}

}  // namespace detail

/// LLL-reduce the columns of `basis`. Throws NumericalError when the basis is
/// numerically singular or the iteration does not settle.
inline Reduction lll_reduce(const Matrix& basis) {
    const int d = static_cast<int>(basis.cols());
    if (basis.rows() != d || d < 1) throw DomainError("lll_reduce: basis must be square");
    if (!basis.allFinite()) throw NumericalError("lll_reduce: non-finite basis entries");

    Matrix b = basis;
    IntMatrix u = IntMatrix::Identity(d, d);
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    const double floor2 = std::pow(std::numeric_limits<double>::epsilon() * scale, 2);

    auto gs = detail::gram_schmidt(b);
    auto check = [&] {
        for (int i = 0; i < d; ++i)
            if (!std::isfinite(gs.norm2(i)) || gs.norm2(i) <= floor2)
                throw NumericalError("lll_reduce: numerically singular basis");
    };
    check();

    const long long max_iter = 100000LL * d * d;
    long long iter = 0;
    int k = 1;
    while (k < d) {
        if (++iter > max_iter) throw NumericalError("lll_reduce: iteration limit exceeded");
        for (int j = k - 1; j >= 0; --j) {
            const double q = std::round(gs.mu(k, j));
            if (q == 0.0) continue;
            if (std::abs(q) > 9e15) throw NumericalError("lll_reduce: coefficient overflow");
            const auto qi = static_cast<long long>(q);
            b.col(k) -= q * b.col(j);
            u.col(k) -= qi * u.col(j);
            for (int i = 0; i < j; ++i) gs.mu(k, i) -= q * gs.mu(j, i);
            gs.mu(k, j) -= q;
        }
        const double mu = gs.mu(k, k - 1);
        if (gs.norm2(k) >= (kLllDelta - mu * mu) * gs.norm2(k - 1)) {
            ++k;
        } else {
            b.col(k).swap(b.col(k - 1));
            u.col(k).swap(u.col(k - 1));
            gs = detail::gram_schmidt(b);
            check();
            k = std::max(k - 1, 1);
        }
    }

    if (std::abs(static_cast<double>(integer_determinant(u))) != 1.0)
        throw InternalError("lll_reduce: change of basis is not unimodular");

    Reduction r;
    // Rebuild from the original basis to avoid drift from the in-place updates.
    r.reduced = basis * u.cast<double>();
    r.transform = std::move(u);
    Eigen::PartialPivLU<Matrix> lu(r.reduced);
    r.inverse = lu.inverse();
    if (!r.inverse.allFinite()) throw NumericalError("lll_reduce: reduced basis not invertible");
    r.inverse_row_l1 = r.inverse.cwiseAbs().rowwise().sum();
    return r;
}

/// Visit every lattice point v = R c + offset with |v|_inf <= radius, where R
/// is the reduced basis. The callback receives v and whether c == 0.
template <class Fn>
void for_each_point_in_ball(const Reduction& red, double radius, const Vector& offset, Fn&& fn) {
    const int d = static_cast<int>(red.reduced.cols());
    std::array<long long, kMaxLatticeDim> lo{}, hi{}, c{};
    const Vector center = -(red.inverse * offset);
    for (int i = 0; i < d; ++i) {
        const double half = red.inverse_row_l1(i) * radius * (1.0 + 1e-12);
        const double a = std::ceil(center(i) - half), z = std::floor(center(i) + half);
        if (!(std::abs(a) < 1e15 && std::abs(z) < 1e15))
            throw NumericalError("lattice enumeration: coefficient box too large");
        lo[i] = static_cast<long long>(a);
        hi[i] = static_cast<long long>(z);
        if (lo[i] > hi[i]) return;
        c[i] = lo[i];
    }
    std::array<std::array<double, kMaxLatticeDim>, kMaxLatticeDim> col{};
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) col[j][i] = red.reduced(i, j);

    Vector v(d);
    auto recompute = [&] {
        for (int i = 0; i < d; ++i) {
            double s = offset(i);
            for (int j = 0; j < d; ++j) s += static_cast<double>(c[j]) * col[j][i];
            v(i) = s;
        }
    };
    recompute();
    while (true) {
        double norm = 0.0;
        for (int i = 0; i < d; ++i) norm = std::max(norm, std::abs(v(i)));
        if (norm <= radius) {
            bool zero = true;
            for (int i = 0; i < d; ++i) zero = zero && c[i] == 0;
            fn(static_cast<const Vector&>(v), zero);
        }
        int k = 0;
        while (k < d && c[k] == hi[k]) ++k;
        if (k == d) break;
        for (int j = 0; j < k; ++j) c[j] = lo[j];
        ++c[k];
        if (k == 0) {
            for (int i = 0; i < d; ++i) v(i) += col[0][i];
        } else {
            recompute();
        }
    }
}

/// Minimum sup-norm over nonzero lattice vectors. The search radius is the
/// shortest reduced column, which upper-bounds the answer.
inline double shortest_vector_length(const Reduction& red) {
    const int d = static_cast<int>(red.reduced.cols());
    double best = INFINITY;
    for (int j = 0; j < d; ++j) best = std::min(best, red.reduced.col(j).cwiseAbs().maxCoeff());
    const Vector zero = Vector::Zero(d);
    for_each_point_in_ball(red, best, zero, [&](const Vector& v, bool is_zero) {
        if (!is_zero) best = std::min(best, v.cwiseAbs().maxCoeff());
    });
    if (!(best > 0.0)) throw NumericalError("shortest_vector_length: degenerate lattice");
    return best;
}

}  // namespace latdecor
