#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "latdecor/core/index_set.hpp"
#include "latdecor/core/matrix.hpp"
#include "latdecor/error.hpp"

namespace latdecor {

/// Absolute tolerance of the balance condition t_1+...+t_m == t_{m+1}+...+t_{m+n}.
inline constexpr double kBalanceTolerance = 1e-12;

namespace detail {

inline double block_sum(std::span<const double> v, int first, int last) {
    double s = 0.0;
    for (int i = first; i < last; ++i) s += v[static_cast<std::size_t>(i)];
    return s;
}

}  // namespace detail

/// A point of the cone A+: nonnegative, balanced flow times driving a(t).
class FlowParam {
public:
    FlowParam(int m, int n, std::vector<double> coords) : m_(m), n_(n), coords_(std::move(coords)) {
        detail::require(m >= 1 && n >= 1 && m + n <= kMaxDim, "FlowParam: bad dimensions");
        if (static_cast<int>(coords_.size()) != m + n)
            throw DomainError("FlowParam: expected " + std::to_string(m + n) + " coordinates");
        for (double c : coords_)
            if (!(c >= 0.0) || !std::isfinite(c))
                throw InvariantError("FlowParam: coordinates must be finite and nonnegative");
        const double gap = detail::block_sum(coords_, 0, m) - detail::block_sum(coords_, m, m + n);
        if (std::abs(gap) > kBalanceTolerance)
            throw InvariantError("FlowParam: unbalanced (block sums differ by " + std::to_string(gap) +
                                 ")");
        if (gap != 0.0) rebalance(gap);
    }

    static FlowParam zero(int m, int n) { return {m, n, std::vector<double>(m + n, 0.0)}; }

    int m() const { return m_; }
    int n() const { return n_; }
    int dim() const { return m_ + n_; }
    std::span<const double> coords() const { return coords_; }
    double operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }

    /// Coordinatewise sum; A+ is a cone so the sum stays valid.
    friend FlowParam operator+(const FlowParam& a, const FlowParam& b) {
        detail::require(a.m_ == b.m_ && a.n_ == b.n_, "FlowParam: dimension mismatch");
        std::vector<double> c(a.coords_.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coords_[i] + b.coords_[i];
        return {a.m_, a.n_, std::move(c)};
    }
    FlowParam scaled(double k) const {
        std::vector<double> c(coords_);
        for (double& x : c) x *= k;
        return {m_, n_, std::move(c)};
    }

    friend bool operator==(const FlowParam&, const FlowParam&) = default;

private:
    // Push the residual into the largest coordinate of the lighter block.
    void rebalance(double gap) {
        const int first = gap > 0 ? m_ : 0;
        const int last = gap > 0 ? m_ + n_ : m_;
        auto it = std::max_element(coords_.begin() + first, coords_.begin() + last);
        *it += std::abs(gap);
    }

    int m_;
    int n_;
    std::vector<double> coords_;
};

/// Coordinatewise restriction of a flow parameter to an index set. May be
/// unbalanced; `balanced` records which reading of A+_I it satisfies.
struct RestrictedParam {
    int m = 0;
    int n = 0;
    std::vector<double> coords;
    IndexSet support;
    bool balanced = false;
};

/// diag(e^{t_1},...,e^{t_m}, e^{-t_{m+1}},...,e^{-t_{m+n}}).
inline Matrix flow_matrix(const FlowParam& t) {
    const int d = t.dim();
    detail::require(d <= kMaxLatticeDim, "flow_matrix: dimension exceeds lattice limit");
    Matrix a = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) a(i, i) = i < t.m() ? std::exp(t[i]) : std::exp(-t[i]);
    return a;
}

/// Sup-norm distance between two flow parameters (or any equal-length vectors).
inline double sup_distance(std::span<const double> a, std::span<const double> b) {
    detail::require(a.size() == b.size(), "sup_distance: length mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// Minimum over unordered pairs of the sup-norm distance.
inline double delta_spread(std::span<const FlowParam> ts) {
    if (ts.size() < 2) throw DomainError("delta_spread: needs at least two parameters");
    for (const auto& t : ts)
        detail::require(t.m() == ts[0].m() && t.n() == ts[0].n(), "delta_spread: dimension mismatch");
    double best = INFINITY;
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = i + 1; j < ts.size(); ++j)
            best = std::min(best, sup_distance(ts[i].coords(), ts[j].coords()));
    return best;
}

enum class Extremum { floor, ceil };

/// min (floor) or max (ceil) of t over I; zero when I is empty.
inline double restricted_extrema(std::span<const double> t, const IndexSet& set, Extremum mode) {
    detail::require(static_cast<int>(t.size()) == set.dim(), "restricted_extrema: dimension mismatch");
    if (set.is_empty()) return 0.0;
    double v = mode == Extremum::floor ? INFINITY : -INFINITY;
    for (int i : set.indices())
        v = mode == Extremum::floor ? std::min(v, t[static_cast<std::size_t>(i)])
                                    : std::max(v, t[static_cast<std::size_t>(i)]);
    return v;
}

inline double floor_over(const FlowParam& t, const IndexSet& set) {
    return restricted_extrema(t.coords(), set, Extremum::floor);
}
inline double ceil_over(const FlowParam& t, const IndexSet& set) {
    return restricted_extrema(t.coords(), set, Extremum::ceil);
}

/// Split t = t' + t'' with t' supported on I and t'' on its complement.
inline std::pair<RestrictedParam, RestrictedParam> restrict_param(const FlowParam& t, const IndexSet& set) {
    detail::require(set.dim() == t.dim(), "restrict_param: dimension mismatch");
    auto make = [&](const IndexSet& support) {
        RestrictedParam r{t.m(), t.n(), std::vector<double>(t.coords().size(), 0.0), support, false};
        for (int i : support.indices()) r.coords[static_cast<std::size_t>(i)] = t[i];
        r.balanced = std::abs(detail::block_sum(r.coords, 0, t.m()) -
                              detail::block_sum(r.coords, t.m(), t.dim())) <= kBalanceTolerance;
        return r;
    };
    return {make(set), make(set.complement())};
}

}  // namespace latdecor
