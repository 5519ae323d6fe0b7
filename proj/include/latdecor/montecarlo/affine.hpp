#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <type_traits>
#include <variant>
#include <vector>

#include "latdecor/core/lattice.hpp"
#include "latdecor/core/reduction.hpp"
#include "latdecor/error.hpp"
#include "latdecor/montecarlo/estimate.hpp"
#include "latdecor/montecarlo/philox.hpp"
#include "latdecor/montecarlo/sampling.hpp"
#include "latdecor/testfns/bump.hpp"
#include "latdecor/testfns/siegel.hpp"

namespace latdecor {

/// The affine lattice Lambda + x, with x kept in the fundamental
/// parallelepiped of the stored basis.
class AffineLatticePoint {
public:
    AffineLatticePoint(UnimodularLattice lattice, const Vector& offset)
        : lattice_(std::move(lattice)), inverse_(lattice_.basis().inverse()) {
        if (offset.size() != lattice_.dim()) throw DomainError("AffineLatticePoint: offset dimension mismatch");
        coeffs_ = inverse_ * offset;
        for (int i = 0; i < coeffs_.size(); ++i) {
            coeffs_(i) -= std::floor(coeffs_(i));
            if (coeffs_(i) >= 1.0) coeffs_(i) = 0.0;  // floor rounding at the upper edge
        }
        offset_ = lattice_.basis() * coeffs_;
    }

    const UnimodularLattice& lattice() const { return lattice_; }
    const Vector& offset() const { return offset_; }
    /// Coordinates of the offset in the basis, each in [0, 1).
    const Vector& coefficients() const { return coeffs_; }

    /// Lambda + x + v.
    AffineLatticePoint translated(const Vector& v) const { return {lattice_, offset_ + v}; }

private:
    UnimodularLattice lattice_;
    Matrix inverse_;
    Vector coeffs_;
    Vector offset_;
};

struct AffineConstant {
    double value = 1.0;
};

/// Sum of the bump over every point of Lambda + x.
struct AffineSiegel {
    BumpSpec bump;
};

/// Bump of the offset alone: rho(c - center) with c the coordinates of x in
/// the Lagrange-reduced basis, wrapped to the nearest periodic copy. That basis
/// is unique up to signs, so centers are restricted to {0, 1/2}^2 to make this a
/// function of the affine lattice. Needs radius <= 1/2 so at most one copy
/// meets the cell; its fiber average is then the integral of rho.
struct OffsetBump {
    BumpSpec bump;
    std::vector<double> center;
};

using AffineObservable = std::variant<AffineConstant, AffineSiegel, OffsetBump>;

inline void validate(const AffineObservable& obs, int d) {
    std::visit(
        [&](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, AffineConstant>) {
                if (!std::isfinite(o.value)) throw DomainError("affine constant must be finite");
            } else {
                o.bump.validate();
                if (o.bump.dim != d) throw DomainError("affine observable: bump dimension mismatch");
                if constexpr (std::is_same_v<T, OffsetBump>) {
                    if (o.bump.radius > 0.5) throw DomainError("offset bump: radius must be <= 1/2");
                    if (static_cast<int>(o.center.size()) != d)
                        throw DomainError("offset bump: center dimension mismatch");
                    for (double c : o.center)
                        if (c != 0.0 && c != 0.5) throw DomainError("offset bump: center entries must be 0 or 1/2");
                }
            }
        },
        obs);
}

/// Lagrange-Gauss reduction of a planar basis: |b1| <= |b2| and
/// |<b1, b2>| <= |b1|^2 / 2.
inline Matrix gauss_reduce(Matrix b) {
    if (b.rows() != 2 || b.cols() != 2) throw DomainError("gauss_reduce: basis must be 2 x 2");
    if (b.col(0).squaredNorm() > b.col(1).squaredNorm()) b.col(0).swap(b.col(1));
    for (int iter = 0; iter < 200; ++iter) {
        const double k = std::round(b.col(0).dot(b.col(1)) / b.col(0).squaredNorm());
        b.col(1) -= k * b.col(0);
        if (b.col(1).squaredNorm() >= b.col(0).squaredNorm()) return b;
        b.col(0).swap(b.col(1));
    }
    throw NumericalError("gauss_reduce: no convergence");
}

/// Evaluates observables on the fiber over one lattice; reductions are
/// computed on first use.
class FiberEvaluator {
public:
    explicit FiberEvaluator(const Matrix& basis) : basis_(basis) {}

    double operator()(const AffineObservable& obs, const Vector& x) {
        return std::visit(
            [&](const auto& o) -> double {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, AffineConstant>) {
                    return o.value;
                } else if constexpr (std::is_same_v<T, AffineSiegel>) {
                    if (!red_) red_ = lll_reduce(basis_);
                    return affine_siegel_transform(o.bump, *red_, x);
                } else {
                    if (!gauss_inverse_) gauss_inverse_ = gauss_reduce(basis_).inverse();
                    const Vector c = *gauss_inverse_ * x;
                    Vector v(c.size());
                    for (int i = 0; i < c.size(); ++i) {
                        const double d = c(i) - o.center[static_cast<std::size_t>(i)];
                        v(i) = d - std::round(d);
                    }
                    return bump_eval(o.bump, v);
                }
            },
            obs);
    }

private:
    Matrix basis_;
    std::optional<Matrix> gauss_inverse_;
    std::optional<Reduction> red_;
};

inline double evaluate(const AffineObservable& obs, const AffineLatticePoint& z) {
    FiberEvaluator f(z.lattice().basis());
    return f(obs, z.offset());
}

struct AffineOptions {
    int grid = 64;          // midpoint nodes per u-axis
    int fiber_points = 16;  // offsets per fiber-average estimate
    double horizon = kDefaultHorizon;
    std::uint64_t tag = 0;
};

struct AffineResult {
    Estimate correlation;  // (1/L^2) double integral over u of the correlation
    Estimate main_term;    // integral of phi* psi*
    Estimate gap;          // paired difference, same samples
    double scale = 0.0;    // max(1, L |w|)^{-2/3}

    friend bool operator==(const AffineResult&, const AffineResult&) = default;
};

/// Empirical check of mean decorrelation along sigma_w on affine lattices
/// in the plane. Sample i reads the stream stream_index(tag, i): B, then the
/// offset x, then 2 * fiber_points offsets for the fiber averages. Lambda is
/// approx_haar_sample(1, 1, T, seed, stream_index(tag, i)).
inline AffineResult affine_mean_decorrelation(const AffineObservable& phi, const AffineObservable& psi,
                                              const Vector& w, double length, std::uint64_t n_samples,
                                              std::uint64_t seed, const AffineOptions& opt = {}) {
    constexpr int d = 2;
    validate(phi, d);
    validate(psi, d);
    if (w.size() != d || !(w.norm() > 0.0) || !std::isfinite(w.norm()))
        throw DomainError("affine decorrelation: w must be a nonzero 2-vector");
    if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("affine decorrelation: L must be positive");
    if (opt.grid < 1 || opt.fiber_points < 1) throw DomainError("affine decorrelation: grid and fiber sizes must be positive");
    if (n_samples < 2) throw DomainError("N must be at least 2");
    if (opt.tag > 0xFFFF) throw DomainError("stream tag exceeds 16 bits");
    const FlowParam t = muI_flow(AdmissibleSet::full(1, 1), opt.horizon);

    const auto moments = accumulate_samples<3>(n_samples, [&](std::uint64_t i) {
        CounterStream stream(seed, stream_index(opt.tag, i));
        const Matrix basis = translated_basis(draw_torus(stream, 1, 1), t);
        FiberEvaluator eval(basis);
        auto draw_offset = [&] {
            Vector c(d);
            for (int k = 0; k < d; ++k) c(k) = stream.next_double();
            return Vector(basis * c);
        };
        const Vector x = draw_offset();
        double phi_bar = 0.0, psi_bar = 0.0;
        for (int k = 0; k < opt.grid; ++k) {
            const Vector y = x + (length * (k + 0.5) / opt.grid) * w;
            phi_bar += eval(phi, y);
            psi_bar += eval(psi, y);
        }
        phi_bar /= opt.grid;
        psi_bar /= opt.grid;
        double phi_star = 0.0, psi_star = 0.0;
        for (int k = 0; k < opt.fiber_points; ++k) phi_star += eval(phi, draw_offset());
        for (int k = 0; k < opt.fiber_points; ++k) psi_star += eval(psi, draw_offset());
        phi_star /= opt.fiber_points;
        psi_star /= opt.fiber_points;
        const double corr = phi_bar * psi_bar, main = phi_star * psi_star;
        return std::array<double, 3>{corr, main, corr - main};
    });

    AffineResult r;
    r.correlation = Estimate::from_moments(moments[0], seed);
    r.main_term = Estimate::from_moments(moments[1], seed);
    r.gap = Estimate::from_moments(moments[2], seed);
    r.scale = std::pow(std::max(1.0, length * w.norm()), -2.0 / 3.0);
    return r;
}

}  // namespace latdecor
