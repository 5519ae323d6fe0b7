#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "latdecor/core/matrix.hpp"
#include "latdecor/error.hpp"

namespace latdecor {

/// Polynomial bump rho(v) = amplitude * max(0, 1 - |v|^2 / radius^2)^power.
///
/// |v| is the Euclidean norm, so the support is the Euclidean ball of the
/// given radius, which sits inside the sup-norm ball used for enumeration.
/// rho is C^{power-1}.
struct BumpSpec {
    int dim = 2;
    double radius = 2.0;
    int power = 2;
    double amplitude = 1.0;

    void validate() const {
        if (dim < 1 || dim > kMaxLatticeDim) throw DomainError("BumpSpec: dim out of range");
        if (!(radius > 0.0) || !std::isfinite(radius)) throw DomainError("BumpSpec: radius must be positive");
        if (power < 2) throw DomainError("BumpSpec: power must be >= 2");
        if (!std::isfinite(amplitude)) throw DomainError("BumpSpec: amplitude must be finite");
    }

    friend bool operator==(const BumpSpec&, const BumpSpec&) = default;
};

inline double bump_profile(const BumpSpec& spec, double norm2) {
    const double u = 1.0 - norm2 / (spec.radius * spec.radius);
    if (u <= 0.0) return 0.0;
    double r = u;
    for (int k = 1; k < spec.power; ++k) r *= u;
    return spec.amplitude * r;
}

inline double bump_eval(const BumpSpec& spec, std::span<const double> v) {
    if (static_cast<int>(v.size()) != spec.dim) throw DomainError("bump_eval: dimension mismatch");
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    return bump_profile(spec, n2);
}

inline double bump_eval(const BumpSpec& spec, const Vector& v) {
    return bump_eval(spec, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}

/// Closed form of the integral of rho over R^dim:
/// amplitude * radius^d * pi^{d/2} * Gamma(p+1) / Gamma(p+1+d/2).
inline double bump_integral(const BumpSpec& spec) {
    const double d = spec.dim, p = spec.power;
    return spec.amplitude * std::pow(spec.radius, d) * std::pow(std::numbers::pi, d / 2) *
           std::exp(std::lgamma(p + 1) - std::lgamma(p + 1 + d / 2));
}

/// Grid-sampled sup of axis derivatives of order <= ell by central
/// differences. An approximation of the C^ell norm, not a bound.
inline double approx_cl_norm(const BumpSpec& spec, int ell, int points_per_axis = 41) {
    spec.validate();
    if (ell < 0) throw DomainError("approx_cl_norm: ell must be nonnegative");
    const double h = 1e-3 * spec.radius;
    double best = std::abs(spec.amplitude);
    Vector v = Vector::Zero(spec.dim);
    // Derivatives of a radial profile peak on the axes, so sample one axis.
    for (int g = 0; g < points_per_axis; ++g) {
        const double x = -spec.radius + 2.0 * spec.radius * g / (points_per_axis - 1);
        for (int order = 1; order <= ell; ++order) {
            double acc = 0.0, binom = 1.0;
            for (int k = 0; k <= order; ++k) {
                v(0) = x + (0.5 * order - k) * h;
                acc += ((k % 2) ? -binom : binom) * bump_eval(spec, v);
                binom = binom * (order - k) / (k + 1);
            }
            best = std::max(best, std::abs(acc) / std::pow(h, order));
        }
    }
    return best;
}

}  // namespace latdecor
