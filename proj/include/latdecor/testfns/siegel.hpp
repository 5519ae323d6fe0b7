#pragma once

#include "latdecor/core/lattice.hpp"
#include "latdecor/core/reduction.hpp"
#include "latdecor/testfns/bump.hpp"

namespace latdecor {

/// Sum of rho over the nonzero vectors of the lattice with reduced basis `red`.
inline double siegel_transform(const BumpSpec& spec, const Reduction& red) {
    const int d = static_cast<int>(red.reduced.cols());
    if (d != spec.dim) throw DomainError("siegel_transform: dimension mismatch");
    if (spec.amplitude == 0.0) return 0.0;
    double sum = 0.0;
    const double r2 = spec.radius * spec.radius;
    for_each_point_in_ball(red, spec.radius, Vector::Zero(d), [&](const Vector& v, bool zero) {
        if (zero) return;
        const double n2 = v.squaredNorm();
        if (n2 < r2) sum += bump_profile(spec, n2);
    });
    return sum;
}

inline double siegel_transform(const BumpSpec& spec, const UnimodularLattice& lattice) {
    return siegel_transform(spec, lattice.reduction());
}

/// Sum of rho over the affine lattice Lambda + offset (every point counts).
inline double affine_siegel_transform(const BumpSpec& spec, const Reduction& red, const Vector& offset) {
    const int d = static_cast<int>(red.reduced.cols());
    if (d != spec.dim || offset.size() != d) throw DomainError("affine_siegel_transform: dimension mismatch");
    if (spec.amplitude == 0.0) return 0.0;
    double sum = 0.0;
    const double r2 = spec.radius * spec.radius;
    for_each_point_in_ball(red, spec.radius, offset, [&](const Vector& v, bool) {
        const double n2 = v.squaredNorm();
        if (n2 < r2) sum += bump_profile(spec, n2);
    });
    return sum;
}

}  // namespace latdecor
