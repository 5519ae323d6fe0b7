#pragma once

#include <cmath>
#include <numbers>

#include "latdecor/error.hpp"
#include "latdecor/testfns/trigpoly.hpp"

namespace latdecor {

struct CircleResult {
    Complex value;
    Complex main_term;
    Complex gap;

    friend bool operator==(const CircleResult&, const CircleResult&) = default;
};

namespace detail {

inline void check_circle(const TrigPoly& phi, const TrigPoly& psi, double length) {
    if (phi.m() * phi.n() != 1 || psi.m() * psi.n() != 1)
        throw DomainError("circle decorrelation: polynomials must live on R/Z");
    if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("circle decorrelation: L must be positive");
}

}  // namespace detail

/// (1/L^2) int_0^L int_0^L int phi(x + s1) conj(psi(x + s2)) dx ds1 ds2, in
/// closed form: sum_n phi^(n) conj(psi^(n)) omega(pi L n).
inline CircleResult circle_mean_decorrelation(const TrigPoly& phi, const TrigPoly& psi, double length) {
    detail::check_circle(phi, psi, length);
    CircleResult r;
    for (const auto& [k, a] : phi.coeffs()) {
        const Complex b = psi.coefficient(k);
        if (b == Complex{}) continue;
        const Complex term = a * std::conj(b);
        if (k[0] == 0) r.main_term = term;
        else r.gap += term * omega_kernel(std::numbers::pi * length * k[0]);
    }
    r.value = r.main_term + r.gap;
    return r;
}

/// (pi L)^{-2} sum_{n != 0} |phi^(n)| |psi^(n)| n^{-2}, which bounds |gap|
/// because omega(x) <= x^{-2}.
inline double circle_gap_bound(const TrigPoly& phi, const TrigPoly& psi, double length) {
    detail::check_circle(phi, psi, length);
    double s = 0.0;
    for (const auto& [k, a] : phi.coeffs())
        if (k[0] != 0) s += std::abs(a) * std::abs(psi.coefficient(k)) / (double(k[0]) * k[0]);
    const double pl = std::numbers::pi * length;
    return s / (pl * pl);
}

/// ||phi||_2 ||psi||_2 (pi L)^{-2} sum' n^{-2}, the sum running over the
/// nonzero frequencies carried by both polynomials.
inline double circle_l2_bound(const TrigPoly& phi, const TrigPoly& psi, double length) {
    detail::check_circle(phi, psi, length);
    double s = 0.0;
    for (const auto& [k, a] : phi.coeffs())
        if (k[0] != 0 && psi.coefficient(k) != Complex{}) s += 1.0 / (double(k[0]) * k[0]);
    const double pl = std::numbers::pi * length;
    return phi.l2_norm() * psi.l2_norm() * s / (pl * pl);
}

}  // namespace latdecor
