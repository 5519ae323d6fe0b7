#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "latdecor/core/lattice.hpp"
#include "latdecor/error.hpp"

namespace latdecor {

using Complex = std::complex<double>;
/// Frequency vector k in Z^{mn}, row-major like TorusPoint entries.
using Frequency = std::vector<int>;

/// e^{2 pi i <k, B>} with the entrywise pairing.
inline Complex character_eval(const Frequency& k, const TorusPoint& b) {
    const auto e = b.entries();
    if (k.size() != e.size()) throw DomainError("character_eval: frequency/torus shape mismatch");
    double phase = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) phase += k[i] * e[i];
    phase -= std::floor(phase);  // keep the argument small before scaling by 2 pi
    return std::polar(1.0, 2.0 * std::numbers::pi * phase);
}

/// Finitely supported trigonometric polynomial on the torus R^{mn}/Z^{mn}.
class TrigPoly {
public:
    TrigPoly(int m, int n) : m_(m), n_(n) {
        if (m < 1 || n < 1) throw DomainError("TrigPoly: bad dimensions");
    }
    static TrigPoly constant(int m, int n, Complex c) {
        TrigPoly p(m, n);
        p.set(Frequency(static_cast<std::size_t>(m * n), 0), c);
        return p;
    }

    int m() const { return m_; }
    int n() const { return n_; }
    const std::map<Frequency, Complex>& coeffs() const { return coeffs_; }

    void set(const Frequency& k, Complex c) {
        if (static_cast<int>(k.size()) != m_ * n_) throw DomainError("TrigPoly: frequency has wrong length");
        if (c == Complex{}) coeffs_.erase(k);
        else coeffs_[k] = c;
    }
    void add(const Frequency& k, Complex c) { set(k, coefficient(k) + c); }
    Complex coefficient(const Frequency& k) const {
        auto it = coeffs_.find(k);
        return it == coeffs_.end() ? Complex{} : it->second;
    }

    Complex operator()(const TorusPoint& b) const {
        Complex s{};
        for (const auto& [k, c] : coeffs_) s += c * character_eval(k, b);
        return s;
    }

    /// True when the coefficients are conjugate-symmetric (a real-valued function).
    bool is_real(double tol = 0.0) const {
        for (const auto& [k, c] : coeffs_) {
            Frequency neg(k);
            for (int& x : neg) x = -x;
            if (std::abs(coefficient(neg) - std::conj(c)) > tol) return false;
        }
        return true;
    }

    /// L^2 norm via Parseval.
    double l2_norm() const {
        double s = 0.0;
        for (const auto& [k, c] : coeffs_) s += std::norm(c);
        return std::sqrt(s);
    }

    friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
        if (a.m_ != b.m_ || a.n_ != b.n_) throw DomainError("TrigPoly: shape mismatch");
        TrigPoly out(a.m_, a.n_);
        for (const auto& [ka, ca] : a.coeffs_)
            for (const auto& [kb, cb] : b.coeffs_) {
                Frequency k(ka);
                for (std::size_t i = 0; i < k.size(); ++i) k[i] += kb[i];
                out.add(k, ca * cb);
            }
        return out;
    }

private:
    int m_;
    int n_;
    std::map<Frequency, Complex> coeffs_;
};

/// Sum of the moduli of the Fourier coefficients.
inline double wiener_norm(const TrigPoly& f) {
    double s = 0.0;
    for (const auto& [k, c] : f.coeffs()) s += std::abs(c);
    return s;
}

/// sin^2(x) / x^2 with omega(0) = 1.
inline double omega_kernel(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 45.0;
    }
    const double s = std::sin(x) / x;
    return s * s;
}

}  // namespace latdecor
