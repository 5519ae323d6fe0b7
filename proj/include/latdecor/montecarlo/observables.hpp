#pragma once

#include <cmath>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "latdecor/core/flow.hpp"
#include "latdecor/core/lattice.hpp"
#include "latdecor/core/reduction.hpp"
#include "latdecor/error.hpp"
#include "latdecor/montecarlo/sampling.hpp"
#include "latdecor/testfns/bump.hpp"
#include "latdecor/testfns/siegel.hpp"
#include "latdecor/testfns/trigpoly.hpp"

namespace latdecor {

/// The constant function.
struct ConstantObservable {
    double value = 1.0;
    friend bool operator==(const ConstantObservable&, const ConstantObservable&) = default;
};

/// offset + Siegel transform of the bump, evaluated at a(t) Lambda_B.
struct SiegelObservable {
    BumpSpec bump;
    double offset = 0.0;
    friend bool operator==(const SiegelObservable&, const SiegelObservable&) = default;
};

/// Real or imaginary part of the character xi_k(B); a function on Y, so the
/// flow parameter is ignored.
struct CharacterObservable {
    Frequency freq;
    bool imaginary = false;
    friend bool operator==(const CharacterObservable&, const CharacterObservable&) = default;
};

struct Observable;

/// Pointwise product of its factors, all at the same flow parameter.
struct ProductObservable {
    std::vector<Observable> factors;
    friend bool operator==(const ProductObservable&, const ProductObservable&);
};

/// A real function on X (or on Y, for characters) evaluated along translates a(t) Lambda_B.
struct Observable {
    std::variant<ConstantObservable, SiegelObservable, CharacterObservable, ProductObservable> kind;

    Observable(ConstantObservable c) : kind(std::move(c)) {}
    Observable(SiegelObservable s) : kind(std::move(s)) {}
    Observable(CharacterObservable c) : kind(std::move(c)) {}
    Observable(ProductObservable p) : kind(std::move(p)) {}

    friend bool operator==(const Observable&, const Observable&) = default;
};

inline bool operator==(const ProductObservable& a, const ProductObservable& b) { return a.factors == b.factors; }

/// Throws DomainError when the observable does not live on X_{m,n}.
inline void validate(const Observable& obs, int m, int n) {
    std::visit(
        [&](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, ConstantObservable>) {
                if (!std::isfinite(o.value)) throw DomainError("constant observable must be finite");
            } else if constexpr (std::is_same_v<T, SiegelObservable>) {
                o.bump.validate();
                if (o.bump.dim != m + n)
                    throw DomainError("Siegel observable: bump dim " + std::to_string(o.bump.dim) +
                                      " != m+n = " + std::to_string(m + n));
                if (!std::isfinite(o.offset)) throw DomainError("Siegel observable: offset must be finite");
            } else if constexpr (std::is_same_v<T, CharacterObservable>) {
                if (static_cast<int>(o.freq.size()) != m * n)
                    throw DomainError("character observable: frequency needs m*n = " + std::to_string(m * n) +
                                      " entries");
            } else {
                if (o.factors.empty()) throw DomainError("product observable: no factors");
                for (const auto& f : o.factors) validate(f, m, n);
            }
        },
        obs.kind);
}

/// Value at a(t) Lambda_B.
inline double evaluate(const Observable& obs, const TorusPoint& b, const FlowParam& t) {
    return std::visit(
        [&](const auto& o) -> double {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, ConstantObservable>) {
                return o.value;
            } else if constexpr (std::is_same_v<T, SiegelObservable>) {
                if (o.bump.amplitude == 0.0) return o.offset;
                return o.offset + siegel_transform(o.bump, lll_reduce(translated_basis(b, t)));
            } else if constexpr (std::is_same_v<T, CharacterObservable>) {
                const Complex z = character_eval(o.freq, b);
                return o.imaginary ? z.imag() : z.real();
            } else {
                double p = 1.0;
                for (const auto& f : o.factors) p *= evaluate(f, b, t);
                return p;
            }
        },
        obs.kind);
}

}  // namespace latdecor
