#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "latdecor/core/flow.hpp"
#include "latdecor/core/index_set.hpp"
#include "latdecor/core/lattice.hpp"
#include "latdecor/error.hpp"
#include "latdecor/montecarlo/philox.hpp"

namespace latdecor {

/// Default horizon T for approximate Haar sampling.
inline constexpr double kDefaultHorizon = 8.0;

/// Next m*n draws of `stream` as a torus point.
inline TorusPoint draw_torus(CounterStream& stream, int m, int n) {
    std::vector<double> e(static_cast<std::size_t>(m * n));
    for (double& x : e) x = stream.next_double();
    return {m, n, std::move(e)};
}

/// Uniform B on the torus: the first m*n draws of the stream keyed by (seed, index).
inline TorusPoint sample_torus(int m, int n, std::uint64_t seed, std::uint64_t index) {
    CounterStream stream(seed, index);
    return draw_torus(stream, m, n);
}

/// Flow parameter supported on I: value T * k2 / g on the first-block part
/// of I and T * k1 / g on the second-block part, g = min(k1, k2). The result
/// is balanced and its floor over I is exactly T.
inline FlowParam muI_flow(const AdmissibleSet& set, double horizon) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("muI_flow: T must be positive");
    const int m = set.m(), n = set.n();
    const int k1 = set.first_block().size(), k2 = set.second_block().size();
    const double g = std::min(k1, k2);
    std::vector<double> t(static_cast<std::size_t>(m + n), 0.0);
    for (int i : set.first_block().indices()) t[static_cast<std::size_t>(i)] = horizon * k2 / g;
    for (int j : set.second_block().indices()) t[static_cast<std::size_t>(j)] = horizon * k1 / g;
    return {m, n, std::move(t)};
}

/// Basis of a(t) Lambda_B: the rows of [[I, B], [0, I]] scaled by the flow.
inline Matrix translated_basis(const TorusPoint& b, const FlowParam& t) {
    const int m = b.m(), n = b.n(), d = m + n;
    if (t.m() != m || t.n() != n) throw DomainError("translated_basis: flow/torus shape mismatch");
    detail::require(d <= kMaxLatticeDim, "translated_basis: dimension exceeds lattice limit");
    Matrix basis = Matrix::Identity(d, d);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) basis(i, m + j) = b(i, j);
    for (int i = 0; i < d; ++i) basis.row(i) *= i < m ? std::exp(t[i]) : std::exp(-t[i]);
    return basis;
}

/// a(t_T) Lambda_B with B = sample_torus(seed, index) and t_T = muI_flow(full set, T).
/// Approximately Haar distributed; the bias decays like e^{-delta T} for an
/// unknown delta, so callers compare T against T + 2.
inline UnimodularLattice approx_haar_sample(int m, int n, double horizon, std::uint64_t seed,
                                            std::uint64_t index) {
    const FlowParam t = muI_flow(AdmissibleSet::full(m, n), horizon);
    return UnimodularLattice(translated_basis(sample_torus(m, n, seed, index), t));
}

}  // namespace latdecor
