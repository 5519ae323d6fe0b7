#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "latdecor/core/flow.hpp"
#include "latdecor/core/index_set.hpp"
#include "latdecor/error.hpp"
#include "latdecor/montecarlo/estimate.hpp"
#include "latdecor/montecarlo/observables.hpp"
#include "latdecor/montecarlo/philox.hpp"
#include "latdecor/montecarlo/sampling.hpp"

namespace latdecor {

/// Largest stream tag; tags live in the top 16 bits of the stream index.
inline constexpr std::uint64_t kMaxTag = 0xFFFF;

/// Rows with |gap| above this many standard errors enter the decay fit.
inline constexpr double kSignificance = 3.0;

namespace detail {

inline void check_tag(std::uint64_t tag) {
    if (tag > kMaxTag) throw DomainError("stream tag " + std::to_string(tag) + " exceeds 16 bits");
}

inline void check_samples(std::uint64_t n) {
    if (n < 2) throw DomainError("N must be at least 2");
    if (n >= (std::uint64_t{1} << 48)) throw DomainError("N must be below 2^48");
}

}  // namespace detail

/// Mean over N uniform B of prod_s phi_s(a(t_s) Lambda_B). Every factor sees
/// the same B. Sample i reads the stream stream_index(tag, i).
inline Estimate estimate_joint_correlation(std::span<const Observable> obs, std::span<const FlowParam> ts,
                                           std::uint64_t n_samples, std::uint64_t seed, std::uint64_t tag = 0) {
    if (obs.empty() || obs.size() != ts.size())
        throw DomainError("joint correlation: need one flow parameter per observable (r >= 1)");
    detail::check_samples(n_samples);
    detail::check_tag(tag);
    const int m = ts[0].m(), n = ts[0].n();
    for (std::size_t s = 0; s < ts.size(); ++s) {
        if (ts[s].m() != m || ts[s].n() != n) throw DomainError("joint correlation: flow dimensions differ");
        validate(obs[s], m, n);
    }
    return estimate_mean(n_samples, seed, [&](std::uint64_t i) {
        const TorusPoint b = sample_torus(m, n, seed, stream_index(tag, i));
        double p = 1.0;
        for (std::size_t s = 0; s < obs.size(); ++s) p *= evaluate(obs[s], b, ts[s]);
        return p;
    });
}

/// Mean of phi(a(t) Lambda_B) over N uniform B; the r = 1 joint correlation.
inline Estimate estimate_nu_integral(const Observable& obs, const FlowParam& t, std::uint64_t n_samples,
                                     std::uint64_t seed, std::uint64_t tag = 0) {
    return estimate_joint_correlation(std::span<const Observable>(&obs, 1), std::span<const FlowParam>(&t, 1),
                                      n_samples, seed, tag);
}

struct GapResult {
    double gap = 0.0;
    double std_error = 0.0;
    Estimate joint;
    std::vector<Estimate> singles;
};

/// Joint correlation minus the product of the single integrals. The joint
/// estimate uses tag `tag_base`, factor s uses tag_base + 1 + s, so the r + 1
/// estimates are independent and the delta-method error adds in quadrature.
inline GapResult decorrelation_gap(std::span<const Observable> obs, std::span<const FlowParam> ts,
                                   std::uint64_t n_samples, std::uint64_t seed, std::uint64_t tag_base = 0) {
    if (obs.size() < 2) throw DomainError("decorrelation_gap: need r >= 2 factors");
    detail::check_tag(tag_base + obs.size());
    GapResult out;
    out.joint = estimate_joint_correlation(obs, ts, n_samples, seed, tag_base);
    double product = 1.0;
    for (std::size_t s = 0; s < obs.size(); ++s) {
        out.singles.push_back(estimate_nu_integral(obs[s], ts[s], n_samples, seed, tag_base + 1 + s));
        product *= out.singles.back().mean;
    }
    double var = out.joint.std_error * out.joint.std_error;
    for (std::size_t s = 0; s < obs.size(); ++s) {
        double others = 1.0;
        for (std::size_t q = 0; q < obs.size(); ++q)
            if (q != s) others *= out.singles[q].mean;
        var += others * others * out.singles[s].std_error * out.singles[s].std_error;
    }
    out.gap = out.joint.mean - product;
    out.std_error = std::sqrt(var);
    return out;
}

struct SweepRow {
    double delta = 0.0;
    double gap = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::vector<FlowParam> ts;
    double max_sample = 0.0;

    /// |gap| does not clear kSignificance standard errors.
    bool noise_limited() const { return !(std::abs(gap) > kSignificance * std_error); }

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct DecayFit {
    bool available = false;
    double eta = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();  // fitted log|gap| at delta = 0
    int rows_used = 0;

    /// NaN fields (no fit) compare equal.
    friend bool operator==(const DecayFit& a, const DecayFit& b) {
        auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
        return a.available == b.available && same(a.eta, b.eta) && same(a.std_error, b.std_error) &&
               same(a.intercept, b.intercept) && a.rows_used == b.rows_used;
    }
};

/// Ordinary least squares of log|gap| on delta over rows that are not
/// noise-limited; eta = -slope. The standard error propagates each row's
/// std_error / |gap| through the slope, so it is defined with two rows.
inline DecayFit fit_decay(std::span<const SweepRow> rows) {
    std::vector<double> x, y, sy;
    for (const auto& r : rows)
        if (!r.noise_limited()) {
            x.push_back(r.delta);
            y.push_back(std::log(std::abs(r.gap)));
            sy.push_back(r.std_error / std::abs(r.gap));
        }
    DecayFit fit;
    fit.rows_used = static_cast<int>(x.size());
    if (x.size() < 2) return fit;
    const double k = static_cast<double>(x.size());
    const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / k;
    const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
    }
    if (!(sxx > 0.0)) return fit;
    double var = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = (x[i] - xbar) / sxx;
        var += w * w * sy[i] * sy[i];
    }
    fit.available = true;
    fit.eta = -sxy / sxx;
    fit.intercept = ybar + fit.eta * xbar;
    fit.std_error = std::sqrt(var);
    return fit;
}

struct SweepResult {
    std::vector<SweepRow> rows;  // sorted by delta
    DecayFit fit;

    double fitted_eta() const { return fit.eta; }
    double fit_stderr() const { return fit.std_error; }

    friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

/// One decorrelation_gap row per grid value g, at t_s = base_s + g * direction_s.
/// Row j (in grid order) uses tags starting at j * (r + 1).
inline SweepResult decay_sweep(std::span<const Observable> obs, std::span<const FlowParam> base,
                               std::span<const std::vector<double>> directions, std::span<const double> grid,
                               std::uint64_t n_samples, std::uint64_t seed) {
    if (grid.empty()) throw DomainError("decay_sweep: empty grid");
    if (base.size() != obs.size() || directions.size() != obs.size())
        throw DomainError("decay_sweep: need one base parameter and one direction per observable");
    const std::uint64_t r = obs.size();
    detail::check_tag(grid.size() * (r + 1));
    SweepResult out;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (!std::isfinite(grid[j])) throw DomainError("decay_sweep: non-finite grid value");
        std::vector<FlowParam> ts;
        for (std::size_t s = 0; s < r; ++s) {
            const auto b = base[s].coords();
            if (directions[s].size() != b.size()) throw DomainError("decay_sweep: direction has wrong length");
            std::vector<double> c(b.begin(), b.end());
            for (std::size_t i = 0; i < c.size(); ++i) c[i] += grid[j] * directions[s][i];
            ts.emplace_back(base[s].m(), base[s].n(), std::move(c));
        }
        const GapResult g = decorrelation_gap(obs, ts, n_samples, seed, j * (r + 1));
        SweepRow row;
        row.delta = delta_spread(ts);
        row.gap = g.gap;
        row.std_error = g.std_error;
        row.n = n_samples;
        row.seed = seed;
        row.max_sample = g.joint.max_sample;
        row.ts = std::move(ts);
        out.rows.push_back(std::move(row));
    }
    std::stable_sort(out.rows.begin(), out.rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return a.delta < b.delta; });
    out.fit = fit_decay(out.rows);
    return out;
}

struct MuIEstimate {
    Estimate estimate;
    FlowParam t;
    double horizon = 0.0;
};

/// Estimate of the mu_I integral of phi as the nu-integral at muI_flow(I, T).
inline MuIEstimate estimate_muI_integral(const Observable& obs, const AdmissibleSet& set, double horizon,
                                         std::uint64_t n_samples, std::uint64_t seed, std::uint64_t tag = 0) {
    FlowParam t = muI_flow(set, horizon);
    Estimate e = estimate_nu_integral(obs, t, n_samples, seed, tag);
    return {e, std::move(t), horizon};
}

}  // namespace latdecor
