#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latdecor/core/flow.hpp"
#include "latdecor/core/index_set.hpp"
#include "latdecor/error.hpp"

namespace latdecor {

/// lambda = max(2, 4 r ell / delta).
inline double lambda_constant(int r, int ell, double delta) {
    if (r < 1) throw DomainError("lambda_constant: r must be >= 1");
    if (ell < 1) throw DomainError("lambda_constant: ell must be >= 1");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("lambda_constant: delta must be positive");
    return std::max(2.0, 4.0 * r * ell / delta);
}

/// The constants of the case analysis for fixed (m, n, r). ell and delta are
/// inputs because the equidistribution theorem does not make them explicit;
/// the defaults ell = 1, delta = 1 are nominal, for structural testing only.
struct CasePlanConstants {
    int m = 1;
    int n = 1;
    int r = 2;
    int ell = 1;
    double delta = 1.0;
    double lambda = 2.0;
    std::vector<double> c;  // c[0] = c_1, ..., c[r-1] = c_r

    double c_at(int k) const { return c[static_cast<std::size_t>(k - 1)]; }

    /// The growth factor max(1, 4 (r - k) max(m, n) lambda^{r(m+n)} / delta)
    /// required between c_k and c_{k+1}.
    double growth(int k) const {
        const double p = std::pow(lambda, r * (m + n));
        return std::max(1.0, 4.0 * (r - k) * std::max(m, n) * p / delta);
    }

    /// What the classifier needs to terminate: c_1 > max(m, n), c nondecreasing,
    /// lambda >= 2. Overridden constants are held to this.
    void validate_structure() const {
        if (m < 1 || n < 1 || m + n > kMaxDim) throw DomainError("constants: bad dimensions");
        if (static_cast<int>(c.size()) != r || r < 1) throw InvariantError("constants: need exactly r values c_k");
        if (!(lambda >= 2.0) || !std::isfinite(lambda)) throw InvariantError("constants: lambda must be >= 2");
        for (double v : c)
            if (!std::isfinite(v)) throw InvariantError("constants: c_k must be finite");
        if (!(c[0] > std::max(m, n))) throw InvariantError("constants: c_1 must exceed max(m, n)");
        for (int k = 1; k < r; ++k)
            if (c[static_cast<std::size_t>(k)] < c[static_cast<std::size_t>(k - 1)])
                throw InvariantError("constants: c_k must be nondecreasing");
    }

    /// Structure plus the lambda formula and the strict growth inequalities.
    void validate() const {
        validate_structure();
        if (lambda != lambda_constant(r, ell, delta)) throw InvariantError("constants: lambda != max(2, 4 r ell / delta)");
        for (int k = 1; k < r; ++k)
            if (!(c_at(k + 1) > growth(k) * c_at(k)))
                throw InvariantError("constants: c_" + std::to_string(k + 1) + " violates the growth inequality");
    }

    friend bool operator==(const CasePlanConstants&, const CasePlanConstants&) = default;
};

/// c_1 = slack max(m, n) and c_{k+1} = slack growth(k) c_k.
inline CasePlanConstants recursion_constants(int m, int n, int r, int ell = 1, double delta = 1.0,
                                             double slack = 1.1) {
    if (m < 1 || n < 1 || m + n > kMaxDim) throw DomainError("recursion_constants: bad dimensions");
    if (!(slack > 1.0) || !std::isfinite(slack)) throw DomainError("recursion_constants: slack must exceed 1");
    CasePlanConstants k{m, n, r, ell, delta, lambda_constant(r, ell, delta), {}};
    if (!std::isfinite(std::pow(k.lambda, r * (m + n))))
        throw NumericalError("recursion_constants: lambda^{r(m+n)} overflows; use a smaller r or a larger delta");
    k.c.push_back(slack * std::max(m, n));
    for (int j = 1; j < r; ++j) {
        const double next = slack * k.growth(j) * k.c.back();
        if (!std::isfinite(next))
            throw NumericalError("recursion_constants: c_" + std::to_string(j + 1) +
                                 " overflows; use a smaller r or a larger delta");
        k.c.push_back(next);
    }
    return k;
}

struct SeparationReport {
    double delta = 0.0;
    double floor_min = 0.0;  // min_s floor of t_s over I_s
    double ceil_max = 0.0;   // max_s ceil of t_s over the complement of I_s
    bool eq1 = false;
    bool eq2 = false;
    bool degenerate = false;  // delta == 0
    bool ineq_checked = false;
    bool ineq_holds = true;
    std::vector<std::pair<int, int>> ineq_violations;
};

/// Hypothesis check of the separated-tuple lemma. When both hypotheses hold,
/// every pair is checked for |t'_a - t'_b| >= |t_a - t_b|, t' the part of t on I.
inline SeparationReport check_separated(std::span<const FlowParam> ts, std::span<const AdmissibleSet> sets,
                                        double alpha, double beta) {
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0))
        throw DomainError("check_separated: alpha and beta must lie in (0, 1)");
    if (ts.size() != sets.size() || ts.size() < 2) throw DomainError("check_separated: need r >= 2 matching pairs");
    for (std::size_t s = 0; s < ts.size(); ++s)
        if (sets[s].m() != ts[s].m() || sets[s].n() != ts[s].n())
            throw DomainError("check_separated: set and flow dimensions differ");
    SeparationReport rep;
    rep.delta = delta_spread(ts);
    rep.degenerate = rep.delta == 0.0;
    rep.floor_min = INFINITY;
    for (std::size_t s = 0; s < ts.size(); ++s) {
        rep.floor_min = std::min(rep.floor_min, floor_over(ts[s], sets[s].members()));
        rep.ceil_max = std::max(rep.ceil_max, ceil_over(ts[s], sets[s].members().complement()));
    }
    rep.eq1 = rep.floor_min >= alpha * rep.delta;
    rep.eq2 = rep.ceil_max <= beta * rep.delta;
    if (rep.eq1 && rep.eq2) {
        rep.ineq_checked = true;
        std::vector<std::vector<double>> restricted;
        for (std::size_t s = 0; s < ts.size(); ++s)
            restricted.push_back(restrict_param(ts[s], sets[s].members()).first.coords);
        for (std::size_t a = 0; a < ts.size(); ++a)
            for (std::size_t b = a + 1; b < ts.size(); ++b)
                if (sup_distance(restricted[a], restricted[b]) < sup_distance(ts[a].coords(), ts[b].coords())) {
                    rep.ineq_holds = false;
                    rep.ineq_violations.emplace_back(static_cast<int>(a), static_cast<int>(b));
                }
    }
    return rep;
}

enum class CaseTag { one_prime, one_double_prime, two };

inline std::string to_string(CaseTag t) {
    switch (t) {
        case CaseTag::one_prime: return "1'";
        case CaseTag::one_double_prime: return "1''";
        case CaseTag::two: return "2";
    }
    return "?";
}

/// One decision of the classifier. `factors` are the zero-based indices of the
/// factors still active at `level`; `sets` and `enlargements` are aligned with
/// them and empty for Case 2 steps.
struct CaseStep {
    int level = 0;
    CaseTag tag = CaseTag::two;
    std::vector<int> factors;
    std::vector<IndexSet> sets;
    std::vector<IndexSet> enlargements;
    int restart = 0;
    double multiplier = 0.0;  // lambda^restart c_level
    int absorbed = -1;        // Case 2 only

    friend bool operator==(const CaseStep&, const CaseStep&) = default;
};

enum class Terminal { case_one_prime, degenerate };

struct CaseTrace {
    double delta = 0.0;
    std::vector<CaseStep> steps;
    Terminal terminal = Terminal::case_one_prime;
    int terminal_level = 0;
    int max_restarts = 0;  // largest restart count reached at any level

    friend bool operator==(const CaseTrace&, const CaseTrace&) = default;
};

namespace detail {

/// The admissible set maximizing the floor of t. Among maximizers the largest
/// set is taken (the one containing every coordinate >= the optimum).
inline IndexSet best_floor_set(const FlowParam& t) {
    const int m = t.m(), d = t.dim();
    double first = -INFINITY, second = -INFINITY;
    for (int i = 0; i < d; ++i) (i < m ? first : second) = std::max(i < m ? first : second, t[i]);
    const double f = std::min(first, second);
    std::vector<int> idx;
    for (int i = 0; i < d; ++i)
        if (t[i] >= f) idx.push_back(i);
    return IndexSet::from_indices(d, idx);
}

}  // namespace detail

/// Runs the case analysis of the main proof on (t_1, ..., t_r) and returns the
/// decisions taken. Case 2 absorbs the active factor maximizing
/// Delta - c_k ceil(t_s) / max(m, n), ties to the smallest index.
inline CaseTrace classify_case(std::span<const FlowParam> ts, const CasePlanConstants& k) {
    k.validate_structure();
    if (static_cast<int>(ts.size()) != k.r) throw DomainError("classify_case: need exactly r flow parameters");
    if (k.r < 2) throw DomainError("classify_case: need r >= 2");
    for (const auto& t : ts)
        if (t.m() != k.m || t.n() != k.n) throw DomainError("classify_case: flow dimensions differ from constants");

    CaseTrace trace;
    trace.delta = delta_spread(ts);
    const double big = std::max(k.m, k.n);
    if (trace.delta == 0.0) {
        trace.terminal = Terminal::degenerate;
        trace.terminal_level = k.r;
        return trace;
    }
    const double d = trace.delta;

    std::vector<int> active(ts.size());
    for (std::size_t s = 0; s < active.size(); ++s) active[s] = static_cast<int>(s);

    for (int level = k.r; level >= 1; --level) {
        std::vector<IndexSet> sets;
        double floor_min = INFINITY;
        for (int s : active) {
            sets.push_back(detail::best_floor_set(ts[static_cast<std::size_t>(s)]));
            floor_min = std::min(floor_min, floor_over(ts[static_cast<std::size_t>(s)], sets.back()));
        }
        if (d <= k.c_at(level) * floor_min) {
            double mult = k.c_at(level);
            for (int restart = 0;; ++restart) {
                trace.max_restarts = std::max(trace.max_restarts, restart);
                CaseStep step{level, CaseTag::one_prime, active, sets, {}, restart, mult, -1};
                double ceil_max = 0.0;
                for (std::size_t a = 0; a < active.size(); ++a)
                    ceil_max = std::max(ceil_max, ceil_over(ts[static_cast<std::size_t>(active[a])], sets[a].complement()));
                if (d >= k.lambda * mult * ceil_max) {
                    trace.steps.push_back(std::move(step));
                    trace.terminal = Terminal::case_one_prime;
                    trace.terminal_level = level;
                    return trace;
                }
                step.tag = CaseTag::one_double_prime;
                bool grew = false;
                for (std::size_t a = 0; a < active.size(); ++a) {
                    const FlowParam& t = ts[static_cast<std::size_t>(active[a])];
                    std::vector<int> js;
                    for (int j : sets[a].complement().indices())
                        if (t[j] > d / (k.lambda * mult)) js.push_back(j);
                    step.enlargements.push_back(IndexSet::from_indices(t.dim(), js));
                    grew = grew || !js.empty();
                }
                if (!grew) throw InternalError("classify_case: Case 1'' with every J_s empty");
                mult *= k.lambda;
                for (std::size_t a = 0; a < active.size(); ++a) {
                    sets[a] = sets[a] | step.enlargements[a];
                    if (!(d <= mult * floor_over(ts[static_cast<std::size_t>(active[a])], sets[a])))
                        throw InternalError("classify_case: enlarged sets lost the Case 1 inequality");
                }
                trace.steps.push_back(std::move(step));
                if (!std::isfinite(mult)) throw NumericalError("classify_case: multiplier overflow");
            }
        }
        // Case 2 at this level.
        std::size_t pick = active.size();
        double best_margin = 0.0;
        for (std::size_t a = 0; a < active.size(); ++a) {
            const double margin = d - k.c_at(level) / big * ceil_over(ts[static_cast<std::size_t>(active[a])],
                                                                     IndexSet::full(k.m + k.n));
            if (margin > 0.0 && (pick == active.size() || margin > best_margin)) {
                pick = a;
                best_margin = margin;
            }
        }
        if (pick == active.size()) throw InternalError("classify_case: Case 2 without an absorbable factor");
        CaseStep step{level, CaseTag::two, active, {}, {}, 0, k.c_at(level), active[pick]};
        trace.steps.push_back(std::move(step));
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    throw InternalError("classify_case: every factor absorbed; the impossible final case was reached");
}

}  // namespace latdecor
