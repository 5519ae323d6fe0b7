#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "latdecor/core/index_set.hpp"
#include "latdecor/error.hpp"
#include "latdecor/weights/simplex.hpp"

namespace latdecor {

/// The root alpha_ij(t) = t_i + t_j of the elementary matrix E_ij (zero-based).
struct Weight {
    int i = 0;
    int j = 0;

    std::string to_string() const { return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")"; }
    friend bool operator==(const Weight&, const Weight&) = default;
    friend auto operator<=>(const Weight&, const Weight&) = default;
};

/// Which alternative of the separation statement a weight realizes:
/// case1 evaluates a weight mixing for I1 at s - t, case2 one mixing for I2 at t - s.
enum class Side { case1, case2 };

inline const char* to_string(Side s) { return s == Side::case1 ? "case1" : "case2"; }

/// Reading of A+_I used for the polytope: `balanced` keeps the block-sum
/// condition, `unbalanced` only zeroes coordinates outside I.
enum class ThetaMode { balanced, unbalanced };

inline const char* to_string(ThetaMode m) { return m == ThetaMode::balanced ? "balanced" : "unbalanced"; }

template <class T>
T weight_value(int i, int j, std::span<const T> t) {
    if (i < 0 || j < 0 || i >= static_cast<int>(t.size()) || j >= static_cast<int>(t.size()) || i == j)
        throw DomainError("weight_value: index out of range");
    return t[static_cast<std::size_t>(i)] + t[static_cast<std::size_t>(j)];
}

/// Weights alpha_ij with i in I' and j in I'', lexicographic.
inline std::vector<Weight> mixing_weights(const AdmissibleSet& set) {
    std::vector<Weight> out;
    for (int i : set.first_block().indices())
        for (int j : set.second_block().indices()) out.push_back({i, j});
    return out;
}

struct Candidate {
    Weight weight;
    Side side;
};

/// Candidates in tie-breaking order: case1 before case2, then lexicographic.
inline std::vector<Candidate> separation_candidates(const AdmissibleSet& i1, const AdmissibleSet& i2) {
    std::vector<Candidate> out;
    for (const Weight& w : mixing_weights(i1)) out.push_back({w, Side::case1});
    for (const Weight& w : mixing_weights(i2)) out.push_back({w, Side::case2});
    return out;
}

template <class T>
T candidate_value(const Candidate& c, std::span<const T> s, std::span<const T> t) {
    const auto i = static_cast<std::size_t>(c.weight.i), j = static_cast<std::size_t>(c.weight.j);
    T diff_i = s[i] - t[i], diff_j = s[j] - t[j];
    T v = diff_i + diff_j;
    return c.side == Side::case1 ? T(v) : T(-v);
}

template <class T>
struct Separation {
    Weight weight;
    Side side = Side::case1;
    T value{};
    /// value / min(floor_I1(s), floor_I2(t)); meaningless when `degenerate`.
    T margin{};
    /// min(floor_I1(s), floor_I2(t)) == 0: the statement holds trivially.
    bool degenerate = false;
};

namespace detail {

template <class T>
T floor_on(std::span<const T> v, const IndexSet& set) {
    bool first = true;
    T best{};
    for (int i : set.indices()) {
        const T& x = v[static_cast<std::size_t>(i)];
        if (first || x < best) best = x;
        first = false;
    }
    return best;
}

}  // namespace detail

/// The candidate weight with the largest separation value and its margin.
template <class T>
Separation<T> separation_witness(std::span<const T> s, std::span<const T> t, const AdmissibleSet& i1,
                                 const AdmissibleSet& i2) {
    const auto d = static_cast<std::size_t>(i1.m() + i1.n());
    detail::require(s.size() == d && t.size() == d, "separation_witness: dimension mismatch");
    Separation<T> out;
    bool first = true;
    for (const Candidate& c : separation_candidates(i1, i2)) {
        T v = candidate_value(c, s, t);
        if (first || v > out.value) {
            out.weight = c.weight;
            out.side = c.side;
            out.value = v;
            first = false;
        }
    }
    const T lhs = detail::floor_on(s, i1.members()), rhs = detail::floor_on(t, i2.members());
    const T pi = lhs < rhs ? lhs : rhs;
    if (pi == T(0)) {
        out.degenerate = true;
        if constexpr (std::numeric_limits<T>::has_infinity) out.margin = std::numeric_limits<T>::infinity();
    } else {
        out.margin = out.value / pi;
    }
    return out;
}

/// Exact optimum of the min-max program for a pair (I1, I2) with its proof.
struct WeightCertificate {
    int m = 0;
    int n = 0;
    IndexSet i1;
    IndexSet i2;
    ThetaMode mode = ThetaMode::balanced;
    Rational theta_star;
    std::vector<Rational> witness_s;
    std::vector<Rational> witness_t;
    Weight achieving_weight;
    Side achieving_side = Side::case1;
    /// LP primal point and dual multipliers (one per LP row).
    std::vector<Rational> lp_primal;
    std::vector<Rational> lp_dual;

    friend bool operator==(const WeightCertificate&, const WeightCertificate&) = default;
};

/// LP encoding of the separation program for a pair of admissible sets.
///
/// Variables, in order: x_k = s_k - 1 for k in I1, y_k = t_k - 1 for k in I2,
/// z+ and z- (z = z+ - z-), then one slack per candidate. Rows: the balance
/// conditions of s and t (balanced mode only) followed by z - form >= 0 for
/// every candidate. Objective: minimize z.
struct SeparationProgram {
    LinearProgram lp;
    std::vector<int> s_vars;  // s_vars[k] = column of x_k, or -1
    std::vector<int> t_vars;
    int z_plus = 0;
    int z_minus = 0;
    std::vector<Candidate> candidates;
};

inline SeparationProgram build_separation_program(const AdmissibleSet& i1, const AdmissibleSet& i2,
                                                  ThetaMode mode) {
    const int m = i1.m(), n = i1.n(), d = m + n;
    SeparationProgram p;
    p.candidates = separation_candidates(i1, i2);
    p.s_vars.assign(static_cast<std::size_t>(d), -1);
    p.t_vars.assign(static_cast<std::size_t>(d), -1);
    int col = 0;
    for (int k : i1.members().indices()) p.s_vars[static_cast<std::size_t>(k)] = col++;
    for (int k : i2.members().indices()) p.t_vars[static_cast<std::size_t>(k)] = col++;
    p.z_plus = col++;
    p.z_minus = col++;
    const int first_slack = col;
    const int cols = col + static_cast<int>(p.candidates.size());

    auto new_row = [&] { return std::vector<Rational>(static_cast<std::size_t>(cols), 0); };
    auto balance_row = [&](const AdmissibleSet& set, const std::vector<int>& vars) {
        auto row = new_row();
        Rational rhs = 0;
        for (int k : set.first_block().indices()) {
            row[static_cast<std::size_t>(vars[static_cast<std::size_t>(k)])] = 1;
            rhs -= 1;
        }
        for (int k : set.second_block().indices()) {
            row[static_cast<std::size_t>(vars[static_cast<std::size_t>(k)])] = -1;
            rhs += 1;
        }
        p.lp.a.push_back(std::move(row));
        p.lp.b.push_back(rhs);
    };
    if (mode == ThetaMode::balanced) {
        balance_row(i1, p.s_vars);
        balance_row(i2, p.t_vars);
    }

    for (std::size_t c = 0; c < p.candidates.size(); ++c) {
        const Candidate& cand = p.candidates[c];
        const int sign = cand.side == Side::case1 ? 1 : -1;  // form = sign * ((s-t)_i + (s-t)_j)
        auto row = new_row();
        Rational rhs = 0;
        row[static_cast<std::size_t>(p.z_plus)] = 1;
        row[static_cast<std::size_t>(p.z_minus)] = -1;
        for (int k : {cand.weight.i, cand.weight.j}) {
            const auto ks = static_cast<std::size_t>(k);
            if (p.s_vars[ks] >= 0) {  // + sign * s_k = sign * (1 + x_k)
                row[static_cast<std::size_t>(p.s_vars[ks])] -= sign;
                rhs += sign;
            }
            if (p.t_vars[ks] >= 0) {  // - sign * t_k = -sign * (1 + y_k)
                row[static_cast<std::size_t>(p.t_vars[ks])] += sign;
                rhs -= sign;
            }
        }
        row[static_cast<std::size_t>(first_slack) + c] = -1;
        p.lp.a.push_back(std::move(row));
        p.lp.b.push_back(rhs);
    }
    p.lp.c.assign(static_cast<std::size_t>(cols), 0);
    p.lp.c[static_cast<std::size_t>(p.z_plus)] = 1;
    p.lp.c[static_cast<std::size_t>(p.z_minus)] = -1;
    return p;
}

/// Checks every claim of a certificate with fresh rational arithmetic.
/// Returns an empty string when the certificate is valid.
inline std::string verify_certificate(const WeightCertificate& cert) {
    const int d = cert.m + cert.n;
    const AdmissibleSet i1(cert.m, cert.n, cert.i1), i2(cert.m, cert.n, cert.i2);
    if (static_cast<int>(cert.witness_s.size()) != d || static_cast<int>(cert.witness_t.size()) != d)
        return "witness dimension mismatch";

    // Normalized polytope membership.
    auto check_point = [&](const std::vector<Rational>& v, const AdmissibleSet& set) -> std::string {
        Rational first = 0, second = 0;
        for (int k = 0; k < d; ++k) {
            const Rational& x = v[static_cast<std::size_t>(k)];
            if (set.members().contains(k)) {
                if (x < 1) return "witness coordinate below 1 on its support";
            } else if (x != 0) {
                return "witness supported outside its index set";
            }
            (k < cert.m ? first : second) += x;
        }
        if (cert.mode == ThetaMode::balanced && first != second) return "witness unbalanced";
        return {};
    };
    if (auto e = check_point(cert.witness_s, i1); !e.empty()) return "s: " + e;
    if (auto e = check_point(cert.witness_t, i2); !e.empty()) return "t: " + e;

    // Candidate values at the witness: all <= theta*, the recorded one equal.
    const std::span<const Rational> s(cert.witness_s), t(cert.witness_t);
    Rational best;
    bool first = true;
    for (const Candidate& c : separation_candidates(i1, i2)) {
        const Rational v = candidate_value(c, s, t);
        if (v > cert.theta_star) return "candidate " + c.weight.to_string() + " exceeds theta*";
        if (first || v > best) best = v;
        first = false;
        if (c.weight == cert.achieving_weight && c.side == cert.achieving_side && v != cert.theta_star)
            return "achieving weight does not attain theta*";
    }
    if (best != cert.theta_star) return "max candidate value differs from theta*";

    // Optimality: LP primal/dual pair with zero duality gap.
    const auto prog = build_separation_program(i1, i2, cert.mode);
    if (auto e = check_lp_certificate(prog.lp, cert.lp_primal, cert.lp_dual); !e.empty()) return "lp: " + e;
    for (int k = 0; k < d; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        if (prog.s_vars[ks] >= 0 && cert.lp_primal[static_cast<std::size_t>(prog.s_vars[ks])] + 1 != s[ks])
            return "lp primal does not match witness s";
        if (prog.t_vars[ks] >= 0 && cert.lp_primal[static_cast<std::size_t>(prog.t_vars[ks])] + 1 != t[ks])
            return "lp primal does not match witness t";
    }
    if (cert.lp_primal[static_cast<std::size_t>(prog.z_plus)] -
            cert.lp_primal[static_cast<std::size_t>(prog.z_minus)] !=
        cert.theta_star)
        return "lp objective does not match theta*";
    return {};
}

/// theta*(I1, I2): the infimum over the normalized polytope of the largest
/// separation value, solved exactly. The separation statement holds for the
/// pair iff theta_star > 0.
inline WeightCertificate optimal_theta(int m, int n, const AdmissibleSet& i1, const AdmissibleSet& i2,
                                       ThetaMode mode = ThetaMode::balanced) {
    if (m == 1 && n == 1) throw DomainError("optimal_theta: no distinct admissible pair exists for m = n = 1");
    detail::require(i1.m() == m && i1.n() == n && i2.m() == m && i2.n() == n,
                    "optimal_theta: index sets do not match (m, n)");
    if (i1 == i2) throw DomainError("optimal_theta: I1 and I2 must differ");

    const auto prog = build_separation_program(i1, i2, mode);
    const LpSolution sol = solve_lp(prog.lp);
    if (sol.status == LpStatus::unbounded)
        throw NumericalError("optimal_theta: program unbounded below for " + i1.to_string() + ", " +
                             i2.to_string() + " (" + to_string(mode) + ")");
    if (sol.status != LpStatus::optimal)
        throw InternalError("optimal_theta: normalized polytope reported empty");

    WeightCertificate cert;
    cert.m = m;
    cert.n = n;
    cert.i1 = i1.members();
    cert.i2 = i2.members();
    cert.mode = mode;
    cert.theta_star = sol.objective;
    const auto d = static_cast<std::size_t>(m + n);
    cert.witness_s.assign(d, 0);
    cert.witness_t.assign(d, 0);
    for (std::size_t k = 0; k < d; ++k) {
        if (prog.s_vars[k] >= 0) cert.witness_s[k] = sol.x[static_cast<std::size_t>(prog.s_vars[k])] + 1;
        if (prog.t_vars[k] >= 0) cert.witness_t[k] = sol.x[static_cast<std::size_t>(prog.t_vars[k])] + 1;
    }
    const auto sep = separation_witness<Rational>(cert.witness_s, cert.witness_t, i1, i2);
    cert.achieving_weight = sep.weight;
    cert.achieving_side = sep.side;
    cert.lp_primal = sol.x;
    cert.lp_dual = sol.y;
    if (auto e = verify_certificate(cert); !e.empty())
        throw InternalError("optimal_theta: certificate check failed: " + e);
    return cert;
}

/// Every ordered pair of distinct admissible sets, in enumeration order.
inline std::vector<WeightCertificate> theta_table(int m, int n, ThetaMode mode = ThetaMode::balanced) {
    const auto sets = AdmissibleSet::enumerate(m, n);
    std::vector<WeightCertificate> out;
    for (const auto& a : sets)
        for (const auto& b : sets)
            if (!(a == b)) out.push_back(optimal_theta(m, n, a, b, mode));
    return out;
}

}  // namespace latdecor
