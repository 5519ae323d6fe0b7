#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "latdecor/core/blocks.hpp"
#include "latdecor/core/flow.hpp"
#include "latdecor/core/lattice.hpp"
#include "latdecor/core/reduction.hpp"
#include "support/oracles.hpp"

using namespace latdecor;

namespace {

FlowParam fp(int m, int n, std::vector<double> c) { return {m, n, std::move(c)}; }

Matrix mat2(double a, double b, double c, double d) {
    Matrix x(2, 2);
    x << a, b, c, d;
    return x;
}

// Random unimodular lattice: a Lambda_B pushed by a random flow, then re-based
// by a random small unimodular integer matrix.
UnimodularLattice random_lattice(std::mt19937_64& rng, int m, int n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> b(static_cast<std::size_t>(m * n));
    for (double& x : b) x = u(rng);
    std::vector<double> t(static_cast<std::size_t>(m + n));
    double first = 0.0;
    for (int i = 0; i < m; ++i) first += t[static_cast<std::size_t>(i)] = 2.0 * u(rng);
    double rest = first;
    for (int i = m; i < m + n - 1; ++i) rest -= t[static_cast<std::size_t>(i)] = first / n * u(rng);
    t.back() = rest;
    return apply_flow(fp(m, n, t), lattice_from_matrix(TorusPoint(m, n, b)));
}

}  // namespace

TEST(FlowParam, RejectsNegativeAndUnbalanced) {
    EXPECT_THROW(fp(1, 1, {-1.0, -1.0}), InvariantError);
    EXPECT_THROW(fp(1, 1, {1.0, 2.0}), InvariantError);
    EXPECT_THROW(fp(2, 1, {1.0, 1.0}), DomainError);
}

TEST(FlowParam, RebalancesTinyResidual) {
    const FlowParam t = fp(1, 1, {1.0, 1.0 + 5e-13});
    EXPECT_EQ(t[0], t[1]);
}

TEST(FlowMatrix, Examples) {
    EXPECT_TRUE(flow_matrix(FlowParam::zero(1, 1)).isApprox(Matrix::Identity(2, 2)));
    const Matrix a = flow_matrix(fp(1, 1, {1, 1}));
    EXPECT_DOUBLE_EQ(a(0, 0), std::exp(1.0));
    EXPECT_DOUBLE_EQ(a(1, 1), std::exp(-1.0));
    const Matrix b = flow_matrix(fp(2, 1, {1, 2, 3}));
    EXPECT_DOUBLE_EQ(b(0, 0), std::exp(1.0));
    EXPECT_DOUBLE_EQ(b(1, 1), std::exp(2.0));
    EXPECT_DOUBLE_EQ(b(2, 2), std::exp(-3.0));
    EXPECT_EQ(b(0, 1), 0.0);
}

TEST(FlowMatrix, DeterminantAndGroupLaw) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int it = 0; it < 200; ++it) {
        const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        const FlowParam s = fp(2, 1, {a, b, a + b}), t = fp(2, 1, {c, d, c + d});
        EXPECT_NEAR(flow_matrix(t).determinant(), 1.0, 1e-9);
        const double bound = 1e-9 * std::exp(std::max({a, b, a + b}) + std::max({c, d, c + d}));
        EXPECT_LE((flow_matrix(s) * flow_matrix(t) - flow_matrix(s + t)).cwiseAbs().maxCoeff(), bound);
    }
}

TEST(LatticeFromMatrix, Examples) {
    EXPECT_EQ(lattice_from_matrix(TorusPoint::zero(2, 2)).basis(), Matrix::Identity(4, 4));
    EXPECT_EQ(lattice_from_matrix(TorusPoint(1, 1, {0.5})).basis(), mat2(1, 0.5, 0, 1));
    const Matrix b = lattice_from_matrix(TorusPoint(2, 1, {0.25, 0.75})).basis();
    Matrix want = Matrix::Identity(3, 3);
    want(0, 2) = 0.25;
    want(1, 2) = 0.75;
    EXPECT_EQ(b, want);
    EXPECT_EQ(b.determinant(), 1.0);
}

TEST(TorusPoint, WrapsEntries) {
    const TorusPoint b(1, 2, {1.25, -0.25});
    EXPECT_DOUBLE_EQ(b(0, 0), 0.25);
    EXPECT_DOUBLE_EQ(b(0, 1), 0.75);
    EXPECT_EQ(TorusPoint(1, 1, {-1e-300})(0, 0), 0.0);
}

TEST(UnimodularLattice, RejectsBadDeterminant) {
    EXPECT_THROW(UnimodularLattice(mat2(2, 0, 0, 2)), InvariantError);
    EXPECT_NO_THROW(UnimodularLattice(mat2(0, 1, 1, 0)));
}

TEST(ApplyFlow, Examples) {
    const auto z2 = UnimodularLattice::standard(2);
    EXPECT_EQ(apply_flow(FlowParam::zero(1, 1), z2).basis(), z2.basis());
    EXPECT_TRUE(apply_flow(fp(1, 1, {1, 1}), z2).basis().isApprox(mat2(std::exp(1.0), 0, 0, std::exp(-1.0))));
    EXPECT_THROW(apply_flow(FlowParam::zero(2, 1), z2), DomainError);
    const auto l = lattice_from_matrix(TorusPoint(2, 1, {0.3, 0.6}));
    const FlowParam s = fp(2, 1, {1, 0.5, 1.5}), t = fp(2, 1, {0.2, 0.7, 0.9});
    EXPECT_LE((apply_flow(s, apply_flow(t, l)).basis() - apply_flow(s + t, l).basis()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ApplyFlow, DoesNotShareReductionCache) {
    const auto l = UnimodularLattice::standard(2);
    (void)l.reduction();
    EXPECT_TRUE(l.has_cached_reduction());
    EXPECT_FALSE(apply_flow(fp(1, 1, {1, 1}), l).has_cached_reduction());
}

TEST(DeltaSpread, Examples) {
    EXPECT_EQ(delta_spread(std::vector{fp(1, 1, {1, 1}), fp(1, 1, {3, 3})}), 2.0);
    EXPECT_EQ(delta_spread(std::vector{fp(1, 1, {1, 1}), fp(1, 1, {3, 3}), fp(1, 1, {1, 1})}), 0.0);
    EXPECT_EQ(delta_spread(std::vector{fp(2, 1, {1, 2, 3}), fp(2, 1, {4, 2, 6}), fp(2, 1, {0, 0, 0})}), 3.0);
    EXPECT_THROW(delta_spread(std::vector{fp(1, 1, {1, 1})}), DomainError);
}

TEST(DeltaSpread, PermutationInvariantAndZeroIffRepeat) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int it = 0; it < 200; ++it) {
        std::vector<FlowParam> ts;
        for (int s = 0; s < 4; ++s) {
            const double a = u(rng);
            ts.push_back(fp(1, 1, {a, a}));
        }
        const double d = delta_spread(ts);
        std::shuffle(ts.begin(), ts.end(), rng);
        EXPECT_EQ(delta_spread(ts), d);
        EXPECT_GT(d, 0.0);
        ts.push_back(ts[1]);
        EXPECT_EQ(delta_spread(ts), 0.0);
    }
}

TEST(RestrictedExtrema, Examples) {
    const auto t = fp(2, 1, {2, 1, 3});
    EXPECT_EQ(floor_over(t, IndexSet::from_one_based(3, {1, 3})), 2.0);
    EXPECT_EQ(ceil_over(t, IndexSet::empty(3)), 0.0);
    EXPECT_EQ(floor_over(t, IndexSet::empty(3)), 0.0);
    EXPECT_EQ(ceil_over(t, IndexSet::full(3)), 3.0);
}

TEST(RestrictParam, Examples) {
    const auto [a, b] = restrict_param(fp(2, 1, {2, 1, 3}), IndexSet::from_one_based(3, {1, 3}));
    EXPECT_EQ(a.coords, (std::vector<double>{2, 0, 3}));
    EXPECT_FALSE(a.balanced);
    EXPECT_EQ(b.coords, (std::vector<double>{0, 1, 0}));
    EXPECT_FALSE(b.balanced);
    const auto [c, d] = restrict_param(fp(2, 1, {3, 0, 3}), IndexSet::from_one_based(3, {1, 3}));
    EXPECT_EQ(c.coords, (std::vector<double>{3, 0, 3}));
    EXPECT_TRUE(c.balanced);
    EXPECT_EQ(d.coords, (std::vector<double>{0, 0, 0}));
}

TEST(RestrictParam, SplitIsExactAndDisjoint) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int it = 0; it < 500; ++it) {
        const double a = u(rng), b = u(rng), c = u(rng);
        if (a + b < c) continue;
        const FlowParam t = fp(2, 2, {a, b, c, a + b - c});
        const IndexSet set(4, static_cast<std::uint32_t>(rng() % 16));
        const auto [p, q] = restrict_param(t, set);
        EXPECT_TRUE((p.support & q.support).is_empty());
        for (int i = 0; i < 4; ++i) {
            EXPECT_EQ(p.coords[static_cast<std::size_t>(i)] + q.coords[static_cast<std::size_t>(i)], t[i]);
            if (!set.contains(i)) EXPECT_EQ(p.coords[static_cast<std::size_t>(i)], 0.0);
        }
    }
}

TEST(AdmissibleSet, Invariants) {
    EXPECT_THROW(AdmissibleSet::from_one_based(2, 1, {1, 2}), InvariantError);
    EXPECT_THROW(AdmissibleSet::from_one_based(2, 1, {3}), InvariantError);
    EXPECT_EQ(AdmissibleSet::enumerate(1, 1).size(), 1u);
    EXPECT_EQ(AdmissibleSet::enumerate(2, 1).size(), 3u);
    EXPECT_EQ(AdmissibleSet::enumerate(2, 2).size(), 9u);
    EXPECT_EQ(AdmissibleSet::enumerate(3, 1).size(), 7u);
}

TEST(ReduceBasis, StandardLatticeIsFixed) {
    const auto red = lll_reduce(Matrix::Identity(3, 3));
    EXPECT_EQ(red.reduced.cwiseAbs(), Matrix::Identity(3, 3));
}

TEST(ReduceBasis, ShearIsUndone) {
    const auto red = lll_reduce(mat2(1, 100, 0, 1));
    EXPECT_LE(red.reduced.cwiseAbs().maxCoeff(), 2.0);
    // The certificate maps the input basis onto the reduced one.
    EXPECT_TRUE((mat2(1, 100, 0, 1) * red.transform.cast<double>()).isApprox(red.reduced));
    EXPECT_EQ(std::abs(std::llround(red.transform.cast<double>().determinant())), 1);
}

TEST(ReduceBasis, SameLatticeAfterFlow) {
    std::mt19937_64 rng(4);
    const auto l = apply_flow(fp(2, 1, {1.5, 0.5, 2.0}), lattice_from_matrix(TorusPoint(2, 1, {0.31, 0.77})));
    const auto& red = l.reduction();
    const UnimodularLattice reduced(red.reduced);
    std::uniform_int_distribution<int> c(-20, 20);
    for (int it = 0; it < 100; ++it) {
        const Vector v = l.basis() * Vector::NullaryExpr(3, [&](Eigen::Index) { return double(c(rng)); });
        EXPECT_TRUE(reduced.contains(v, 1e-6));
        const Vector w = red.reduced * Vector::NullaryExpr(3, [&](Eigen::Index) { return double(c(rng)); });
        EXPECT_TRUE(l.contains(w, 1e-6));
    }
}

TEST(ReduceBasis, NonFiniteIsNumericalError) {
    EXPECT_THROW(lll_reduce(mat2(NAN, 0, 0, 1)), NumericalError);
}

TEST(ShortestVector, Examples) {
    EXPECT_DOUBLE_EQ(shortest_vector_length(UnimodularLattice::standard(3)), 1.0);
    const auto l = apply_flow(fp(1, 1, {1, 1}), UnimodularLattice::standard(2));
    EXPECT_NEAR(shortest_vector_length(l), oracle::shortest_sup(l.basis(), 3), 1e-15);
    EXPECT_NEAR(shortest_vector_length(l), std::exp(-1.0), 1e-15);
}

TEST(ShortestVector, MonotoneAlongFlow) {
    double prev = INFINITY;
    for (double tau = 0.0; tau <= 6.0; tau += 0.25) {
        const double s = shortest_vector_length(apply_flow(fp(1, 1, {tau, tau}), UnimodularLattice::standard(2)));
        EXPECT_LE(s, prev);
        prev = s;
    }
}

TEST(ShortestVector, AgreesWithEnumeration) {
    std::mt19937_64 rng(5);
    for (int it = 0; it < 40; ++it) {
        for (auto [m, n] : {std::pair{1, 1}, std::pair{2, 1}}) {
            const auto l = random_lattice(rng, m, n);
            // Enumerate in reduced coordinates, where a small box suffices.
            const double want = oracle::shortest_sup(l.reduction().reduced, m + n == 2 ? 6 : 4);
            const double got = shortest_vector_length(l);
            EXPECT_GT(got, 0.0);
            EXPECT_NEAR(got, want, 1e-12 * std::max(1.0, want));
        }
    }
}

TEST(DualLattice, Examples) {
    EXPECT_EQ(dual_lattice(UnimodularLattice::standard(3)).basis(), Matrix::Identity(3, 3));
    EXPECT_TRUE(dual_lattice(UnimodularLattice(mat2(2, 0, 0, 0.5))).basis().isApprox(mat2(0.5, 0, 0, 2)));
    std::mt19937_64 rng(6);
    for (int it = 0; it < 50; ++it) {
        const auto l = random_lattice(rng, 2, 1);
        EXPECT_LE((dual_lattice(dual_lattice(l)).basis() - l.basis()).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(GroupBlocks, FullSetIsWholeGroup) {
    const auto p = group_blocks(AdmissibleSet::full(2, 2));
    EXPECT_EQ(p.perm, (std::vector<int>{0, 1, 2, 3}));
    EXPECT_EQ(p.k1, 2);
    EXPECT_EQ(p.k2, 2);
    for (const auto& row : p.group)
        for (Cell c : row) EXPECT_EQ(c, Cell::sl);
}

TEST(GroupBlocks, TwoThreeInDimensionThree) {
    const auto p = group_blocks(AdmissibleSet::from_one_based(2, 1, {2, 3}));
    EXPECT_EQ(p.perm, (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(p.k1, 1);
    EXPECT_EQ(p.k2, 1);
    EXPECT_EQ(to_string(p.group), "1**\n0SS\n0SS\n");
}

TEST(GroupBlocks, OneThreeInDimensionThree) {
    const auto p = group_blocks(AdmissibleSet::from_one_based(2, 1, {1, 3}));
    // sigma sends the missing index 2 to the front and 1 next to the second block.
    EXPECT_EQ(p.perm, (std::vector<int>{1, 0, 2}));
    for (int i : {0, 2})
        for (int j : {0, 2}) EXPECT_EQ(p.group[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], Cell::sl);
    EXPECT_EQ(p.group[1][1], Cell::one);
    EXPECT_EQ(p.group[0][1], Cell::zero);
    EXPECT_EQ(p.group[2][1], Cell::zero);
}

TEST(GroupBlocks, PermutationMapsBlocks) {
    for (auto [m, n] : {std::pair{2, 1}, std::pair{1, 2}, std::pair{2, 2}, std::pair{3, 1}, std::pair{1, 3}}) {
        for (const auto& set : AdmissibleSet::enumerate(m, n)) {
            const auto p = group_blocks(set);
            const int k1 = set.first_block().size(), k2 = set.second_block().size();
            for (int i : set.first_block().indices()) {
                EXPECT_GE(p.perm[static_cast<std::size_t>(i)], m - k1);
                EXPECT_LT(p.perm[static_cast<std::size_t>(i)], m);
            }
            for (int i : set.second_block().indices()) {
                EXPECT_GE(p.perm[static_cast<std::size_t>(i)], m);
                EXPECT_LT(p.perm[static_cast<std::size_t>(i)], m + k2);
            }
        }
    }
}
