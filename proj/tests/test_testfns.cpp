#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "latdecor/core/flow.hpp"
#include "latdecor/core/lattice.hpp"
#include "latdecor/testfns/bump.hpp"
#include "latdecor/testfns/siegel.hpp"
#include "latdecor/testfns/trigpoly.hpp"
#include "support/oracles.hpp"

using namespace latdecor;

namespace {

Vector vec(std::initializer_list<double> v) {
    Vector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double a : v) x(i++) = a;
    return x;
}

TrigPoly random_poly(std::mt19937_64& rng, int max_terms) {
    TrigPoly p(1, 1);
    std::uniform_int_distribution<int> terms(1, max_terms), freq(-6, 6);
    std::normal_distribution<double> g;
    const int k = terms(rng);
    for (int i = 0; i < k; ++i) p.add({freq(rng)}, {g(rng), g(rng)});
    return p;
}

}  // namespace

TEST(Bump, Examples) {
    const BumpSpec b{2, 2.0, 2, 1.0};
    EXPECT_EQ(bump_eval(b, vec({0, 0})), 1.0);
    EXPECT_EQ(bump_eval(b, vec({2, 0})), 0.0);
    EXPECT_EQ(bump_eval(b, vec({1, 0})), 0.5625);
    EXPECT_EQ(bump_eval(b, vec({3, 3})), 0.0);
    EXPECT_THROW(bump_eval(b, vec({1, 0, 0})), DomainError);
}

TEST(Bump, Validation) {
    EXPECT_THROW((BumpSpec{2, 0.0, 2, 1.0}.validate()), DomainError);
    EXPECT_THROW((BumpSpec{2, 1.0, 1, 1.0}.validate()), DomainError);
    EXPECT_THROW((BumpSpec{0, 1.0, 2, 1.0}.validate()), DomainError);
    EXPECT_NO_THROW((BumpSpec{3, 1.0, 3, -2.0}.validate()));
}

TEST(Bump, RangeAndSupport) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const BumpSpec b{2, 2.0, 3, 1.5};
    for (int it = 0; it < 1000; ++it) {
        const Vector v = vec({u(rng), u(rng)});
        const double r = bump_eval(b, v);
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 1.5);
        if (v.norm() >= 2.0) EXPECT_EQ(r, 0.0);
    }
}

TEST(Bump, DerivativesVanishAtTheBoundary) {
    // Order p-1 differences at the support boundary go to zero like h (the
    // order-p derivative jumps there, by at most p! 2^p), while order-p
    // differences beyond it are exactly zero.
    for (int p : {2, 3, 4}) {
        const BumpSpec b{1, 1.0, p, 1.0};
        auto diff = [&](double x, int order, double h) {
            double acc = 0.0, binom = 1.0;
            for (int k = 0; k <= order; ++k) {
                acc += ((k % 2) ? -binom : binom) * bump_eval(b, vec({x + (0.5 * order - k) * h}));
                binom = binom * (order - k) / (k + 1);
            }
            return acc / std::pow(h, order);
        };
        const double jump = std::tgamma(p + 1) * std::pow(2.0, p);
        EXPECT_LE(std::abs(diff(1.0, p - 1, 1e-3)), jump * 1e-3);
        EXPECT_LE(std::abs(diff(1.0, p - 1, 1e-4)), jump * 1e-4);
        EXPECT_LE(std::abs(diff(1.5, p, 1e-3)), 1e-6);
    }
}

TEST(Bump, IntegralMatchesQuadrature) {
    EXPECT_NEAR(bump_integral(BumpSpec{2, 2.0, 2, 1.0}), oracle::bump_integral_2d(2.0, 2), 1e-5);
    EXPECT_NEAR(bump_integral(BumpSpec{2, 1.5, 3, 1.0}), oracle::bump_integral_2d(1.5, 3), 1e-5);
    EXPECT_NEAR(bump_integral(BumpSpec{2, 2.0, 2, 1.0}), 4.0 * std::numbers::pi / 3.0, 1e-12);
}

TEST(Bump, ApproxClNormIsFinite) {
    const BumpSpec b{2, 2.0, 2, 1.0};
    EXPECT_GE(approx_cl_norm(b, 0), 1.0);
    EXPECT_GT(approx_cl_norm(b, 1), approx_cl_norm(b, 0) - 1.0);
}

TEST(Siegel, Examples) {
    const auto z2 = UnimodularLattice::standard(2);
    EXPECT_EQ(siegel_transform(BumpSpec{2, 0.9, 2, 1.0}, z2), 0.0);
    EXPECT_DOUBLE_EQ(siegel_transform(BumpSpec{2, 2.0, 2, 1.0}, z2), 3.25);
    EXPECT_DOUBLE_EQ(oracle::siegel_sum(BumpSpec{2, 2.0, 2, 1.0}, z2.basis(), 3), 3.25);
}

TEST(Siegel, MatchesEnumerationAndIgnoresRebasing) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> small(-3, 3);
    const BumpSpec b{2, 2.0, 2, 1.0};
    for (int it = 0; it < 100; ++it) {
        const double tau = 1.5 * u(rng);
        const auto l = apply_flow(FlowParam(1, 1, {tau, tau}), lattice_from_matrix(TorusPoint(1, 1, {u(rng)})));
        const double value = siegel_transform(b, l);
        EXPECT_GE(value, 0.0);
        EXPECT_NEAR(value, oracle::siegel_sum(b, l.basis(), 12), 1e-12);
        // Re-base by a random unimodular integer matrix [[1, k], [0, 1]] [[1, 0], [j, 1]].
        Matrix g(2, 2);
        const int k = small(rng), j = small(rng);
        g << 1 + k * j, k, j, 1;
        EXPECT_NEAR(siegel_transform(b, UnimodularLattice(Matrix(l.basis() * g))), value, 1e-12);
    }
}

TEST(Siegel, ThreeDimensionalMatchesEnumeration) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const BumpSpec b{3, 1.5, 2, 1.0};
    for (int it = 0; it < 20; ++it) {
        const auto l = apply_flow(FlowParam(2, 1, {0.3, 0.2, 0.5}),
                                  lattice_from_matrix(TorusPoint(2, 1, {u(rng), u(rng)})));
        EXPECT_NEAR(siegel_transform(b, l), oracle::siegel_sum(b, l.basis(), 6), 1e-12);
    }
}

TEST(Siegel, AffineMatchesEnumeration) {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const BumpSpec b{2, 1.2, 2, 1.0};
    for (int it = 0; it < 50; ++it) {
        const auto l = lattice_from_matrix(TorusPoint(1, 1, {u(rng)}));
        const Eigen::VectorXd x = vec({3.0 * u(rng) - 1.5, 3.0 * u(rng) - 1.5});
        EXPECT_NEAR(affine_siegel_transform(b, l.reduction(), x), oracle::siegel_sum(b, l.basis(), 6, &x), 1e-12);
    }
}

TEST(Character, Examples) {
    EXPECT_EQ(character_eval({0}, TorusPoint(1, 1, {0.3})), Complex(1.0, 0.0));
    const Complex z = character_eval({1}, TorusPoint(1, 1, {0.25}));
    EXPECT_NEAR(z.real(), 0.0, 1e-15);
    EXPECT_NEAR(z.imag(), 1.0, 1e-15);
    std::mt19937_64 rng(25);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> k(-9, 9);
    for (int it = 0; it < 200; ++it)
        EXPECT_NEAR(std::abs(character_eval({k(rng), k(rng)}, TorusPoint(1, 2, {u(rng), u(rng)}))), 1.0, 1e-14);
}

TEST(TrigPoly, EvaluationMatchesDefinition) {
    TrigPoly f(1, 1);
    f.set({0}, 3.0);
    f.set({1}, 1.0);
    f.set({-1}, 1.0);
    EXPECT_NEAR(f(TorusPoint(1, 1, {0.0})).real(), 5.0, 1e-14);
    EXPECT_NEAR(f(TorusPoint(1, 1, {0.5})).real(), 1.0, 1e-14);
    EXPECT_TRUE(f.is_real());
    f.set({2}, Complex(0.0, 1.0));
    EXPECT_FALSE(f.is_real());
}

TEST(Wiener, Examples) {
    EXPECT_EQ(wiener_norm(TrigPoly::constant(1, 1, 3.0)), 3.0);
    TrigPoly f(1, 1);
    f.set({0}, 3.0);
    f.set({1}, 1.0);
    f.set({-1}, 1.0);
    EXPECT_EQ(wiener_norm(f), 5.0);
}

TEST(Wiener, SubmultiplicativeAndDominatesSup) {
    std::mt19937_64 rng(26);
    for (int it = 0; it < 200; ++it) {
        const TrigPoly a = random_poly(rng, 5), b = random_poly(rng, 5);
        EXPECT_LE(wiener_norm(a * b), wiener_norm(a) * wiener_norm(b) * (1 + 1e-12));
        double sup = 0.0;
        for (int g = 0; g < 64; ++g) sup = std::max(sup, std::abs(a(TorusPoint(1, 1, {g / 64.0}))));
        EXPECT_LE(sup, wiener_norm(a) * (1 + 1e-12));
    }
}

TEST(TrigPoly, ProductMatchesPointwise) {
    std::mt19937_64 rng(27);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int it = 0; it < 50; ++it) {
        const TrigPoly a = random_poly(rng, 4), b = random_poly(rng, 4);
        const TorusPoint x(1, 1, {u(rng)});
        EXPECT_NEAR(std::abs((a * b)(x) - a(x) * b(x)), 0.0, 1e-10);
    }
}

TEST(TrigPoly, L2NormIsParseval) {
    std::mt19937_64 rng(28);
    for (int it = 0; it < 50; ++it) {
        const TrigPoly a = random_poly(rng, 6);
        double s = 0.0;
        for (int g = 0; g < 64; ++g) s += std::norm(a(TorusPoint(1, 1, {g / 64.0})));
        EXPECT_NEAR(a.l2_norm(), std::sqrt(s / 64.0), 1e-12);
    }
}

TEST(Omega, Examples) {
    EXPECT_EQ(omega_kernel(0.0), 1.0);
    EXPECT_NEAR(omega_kernel(std::numbers::pi), 0.0, 1e-30);
    EXPECT_NEAR(omega_kernel(std::numbers::pi / 2), 4.0 / (std::numbers::pi * std::numbers::pi), 1e-15);
    // Series branch joins the closed form smoothly.
    EXPECT_NEAR(omega_kernel(0.99e-4), std::pow(std::sin(0.99e-4) / 0.99e-4, 2), 1e-15);
}

TEST(Omega, Bounds) {
    for (double x = -50.0; x <= 50.0; x += 0.0137) {
        const double w = omega_kernel(x);
        EXPECT_GE(w, 0.0);
        EXPECT_LE(w, 1.0);
        if (x != 0.0) EXPECT_LE(w, 1.0 / (x * x) * (1 + 1e-12));
    }
}
