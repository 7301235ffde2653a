#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "plap/error.hpp"
#include "plap/operator_model.hpp"

namespace {

using namespace plap;

OperatorSpec rational(double p) { return make_operator(p, 2, RationalFamily{1.0, 1.0}); }

// Composite Simpson rule; independent of the library's adaptive quadrature.
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return s * h / 3.0;
}

TEST(MakeOperator, ConstantFamilyBounds) {
    const auto s = make_operator(4.0, 2, ConstantFamily{1.0});
    EXPECT_EQ(s.delta(), 1.0);
    EXPECT_EQ(s.L_bound(), 1.0);
    EXPECT_TRUE(s.is_constant());
    EXPECT_EQ(family_kind(s.family()), "constant");
}

TEST(MakeOperator, RationalFamilyBounds) {
    const auto s = make_operator(2.0, 2, RationalFamily{1.0, 1.0});
    EXPECT_EQ(s.delta(), 1.0);
    EXPECT_EQ(s.L_bound(), 2.0);
}

TEST(MakeOperator, RejectsNonPositiveA0) {
    try {
        make_operator(3.0, 2, ConstantFamily{0.0});
        FAIL();
    } catch (const HypothesisError& e) {
        EXPECT_EQ(e.hypothesis(), "(ii)");
    }
    EXPECT_THROW(make_operator(3.0, 2, RationalFamily{-1.0, 3.0}), HypothesisError);
}

TEST(MakeOperator, RejectsBoundedPhi) {
    // A(t) = 1/(1+t): phi(t) = t/(1+t) < 1, so phi^{-1} is not defined on [1, inf).
    try {
        make_operator(2.0, 2, RationalFamily{1.0, -1.0});
        FAIL();
    } catch (const HypothesisError& e) {
        EXPECT_EQ(e.hypothesis(), "(iv)");
        EXPECT_NE(std::string(e.what()).find("stays below"), std::string::npos);
    }
}

TEST(MakeOperator, RejectsNonMonotonePhiWithWitness) {
    try {
        make_operator(2.0, 2, TableFamily({0.0, 1.0, 2.0}, {1.0, 0.01, 1.0}));
        FAIL();
    } catch (const HypothesisError& e) {
        EXPECT_EQ(e.hypothesis(), "(iii)");
        EXPECT_NE(std::string(e.what()).find("phi("), std::string::npos);
    }
}

TEST(MakeOperator, RejectsMalformedParameters) {
    EXPECT_THROW(make_operator(1.0, 2, ConstantFamily{}), ConfigError);
    EXPECT_THROW(make_operator(NAN, 2, ConstantFamily{}), ConfigError);
    EXPECT_THROW(make_operator(3.0, 1, ConstantFamily{}), ConfigError);
    EXPECT_THROW(TableFamily({0.0, 0.0}, {1.0, 1.0}), ConfigError);
    EXPECT_THROW(TableFamily({0.0, 1.0}, {1.0}), ConfigError);
}

TEST(Phi, Examples) {
    EXPECT_EQ(make_operator(4.0, 2, ConstantFamily{}).phi(2.0), 8.0);
    EXPECT_EQ(rational(4.0).phi(0.0), 0.0);
    EXPECT_DOUBLE_EQ(rational(2.0).phi(1.0), 1.5);
    EXPECT_THROW(rational(2.0).phi(-1.0), PreconditionError);
}

TEST(Phi, EnvelopeAndMonotonicity) {
    for (double p : {2.0, 3.0, 4.5}) {
        const auto s = rational(p);
        double prev = 0.0;
        for (int k = 0; k <= 200; ++k) {
            const double t = std::pow(10.0, -6.0 + 12.0 * k / 200.0);
            const double ph = s.phi(t);
            EXPECT_GT(ph, prev);
            EXPECT_LE(s.delta() * std::pow(t, p - 1.0), ph * (1 + 1e-15));
            EXPECT_GE(s.L_bound() * std::pow(t, p - 1.0), ph * (1 - 1e-15));
            prev = ph;
        }
    }
}

TEST(PhiInverse, Examples) {
    const auto s = make_operator(4.0, 2, ConstantFamily{});
    EXPECT_NEAR(s.phi_inverse(8.0), 2.0, 1e-15);
    EXPECT_EQ(s.phi_inverse(0.0), 0.0);
    EXPECT_EQ(rational(3.0).phi_inverse(0.0), 0.0);
    EXPECT_THROW(s.phi_inverse(-1.0), PreconditionError);
}

TEST(PhiInverse, RoundTripRational) {
    const auto s = rational(3.0);
    for (int k = 0; k < 100; ++k) {
        const double t = std::pow(10.0, -6.0 + 12.0 * k / 99.0);
        EXPECT_NEAR(s.phi_inverse(s.phi(t)), t, 1e-10 * t) << "t = " << t;
    }
}

TEST(PhiInverse, RoundTripTableAndEnvelope) {
    const auto s = make_operator(2.5, 2, TableFamily({0.0, 0.5, 1.0, 4.0}, {1.0, 1.2, 2.0, 3.0}));
    double prev = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double y = std::pow(10.0, -8.0 + 16.0 * k / 99.0);
        const double t = s.phi_inverse(y);
        EXPECT_NEAR(s.phi(t), y, 1e-11 * y);
        EXPECT_GE(t, std::pow(y / s.L_bound(), 1.0 / 1.5) * (1 - 1e-12));
        EXPECT_LE(t, std::pow(y / s.delta(), 1.0 / 1.5) * (1 + 1e-12));
        EXPECT_GT(t, prev);
        prev = t;
    }
}

TEST(Flux, Examples) {
    const auto s = make_operator(4.0, 2, ConstantFamily{});
    EXPECT_EQ(s.flux({1.0, 0.0}), (Vec2{1.0, 0.0}));
    EXPECT_EQ(s.flux({0.0, 0.0}), (Vec2{0.0, 0.0}));
    const Vec2 f = s.flux({3.0, 4.0});
    EXPECT_DOUBLE_EQ(f.x, 75.0);
    EXPECT_DOUBLE_EQ(f.y, 100.0);
    EXPECT_EQ(rational(3.5).flux({0.0, 0.0}), (Vec2{0.0, 0.0}));
}

TEST(Flux, MatchesPhiRadially) {
    const auto s = rational(3.5);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int k = 0; k < 100; ++k) {
        const Vec2 eta{u(rng), u(rng)};
        const double t = norm(eta);
        const Vec2 f = s.flux(eta);
        EXPECT_NEAR(norm(f), s.phi(t), 1e-12 * s.phi(t));
        EXPECT_NEAR(s.flux_scale(t * t), s.phi(t) / t, 1e-12 * s.phi(t) / t);
    }
}

TEST(Flux, JacobianMatchesFiniteDifferences) {
    for (const auto& s : {rational(3.0), make_operator(4.0, 2, ConstantFamily{2.0}),
                          make_operator(2.5, 2, TableFamily({0.0, 1.0, 3.0}, {1.0, 1.5, 1.2}))}) {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        for (int k = 0; k < 50; ++k) {
            const Vec2 eta{u(rng), u(rng)};
            const Mat2 J = s.flux_jacobian(eta);
            const double h = 1e-6 * norm(eta);
            const Vec2 dx = (1.0 / (2 * h)) * (s.flux(eta + Vec2{h, 0}) - s.flux(eta - Vec2{h, 0}));
            const Vec2 dy = (1.0 / (2 * h)) * (s.flux(eta + Vec2{0, h}) - s.flux(eta - Vec2{0, h}));
            const double scale = std::abs(J.xx) + std::abs(J.yy) + std::abs(J.xy);
            EXPECT_NEAR(J.xx, dx.x, 1e-6 * scale);
            EXPECT_NEAR(J.yx, dx.y, 1e-6 * scale);
            EXPECT_NEAR(J.xy, dy.x, 1e-6 * scale);
            EXPECT_NEAR(J.yy, dy.y, 1e-6 * scale);
        }
    }
}

TEST(EnergyDensity, Examples) {
    const auto s = make_operator(4.0, 2, ConstantFamily{});
    EXPECT_DOUBLE_EQ(s.energy_density(2.0), 4.0);
    EXPECT_EQ(s.energy_density(0.0), 0.0);
    EXPECT_EQ(rational(3.0).energy_density(0.0), 0.0);
}

TEST(EnergyDensity, DerivativeIsPhi) {
    const auto s = rational(2.0);
    const double h = 1e-5;
    const double fd = (s.energy_density(1.0 + h) - s.energy_density(1.0 - h)) / (2 * h);
    EXPECT_NEAR(fd, s.phi(1.0), 1e-7);
}

TEST(EnergyDensity, MatchesSimpsonOracle) {
    for (double p : {2.0, 3.0, 4.0, 3.3}) {
        const auto s = rational(p);
        for (double t : {0.01, 0.5, 1.0, 3.0, 10.0}) {
            const double ref = simpson([&](double x) { return x == 0 ? 0.0 : std::pow(x, p - 1) * (1 + x / (1 + x)); },
                                       0.0, t);
            EXPECT_NEAR(s.energy_density(t), ref, 1e-10 * ref) << "p=" << p << " t=" << t;
            EXPECT_NEAR(s.energy_density_sq(t * t), s.energy_density(t), 1e-13 * ref);
        }
    }
}

TEST(EnergyDensity, Convex) {
    const auto s = rational(3.0);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int k = 0; k < 200; ++k) {
        const double a = u(rng), b = u(rng);
        EXPECT_LE(s.energy_density(0.5 * (a + b)), 0.5 * (s.energy_density(a) + s.energy_density(b)) * (1 + 1e-13));
    }
}

TEST(Table, MonotoneInterpolationHoldsKnotsAndExtrapolatesFlat) {
    const TableFamily f({0.0, 1.0, 2.0, 4.0}, {1.0, 2.0, 2.0, 3.0});
    EXPECT_EQ(f.value(1.0), 2.0);
    EXPECT_EQ(f.value(4.0), 3.0);
    EXPECT_EQ(f.value(10.0), 3.0);
    for (double t = 1.0; t <= 2.0; t += 0.05) EXPECT_NEAR(f.value(t), 2.0, 1e-15);
    double prev = f.value(0.0);
    for (double t = 0.0; t <= 4.0; t += 0.01) {
        EXPECT_GE(f.value(t), prev - 1e-15);
        prev = f.value(t);
    }
}

TEST(WithExponent, KeepsFamily) {
    const auto s = rational(4.0).with_exponent(2.0);
    EXPECT_EQ(s.p(), 2.0);
    EXPECT_DOUBLE_EQ(s.phi(1.0), 1.5);
}

}  // namespace
