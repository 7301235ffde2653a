#include <gtest/gtest.h>

#include <cmath>

#include "plap/error.hpp"
#include "plap/operator_model.hpp"
#include "plap/parallel.hpp"

namespace {

using namespace plap;

TEST(Damascelli, LinearFluxGivesUnitConstants) {
    const auto rep = verify_damascelli(make_operator(2.0, 2, ConstantFamily{}), 20000, 1);
    EXPECT_NEAR(rep.c1_est, 1.0, 1e-12);
    EXPECT_NEAR(rep.c2_est, 1.0, 1e-12);
    EXPECT_EQ(rep.violations, 0);
    EXPECT_EQ(rep.sample_count, 20000);
}

TEST(Damascelli, P4ConstantIsFiniteAndConsistent) {
    const auto rep = verify_damascelli(make_operator(4.0, 2, ConstantFamily{}), 20000, 3);
    EXPECT_TRUE(std::isfinite(rep.c1_est));
    EXPECT_GT(rep.c2_est, 0.0);
    EXPECT_GE(rep.c1_est, rep.c2_est);
    // The pair (0, eta) realises the ratio 1 for inequality (6).
    EXPECT_LE(rep.c2_est, 1.0 + 1e-12);
    EXPECT_EQ(rep.violations, 0);
    EXPECT_GT(rep.gamma_est, 0.0);
    EXPECT_GE(rep.Gamma_est, rep.gamma_est);
}

TEST(Damascelli, RationalFamilyRegression) {
    const auto rep = verify_damascelli(make_operator(4.0, 2, RationalFamily{1.0, 1.0}), 100000, 7);
    EXPECT_GT(rep.c2_est, 0.0);
    EXPECT_LT(rep.c1_est / rep.c2_est, 1e3);
    EXPECT_EQ(rep.violations, 0);
}

TEST(Damascelli, RejectsSubquadraticExponent) {
    EXPECT_THROW(verify_damascelli(make_operator(1.5, 2, ConstantFamily{}), 100, 1), PreconditionError);
}

TEST(Damascelli, DeterministicAcrossThreadCounts) {
    const auto spec = make_operator(3.0, 2, RationalFamily{1.0, 0.5});
    parallel::set_num_threads(1);
    const auto a = verify_damascelli(spec, 5000, 42);
    parallel::set_num_threads(3);
    const auto b = verify_damascelli(spec, 5000, 42);
    parallel::set_num_threads(1);
    EXPECT_EQ(a.c1_est, b.c1_est);
    EXPECT_EQ(a.c2_est, b.c2_est);
    EXPECT_EQ(a.gamma_est, b.gamma_est);
    EXPECT_EQ(a.Gamma_est, b.Gamma_est);
    EXPECT_EQ(a.worst_case_pair.first, b.worst_case_pair.first);
}

}  // namespace
