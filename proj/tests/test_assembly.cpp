#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "plap/assembly.hpp"
#include "plap/parallel.hpp"
#include "plap/radial_barrier.hpp"

namespace {

using namespace plap;

DomainConfig two_punctures(double h = 0.1) {
    DomainConfig c;
    c.punctures = {{{-1.0, 0.0}, -1.0}, {{1.0, 0.0}, 1.0}};
    c.hole_radius = 0.3;
    c.outer_radius = 3.0;
    c.spacing = h;
    return c;
}

std::vector<double> random_values(const Mesh& m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto v = m.initial_values(0.0);
    for (int k : m.free_nodes()) v[k] = u(rng);
    return v;
}

// Central differences with step 1e-3 and 5e-4, combined by Richardson
// extrapolation; a smaller step loses the gradient to cancellation in E.
double central_difference(const Mesh& m, const OperatorSpec& spec, std::vector<double> u, int node) {
    auto d = [&](double h) {
        const double u0 = u[node];
        u[node] = u0 + h;
        const double ep = assemble_energy(m, spec, u);
        u[node] = u0 - h;
        const double em = assemble_energy(m, spec, u);
        u[node] = u0;
        return (ep - em) / (2 * h);
    };
    return (4 * d(5e-4) - d(1e-3)) / 3;
}

Mesh unit_triangle() {
    std::vector<Node> nodes(3);
    nodes[0] = {{0, 0}, NodeClass::DirichletOuter, -1, 0.0};
    nodes[1] = {{1, 0}, NodeClass::Free};
    nodes[2] = {{0, 1}, NodeClass::DirichletOuter, -1, 0.0};
    return Mesh::from_triangles(nodes, {{0, 1, 2}});
}

TEST(AssembleEnergy, SingleRightTriangle) {
    const Mesh m = unit_triangle();
    const auto spec = make_operator(4.0, 2, ConstantFamily{});
    const std::vector<double> u{0.0, 1.0, 0.0};
    EXPECT_DOUBLE_EQ(assemble_energy(m, spec, u), 0.125);
    // dE/du_1 = area * |grad u|^2 grad u . grad phi_1 = 0.5.
    EXPECT_DOUBLE_EQ(assemble_gradient(m, spec, u)[0], 0.5);
}

TEST(AssembleEnergy, ConstantValuesGiveZero) {
    const Mesh m = build_mesh(two_punctures());
    const auto spec = make_operator(4.0, 2, RationalFamily{1.0, 1.0});
    std::vector<double> u(m.nodes().size(), 0.7);
    EXPECT_EQ(assemble_energy(m, spec, u), 0.0);
    for (double g : assemble_gradient(m, spec, u)) EXPECT_EQ(g, 0.0);
}

TEST(AssembleEnergy, TranslationInvariantAndConvex) {
    const Mesh m = build_mesh(two_punctures());
    const auto spec = make_operator(3.0, 2, RationalFamily{1.0, 1.0});
    const auto u = random_values(m, 1), w = random_values(m, 2);
    auto shifted = u;
    for (auto& x : shifted) x += 3.0;
    const double Eu = assemble_energy(m, spec, u);
    EXPECT_NEAR(assemble_energy(m, spec, shifted), Eu, 1e-11 * Eu);
    const double Ew = assemble_energy(m, spec, w);
    for (double lam : {0.1, 0.5, 0.8}) {
        std::vector<double> mix(u.size());
        for (std::size_t k = 0; k < u.size(); ++k) mix[k] = lam * u[k] + (1 - lam) * w[k];
        EXPECT_LE(assemble_energy(m, spec, mix), lam * Eu + (1 - lam) * Ew);
    }
}

TEST(AssembleGradient, MatchesCentralDifferences) {
    const Mesh m = build_mesh(two_punctures());
    const auto spec = make_operator(4.0, 2, ConstantFamily{});
    auto u = random_values(m, 11);
    const auto g = assemble_gradient(m, spec, u);
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> pick(0, m.num_free() - 1);
    for (int t = 0; t < 20; ++t) {
        const std::size_t k = pick(rng);
        const int node = m.free_nodes()[k];
        const double fd = central_difference(m, spec, u, node);
        EXPECT_NEAR(fd, g[k], 1e-6 * std::abs(g[k]));
    }
}

TEST(AssembleGradient, HessianDiagonalMatchesDifferenceOfGradients) {
    const Mesh m = build_mesh(two_punctures());
    const auto spec = make_operator(3.0, 2, RationalFamily{1.0, 1.0});
    auto u = random_values(m, 4);
    Assembler as(m, spec);
    std::vector<double> d(m.num_free()), gp(m.num_free()), gm(m.num_free());
    as.hessian_diagonal(u, d);
    for (std::size_t k = 0; k < m.num_free(); k += 97) {
        const int node = m.free_nodes()[k];
        const double h = 1e-6;
        auto up = u, dn = u;
        up[node] += h;
        dn[node] -= h;
        as.gradient(up, gp);
        as.gradient(dn, gm);
        EXPECT_NEAR((gp[k] - gm[k]) / (2 * h), d[k], 1e-5 * d[k]);
    }
}

TEST(Assembly, ParallelMatchesSerialBitwise) {
    const Mesh m = build_mesh(two_punctures(0.05));
    const auto spec = make_operator(4.0, 2, RationalFamily{1.0, 1.0});
    const auto u = random_values(m, 5);
    const double e_ref = reference::assemble_energy(m, spec, u);
    const auto g_ref = reference::assemble_gradient(m, spec, u);
    for (int threads : {1, 2, 3, 4}) {
        parallel::set_num_threads(threads);
        Assembler as(m, spec);
        std::vector<double> g(m.num_free());
        EXPECT_EQ(as.energy(u), e_ref) << threads;
        const double e = as.energy_and_gradient(u, g);
        EXPECT_EQ(e, e_ref);
        EXPECT_EQ(g, g_ref) << threads;
    }
    parallel::set_num_threads(1);
}

TEST(Assembly, BlockedDotIsThreadIndependent) {
    std::vector<double> a(100003), b(100003);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n;
    for (auto& x : a) x = n(rng);
    for (auto& x : b) x = n(rng);
    parallel::set_num_threads(1);
    const double d1 = parallel::dot(a, b);
    parallel::set_num_threads(4);
    const double d4 = parallel::dot(a, b);
    parallel::set_num_threads(1);
    EXPECT_EQ(d1, d4);
    long double exact = 0;
    for (std::size_t k = 0; k < a.size(); ++k) exact += static_cast<long double>(a[k]) * b[k];
    EXPECT_NEAR(d1, static_cast<double>(exact), 1e-10);
}

TEST(Assembly, BarrierEnergyMatchesRadialIntegral) {
    // u = v_1(|x|) - v_1(1) on 1 <= |x| <= 2 with p = 4 has |grad u| = r^{-1/3}, so
    // E = 2 pi int_1^2 r^{-4/3} / 4 r dr = (pi / 2) (3 / 2) (2^{2/3} - 1).
    const auto spec = make_operator(4.0, 2, ConstantFamily{});
    const double exact = 0.75 * M_PI * (std::pow(2.0, 2.0 / 3.0) - 1.0);
    double prev_err = INFINITY;
    for (double h : {0.04, 0.02, 0.01}) {
        DomainConfig c;
        c.punctures = {{{0.0, 0.0}, 0.0}};
        c.hole_radius = 1.0;
        c.outer_radius = 2.0;
        c.spacing = h;
        Mesh m = build_mesh(c);
        std::vector<double> u(m.nodes().size(), NAN);
        for (std::size_t k = 0; k < u.size(); ++k)
            if (m.active(static_cast<int>(k)))
                u[k] = 1.5 * (std::cbrt(norm2(m.nodes()[k].position)) - 1.0);
        const double err = std::abs(assemble_energy(m, spec, u) - exact);
        EXPECT_LT(err, prev_err);
        prev_err = err;
    }
    EXPECT_LT(prev_err, 0.05 * exact);
}

}  // namespace
