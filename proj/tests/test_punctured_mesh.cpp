#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "plap/error.hpp"
#include "plap/punctured_mesh.hpp"

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

TEST(DomainConfig, OuterValueDefaultsToMidrange) {
    auto c = two_punctures();
    c.punctures[1].value = 3.0;
    EXPECT_EQ(c.resolved_outer_value(), 1.0);
    c.outer_value = -2.0;
    EXPECT_EQ(c.resolved_outer_value(), -2.0);
}

TEST(DomainConfig, ValidationRejectsBadGeometry) {
    auto c = two_punctures();
    c.spacing = 0.3;
    EXPECT_THROW(c.validate(), ConfigError);
    c = two_punctures();
    c.punctures[1].center = {-0.5, 0.0};
    EXPECT_THROW(c.validate(), ConfigError);
    c = two_punctures();
    c.punctures[1].center = {2.8, 0.0};
    EXPECT_THROW(c.validate(), ConfigError);
    c = two_punctures();
    c.punctures[0].value = NAN;
    EXPECT_THROW(c.validate(), ConfigError);
    c = two_punctures();
    c.spacing = -1.0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(BuildMesh, InnerDirichletNodesHugTheHole) {
    DomainConfig c;
    c.punctures = {{{0.0, 0.0}, 2.0}};
    c.hole_radius = 0.3;
    c.outer_radius = 2.0;
    c.spacing = 0.1;
    const Mesh m = build_mesh(c);
    int inner = 0;
    for (const auto& n : m.nodes()) {
        if (n.cls == NodeClass::DirichletInner) {
            ++inner;
            EXPECT_LE(norm(n.position), 0.3 + 0.1 * std::sqrt(2.0));
            EXPECT_LT(norm(n.position), 0.3);
            EXPECT_EQ(n.dirichlet_value, 2.0);
            EXPECT_EQ(n.hole, 0);
        }
        if (n.cls == NodeClass::DirichletOuter) {
            EXPECT_GT(norm2(n.position), 4.0);
            EXPECT_EQ(n.dirichlet_value, 2.0);
        }
        if (n.cls == NodeClass::Free) {
            EXPECT_GE(norm(n.position), 0.3);
            EXPECT_LE(norm(n.position), 2.0);
        }
    }
    EXPECT_GT(inner, 0);
}

TEST(BuildMesh, TrianglesAvoidExcludedNodes) {
    const Mesh m = build_mesh(two_punctures());
    std::set<int> covered;
    for (const auto& t : m.triangles()) {
        for (int v : t.v) {
            EXPECT_NE(m.nodes()[v].cls, NodeClass::Excluded);
            covered.insert(v);
        }
        EXPECT_NEAR(t.area, 0.005, 1e-15);
    }
    for (int k : m.free_nodes()) EXPECT_TRUE(covered.count(k));
}

TEST(BuildMesh, AreaMatchesPuncturedDisc) {
    const auto c = two_punctures();
    const double exact = M_PI * 9.0 - 2.0 * M_PI * 0.09;
    const double slack = std::sqrt(2.0) * 0.1 * (2 * M_PI * 3.0 + 2 * 2 * M_PI * 0.3);
    const double area = total_area(build_mesh(c));
    EXPECT_LE(std::abs(area - exact), slack);
    // Regression value for this configuration.
    EXPECT_NEAR(area, 28.24, 1e-9);
}

TEST(BuildMesh, MirrorSymmetricClassification) {
    const Mesh m = build_mesh(two_punctures());
    for (int j = 0; j < m.ny(); ++j)
        for (int i = 0; i < m.nx(); ++i) {
            const auto& a = m.nodes()[m.node_at(i, j)];
            const auto& b = m.nodes()[m.node_at(m.nx() - 1 - i, j)];
            const auto& c = m.nodes()[m.node_at(i, m.ny() - 1 - j)];
            EXPECT_EQ(a.cls, b.cls);
            EXPECT_EQ(a.cls, c.cls);
            EXPECT_EQ(a.position.x, -b.position.x);
        }
}

TEST(BuildMesh, RefinementKeepsClassificationConsistent) {
    const Mesh coarse = build_mesh(two_punctures(0.1));
    const Mesh fine = build_mesh(two_punctures(0.05));
    EXPECT_GT(fine.triangles().size(), coarse.triangles().size());
    for (const auto& n : coarse.nodes()) {
        if (n.cls != NodeClass::Free) continue;
        const int i = static_cast<int>(std::lround((n.position.x - fine.origin().x) / fine.spacing()));
        const int j = static_cast<int>(std::lround((n.position.y - fine.origin().y) / fine.spacing()));
        EXPECT_NE(fine.nodes()[fine.node_at(i, j)].cls, NodeClass::Excluded);
    }
}

TEST(BuildMesh, UniformPatternUsesOneDiagonal) {
    auto c = two_punctures();
    c.pattern = DiagonalPattern::Uniform;
    const Mesh m = build_mesh(c);
    for (const auto& t : m.triangles()) {
        // Every triangle contains a hypotenuse along (1, 1).
        bool diag = false;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const Vec2 d = m.nodes()[t.v[b]].position - m.nodes()[t.v[a]].position;
                if (std::abs(d.x - 0.1) < 1e-12 && std::abs(d.y - 0.1) < 1e-12) diag = true;
            }
        EXPECT_TRUE(diag);
    }
}

TEST(BuildMesh, IncidenceListsAreSortedByTriangle) {
    const Mesh m = build_mesh(two_punctures());
    const auto& off = m.incidence_offsets();
    const auto& inc = m.incidences();
    ASSERT_EQ(off.size(), m.num_free() + 1);
    for (std::size_t k = 0; k < m.num_free(); ++k) {
        EXPECT_GT(off[k + 1], off[k]);
        for (int q = off[k]; q < off[k + 1]; ++q) {
            const auto& t = m.triangles()[inc[q] / 3];
            EXPECT_EQ(t.v[inc[q] % 3], m.free_nodes()[k]);
            if (q > off[k]) { EXPECT_LT(inc[q - 1] / 3, inc[q] / 3); }
        }
    }
}

TEST(Mesh, ShapeGradientsReproduceLinearFunctions) {
    const Mesh m = build_mesh(two_punctures());
    std::vector<double> u(m.nodes().size());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = 2.0 * m.nodes()[k].position.x - 3.0 * m.nodes()[k].position.y;
    for (const auto& t : m.triangles()) {
        const Vec2 g = u[t.v[0]] * t.grad[0] + u[t.v[1]] * t.grad[1] + u[t.v[2]] * t.grad[2];
        EXPECT_NEAR(g.x, 2.0, 1e-12);
        EXPECT_NEAR(g.y, -3.0, 1e-12);
    }
}

TEST(Mesh, InterpolateIsExactForBilinearData) {
    const Mesh m = build_mesh(two_punctures());
    std::vector<double> u(m.nodes().size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        const Vec2 x = m.nodes()[k].position;
        u[k] = 1.0 + x.x - 2.0 * x.y + 0.5 * x.x * x.y;
    }
    for (Vec2 x : {Vec2{0.013, 1.77}, Vec2{-2.0, 0.5}, Vec2{0.0, 0.0}}) {
        const auto v = m.interpolate(u, x);
        ASSERT_TRUE(v.has_value());
        EXPECT_NEAR(*v, 1.0 + x.x - 2.0 * x.y + 0.5 * x.x * x.y, 1e-12);
    }
    EXPECT_FALSE(m.interpolate(u, {1.0, 0.0}).has_value());
    EXPECT_FALSE(m.interpolate(u, {10.0, 0.0}).has_value());
}

TEST(Mesh, InitialValuesAndCsv) {
    const Mesh m = build_mesh(two_punctures());
    const auto v = m.initial_values(0.25);
    for (std::size_t k = 0; k < v.size(); ++k) {
        const auto& n = m.nodes()[k];
        if (n.cls == NodeClass::Excluded) { EXPECT_TRUE(std::isnan(v[k])); }
        if (n.cls == NodeClass::Free) { EXPECT_EQ(v[k], 0.25); }
        if (m.is_dirichlet(static_cast<int>(k))) { EXPECT_EQ(v[k], n.dirichlet_value); }
    }
    std::ostringstream os;
    write_mesh_csv(m, os);
    const std::string s = os.str();
    EXPECT_EQ(s.rfind("node,x,y,class,dirichlet_value\n", 0), 0u);
    EXPECT_NE(s.find("DIR_INNER(1),1"), std::string::npos);
    EXPECT_NE(s.find("DIR_OUTER"), std::string::npos);
}

TEST(Mesh, FromTrianglesRejectsUncoveredFreeNodes) {
    std::vector<Node> nodes(4);
    nodes[0] = {{0, 0}, NodeClass::DirichletOuter, -1, 0.0};
    nodes[1] = {{1, 0}, NodeClass::DirichletOuter, -1, 0.0};
    nodes[2] = {{0, 1}, NodeClass::Free};
    nodes[3] = {{5, 5}, NodeClass::Free};
    EXPECT_THROW(Mesh::from_triangles(nodes, {{0, 1, 2}}), MeshError);
}

}  // namespace
