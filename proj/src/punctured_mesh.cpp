#include "plap/punctured_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "plap/csv_io.hpp"
#include "plap/error.hpp"

namespace plap {

namespace {

std::string fmt(double v) { return csv::format_double(v); }

struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

const char* to_string(NodeClass c) {
    switch (c) {
        case NodeClass::Free: return "FREE";
        case NodeClass::DirichletInner: return "DIR_INNER";
        case NodeClass::DirichletOuter: return "DIR_OUTER";
        case NodeClass::Excluded: return "EXCLUDED";
    }
    return "?";
}

double DomainConfig::resolved_outer_value() const {
    if (outer_value) return *outer_value;
    if (punctures.empty()) return 0.0;
    double lo = punctures.front().value;
    double hi = lo;
    for (const auto& p : punctures) {
        lo = std::min(lo, p.value);
        hi = std::max(hi, p.value);
    }
    return 0.5 * (lo + hi);
}

void DomainConfig::validate() const {
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ConfigError("spacing h must be positive");
    if (!(outer_radius > 0.0) || !std::isfinite(outer_radius)) throw ConfigError("outer radius R must be positive");
    if (!punctures.empty()) {
        if (!(hole_radius > 0.0)) throw ConfigError("hole radius r must be positive");
        if (!(spacing < hole_radius))
            throw ConfigError("spacing h = " + fmt(spacing) + " must be smaller than the hole radius r = " +
                              fmt(hole_radius));
    }
    for (std::size_t i = 0; i < punctures.size(); ++i) {
        const auto& pi = punctures[i];
        if (!std::isfinite(pi.value) || !std::isfinite(pi.center.x) || !std::isfinite(pi.center.y))
            throw ConfigError("puncture entries must be finite");
        if (!(norm(pi.center) + hole_radius < outer_radius))
            throw ConfigError("closed ball around puncture " + std::to_string(i) + " is not inside B_R(0)");
        for (std::size_t j = 0; j < i; ++j) {
            if (!(norm(pi.center - punctures[j].center) > 2.0 * hole_radius))
                throw ConfigError("closed balls around punctures " + std::to_string(j) + " and " +
                                  std::to_string(i) + " intersect");
        }
    }
    if (outer_value && !std::isfinite(*outer_value)) throw ConfigError("outer value must be finite");
}

std::vector<double> Mesh::initial_values(double free_fill) const {
    std::vector<double> u(nodes_.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        switch (nodes_[k].cls) {
            case NodeClass::Free: u[k] = free_fill; break;
            case NodeClass::DirichletInner:
            case NodeClass::DirichletOuter: u[k] = nodes_[k].dirichlet_value; break;
            case NodeClass::Excluded: break;
        }
    }
    return u;
}

std::optional<double> Mesh::interpolate(std::span<const double> values, Vec2 x) const {
    if (!is_grid()) return std::nullopt;
    const double fx = (x.x - origin_.x) / h_;
    const double fy = (x.y - origin_.y) / h_;
    if (!(fx >= 0.0 && fy >= 0.0 && fx <= nx_ - 1 && fy <= ny_ - 1)) return std::nullopt;
    const int i = std::min(static_cast<int>(std::floor(fx)), nx_ - 2);
    const int j = std::min(static_cast<int>(std::floor(fy)), ny_ - 2);
    const double tx = fx - i;
    const double ty = fy - j;
    const int n00 = node_at(i, j), n10 = node_at(i + 1, j), n01 = node_at(i, j + 1), n11 = node_at(i + 1, j + 1);
    for (int n : {n00, n10, n01, n11})
        if (!active(n)) return std::nullopt;
    const double v00 = values[n00];
    return v00 + tx * (values[n10] - v00) + ty * (values[n01] - v00) +
           tx * ty * (values[n11] - values[n10] - values[n01] + v00);
}

void Mesh::set_dirichlet(const std::function<double(Vec2)>& g) {
    for (auto& n : nodes_)
        if (n.cls == NodeClass::DirichletInner || n.cls == NodeClass::DirichletOuter)
            n.dirichlet_value = g(n.position);
}

Mesh Mesh::from_triangles(std::vector<Node> nodes, const std::vector<std::array<int, 3>>& tris) {
    Mesh m;
    m.nodes_ = std::move(nodes);
    m.finalize(tris);
    return m;
}

void Mesh::finalize(const std::vector<std::array<int, 3>>& tris) {
    triangles_.clear();
    triangles_.reserve(tris.size());
    for (const auto& t : tris) {
        const Vec2 p0 = nodes_[t[0]].position, p1 = nodes_[t[1]].position, p2 = nodes_[t[2]].position;
        const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
        if (det == 0.0) throw MeshError("degenerate triangle");
        Triangle tri{t, 0.5 * std::abs(det), {}};
        tri.grad[0] = {(p1.y - p2.y) / det, (p2.x - p1.x) / det};
        tri.grad[1] = {(p2.y - p0.y) / det, (p0.x - p2.x) / det};
        tri.grad[2] = {(p0.y - p1.y) / det, (p1.x - p0.x) / det};
        triangles_.push_back(tri);
    }

    free_nodes_.clear();
    free_index_.assign(nodes_.size(), -1);
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (nodes_[k].cls == NodeClass::Free) {
            free_index_[k] = static_cast<int>(free_nodes_.size());
            free_nodes_.push_back(static_cast<int>(k));
        }
    }

    std::vector<int> count(free_nodes_.size() + 1, 0);
    for (const auto& tri : triangles_)
        for (int v : tri.v) {
            if (nodes_[v].cls == NodeClass::Excluded) throw MeshError("triangle references an EXCLUDED node");
            if (free_index_[v] >= 0) ++count[free_index_[v] + 1];
        }
    for (std::size_t k = 0; k < free_nodes_.size(); ++k) {
        if (count[k + 1] == 0) {
            const Vec2 p = nodes_[free_nodes_[k]].position;
            throw MeshError("FREE node at (" + fmt(p.x) + ", " + fmt(p.y) + ") belongs to no triangle; h too coarse");
        }
    }
    std::partial_sum(count.begin(), count.end(), count.begin());
    incidence_offsets_ = count;
    incidences_.assign(incidence_offsets_.back(), 0);
    std::vector<int> cursor(incidence_offsets_.begin(), incidence_offsets_.end() - 1);
    for (std::size_t t = 0; t < triangles_.size(); ++t)
        for (int l = 0; l < 3; ++l) {
            const int f = free_index_[triangles_[t].v[l]];
            if (f >= 0) incidences_[cursor[f]++] = static_cast<int>(3 * t + l);
        }

    DisjointSets sets(free_nodes_.size());
    for (const auto& tri : triangles_)
        for (int a = 0; a < 3; ++a) {
            const int fa = free_index_[tri.v[a]];
            const int fb = free_index_[tri.v[(a + 1) % 3]];
            if (fa >= 0 && fb >= 0) sets.unite(fa, fb);
        }
    for (std::size_t k = 1; k < free_nodes_.size(); ++k)
        if (sets.find(static_cast<int>(k)) != sets.find(0)) throw MeshError("disconnected FREE region");
}

Mesh build_mesh(const DomainConfig& cfg) {
    cfg.validate();
    const double h = cfg.spacing;
    const double R = cfg.outer_radius;
    const double r2 = cfg.hole_radius * cfg.hole_radius;
    const int N = static_cast<int>(std::ceil(R / h - 1e-9)) + 1;

    Mesh m;
    m.nx_ = m.ny_ = 2 * N + 1;
    m.h_ = h;
    m.origin_ = {-N * h, -N * h};
    m.nodes_.resize(static_cast<std::size_t>(m.nx_) * m.ny_);

    // Region tags: -2 outside B_R, -1 in the domain, i >= 0 inside hole i.
    std::vector<int> region(m.nodes_.size(), -1);
    for (int j = 0; j < m.ny_; ++j)
        for (int i = 0; i < m.nx_; ++i) {
            const int id = m.node_at(i, j);
            const Vec2 x{(i - N) * h, (j - N) * h};
            m.nodes_[id].position = x;
            if (norm2(x) > R * R) {
                region[id] = -2;
                continue;
            }
            for (std::size_t p = 0; p < cfg.punctures.size(); ++p) {
                if (norm2(x - cfg.punctures[p].center) < r2) {
                    region[id] = static_cast<int>(p);
                    break;
                }
            }
        }

    const double outer = cfg.resolved_outer_value();
    std::vector<int> inner_count(cfg.punctures.size(), 0);
    for (int j = 0; j < m.ny_; ++j)
        for (int i = 0; i < m.nx_; ++i) {
            const int id = m.node_at(i, j);
            auto& node = m.nodes_[id];
            if (region[id] == -1) {
                node.cls = NodeClass::Free;
                continue;
            }
            bool touches = false;
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int d = 0; d < 4; ++d) {
                const int ii = i + di[d], jj = j + dj[d];
                if (ii < 0 || jj < 0 || ii >= m.nx_ || jj >= m.ny_) continue;
                if (region[m.node_at(ii, jj)] == -1) touches = true;
            }
            if (!touches) continue;
            if (region[id] == -2) {
                node.cls = NodeClass::DirichletOuter;
                node.dirichlet_value = outer;
            } else {
                node.cls = NodeClass::DirichletInner;
                node.hole = region[id];
                node.dirichlet_value = cfg.punctures[region[id]].value;
                ++inner_count[region[id]];
            }
        }
    for (std::size_t p = 0; p < inner_count.size(); ++p)
        if (inner_count[p] == 0)
            throw MeshError("hole " + std::to_string(p) + " contains no DIR_INNER node; h too coarse");

    std::vector<std::array<int, 3>> tris;
    tris.reserve(2 * static_cast<std::size_t>(m.nx_) * m.ny_);
    for (int j = 0; j + 1 < m.ny_; ++j)
        for (int i = 0; i + 1 < m.nx_; ++i) {
            const int a = m.node_at(i, j), b = m.node_at(i + 1, j), c = m.node_at(i + 1, j + 1),
                      d = m.node_at(i, j + 1);
            if (!m.active(a) || !m.active(b) || !m.active(c) || !m.active(d)) continue;
            const bool slash = cfg.pattern == DiagonalPattern::Uniform || (i + j) % 2 == 0;
            if (slash) {
                tris.push_back({a, b, c});
                tris.push_back({a, c, d});
            } else {
                tris.push_back({a, b, d});
                tris.push_back({b, c, d});
            }
        }
    m.finalize(tris);
    if (m.free_nodes_.empty()) throw MeshError("mesh has no FREE nodes");
    return m;
}

void write_mesh_csv(const Mesh& mesh, std::ostream& out) {
    out << "node,x,y,class,dirichlet_value\n";
    const auto& nodes = mesh.nodes();
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const auto& n = nodes[k];
        out << k << ',' << csv::format_double(n.position.x) << ',' << csv::format_double(n.position.y) << ','
            << to_string(n.cls);
        if (n.cls == NodeClass::DirichletInner) out << '(' << n.hole << ')';
        out << ',';
        if (mesh.is_dirichlet(static_cast<int>(k))) out << csv::format_double(n.dirichlet_value);
        out << '\n';
    }
}

double total_area(const Mesh& mesh) {
    double a = 0.0;
    for (const auto& t : mesh.triangles()) a += t.area;
    return a;
}

}  // namespace plap
