#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "plap/vec2.hpp"

namespace plap {

struct Puncture {
    Vec2 center;
    double value = 0.0;
};

/// How each grid cell is split into two triangles.
enum class DiagonalPattern {
    /// The same diagonal in every cell.
    Uniform,
    /// Diagonal orientation alternates with the parity of the cell index, so
    /// the triangulation is invariant under x -> -x and y -> -y.
    Alternating,
};

/// Omega_{r,R} = B_R(0) minus the closed balls B_r(x_i), sampled on a uniform
/// grid of spacing h whose lines pass through the origin.
struct DomainConfig {
    std::vector<Puncture> punctures;
    double hole_radius = 0.1;
    double outer_radius = 4.0;
    /// Defaults to (min m_i + max m_i) / 2 when unset.
    std::optional<double> outer_value;
    double spacing = 0.1;
    DiagonalPattern pattern = DiagonalPattern::Alternating;

    double resolved_outer_value() const;
    /// Throws ConfigError when the balls overlap, leave B_R, or h >= r.
    void validate() const;
};

enum class NodeClass { Free, DirichletInner, DirichletOuter, Excluded };

const char* to_string(NodeClass c);

struct Node {
    Vec2 position;
    NodeClass cls = NodeClass::Excluded;
    int hole = -1;  // puncture index for DirichletInner
    double dirichlet_value = std::numeric_limits<double>::quiet_NaN();
};

/// Linear triangle with precomputed area and shape-function gradients.
struct Triangle {
    std::array<int, 3> v;
    double area;
    std::array<Vec2, 3> grad;
};

/// Node classification, triangulation and the FREE-node incidence structure
/// used by the assembly kernels. Immutable once built.
class Mesh {
public:
    /// Grid nodes are numbered j * nx + i for column i and row j; every grid
    /// node is present, including EXCLUDED ones.
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double spacing() const { return h_; }
    Vec2 origin() const { return origin_; }
    bool is_grid() const { return nx_ > 0; }

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const std::vector<int>& free_nodes() const { return free_nodes_; }
    /// Unknown index of a node, or -1 when it is not FREE.
    int free_index(int node) const { return free_index_[node]; }
    std::size_t num_free() const { return free_nodes_.size(); }

    bool active(int node) const { return nodes_[node].cls != NodeClass::Excluded; }
    bool is_dirichlet(int node) const {
        return nodes_[node].cls == NodeClass::DirichletInner || nodes_[node].cls == NodeClass::DirichletOuter;
    }
    int node_at(int i, int j) const { return j * nx_ + i; }

    /// For free unknown k, entries [offsets[k], offsets[k+1]) of incidences()
    /// hold 3 * triangle + local_vertex, in increasing triangle order.
    const std::vector<int>& incidence_offsets() const { return incidence_offsets_; }
    const std::vector<int>& incidences() const { return incidences_; }

    /// Node values with Dirichlet data in place, `free_fill` on FREE nodes,
    /// NaN on EXCLUDED nodes.
    std::vector<double> initial_values(double free_fill = 0.0) const;

    /// Bilinear interpolation of nodal values at x; nullopt when x is off the
    /// grid or any corner of its cell is EXCLUDED.
    std::optional<double> interpolate(std::span<const double> values, Vec2 x) const;

    /// Replace the Dirichlet data by g(position) on every Dirichlet node.
    void set_dirichlet(const std::function<double(Vec2)>& g);

    /// Assemble a mesh from explicit nodes and triangles (no grid geometry).
    /// Used for hand-built test meshes.
    static Mesh from_triangles(std::vector<Node> nodes, const std::vector<std::array<int, 3>>& tris);

    friend Mesh build_mesh(const DomainConfig& cfg);

private:
    void finalize(const std::vector<std::array<int, 3>>& tris);

    int nx_ = 0;
    int ny_ = 0;
    double h_ = 0.0;
    Vec2 origin_{};
    std::vector<Node> nodes_;
    std::vector<Triangle> triangles_;
    std::vector<int> free_nodes_;
    std::vector<int> free_index_;
    std::vector<int> incidence_offsets_;
    std::vector<int> incidences_;
};

/// Classify grid nodes, triangulate every cell whose four corners are active,
/// and check that the FREE region is connected and every hole is resolved.
Mesh build_mesh(const DomainConfig& cfg);

/// Columns: node, x, y, class, dirichlet_value.
void write_mesh_csv(const Mesh& mesh, std::ostream& out);

double total_area(const Mesh& mesh);

}  // namespace plap
