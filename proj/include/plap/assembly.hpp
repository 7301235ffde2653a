#pragma once

#include <span>
#include <vector>

#include "plap/operator_model.hpp"
#include "plap/punctured_mesh.hpp"

namespace plap {

/// Discrete energy E(u) = sum_T area_T G(|grad u|_T) and its gradient with
/// respect to the FREE nodal values. Triangles are processed in parallel;
/// every reduction runs in a fixed order, so results are bitwise identical
/// for any thread count and match the serial kernels in plap::reference.
///
/// Holds scratch buffers, so one instance must not be shared between
/// threads. The mesh and spec must outlive it.
class Assembler {
public:
    Assembler(const Mesh& mesh, const OperatorSpec& spec);

    double energy(std::span<const double> values);
    void gradient(std::span<const double> values, std::span<double> grad_free);
    double energy_and_gradient(std::span<const double> values, std::span<double> grad_free);

    /// Diagonal of the Hessian with respect to the FREE values.
    void hessian_diagonal(std::span<const double> values, std::span<double> diag_free);

    const Mesh& mesh() const { return mesh_; }
    const OperatorSpec& spec() const { return spec_; }

private:
    void gather(std::span<double> out) const;

    const Mesh& mesh_;
    const OperatorSpec& spec_;
    std::vector<double> tri_energy_;
    std::vector<double> tri_contrib_;
};

double assemble_energy(const Mesh& mesh, const OperatorSpec& spec, std::span<const double> values);
std::vector<double> assemble_gradient(const Mesh& mesh, const OperatorSpec& spec, std::span<const double> values);

namespace reference {

// Serial kernels, kept as the oracle for the parallel ones.
double assemble_energy(const Mesh& mesh, const OperatorSpec& spec, std::span<const double> values);
std::vector<double> assemble_gradient(const Mesh& mesh, const OperatorSpec& spec, std::span<const double> values);

}  // namespace reference

/// Constant gradient of the linear interpolant on triangle t.
inline Vec2 triangle_gradient(const Triangle& t, std::span<const double> values) {
    return values[t.v[0]] * t.grad[0] + values[t.v[1]] * t.grad[1] + values[t.v[2]] * t.grad[2];
}

}  // namespace plap
