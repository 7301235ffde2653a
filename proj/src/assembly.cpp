#include "plap/assembly.hpp"

#include <cstdint>

#include "plap/error.hpp"

namespace plap {

Assembler::Assembler(const Mesh& mesh, const OperatorSpec& spec)
    : mesh_(mesh), spec_(spec), tri_energy_(mesh.triangles().size()), tri_contrib_(3 * mesh.triangles().size()) {}

double Assembler::energy(std::span<const double> values) {
    const auto& tris = mesh_.triangles();
    const auto nt = static_cast<std::int64_t>(tris.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < nt; ++t) {
        const Vec2 g = triangle_gradient(tris[t], values);
        tri_energy_[t] = tris[t].area * spec_.energy_density_sq(norm2(g));
    }
    double e = 0.0;
    for (double v : tri_energy_) e += v;
    return e;
}

void Assembler::gather(std::span<double> out) const {
    const auto& offsets = mesh_.incidence_offsets();
    const auto& inc = mesh_.incidences();
    const auto nf = static_cast<std::int64_t>(mesh_.num_free());
    if (static_cast<std::int64_t>(out.size()) != nf) throw PreconditionError("gradient buffer has wrong size");
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < nf; ++k) {
        double acc = 0.0;
        for (int q = offsets[k]; q < offsets[k + 1]; ++q) acc += tri_contrib_[inc[q]];
        out[k] = acc;
    }
}

void Assembler::gradient(std::span<const double> values, std::span<double> grad_free) {
    const auto& tris = mesh_.triangles();
    const auto nt = static_cast<std::int64_t>(tris.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < nt; ++t) {
        const Triangle& tri = tris[t];
        const Vec2 g = triangle_gradient(tri, values);
        const Vec2 f = spec_.flux_scale(norm2(g)) * g;
        for (int l = 0; l < 3; ++l) tri_contrib_[3 * t + l] = tri.area * dot(f, tri.grad[l]);
    }
    gather(grad_free);
}

double Assembler::energy_and_gradient(std::span<const double> values, std::span<double> grad_free) {
    const auto& tris = mesh_.triangles();
    const auto nt = static_cast<std::int64_t>(tris.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < nt; ++t) {
        const Triangle& tri = tris[t];
        const Vec2 g = triangle_gradient(tri, values);
        const double t2 = norm2(g);
        tri_energy_[t] = tri.area * spec_.energy_density_sq(t2);
        const Vec2 f = spec_.flux_scale(t2) * g;
        for (int l = 0; l < 3; ++l) tri_contrib_[3 * t + l] = tri.area * dot(f, tri.grad[l]);
    }
    gather(grad_free);
    double e = 0.0;
    for (double v : tri_energy_) e += v;
    return e;
}

void Assembler::hessian_diagonal(std::span<const double> values, std::span<double> diag_free) {
    const auto& tris = mesh_.triangles();
    const auto nt = static_cast<std::int64_t>(tris.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < nt; ++t) {
        const Triangle& tri = tris[t];
        const Mat2 J = spec_.flux_jacobian(triangle_gradient(tri, values));
        for (int l = 0; l < 3; ++l) {
            const Vec2 b = tri.grad[l];
            const Vec2 Jb{J.xx * b.x + J.xy * b.y, J.yx * b.x + J.yy * b.y};
            tri_contrib_[3 * t + l] = tri.area * dot(b, Jb);
        }
    }
    gather(diag_free);
}

double assemble_energy(const Mesh& mesh, const OperatorSpec& spec, std::span<const double> values) {
    return Assembler(mesh, spec).energy(values);
}

std::vector<double> assemble_gradient(const Mesh& mesh, const OperatorSpec& spec, std::span<const double> values) {
    std::vector<double> g(mesh.num_free());
    Assembler(mesh, spec).gradient(values, g);
    return g;
}

}  // namespace plap
