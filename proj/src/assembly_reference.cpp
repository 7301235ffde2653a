#include "plap/assembly.hpp"

namespace plap::reference {

double assemble_energy(const Mesh& mesh, const OperatorSpec& spec, std::span<const double> values) {
    double e = 0.0;
    for (const Triangle& tri : mesh.triangles()) {
        const Vec2 g = values[tri.v[0]] * tri.grad[0] + values[tri.v[1]] * tri.grad[1] + values[tri.v[2]] * tri.grad[2];
        e += tri.area * spec.energy_density_sq(g.x * g.x + g.y * g.y);
    }
    return e;
}

std::vector<double> assemble_gradient(const Mesh& mesh, const OperatorSpec& spec, std::span<const double> values) {
    std::vector<double> grad(mesh.num_free(), 0.0);
    for (const Triangle& tri : mesh.triangles()) {
        const Vec2 g = values[tri.v[0]] * tri.grad[0] + values[tri.v[1]] * tri.grad[1] + values[tri.v[2]] * tri.grad[2];
        const Vec2 f = spec.flux_scale(g.x * g.x + g.y * g.y) * g;
        for (int l = 0; l < 3; ++l) {
            const int k = mesh.free_index(tri.v[l]);
            if (k >= 0) grad[k] += tri.area * (f.x * tri.grad[l].x + f.y * tri.grad[l].y);
        }
    }
    return grad;
}

}  // namespace plap::reference
