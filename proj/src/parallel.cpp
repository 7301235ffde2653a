#include "plap/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace plap::parallel {

void set_num_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

double dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const auto blocks = static_cast<std::int64_t>((n + kReductionBlock - 1) / kReductionBlock);
    if (blocks <= 1) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    }
    std::vector<double> partial(static_cast<std::size_t>(blocks));
#pragma omp parallel for schedule(static)
    for (std::int64_t blk = 0; blk < blocks; ++blk) {
        const std::size_t lo = static_cast<std::size_t>(blk) * kReductionBlock;
        const std::size_t hi = std::min(n, lo + kReductionBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
        partial[blk] = s;
    }
    double s = 0.0;
    for (double v : partial) s += v;
    return s;
}

double inf_norm(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace plap::parallel
