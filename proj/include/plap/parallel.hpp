#pragma once

#include <cstddef>
#include <span>

namespace plap::parallel {

/// Block length for deterministic reductions. Fixed so that the summation
/// order does not depend on the number of threads.
inline constexpr std::size_t kReductionBlock = 4096;

void set_num_threads(int n);
int max_threads();

/// Sum of a[i] * b[i], reduced blockwise in a thread-count independent order.
double dot(std::span<const double> a, std::span<const double> b);

/// max |a[i]|; exact, so ordering is irrelevant.
double inf_norm(std::span<const double> a);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

}  // namespace plap::parallel
