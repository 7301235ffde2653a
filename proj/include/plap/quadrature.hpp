#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "plap/error.hpp"

namespace plap::quadrature {

struct Options {
    double rel_tol = 1e-12;
    double abs_tol = 1e-300;
    int max_intervals = 2000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    int evaluations = 0;
};

namespace detail {

// 15-point Kronrod nodes on [-1, 1] (nonnegative half) and weights, with the
// embedded 7-point Gauss weights at the odd-indexed nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo, hi, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod15(const F& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * pair;
        if (j % 2 == 1) gauss += kWg[j / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [lo, hi].
/// The integrand is never evaluated at the endpoints, so integrable endpoint
/// singularities are tolerated (slowly); callers with a known power-law
/// singularity should flatten it by a change of variables first.
/// Throws QuadratureError naming the worst subinterval when the interval
/// budget runs out.
template <class F>
Result integrate(const F& f, double lo, double hi, const Options& opt = {}) {
    if (lo == hi) return {};
    if (hi < lo) {
        Result r = integrate(f, hi, lo, opt);
        r.value = -r.value;
        return r;
    }

    std::priority_queue<detail::Segment> heap;
    const auto first = detail::gauss_kronrod15(f, lo, hi);
    heap.push(first);
    double total = first.value;
    double total_err = first.error;
    int evaluations = 15;

    auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };

    while (total_err > tolerance()) {
        if (static_cast<int>(heap.size()) >= opt.max_intervals) {
            const auto& worst = heap.top();
            std::ostringstream msg;
            msg.precision(17);
            msg << "quadrature did not converge: error estimate " << total_err << " > tolerance "
                << tolerance() << "; worst subinterval [" << worst.lo << ", " << worst.hi << "]";
            throw QuadratureError(msg.str(), worst.lo, worst.hi);
        }
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (mid <= worst.lo || mid >= worst.hi) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "quadrature subinterval [" << worst.lo << ", " << worst.hi
                << "] cannot be bisected further";
            throw QuadratureError(msg.str(), worst.lo, worst.hi);
        }
        const auto left = detail::gauss_kronrod15(f, worst.lo, mid);
        const auto right = detail::gauss_kronrod15(f, mid, worst.hi);
        evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from the leaves so the returned value carries no drift from the
    // running updates; sorting makes the order independent of heap layout.
    std::vector<detail::Segment> leaves;
    leaves.reserve(heap.size());
    while (!heap.empty()) {
        leaves.push_back(heap.top());
        heap.pop();
    }
    std::sort(leaves.begin(), leaves.end(),
              [](const auto& a, const auto& b) { return a.lo < b.lo; });
    Result r;
    for (const auto& s : leaves) {
        r.value += s.value;
        r.error += s.error;
    }
    r.intervals = static_cast<int>(leaves.size());
    r.evaluations = evaluations;
    return r;
}

}  // namespace plap::quadrature
