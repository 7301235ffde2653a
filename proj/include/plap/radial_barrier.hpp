#pragma once

#include "plap/operator_model.hpp"
#include "plap/vec2.hpp"

namespace plap {

/// Radial solution v_a(r) = int_s^r phi^{-1}(a / tau^{n-1}) dtau, optionally
/// shifted and reflected: value(r) = offset + sign * v_a(r).
/// For r < s the barrier is extended by its value at s.
struct RadialBarrier {
    OperatorSpec spec;
    double a = 1.0;
    double s = 0.0;
    Vec2 center{};
    double offset = 0.0;
    int sign = +1;
};

/// Closed-form envelope of v_a(r) - v_a(s) obtained from delta <= A <= L.
struct Envelope {
    double lower = 0.0;
    double upper = 0.0;
};

/// The unsigned integral int_s^r phi^{-1}(a / tau^{n-1}) dtau, computed to
/// relative tolerance 1e-12 after flattening the power-law behaviour of the
/// integrand. Requires a > 0, r >= s >= 0 and p > n when s = 0.
double radial_integral(const OperatorSpec& spec, double a, double s, double r);

double barrier_value(const RadialBarrier& b, double r);

/// Planar evaluation at |x - center|.
double barrier_value(const RadialBarrier& b, Vec2 x);

Envelope envelope_bounds(const OperatorSpec& spec, double a, double s, double r);

/// First member of the schedule a0, a0/2, a0/4, ... with v_a(R) < eps, where
/// a0 is the value for which the upper envelope at R equals eps.
double choose_a_small(const OperatorSpec& spec, double R, double eps, double s = 0.0);

/// First member of the schedule a0, 2 a0, 4 a0, ... with v_a(r0) >= gap, where
/// a0 is the value for which the lower envelope at r0 equals gap.
double choose_a_large(const OperatorSpec& spec, double r0, double gap, double s = 0.0);

/// m_i + sign * v_a(|x - center|).
double psi_value(const OperatorSpec& spec, Vec2 center, double m_i, double a, int sign, Vec2 x,
                 double s = 0.0);

}  // namespace plap
