#include "plap/radial_barrier.hpp"

#include <cmath>
#include <sstream>

#include "plap/error.hpp"
#include "plap/quadrature.hpp"

namespace plap {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Exponent of tau in the envelope tau^{-(n-1)/(p-1)}, shifted by one:
// kappa = 1 - (n-1)/(p-1) = (p-n)/(p-1).
double kappa_of(const OperatorSpec& spec) { return (spec.p() - spec.n()) / (spec.p() - 1.0); }

void check_domain(const OperatorSpec& spec, double a, double s, double r) {
    if (!(a > 0.0) || !std::isfinite(a)) throw PreconditionError("radial barrier: a must be positive, got " + fmt(a));
    if (!(s >= 0.0) || !std::isfinite(s)) throw PreconditionError("radial barrier: s must be >= 0, got " + fmt(s));
    if (!(r >= s) || !std::isfinite(r))
        throw PreconditionError("radial barrier: r = " + fmt(r) + " must satisfy r >= s = " + fmt(s));
    if (s == 0.0 && !(spec.p() > spec.n()))
        throw PreconditionError("radial barrier: base radius s = 0 requires p > n (the integral diverges at 0)");
}

// int_s^r tau^{-(n-1)/(p-1)} dtau
double envelope_integral(const OperatorSpec& spec, double s, double r) {
    const double k = kappa_of(spec);
    if (k == 0.0) return std::log(r / s);
    return (std::pow(r, k) - std::pow(s, k)) / k;
}

}  // namespace

double radial_integral(const OperatorSpec& spec, double a, double s, double r) {
    check_domain(spec, a, s, r);
    if (r == s) return 0.0;
    const double n1 = spec.n() - 1.0;
    const double k = kappa_of(spec);
    quadrature::Options opt;
    opt.rel_tol = 1e-12;

    if (k == 0.0) {
        // tau = e^w turns the 1/tau behaviour of the p = n integrand into a
        // bounded one.
        auto g = [&](double w) {
            const double tau = std::exp(w);
            return spec.phi_inverse(a / std::pow(tau, n1)) * tau;
        };
        return quadrature::integrate(g, std::log(s), std::log(r), opt).value;
    }

    // sigma = tau^kappa maps tau^{-(n-1)/(p-1)} dtau to d sigma / kappa, so for
    // A constant the transformed integrand is exactly constant.
    const double inv_k = 1.0 / k;
    auto g = [&](double sigma) {
        const double tau = std::pow(sigma, inv_k);
        return spec.phi_inverse(a / std::pow(tau, n1)) * tau / (k * sigma);
    };
    const double lo = s == 0.0 ? 0.0 : std::pow(s, k);
    const double hi = std::pow(r, k);
    return quadrature::integrate(g, lo, hi, opt).value;
}

double barrier_value(const RadialBarrier& b, double r) {
    if (r < b.s) {
        if (r < 0.0) throw PreconditionError("barrier_value: negative radius " + fmt(r));
        return b.offset;
    }
    if (b.sign != 1 && b.sign != -1) throw PreconditionError("barrier_value: sign must be +1 or -1");
    return b.offset + b.sign * radial_integral(b.spec, b.a, b.s, r);
}

double barrier_value(const RadialBarrier& b, Vec2 x) { return barrier_value(b, norm(x - b.center)); }

Envelope envelope_bounds(const OperatorSpec& spec, double a, double s, double r) {
    check_domain(spec, a, s, r);
    if (r == s) return {};
    const double q = 1.0 / (spec.p() - 1.0);
    const double I = envelope_integral(spec, s, r);
    return {std::pow(a / spec.L_bound(), q) * I, std::pow(a / spec.delta(), q) * I};
}

double choose_a_small(const OperatorSpec& spec, double R, double eps, double s) {
    if (!(eps > 0.0)) throw PreconditionError("choose_a_small: eps must be positive");
    if (!(R > s)) throw PreconditionError("choose_a_small: R must exceed s");
    check_domain(spec, 1.0, s, R);
    const double I = envelope_integral(spec, s, R);
    double a = spec.delta() * std::pow(eps / I, spec.p() - 1.0);
    // v_a(R) -> 0 monotonically as a -> 0, so halving terminates.
    for (int k = 0; k < 4000; ++k) {
        if (a > 0.0 && radial_integral(spec, a, s, R) < eps) return a;
        a *= 0.5;
    }
    throw SolverError("choose_a_small: halving schedule underflowed");
}

double choose_a_large(const OperatorSpec& spec, double r0, double gap, double s) {
    if (!(gap > 0.0)) throw PreconditionError("choose_a_large: gap must be positive, got " + fmt(gap));
    if (!(r0 > s)) throw PreconditionError("choose_a_large: r0 must exceed s");
    check_domain(spec, 1.0, s, r0);
    const double I = envelope_integral(spec, s, r0);
    double a = spec.L_bound() * std::pow(gap / I, spec.p() - 1.0);
    for (int k = 0; k < 4000; ++k) {
        if (!std::isfinite(a)) break;
        if (radial_integral(spec, a, s, r0) >= gap) return a;
        a *= 2.0;
    }
    throw SolverError("choose_a_large: doubling schedule overflowed");
}

double psi_value(const OperatorSpec& spec, Vec2 center, double m_i, double a, int sign, Vec2 x, double s) {
    if (sign != 1 && sign != -1) throw PreconditionError("psi_value: sign must be +1 or -1");
    const double r = norm(x - center);
    if (r < s) return m_i;
    return m_i + sign * radial_integral(spec, a, s, r);
}

}  // namespace plap
