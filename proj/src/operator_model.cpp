#include "plap/operator_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plap/error.hpp"
#include "plap/quadrature.hpp"

namespace plap {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// TableFamily

TableFamily::TableFamily(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.size() < 2 || knots_.size() != values_.size())
        throw ConfigError("table family needs at least two (t, A) pairs of equal length");
    for (std::size_t k = 0; k < knots_.size(); ++k) {
        if (!std::isfinite(knots_[k]) || !std::isfinite(values_[k]))
            throw ConfigError("table family entries must be finite");
        if (knots_[k] < 0.0) throw ConfigError("table family knots must be nonnegative");
        if (k > 0 && knots_[k] <= knots_[k - 1])
            throw ConfigError("table family knots must be strictly increasing");
    }

    const std::size_t m = knots_.size();
    std::vector<double> secant(m - 1);
    for (std::size_t k = 0; k + 1 < m; ++k)
        secant[k] = (values_[k + 1] - values_[k]) / (knots_[k + 1] - knots_[k]);

    // Zero end slopes keep A' continuous into the constant extrapolation.
    slopes_.assign(m, 0.0);
    for (std::size_t k = 1; k + 1 < m; ++k) {
        const double d0 = secant[k - 1];
        const double d1 = secant[k];
        if (d0 * d1 <= 0.0) continue;
        const double h0 = knots_[k] - knots_[k - 1];
        const double h1 = knots_[k + 1] - knots_[k];
        const double w0 = 2.0 * h1 + h0;
        const double w1 = h1 + 2.0 * h0;
        slopes_[k] = (w0 + w1) / (w0 / d0 + w1 / d1);
    }
}

std::size_t TableFamily::segment(double t) const {
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    return static_cast<std::size_t>(std::distance(knots_.begin(), it)) - 1;
}

double TableFamily::value(double t) const {
    if (t <= knots_.front()) return values_.front();
    if (t >= knots_.back()) return values_.back();
    const std::size_t k = segment(t);
    const double h = knots_[k + 1] - knots_[k];
    const double s = (t - knots_[k]) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * values_[k] + (s3 - 2 * s2 + s) * h * slopes_[k] +
           (-2 * s3 + 3 * s2) * values_[k + 1] + (s3 - s2) * h * slopes_[k + 1];
}

double TableFamily::derivative(double t) const {
    if (t <= knots_.front() || t >= knots_.back()) return 0.0;
    const std::size_t k = segment(t);
    const double h = knots_[k + 1] - knots_[k];
    const double s = (t - knots_[k]) / h;
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * values_[k] + (-6 * s2 + 6 * s) * values_[k + 1]) / h +
           (3 * s2 - 4 * s + 1) * slopes_[k] + (3 * s2 - 2 * s) * slopes_[k + 1];
}

std::string family_kind(const AFamily& family) {
    return std::visit(overloaded{[](const ConstantFamily&) { return std::string("constant"); },
                                 [](const RationalFamily&) { return std::string("rational"); },
                                 [](const TableFamily&) { return std::string("table"); }},
                      family);
}

// ---------------------------------------------------------------------------
// OperatorSpec

OperatorSpec::OperatorSpec(double p, int n, AFamily family, double delta, double L)
    : p_(p), n_(n), family_(std::move(family)), delta_(delta), L_(L) {
    if (p_ == 2.0 || p_ == 3.0 || p_ == 4.0) int_p_ = static_cast<int>(p_);
}

OperatorSpec OperatorSpec::with_exponent(double p) const {
    if (!(p > 1.0)) throw PreconditionError("exponent must exceed 1, got " + fmt(p));
    return OperatorSpec(p, n_, family_, delta_, L_);
}

double OperatorSpec::A(double t) const {
    return std::visit(overloaded{[](const ConstantFamily& f) { return f.value; },
                                 [t](const RationalFamily& f) { return f.base + f.slope * t / (1.0 + t); },
                                 [t](const TableFamily& f) { return f.value(t); }},
                      family_);
}

double OperatorSpec::A_prime(double t) const {
    return std::visit(overloaded{[](const ConstantFamily&) { return 0.0; },
                                 [t](const RationalFamily& f) { return f.slope / ((1.0 + t) * (1.0 + t)); },
                                 [t](const TableFamily& f) { return f.derivative(t); }},
                      family_);
}

double OperatorSpec::power(double t, double exponent) const {
    if (exponent == 1.0) return t;
    if (exponent == 2.0) return t * t;
    if (exponent == 3.0) return t * t * t;
    if (exponent == 0.0) return 1.0;
    return std::pow(t, exponent);
}

double OperatorSpec::phi(double t) const {
    if (t < 0.0) throw PreconditionError("phi: t must be nonnegative, got " + fmt(t));
    if (t == 0.0) return 0.0;
    return power(t, p_ - 1.0) * A(t);
}

double OperatorSpec::phi_prime(double t) const {
    if (t < 0.0) throw PreconditionError("phi_prime: t must be nonnegative, got " + fmt(t));
    if (t == 0.0) return p_ == 2.0 ? A(0.0) : 0.0;
    return (p_ - 1.0) * power(t, p_ - 2.0) * A(t) + power(t, p_ - 1.0) * A_prime(t);
}

double OperatorSpec::phi_inverse(double y) const { return plap::phi_inverse(*this, y, {}); }

double phi_inverse(const OperatorSpec& spec, double y, const InverseOptions& opt) {
    if (y < 0.0 || std::isnan(y)) throw PreconditionError("phi_inverse: y must be nonnegative, got " + fmt(y));
    if (y == 0.0) return 0.0;
    const double q = 1.0 / (spec.p() - 1.0);
    if (const auto* c = std::get_if<ConstantFamily>(&spec.family())) return std::pow(y / c->value, q);

    // The envelope delta t^{p-1} <= phi(t) <= L t^{p-1} brackets the root.
    double lo = std::pow(y / spec.L_bound(), q);
    double hi = std::pow(y / spec.delta(), q);
    double f_lo = spec.phi(lo) - y;
    double f_hi = spec.phi(hi) - y;
    for (int k = 0; f_lo > 0.0; ++k) {
        if (k >= opt.max_bracket_expansions)
            throw RootFindingError("phi_inverse: bracket expansion cap reached below y = " + fmt(y));
        hi = lo;
        f_hi = f_lo;
        lo *= 0.5;
        f_lo = spec.phi(lo) - y;
    }
    for (int k = 0; f_hi < 0.0; ++k) {
        if (k >= opt.max_bracket_expansions || !std::isfinite(hi))
            throw RootFindingError("phi_inverse: y = " + fmt(y) + " lies outside the range of phi");
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = spec.phi(hi) - y;
    }
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;

    // Secant steps, falling back to bisection whenever a step leaves the
    // bracket or fails to halve it.
    double width = hi - lo;
    for (int it = 0; it < opt.max_iterations; ++it) {
        if (hi - lo <= opt.rtol * hi) break;
        double x = lo - f_lo * (hi - lo) / (f_hi - f_lo);
        if (!(x > lo && x < hi) || (hi - lo) > 0.5 * width) x = 0.5 * (lo + hi);
        width = hi - lo;
        const double fx = spec.phi(x) - y;
        if (fx == 0.0) return x;
        if (fx < 0.0) {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        // Secant converging from one side leaves the far endpoint fixed;
        // probe just past the estimate to collapse the bracket.
        if (hi - lo > opt.rtol * hi) {
            const double guess = lo - f_lo * (hi - lo) / (f_hi - f_lo);
            const double nudge = 0.5 * opt.rtol * guess;
            const double probe = fx < 0.0 ? guess + nudge : guess - nudge;
            if (probe > lo && probe < hi) {
                const double fp = spec.phi(probe) - y;
                if (fp == 0.0) return probe;
                if (fp < 0.0) {
                    lo = probe;
                    f_lo = fp;
                } else {
                    hi = probe;
                    f_hi = fp;
                }
            }
        }
    }
    if (hi - lo > opt.rtol * hi)
        throw RootFindingError("phi_inverse: no convergence for y = " + fmt(y));
    return std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
}

double OperatorSpec::flux_scale(double t2) const {
    if (const auto* c = std::get_if<ConstantFamily>(&family_)) {
        switch (int_p_) {
            case 2: return c->value;
            case 3: return c->value * std::sqrt(t2);
            case 4: return c->value * t2;
            default: break;
        }
        if (t2 == 0.0) return 0.0;
        return c->value * std::pow(t2, 0.5 * (p_ - 2.0));
    }
    if (t2 == 0.0) return p_ == 2.0 ? A(0.0) : 0.0;
    const double t = std::sqrt(t2);
    return power(t, p_ - 2.0) * A(t);
}

Vec2 OperatorSpec::flux(Vec2 eta) const {
    const double t2 = norm2(eta);
    if (t2 == 0.0) return {};
    return flux_scale(t2) * eta;
}

Mat2 OperatorSpec::flux_jacobian(Vec2 eta) const {
    const double t2 = norm2(eta);
    if (t2 == 0.0) {
        const double d = p_ == 2.0 ? A(0.0) : 0.0;
        return {d, 0.0, 0.0, d};
    }
    const double t = std::sqrt(t2);
    const double s = flux_scale(t2);
    const double c = (phi_prime(t) - s) / t2;
    return {s + c * eta.x * eta.x, c * eta.x * eta.y, c * eta.y * eta.x, s + c * eta.y * eta.y};
}

double OperatorSpec::energy_density(double t) const {
    if (t < 0.0) throw PreconditionError("energy_density: t must be nonnegative, got " + fmt(t));
    return energy_density_sq(t * t);
}

double OperatorSpec::energy_density_sq(double t2) const {
    if (t2 == 0.0) return 0.0;
    if (const auto* c = std::get_if<ConstantFamily>(&family_)) {
        switch (int_p_) {
            case 2: return 0.5 * c->value * t2;
            case 3: return c->value * t2 * std::sqrt(t2) / 3.0;
            case 4: return 0.25 * c->value * t2 * t2;
            default: return c->value * std::pow(t2, 0.5 * p_) / p_;
        }
    }
    const double t = std::sqrt(t2);
    quadrature::Options opt;
    opt.rel_tol = 1e-13;
    return quadrature::integrate([this](double s) { return phi(s); }, 0.0, t, opt).value;
}

// ---------------------------------------------------------------------------
// make_operator

OperatorSpec make_operator(double p, int n, AFamily family, const ValidationGrid& grid) {
    if (!std::isfinite(p) || !(p > 1.0)) throw ConfigError("exponent p must be finite and > 1, got " + fmt(p));
    if (n < 2) throw ConfigError("dimension n must be >= 2, got " + std::to_string(n));

    double delta = 0.0;
    double L = 0.0;
    double a0 = 0.0;
    std::visit(overloaded{[&](const ConstantFamily& f) {
                              if (!std::isfinite(f.value)) throw ConfigError("constant A must be finite");
                              a0 = delta = L = f.value;
                          },
                          [&](const RationalFamily& f) {
                              if (!std::isfinite(f.base) || !std::isfinite(f.slope))
                                  throw ConfigError("rational A parameters must be finite");
                              a0 = f.base;
                              delta = std::min(f.base, f.base + f.slope);
                              L = std::max(f.base, f.base + f.slope);
                          },
                          [&](const TableFamily& f) {
                              a0 = f.value(0.0);
                              const auto [mn, mx] = std::minmax_element(f.values().begin(), f.values().end());
                              delta = *mn;
                              L = *mx;
                          }},
               family);

    if (!(a0 > 0.0)) throw HypothesisError("(ii)", "A(0) = " + fmt(a0) + " must be positive");

    const int points = std::max(grid.points, 1000);
    const double log_lo = std::log(grid.t_min);
    const double log_hi = std::log(grid.t_max);
    auto grid_t = [&](int k) { return std::exp(log_lo + (log_hi - log_lo) * k / (points - 1)); };

    const OperatorSpec spec(p, n, std::move(family), delta, L);

    if (!(delta > 0.0)) {
        double sup_phi = 0.0;
        for (int k = 0; k < points; ++k) sup_phi = std::max(sup_phi, spec.phi(grid_t(k)));
        throw HypothesisError("(iv)", "A is not bounded below by a positive constant (inf A = " + fmt(delta) +
                                          "); phi(t) = t^{p-1} A(t) stays below " + fmt(sup_phi) +
                                          " on the sample grid, so phi^{-1} is not defined on all of [0, inf)");
    }

    const double slack = 1e-14 * L;
    double prev_t = 0.0;
    double prev_phi = 0.0;
    for (int k = 0; k < points; ++k) {
        const double t = grid_t(k);
        const double a = spec.A(t);
        if (!std::isfinite(a)) throw HypothesisError("(iv)", "A(" + fmt(t) + ") is not finite");
        if (a < delta - slack || a > L + slack)
            throw HypothesisError("(iv)", "A(" + fmt(t) + ") = " + fmt(a) + " leaves [" + fmt(delta) + ", " +
                                              fmt(L) + "]");
        const double ph = spec.phi(t);
        if (!(ph > prev_phi))
            throw HypothesisError("(iii)", "t^{p-1} A(t) is not strictly increasing: phi(" + fmt(prev_t) +
                                               ") = " + fmt(prev_phi) + " >= phi(" + fmt(t) + ") = " + fmt(ph));
        prev_t = t;
        prev_phi = ph;
    }
    return spec;
}

}  // namespace plap
