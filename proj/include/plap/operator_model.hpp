#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "plap/vec2.hpp"

namespace plap {

/// A(t) = value.
struct ConstantFamily {
    double value = 1.0;
};

/// A(t) = base + slope * t / (1 + t); ranges over [base, base + slope) for
/// slope >= 0 and (base + slope, base] otherwise.
struct RationalFamily {
    double base = 1.0;
    double slope = 1.0;
};

/// A tabulated on increasing knots, interpolated by monotone piecewise cubic
/// Hermite (Fritsch-Carlson), held constant outside the knot range.
class TableFamily {
public:
    TableFamily(std::vector<double> knots, std::vector<double> values);

    double value(double t) const;
    double derivative(double t) const;

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t segment(double t) const;

    std::vector<double> knots_;
    std::vector<double> values_;
    std::vector<double> slopes_;
};

using AFamily = std::variant<ConstantFamily, RationalFamily, TableFamily>;

std::string family_kind(const AFamily& family);

/// Controls the sampled validation performed by make_operator.
struct ValidationGrid {
    double t_min = 1e-8;
    double t_max = 1e8;
    int points = 2001;
};

/// The isotropic operator div(|grad v|^{p-2} A(|grad v|) grad v) together with
/// its scalar profile phi(t) = t^{p-1} A(t), the inverse of phi, and the
/// energy density G with G' = phi. Immutable; all members are thread-safe.
class OperatorSpec {
public:
    double p() const { return p_; }
    int n() const { return n_; }
    double delta() const { return delta_; }
    double L_bound() const { return L_; }
    const AFamily& family() const { return family_; }
    bool is_constant() const { return std::holds_alternative<ConstantFamily>(family_); }

    double A(double t) const;
    double A_prime(double t) const;

    double phi(double t) const;
    double phi_prime(double t) const;
    double phi_inverse(double y) const;

    /// phi(t)/t expressed through t^2, i.e. |eta|^{p-2} A(|eta|), with the
    /// convention 0 at eta = 0 for p > 2. Hot path of the assembly kernels.
    double flux_scale(double t2) const;

    Vec2 flux(Vec2 eta) const;

    /// Analytic Jacobian of flux; used for diagonal scaling in the solver.
    Mat2 flux_jacobian(Vec2 eta) const;

    double energy_density(double t) const;
    /// Same as energy_density(sqrt(t2)), with integer-power fast paths.
    double energy_density_sq(double t2) const;

    /// Same family at another exponent, without revalidation. Used for the
    /// p-continuation stages of the solver.
    OperatorSpec with_exponent(double p) const;

private:
    friend OperatorSpec make_operator(double, int, AFamily, const ValidationGrid&);
    OperatorSpec(double p, int n, AFamily family, double delta, double L);

    double power(double t, double exponent) const;

    double p_;
    int n_;
    AFamily family_;
    double delta_;
    double L_;
    int int_p_ = 0;  // p when p is one of 2, 3, 4; else 0
};

/// Builds and validates an operator against hypotheses (ii)-(iv) on a
/// log-spaced grid. Throws HypothesisError naming the failing hypothesis and
/// ConfigError for malformed parameters.
OperatorSpec make_operator(double p, int n, AFamily family, const ValidationGrid& grid = {});

/// Options for phi_inverse; rtol applies to the root in t.
struct InverseOptions {
    double rtol = 1e-12;
    int max_bracket_expansions = 64;
    int max_iterations = 200;
};

double phi_inverse(const OperatorSpec& spec, double y, const InverseOptions& opt);

// Structure constants of the flux, estimated by sampling.
struct DamascelliReport {
    double c1_est = 0.0;
    double c2_est = 0.0;
    double gamma_est = 0.0;
    double Gamma_est = 0.0;
    std::int64_t sample_count = 0;
    /// Pair realising c2_est (the tightest monotonicity ratio).
    std::pair<Vec2, Vec2> worst_case_pair{};
    /// Pair realising c1_est.
    std::pair<Vec2, Vec2> c1_pair{};
    /// Count of sampled pairs violating any of the five inequalities with the
    /// reported constants (relative slack 1e-12).
    std::int64_t violations = 0;
};

DamascelliReport verify_damascelli(const OperatorSpec& spec, std::int64_t sample_count,
                                   std::uint64_t seed);

}  // namespace plap
