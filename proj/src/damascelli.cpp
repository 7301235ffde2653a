#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "plap/error.hpp"
#include "plap/operator_model.hpp"

namespace plap {

namespace {

constexpr double kSlack = 1e-12;

struct SampleResult {
    double ratio_lipschitz = 0.0;  // max over the pair and the two (0, eta) pairs
    int lipschitz_which = 0;
    double ratio_monotone = 0.0;  // min over the same three pairs
    int monotone_which = 0;
    double gamma = 0.0;
    double Gamma = 0.0;
    bool positive = true;
};

std::pair<Vec2, Vec2> pair_of(int which, Vec2 e1, Vec2 e2) {
    switch (which) {
        case 1: return {Vec2{}, e1};
        case 2: return {Vec2{}, e2};
        default: return {e1, e2};
    }
}

// Central finite-difference Jacobian of the flux with step 1e-6 |eta|.
Mat2 fd_jacobian(const OperatorSpec& spec, Vec2 eta) {
    const double step = 1e-6 * norm(eta);
    const Vec2 fxp = spec.flux({eta.x + step, eta.y});
    const Vec2 fxm = spec.flux({eta.x - step, eta.y});
    const Vec2 fyp = spec.flux({eta.x, eta.y + step});
    const Vec2 fym = spec.flux({eta.x, eta.y - step});
    const double inv = 0.5 / step;
    // J(j, i) = d flux_j / d eta_i
    return {(fxp.x - fxm.x) * inv, (fyp.x - fym.x) * inv, (fxp.y - fxm.y) * inv, (fyp.y - fym.y) * inv};
}

void ellipticity(const OperatorSpec& spec, Vec2 eta, double& gamma, double& Gamma) {
    const Mat2 J = fd_jacobian(spec, eta);
    const double scale = std::pow(norm(eta), spec.p() - 2.0);
    Gamma = (std::abs(J.xx) + std::abs(J.xy) + std::abs(J.yx) + std::abs(J.yy)) / scale;
    // smallest eigenvalue of the symmetric part
    const double a = J.xx;
    const double d = J.yy;
    const double b = 0.5 * (J.xy + J.yx);
    const double mean = 0.5 * (a + d);
    const double rad = std::hypot(0.5 * (a - d), b);
    gamma = (mean - rad) / scale;
}

}  // namespace

DamascelliReport verify_damascelli(const OperatorSpec& spec, std::int64_t sample_count, std::uint64_t seed) {
    const double p = spec.p();
    if (p < 2.0)
        throw PreconditionError("verify_damascelli requires p >= 2 (the p >= 2 inequality), got p = " +
                                std::to_string(p));
    if (sample_count <= 0) throw PreconditionError("verify_damascelli: sample_count must be positive");

    // Samples are drawn serially so the set is independent of the thread count.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_mag(-4.0, 4.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const auto n = static_cast<std::size_t>(sample_count);
    std::vector<Vec2> eta1(n), eta2(n);
    auto draw = [&] {
        const double r = std::pow(10.0, log_mag(rng));
        const double th = angle(rng);
        return Vec2{r * std::cos(th), r * std::sin(th)};
    };
    for (std::size_t k = 0; k < n; ++k) {
        eta1[k] = draw();
        eta2[k] = draw();
    }

    auto lipschitz_ratio = [&](Vec2 a, Vec2 b) {
        const Vec2 df = spec.flux(b) - spec.flux(a);
        return norm(df) / (std::pow(norm(a) + norm(b), p - 2.0) * norm(b - a));
    };
    auto monotone_ratio = [&](Vec2 a, Vec2 b) {
        const Vec2 df = spec.flux(b) - spec.flux(a);
        const Vec2 de = b - a;
        return dot(df, de) / (std::pow(norm(a) + norm(b), p - 2.0) * norm2(de));
    };

    std::vector<SampleResult> results(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < sample_count; ++k) {
        const Vec2 e1 = eta1[k];
        const Vec2 e2 = eta2[k];
        SampleResult r;
        const double l[3] = {lipschitz_ratio(e1, e2), lipschitz_ratio({}, e1), lipschitz_ratio({}, e2)};
        const double m[3] = {monotone_ratio(e1, e2), monotone_ratio({}, e1), monotone_ratio({}, e2)};
        r.ratio_lipschitz = l[0];
        r.ratio_monotone = m[0];
        for (int w = 1; w < 3; ++w) {
            if (l[w] > r.ratio_lipschitz) {
                r.ratio_lipschitz = l[w];
                r.lipschitz_which = w;
            }
            if (m[w] < r.ratio_monotone) {
                r.ratio_monotone = m[w];
                r.monotone_which = w;
            }
        }
        double g1, G1, g2, G2;
        ellipticity(spec, e1, g1, G1);
        ellipticity(spec, e2, g2, G2);
        r.gamma = std::min(g1, g2);
        r.Gamma = std::max(G1, G2);
        r.positive = m[0] > 0.0 && m[1] > 0.0 && m[2] > 0.0 && r.gamma > 0.0;
        results[k] = r;
    }

    DamascelliReport rep;
    rep.sample_count = sample_count;
    rep.c1_est = -1.0;
    rep.c2_est = std::numeric_limits<double>::infinity();
    rep.gamma_est = std::numeric_limits<double>::infinity();
    rep.Gamma_est = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& r = results[k];
        if (!r.positive) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "positivity failed at sample " << k << ": eta1 = (" << eta1[k].x << ", " << eta1[k].y
                << "), eta2 = (" << eta2[k].x << ", " << eta2[k].y << "), monotone ratio " << r.ratio_monotone
                << ", ellipticity " << r.gamma;
            throw VerificationError(msg.str());
        }
        if (r.ratio_lipschitz > rep.c1_est) {
            rep.c1_est = r.ratio_lipschitz;
            rep.c1_pair = pair_of(r.lipschitz_which, eta1[k], eta2[k]);
        }
        if (r.ratio_monotone < rep.c2_est) {
            rep.c2_est = r.ratio_monotone;
            rep.worst_case_pair = pair_of(r.monotone_which, eta1[k], eta2[k]);
        }
        rep.gamma_est = std::min(rep.gamma_est, r.gamma);
        rep.Gamma_est = std::max(rep.Gamma_est, r.Gamma);
    }

    // Check all five inequalities at every sample with the reported constants.
    const double c1 = rep.c1_est * (1.0 + kSlack);
    const double c2 = rep.c2_est * (1.0 - kSlack);
    std::int64_t violations = 0;
#pragma omp parallel for reduction(+ : violations) schedule(static)
    for (std::int64_t k = 0; k < sample_count; ++k) {
        const Vec2 e1 = eta1[k];
        const Vec2 e2 = eta2[k];
        const Vec2 f1 = spec.flux(e1);
        const Vec2 f2 = spec.flux(e2);
        const Vec2 df = f2 - f1;
        const Vec2 de = e2 - e1;
        const double sum_pow = std::pow(norm(e1) + norm(e2), p - 2.0);
        bool ok = norm(df) <= c1 * sum_pow * norm(de);
        ok = ok && dot(df, de) >= c2 * sum_pow * norm2(de);
        for (const auto& [e, f] : {std::pair{e1, f1}, std::pair{e2, f2}}) {
            ok = ok && norm(f) <= c1 * std::pow(norm(e), p - 1.0);
            ok = ok && dot(f, e) >= c2 * std::pow(norm(e), p);
        }
        ok = ok && dot(df, de) >= c2 * std::pow(norm(de), p);
        if (!ok) ++violations;
    }
    rep.violations = violations;
    return rep;
}

}  // namespace plap
