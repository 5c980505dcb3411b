#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>

#include "glr/errors.hpp"
#include "glr/generate.hpp"

namespace glr {

// Phi to full double precision via erfc; far more headroom than the 1e-12
// the inequality checks need.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Lognormal pricing kernel Z = exp(-pi W_T - pi^2 T / 2) of the standard
// diffusion market: unbounded above and not bounded away from zero, so no
// admissible kernel exists and digital gains blow the ratio up as eps -> 0.
struct BsDigitalSpec {
    double pi = 0.4;       // market price of risk, nonzero
    double maturity = 1.0; // T > 0
    double epsilon = 0.1;  // in (0,1)

    void validate() const {
        if (pi == 0.0 || !std::isfinite(pi)) fail(ErrorCode::BadSpec, "pi must be nonzero");
        if (!(maturity > 0.0)) fail(ErrorCode::BadSpec, "maturity must be positive");
        if (!(epsilon > 0.0 && epsilon < 1.0)) fail(ErrorCode::BadSpec, "epsilon must lie in (0,1)");
    }

    double sigma() const { return std::abs(pi) * std::sqrt(maturity); }
};

struct DigitalGainReport {
    double p_eps = 0.0;        // P(Z < eps)
    double c_eps = 0.0;        // cost E[Z; Z < eps]
    double ratio = 0.0;        // gain-loss ratio of the digital gain
    double lower_bound = 0.0;  // 1/eps - p_eps
};

// Digital bought on the cheap set {Z < eps}: cost c < eps p, and the gain
// X - c has ratio (1-c) p / (c (1-p)) > 1/eps - p.
inline DigitalGainReport bs_digital_gain(const BsDigitalSpec& spec) {
    spec.validate();
    double s = spec.sigma();
    DigitalGainReport rep;
    rep.p_eps = normal_cdf((std::log(spec.epsilon) + 0.5 * s * s) / s);
    rep.c_eps = normal_cdf((std::log(spec.epsilon) - 0.5 * s * s) / s);
    rep.ratio = (1.0 - rep.c_eps) * rep.p_eps / (rep.c_eps * (1.0 - rep.p_eps));
    rep.lower_bound = 1.0 / spec.epsilon - rep.p_eps;
    return rep;
}

struct MirrorGainReport {
    double q_eps = 0.0;        // P(Z > 1/eps)
    double b_eps = 0.0;        // cost E[Z; Z > 1/eps]
    double ratio = 0.0;        // gain-loss ratio of shorting the dear digital
    double lower_bound = 0.0;  // (1 - q_eps) / eps
};

// Mirror construction on the dear set {Z > 1/eps}: cost b > q/eps, and the
// short position b - Y has ratio b (1-q) / ((1-b) q) > (1-q)/eps.
inline MirrorGainReport bs_mirror_gain(const BsDigitalSpec& spec) {
    spec.validate();
    double s = spec.sigma();
    MirrorGainReport rep;
    rep.q_eps = normal_cdf((std::log(spec.epsilon) - 0.5 * s * s) / s);
    rep.b_eps = normal_cdf((std::log(spec.epsilon) + 0.5 * s * s) / s);
    rep.ratio = rep.b_eps * (1.0 - rep.q_eps) / ((1.0 - rep.b_eps) * rep.q_eps);
    rep.lower_bound = (1.0 - rep.q_eps) / spec.epsilon;
    return rep;
}

struct BsMonteCarlo {
    long samples = 0;
    double p_hat = 0.0, c_hat = 0.0, q_hat = 0.0, b_hat = 0.0;
    // Standard errors of the estimators, from the closed-form second moments.
    double p_se = 0.0, c_se = 0.0, q_se = 0.0, b_se = 0.0;
};

// Seeded sampling of the kernel itself; one pass estimates all four
// quantities of the two digital constructions.
inline BsMonteCarlo bs_monte_carlo(const BsDigitalSpec& spec, long samples, uint64_t seed) {
    spec.validate();
    std::mt19937_64 g(seed);
    double sT = std::sqrt(spec.maturity);
    double drift = -0.5 * spec.pi * spec.pi * spec.maturity;
    double cap = 1.0 / spec.epsilon;

    BsMonteCarlo mc;
    mc.samples = samples;
    for (long k = 0; k < samples; ++k) {
        double z = std::exp(-spec.pi * sT * normal_sample(g) + drift);
        if (z < spec.epsilon) {
            mc.p_hat += 1.0;
            mc.c_hat += z;
        }
        if (z > cap) {
            mc.q_hat += 1.0;
            mc.b_hat += z;
        }
    }
    mc.p_hat /= samples;
    mc.c_hat /= samples;
    mc.q_hat /= samples;
    mc.b_hat /= samples;

    double s = spec.sigma();
    double le = std::log(spec.epsilon);
    double p = normal_cdf((le + 0.5 * s * s) / s);
    double c = normal_cdf((le - 0.5 * s * s) / s);
    double q = c;
    double b = p;
    // E[Z^2; Z < a] = e^{s^2} Phi((ln a + s^2/2 - 2 s^2)/s) for our drift.
    double c2 = std::exp(s * s) * normal_cdf((le - 1.5 * s * s) / s);
    double b2 = std::exp(s * s) * (1.0 - normal_cdf((-le - 1.5 * s * s) / s));
    mc.p_se = std::sqrt(std::max(0.0, p * (1.0 - p)) / samples);
    mc.q_se = std::sqrt(std::max(0.0, q * (1.0 - q)) / samples);
    mc.c_se = std::sqrt(std::max(0.0, c2 - c * c) / samples);
    mc.b_se = std::sqrt(std::max(0.0, b2 - b * b) / samples);
    return mc;
}

}  // namespace glr
