#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hjgames/errors.hpp"

namespace hjgames {

/// Terminal-value scalar Riccati equation
///   p' + alpha p + beta p^2 + gamma = 0,  p(T) = g.
struct RiccatiProblem {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double g = 0.0;
    double T = 1.0;

    void validate() const {
        if (!(T > 0.0)) throw std::invalid_argument("RiccatiProblem: T must be > 0");
        for (double v : {alpha, beta, gamma, g, T})
            if (!std::isfinite(v)) throw std::invalid_argument("RiccatiProblem: coefficients must be finite");
    }

    double discriminant() const { return alpha * alpha - 4.0 * beta * gamma; }
    /// 2*beta*g + alpha, the quantity every blow-up condition pivots on.
    double pivot() const { return 2.0 * beta * g + alpha; }
};

enum class RiccatiCase {
    LinearBetaZero,          // beta = 0: linear ODE, global solution
    DiscZeroConstant,        // disc = 0, pivot = 0: constant solution
    DiscZeroRational,        // disc = 0, pivot != 0: rational solution with a pole
    DiscNegativeTan,         // disc < 0: tangent solution, always blows up eventually
    DiscPositiveConstant,    // disc > 0, constant-solution condition: global
    DiscPositiveExponential, // disc > 0, generic: exponential relation
};

inline const char* to_string(RiccatiCase c) {
    switch (c) {
        case RiccatiCase::LinearBetaZero: return "LinearBetaZero";
        case RiccatiCase::DiscZeroConstant: return "DiscZeroConstant";
        case RiccatiCase::DiscZeroRational: return "DiscZeroRational";
        case RiccatiCase::DiscNegativeTan: return "DiscNegativeTan";
        case RiccatiCase::DiscPositiveConstant: return "DiscPositiveConstant";
        case RiccatiCase::DiscPositiveExponential: return "DiscPositiveExponential";
    }
    return "?";
}

struct RiccatiClassification {
    RiccatiCase case_tag = RiccatiCase::LinearBetaZero;
    std::optional<double> kappa;  // sqrt(|disc|) / (2|beta|), absent when beta = 0
    bool solvable_all_T = true;
    /// Largest horizon before blow-up; +inf when globally solvable. When
    /// finite, T = max_horizon itself already blows up (the pole reaches
    /// t = 0; the supremum is not attained).
    double max_horizon = std::numeric_limits<double>::infinity();
};

/// Global-solvability test and full case analysis. The equation is
/// solvable on [0, T] for every T > 0 iff beta = 0, or
///   disc >= 0  and  2 beta g + alpha <= sqrt(disc).
inline RiccatiClassification classify(const RiccatiProblem& prob) {
    prob.validate();
    RiccatiClassification out;
    const double beta = prob.beta;
    if (beta == 0.0) {
        out.case_tag = RiccatiCase::LinearBetaZero;
        return out;
    }
    const double disc = prob.discriminant();
    const double pivot = prob.pivot();
    const double kappa = std::sqrt(std::abs(disc)) / (2.0 * std::abs(beta));
    out.kappa = kappa;

    if (disc == 0.0) {
        if (pivot == 0.0) {
            out.case_tag = RiccatiCase::DiscZeroConstant;
        } else {
            out.case_tag = RiccatiCase::DiscZeroRational;
            out.solvable_all_T = pivot < 0.0;
            if (pivot > 0.0) out.max_horizon = 2.0 / pivot;
        }
        return out;
    }
    if (disc < 0.0) {
        out.case_tag = RiccatiCase::DiscNegativeTan;
        out.solvable_all_T = false;
        // tan argument kappa*beta*(T - t) + atan(pivot / (2 kappa beta))
        // must stay inside (-pi/2, pi/2); the bound binds at t = 0.
        const double offset = std::atan(pivot / (2.0 * kappa * beta));
        const double edge = beta > 0.0 ? 0.5 * M_PI : -0.5 * M_PI;
        out.max_horizon = (edge - offset) / (kappa * beta);
        return out;
    }
    // disc > 0
    const double twokb = 2.0 * kappa * beta;
    if ((pivot - twokb) * (pivot + twokb) == 0.0) {
        out.case_tag = RiccatiCase::DiscPositiveConstant;
        return out;
    }
    out.case_tag = RiccatiCase::DiscPositiveExponential;
    out.solvable_all_T = pivot - std::sqrt(disc) <= 0.0;
    if (!out.solvable_all_T)
        out.max_horizon = std::log((pivot + twokb) / (pivot - twokb)) / twokb;
    return out;
}

/// Exact solution for the matching case. For beta = 0 the formula is the
/// standard linear one (cross-checked against the numeric integrator by
/// the tests before it is used as an oracle anywhere else):
///   alpha != 0: p(t) = (g + gamma/alpha) e^{alpha (T-t)} - gamma/alpha,
///   alpha == 0: p(t) = g + gamma (T-t).
inline double closed_form(const RiccatiProblem& prob, double t) {
    const RiccatiClassification cls = classify(prob);
    if (!(t >= 0.0 && t <= prob.T)) throw std::invalid_argument("closed_form: t outside [0, T]");
    if (!cls.solvable_all_T && prob.T - t >= cls.max_horizon)
        throw OutsideValidityWindow("closed_form: t precedes the blow-up horizon");

    const double span = prob.T - t;
    const double beta = prob.beta;
    const double pivot = prob.pivot();
    switch (cls.case_tag) {
        case RiccatiCase::LinearBetaZero:
            if (prob.alpha == 0.0) return prob.g + prob.gamma * span;
            return (prob.g + prob.gamma / prob.alpha) * std::exp(prob.alpha * span) -
                   prob.gamma / prob.alpha;
        case RiccatiCase::DiscZeroConstant:
            return -prob.alpha / (2.0 * beta);
        case RiccatiCase::DiscZeroRational: {
            const double denom = 2.0 * beta - beta * pivot * span;
            if (std::abs(denom) < 1e-300) throw OutsideValidityWindow("closed_form: rational pole");
            return -prob.alpha / (2.0 * beta) + pivot / denom;
        }
        case RiccatiCase::DiscNegativeTan: {
            const double kappa = *cls.kappa;
            const double arg = kappa * beta * span + std::atan(pivot / (2.0 * kappa * beta));
            if (std::abs(arg) >= 0.5 * M_PI) throw OutsideValidityWindow("closed_form: tangent window");
            return -prob.alpha / (2.0 * beta) + kappa * std::tan(arg);
        }
        case RiccatiCase::DiscPositiveConstant: {
            const double kappa = *cls.kappa;
            const double base = -prob.alpha / (2.0 * beta);
            // pivot = +-2 kappa beta selects which constant branch g sits on.
            return std::abs(prob.g - (base + kappa)) <= std::abs(prob.g - (base - kappa))
                       ? base + kappa
                       : base - kappa;
        }
        case RiccatiCase::DiscPositiveExponential: {
            const double kappa = *cls.kappa;
            const double twokb = 2.0 * kappa * beta;
            const double ratio = (pivot - twokb) / (pivot + twokb);
            const double e = std::exp(twokb * span) * ratio;
            if (std::abs(1.0 - e) < 1e-12)
                throw OutsideValidityWindow("closed_form: exponential relation degenerate");
            return -prob.alpha / (2.0 * beta) + kappa * (1.0 + e) / (1.0 - e);
        }
    }
    throw Error("closed_form: unreachable");
}

struct RiccatiNumericResult {
    std::vector<double> times;   // ascending in t, last entry is T
    std::vector<double> values;  // p at those times
    bool blew_up = false;
    std::optional<double> blowup_time;  // t where |p| crossed the threshold
};

/// Backward adaptive integration of the Riccati equation from (T, g) to
/// t = 0 with an embedded 4(5) pair. Declares blow-up when |p| crosses
/// the threshold or the step collapses below 1e-12 while |p'| grows.
inline RiccatiNumericResult integrate_numeric(const RiccatiProblem& prob,
                                              double blowup_threshold = 1e8) {
    prob.validate();
    if (!(blowup_threshold > 0.0))
        throw std::invalid_argument("integrate_numeric: threshold must be > 0");

    // In tau = T - t the equation becomes dp/dtau = alpha p + beta p^2 + gamma.
    auto f = [&](double p) { return prob.alpha * p + prob.beta * p * p + prob.gamma; };

    // Cash-Karp 4(5) coefficients.
    static constexpr double b21 = 1.0 / 5.0;
    static constexpr double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
    static constexpr double b41 = 3.0 / 10.0, b42 = -9.0 / 10.0, b43 = 6.0 / 5.0;
    static constexpr double b51 = -11.0 / 54.0, b52 = 5.0 / 2.0, b53 = -70.0 / 27.0, b54 = 35.0 / 27.0;
    static constexpr double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0, b63 = 575.0 / 13824.0,
                            b64 = 44275.0 / 110592.0, b65 = 253.0 / 4096.0;
    static constexpr double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0,
                            c6 = 512.0 / 1771.0;
    static constexpr double d1 = 2825.0 / 27648.0, d3 = 18575.0 / 48384.0, d4 = 13525.0 / 55296.0,
                            d5 = 277.0 / 14336.0, d6 = 1.0 / 4.0;

    const double atol = 1e-12, rtol = 1e-10, h_floor = 1e-12;
    double tau = 0.0, p = prob.g;
    double h = std::min(1e-3, prob.T / 16.0);

    RiccatiNumericResult out;
    out.times.push_back(prob.T);
    out.values.push_back(p);

    while (tau < prob.T) {
        h = std::min(h, prob.T - tau);
        const double k1 = f(p);
        const double k2 = f(p + h * b21 * k1);
        const double k3 = f(p + h * (b31 * k1 + b32 * k2));
        const double k4 = f(p + h * (b41 * k1 + b42 * k2 + b43 * k3));
        const double k5 = f(p + h * (b51 * k1 + b52 * k2 + b53 * k3 + b54 * k4));
        const double k6 = f(p + h * (b61 * k1 + b62 * k2 + b63 * k3 + b64 * k4 + b65 * k5));
        const double p5 = p + h * (c1 * k1 + c3 * k3 + c4 * k4 + c6 * k6);
        const double p4 = p + h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6);
        const double err = std::abs(p5 - p4);
        const double tol = atol + rtol * std::max(std::abs(p), std::abs(p5));

        if (!std::isfinite(p5) || (err > tol && h > h_floor)) {
            // reject and shrink
            const double shrink = std::isfinite(p5) && err > 0.0
                                      ? std::max(0.1, 0.9 * std::pow(tol / err, 0.25))
                                      : 0.1;
            const double h_new = std::max(h * shrink, h_floor);
            if (h_new >= h) {
                // Step floor reached while still rejecting: a pole, unless
                // the field is genuinely flat here.
                if (!std::isfinite(p5) || std::abs(f(p)) > 1e3) {
                    out.blew_up = true;
                    out.blowup_time = prob.T - tau;
                    break;
                }
            } else {
                h = h_new;
                continue;
            }
        }

        tau += h;
        p = p5;
        out.times.push_back(prob.T - tau);
        out.values.push_back(p);
        if (std::abs(p) > blowup_threshold) {
            out.blew_up = true;
            out.blowup_time = prob.T - tau;
            break;
        }
        if (err > 0.0) h = std::min(h * std::min(5.0, 0.9 * std::pow(tol / err, 0.2)), prob.T);
        else h = std::min(h * 5.0, prob.T);
    }
    std::reverse(out.times.begin(), out.times.end());
    std::reverse(out.values.begin(), out.values.end());
    return out;
}

/// Maps the scalar linear-quadratic game written without 1/2 factors
/// (cost Q y^2 + R1 u1^2 - R2 u2^2, terminal G y^2) onto the Riccati
/// coefficients: alpha = 2A, beta = B2^2/R2 - B1^2/R1, gamma = Q, g = G.
inline RiccatiProblem lq_to_riccati(double A, double B1, double B2, double Q, double R1, double R2,
                                    double G, double T) {
    if (!(R1 > 0.0) || !(R2 > 0.0)) throw NonPositiveWeights("lq_to_riccati: R1, R2 must be > 0");
    RiccatiProblem prob;
    prob.alpha = 2.0 * A;
    prob.beta = B2 * B2 / R2 - B1 * B1 / R1;
    prob.gamma = Q;
    prob.g = G;
    prob.T = T;
    prob.validate();
    return prob;
}

}  // namespace hjgames
