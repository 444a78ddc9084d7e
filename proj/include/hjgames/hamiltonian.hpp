#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "hjgames/aq_saddle.hpp"
#include "hjgames/errors.hpp"
#include "hjgames/game_spec.hpp"
#include "hjgames/growth.hpp"

namespace hjgames {

struct Lemma32Result {
    double r_bar = 0.0;     // maximizer of N r^sigma - c r^rho on [0, inf)
    double theta_max = 0.0; // value at the maximizer
};

/// Closed-form maximum of theta(r) = N r^sigma - c r^rho:
///   r_bar = (sigma N / (rho c))^{1/(rho-sigma)},
///   theta_max = (rho - sigma) (sigma^sigma N^rho / (rho^rho c^sigma))^{1/(rho-sigma)}.
/// sigma = 0 degenerates to theta(r) = N - c r^rho with maximum N at 0;
/// that case is only served when explicitly allowed by the flag.
inline Lemma32Result lemma32_max(double N, double c, double sigma, double rho,
                                 bool allow_sigma_zero = false) {
    if (!(N >= 0.0)) throw std::invalid_argument("lemma32_max: N must be >= 0");
    if (!(c > 0.0)) throw std::invalid_argument("lemma32_max: c must be > 0");
    if (sigma == 0.0) {
        if (!allow_sigma_zero) throw InvalidExponents("lemma32_max: sigma = 0 requires the degenerate-case flag");
        if (!(rho > 0.0)) throw InvalidExponents("lemma32_max: rho must be > 0");
        return {0.0, N};
    }
    if (!(0.0 < sigma && sigma < rho)) throw InvalidExponents("lemma32_max: need 0 < sigma < rho");
    if (N == 0.0) return {0.0, 0.0};
    const double inv = 1.0 / (rho - sigma);
    Lemma32Result out;
    out.r_bar = std::pow(sigma * N / (rho * c), inv);
    out.theta_max = (rho - sigma) *
                    std::pow(std::pow(sigma, sigma) * std::pow(N, rho) /
                                 (std::pow(rho, rho) * std::pow(c, sigma)),
                             inv);
    return out;
}

namespace detail {

/// Young-type constant K with L |p| |u|^sigma <= (c/2)|u|^rho + K |p|^{rho/(rho-sigma)}.
/// For sigma = 0 the inequality is exact with K = L and exponent 1.
inline double young_constant(double L, double c_half, double sigma, double rho) {
    if (sigma == 0.0) return L;
    // max_r (L r^sigma - c_half r^rho) = K for unit |p|; homogeneity in |p|
    // supplies the rho/(rho-sigma) exponent.
    return lemma32_max(L, c_half, sigma, rho).theta_max;
}

}  // namespace detail

/// Radii of the compact sets that the coercivity bounds confine the two
/// optimizations to, together with the constants used to build them.
struct TruncationRadii {
    double r1 = 0.0;    // |u1| <= r1 suffices for the outer optimization
    double r2 = 0.0;    // |u2| <= r2 suffices for the inner optimization
    double k2_bar = 0.0;
    double k1_bar = 0.0;
    double k2 = 0.0;
};

/// Builds the truncation radii at a given (|x|, |p|):
///   (c/2) r1^rho1 = 2L(<x>^mu + <x>|p|) + K1b |p|^{a1} + K2 |p|^{a2} + 1,
/// with a_i = rho_i/(rho_i - sigma_i), and r2 from substituting the r1
/// bound into the inner-player estimate
///   (c/2) r2^rho2 = 2L(<x>^mu + <x>|p| + |p| r1^sigma1)
///                   + max(L - c, 0) r1^rho1 + K2b |p|^{a2}.
inline TruncationRadii truncation_radii(const GrowthConstants& k, double x_norm, double p_norm) {
    k.validate();
    if (!(k.sigma1 < k.rho1 && k.sigma2 < k.rho2))
        throw InvalidExponents("truncation_radii: requires sigma_i < rho_i");
    const double X = jbracket(x_norm);
    const double P = std::abs(p_norm);
    const double a1 = k.rho1 / (k.rho1 - k.sigma1);
    const double a2 = k.rho2 / (k.rho2 - k.sigma2);

    TruncationRadii out;
    out.k1_bar = detail::young_constant(k.L, 0.5 * k.c, k.sigma1, k.rho1);
    out.k2_bar = detail::young_constant(k.L, 0.5 * k.c, k.sigma2, k.rho2);
    out.k2 = k.sigma2 == 0.0 ? k.L : lemma32_max(k.L, k.c, k.sigma2, k.rho2).theta_max;

    const double xmu = std::pow(X, k.mu);
    const double budget1 =
        2.0 * k.L * (xmu + X * P) + out.k1_bar * std::pow(P, a1) + out.k2 * std::pow(P, a2) + 1.0;
    out.r1 = std::pow(2.0 / k.c * budget1, 1.0 / k.rho1);

    const double budget2 = 2.0 * k.L * (xmu + X * P + P * std::pow(out.r1, k.sigma1)) +
                           std::max(k.L - k.c, 0.0) * std::pow(out.r1, k.rho1) +
                           out.k2_bar * std::pow(P, a2);
    out.r2 = std::pow(2.0 / k.c * budget2, 1.0 / k.rho2);
    return out;
}

struct HamiltonianValue {
    double value = 0.0;
    Vec u1_arg;  // outer argument (argmin for upper, inner for lower)
    Vec u2_arg;
    TruncationRadii radii;
    int grid_points = 0;
};

namespace detail {

inline std::vector<Vec> control_lattice(int dim, double radius, int points,
                                        const std::optional<ControlBox>& box) {
    if (!box) return ball_lattice(dim, radius, points);
    std::vector<Vec> out;
    std::vector<double> lo(dim), hi(dim);
    for (int d = 0; d < dim; ++d) {
        lo[d] = std::max(-radius, box->lo[d]);
        hi[d] = std::min(radius, box->hi[d]);
    }
    std::vector<int> idx(dim, 0);
    Vec u(dim);
    const double r_keep = radius * (1.0 + 1e-12);
    while (true) {
        for (int d = 0; d < dim; ++d)
            u[d] = points > 1 ? lo[d] + idx[d] * (hi[d] - lo[d]) / (points - 1) : 0.5 * (lo[d] + hi[d]);
        if (u.norm() <= r_keep) out.push_back(u);
        int d = dim - 1;
        while (d >= 0 && ++idx[d] == points) idx[d--] = 0;
        if (d < 0) break;
    }
    return out;
}

enum class MinMaxOrder { InfSup, SupInf };

inline HamiltonianValue grid_minmax(const GeneralGameSpec& spec, double t, const Vec& x,
                                    const Vec& p, int grid_points, MinMaxOrder order,
                                    const std::optional<TruncationRadii>& radii_override) {
    spec.validate();
    if (grid_points < 3) throw std::invalid_argument("grid_points must be >= 3");
    const TruncationRadii radii =
        radii_override ? *radii_override : truncation_radii(spec.constants, x.norm(), p.norm());
    const auto g1 = control_lattice(spec.dim_u1, radii.r1, grid_points, spec.u1_box);
    const auto g2 = control_lattice(spec.dim_u2, radii.r2, grid_points, spec.u2_box);
    if (g1.empty() || g2.empty()) throw std::invalid_argument("empty control lattice");

    auto evaluate = [&](const Vec& u1, const Vec& u2) {
        const double v = spec.pre_hamiltonian(t, x, p, u1, u2);
        if (!std::isfinite(v)) throw NonFiniteEvaluation("f or g returned a non-finite value");
        return v;
    };

    HamiltonianValue out;
    out.radii = radii;
    out.grid_points = grid_points;
    if (order == MinMaxOrder::InfSup) {
        double outer_best = std::numeric_limits<double>::infinity();
        std::size_t outer_idx = 0, inner_idx = 0;
        for (std::size_t i = 0; i < g1.size(); ++i) {
            double inner_best = -std::numeric_limits<double>::infinity();
            std::size_t inner_arg = 0;
            for (std::size_t j = 0; j < g2.size(); ++j) {
                const double v = evaluate(g1[i], g2[j]);
                if (v > inner_best) { inner_best = v; inner_arg = j; }
            }
            if (inner_best < outer_best) { outer_best = inner_best; outer_idx = i; inner_idx = inner_arg; }
        }
        out.value = outer_best;
        out.u1_arg = g1[outer_idx];
        out.u2_arg = g2[inner_idx];
    } else {
        double outer_best = -std::numeric_limits<double>::infinity();
        std::size_t outer_idx = 0, inner_idx = 0;
        for (std::size_t j = 0; j < g2.size(); ++j) {
            double inner_best = std::numeric_limits<double>::infinity();
            std::size_t inner_arg = 0;
            for (std::size_t i = 0; i < g1.size(); ++i) {
                const double v = evaluate(g1[i], g2[j]);
                if (v < inner_best) { inner_best = v; inner_arg = i; }
            }
            if (inner_best > outer_best) { outer_best = inner_best; outer_idx = j; inner_idx = inner_arg; }
        }
        out.value = outer_best;
        out.u1_arg = g1[inner_idx];
        out.u2_arg = g2[outer_idx];
    }
    return out;
}

}  // namespace detail

/// Upper Hamiltonian H^+ = inf over u1 of sup over u2 of <p,f> + g,
/// brute-forced on uniform lattices inside the truncation balls. The
/// radii may be overridden (e.g. to probe truncation soundness).
inline HamiltonianValue eval_upper(const GeneralGameSpec& spec, double t, const Vec& x,
                                   const Vec& p, int grid_points,
                                   const std::optional<TruncationRadii>& radii = std::nullopt) {
    return detail::grid_minmax(spec, t, x, p, grid_points, detail::MinMaxOrder::InfSup, radii);
}

/// Lower Hamiltonian H^- = sup over u2 of inf over u1, same lattices.
inline HamiltonianValue eval_lower(const GeneralGameSpec& spec, double t, const Vec& x,
                                   const Vec& p, int grid_points,
                                   const std::optional<TruncationRadii>& radii = std::nullopt) {
    return detail::grid_minmax(spec, t, x, p, grid_points, detail::MinMaxOrder::SupInf, radii);
}

/// Three nested refinement levels of the upper Hamiltonian; deltas report
/// how much the value moves per refinement.
struct RefinementReport {
    std::array<int, 3> grid_points{};
    std::array<double, 3> values{};
    std::array<double, 2> deltas{};
};

inline RefinementReport eval_upper_refined(const GeneralGameSpec& spec, double t, const Vec& x,
                                           const Vec& p, int base_points) {
    RefinementReport rep;
    rep.grid_points = {base_points, 2 * base_points - 1, 4 * base_points - 3};
    for (int level = 0; level < 3; ++level)
        rep.values[level] = eval_upper(spec, t, x, p, rep.grid_points[level]).value;
    rep.deltas = {rep.values[1] - rep.values[0], rep.values[2] - rep.values[1]};
    return rep;
}

// ---------------------------------------------------------------------------
// Growth-envelope audit

struct GrowthAuditEntry {
    double t = 0.0;
    Vec x, p;
    double h_upper = 0.0, h_lower = 0.0;
    double bound_lo = 0.0, bound_hi = 0.0;
};

struct GrowthAuditConfig {
    int samples = 1000;
    std::uint64_t seed = 1;
    double x_radius = 2.0;
    double p_radius = 2.0;
    int grid_points = 41;  // forced odd so 0 is on every control lattice
};

struct GrowthAuditReport {
    int samples = 0;
    std::vector<GrowthAuditEntry> violations;
    double min_slack_lower = std::numeric_limits<double>::infinity();
    double min_slack_upper = std::numeric_limits<double>::infinity();
    double max_slack_lower = -std::numeric_limits<double>::infinity();
    double max_slack_upper = -std::numeric_limits<double>::infinity();
    bool ok() const { return violations.empty(); }
};

/// Samples random (t, x, p) and checks the two-sided growth envelope
///   -L<x>^mu - L<x>|p| - K1b |p|^{a1} <= H^{+/-} <= L<x>^mu + L<x>|p| + K2 |p|^{a2}.
/// With 0 on both control lattices the grid values sit inside the same
/// envelope as the exact Hamiltonians, so a violation is evidence against
/// the asserted constants, not discretization noise.
inline GrowthAuditReport audit_growth_bound(const GeneralGameSpec& spec,
                                            const GrowthAuditConfig& cfg = {}) {
    spec.validate();
    const GrowthConstants& k = spec.constants;
    const double a1 = k.rho1 / (k.rho1 - k.sigma1);
    const double a2 = k.rho2 / (k.rho2 - k.sigma2);
    const int pts = cfg.grid_points | 1;

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> tdist(0.0, spec.horizon);

    GrowthAuditReport rep;
    rep.samples = cfg.samples;
    for (int s = 0; s < cfg.samples; ++s) {
        const double t = tdist(rng);
        Vec x(spec.dim_state), p(spec.dim_state);
        for (int i = 0; i < spec.dim_state; ++i) x[i] = cfg.x_radius * unit(rng);
        for (int i = 0; i < spec.dim_state; ++i) p[i] = cfg.p_radius * unit(rng);

        const double X = jbracket(x.norm());
        const double P = p.norm();
        const TruncationRadii radii = truncation_radii(k, x.norm(), P);
        const double lo = -k.L * std::pow(X, k.mu) - k.L * X * P - radii.k1_bar * std::pow(P, a1);
        const double hi = k.L * std::pow(X, k.mu) + k.L * X * P + radii.k2 * std::pow(P, a2);

        const double hu = eval_upper(spec, t, x, p, pts).value;
        const double hl = eval_lower(spec, t, x, p, pts).value;

        const double slack_lo = std::min(hu, hl) - lo;
        const double slack_hi = hi - std::max(hu, hl);
        rep.min_slack_lower = std::min(rep.min_slack_lower, slack_lo);
        rep.min_slack_upper = std::min(rep.min_slack_upper, slack_hi);
        rep.max_slack_lower = std::max(rep.max_slack_lower, slack_lo);
        rep.max_slack_upper = std::max(rep.max_slack_upper, slack_hi);
        if (slack_lo < 0.0 || slack_hi < 0.0)
            rep.violations.push_back({t, x, p, hu, hl, lo, hi});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Lipschitz modulus in p

struct LipschitzTerm {
    double lambda = 0.0;  // exponent of <x>
    double nu = 0.0;      // exponent of |p| v |q|
};

struct LipschitzModulus {
    double C = 0.0;
    std::array<LipschitzTerm, 12> terms{};

    double eval(double x_norm, double p_or_q_max) const {
        const double X = jbracket(x_norm);
        const double P = std::abs(p_or_q_max);
        double sum = 0.0;
        for (const auto& term : terms) sum += std::pow(X, term.lambda) * std::pow(P, term.nu);
        return C * sum;
    }
};

/// Assembles the twelve-term modulus
///   |H(t,x,p) - H(t,x,q)| <= C sum_i <x>^{lambda_i} (|p| v |q|)^{nu_i} |p - q|
/// with an explicit C derived from L, c, sigma_i, rho_i, mu through the
/// truncation-radius algebra, so that C * sum dominates
/// L(<x> + r1^{sigma1} + r2^{sigma2}) for every (x, p).
inline LipschitzModulus lipschitz_modulus_terms(const GrowthConstants& k) {
    k.validate();
    if (!(k.sigma1 < k.rho1 && k.sigma2 < k.rho2))
        throw InvalidExponents("lipschitz_modulus_terms: requires sigma_i < rho_i");
    const double s1 = k.sigma1 / k.rho1;            // in [0, 1)
    const double s2 = k.sigma2 / k.rho2;
    const double a1 = k.rho1 / (k.rho1 - k.sigma1); // >= 1
    const double a2 = k.rho2 / (k.rho2 - k.sigma2);

    const double k1_bar = detail::young_constant(k.L, 0.5 * k.c, k.sigma1, k.rho1);
    const double k2_bar = detail::young_constant(k.L, 0.5 * k.c, k.sigma2, k.rho2);
    const double k2 = k.sigma2 == 0.0 ? k.L : lemma32_max(k.L, k.c, k.sigma2, k.rho2).theta_max;

    // r1^rho1 <= M1 (<x>^mu + <x>P + P^{a1} + P^{a2} + 1)
    const double M1 = 2.0 / k.c * std::max({2.0 * k.L, k1_bar, k2, 1.0});
    const double M1s = std::pow(M1, s1);
    // r2^rho2 <= M2 (<x>^mu + <x>P + <x>^{mu s1} P + <x>^{s1} P^{1+s1}
    //                + P^{a1} + P^{a2} + P^{a2 s1 + 1} + 1)
    const double excess = std::max(k.L - k.c, 0.0) * M1;
    const double M2 = 2.0 / k.c *
                      std::max({2.0 * k.L + excess, 4.0 * k.L * M1s, 2.0 * k.L * M1s + excess,
                                k2_bar + excess, excess, 1.0});
    const double M2s = std::pow(M2, s2);

    LipschitzModulus mod;
    mod.C = std::max({k.L, 2.0 * k.L * M1s, 2.0 * k.L * M2s});
    mod.terms = {{
        {1.0, 0.0},                        // <x>
        {k.mu * s1, 0.0},                  // <x>^{mu s1}
        {k.mu * s2, 0.0},                  // <x>^{mu s2}
        {s1, s1},                          // <x>^{s1} P^{s1}
        {s2, s2},                          // <x>^{s2} P^{s2}
        {0.0, k.sigma1 / (k.rho1 - k.sigma1)},
        {0.0, k.sigma2 / (k.rho2 - k.sigma2)},
        {0.0, a2 * s1},                    // P^{sigma1 rho2 / (rho1 (rho2-sigma2))}
        {0.0, a1 * s2},                    // P^{sigma2 rho1 / (rho2 (rho1-sigma1))}
        {k.mu * s1 * s2, s2},              // <x>^{mu s1 s2} P^{s2}
        {s1 * s2, (1.0 + s1) * s2},        // <x>^{s1 s2} P^{(sigma1+rho1) sigma2 / (rho1 rho2)}
        {0.0, (a2 * s1 + 1.0) * s2},       // P^{sigma1 sigma2/(rho1(rho2-sigma2)) + sigma2/rho2}
    }};
    return mod;
}

/// Twelve-term Lipschitz modulus evaluated at (|x|, |p| v |q|); the source
/// of the dissipation coefficient for the grid solver.
inline double lipschitz_modulus_p(const GrowthConstants& k, double x_norm, double p_norm,
                                  double q_norm) {
    return lipschitz_modulus_terms(k).eval(x_norm, std::max(std::abs(p_norm), std::abs(q_norm)));
}

/// The tighter radii-based bound L(<x> + r1^{sigma1} + r2^{sigma2}) on the
/// same quantity; the twelve-term modulus dominates it by construction.
inline double radii_p_bound(const GrowthConstants& k, double x_norm, double p_norm) {
    const TruncationRadii radii = truncation_radii(k, x_norm, p_norm);
    return k.L * (jbracket(x_norm) + std::pow(radii.r1, k.sigma1) + std::pow(radii.r2, k.sigma2));
}

}  // namespace hjgames
