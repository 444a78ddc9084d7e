#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hjgames/errors.hpp"
#include "hjgames/growth.hpp"
#include "hjgames/hamiltonian.hpp"

namespace hjgames {

/// Uniform space-time lattice for the 1-D terminal-value problem.
/// Row k of a field holds time t_k = k * dt, row nt holds t = T.
struct Grid1D {
    double x_min = -1.0;
    double x_max = 1.0;
    int nx = 3;
    int nt = 1;
    double T = 1.0;

    double dx() const { return (x_max - x_min) / (nx - 1); }
    double dt() const { return T / nt; }
    double x(int i) const { return x_min + i * dx(); }
    double t(int k) const { return k == nt ? T : k * dt(); }

    void validate() const {
        if (!(x_min < x_max)) throw std::invalid_argument("Grid1D: x_min < x_max required");
        if (nx < 3) throw std::invalid_argument("Grid1D: nx >= 3 required");
        if (nt < 1) throw std::invalid_argument("Grid1D: nt >= 1 required");
        if (!(T > 0.0)) throw std::invalid_argument("Grid1D: T > 0 required");
    }

    /// Sizes the time step against a dissipation bound at the given CFL
    /// number (default 0.4, strictly inside the 1/2 monotonicity limit).
    static Grid1D with_cfl(double x_min, double x_max, int nx, double T, double dissipation_bound,
                           double cfl = 0.4) {
        Grid1D grid{x_min, x_max, nx, 1, T};
        grid.validate();
        if (!(dissipation_bound > 0.0) || !(cfl > 0.0))
            throw UnstableParameters("with_cfl: dissipation bound and CFL must be > 0");
        if (cfl > 0.5) throw UnstableParameters("with_cfl: CFL must be <= 1/2");
        grid.nt = std::max(1, static_cast<int>(std::ceil(T * dissipation_bound / (cfl * grid.dx()))));
        return grid;
    }
};

/// A value function sampled on a Grid1D, row-major by time then space.
struct ValueField {
    Grid1D grid;
    std::vector<double> values;  // (nt + 1) * nx
    std::string hamiltonian_tag;

    double& at(int k, int i) { return values[static_cast<std::size_t>(k) * grid.nx + i]; }
    double at(int k, int i) const { return values[static_cast<std::size_t>(k) * grid.nx + i]; }
    const double* row(int k) const { return values.data() + static_cast<std::size_t>(k) * grid.nx; }
    double* row(int k) { return values.data() + static_cast<std::size_t>(k) * grid.nx; }

    /// Piecewise-linear interpolation along a time row; x clamps to the
    /// domain, reporting whether it had to.
    double interp(int k, double x, bool* clamped = nullptr) const {
        const double dx = grid.dx();
        double xc = x;
        bool cl = false;
        if (xc < grid.x_min) { xc = grid.x_min; cl = true; }
        if (xc > grid.x_max) { xc = grid.x_max; cl = true; }
        if (clamped) *clamped = cl;
        const double s = (xc - grid.x_min) / dx;
        int i0 = static_cast<int>(s);
        if (i0 >= grid.nx - 1) i0 = grid.nx - 2;
        const double w = s - i0;
        return (1.0 - w) * at(k, i0) + w * at(k, i0 + 1);
    }
};

using Hamiltonian1D = std::function<double(double t, double x, double p)>;

/// Dissipation coefficient policy for the monotone scheme.
struct Dissipation {
    enum class Mode { Fixed, SampledAuto, ModulusAuto };
    Mode mode = Mode::SampledAuto;
    double value = 0.0;
    std::optional<GrowthConstants> constants;

    static Dissipation fixed(double alpha) { return {Mode::Fixed, alpha, std::nullopt}; }
    static Dissipation automatic() { return {Mode::SampledAuto, 0.0, std::nullopt}; }
    /// Conservative choice: the twelve-term Lipschitz modulus evaluated at
    /// the current gradient range. Monotone but very diffusive.
    static Dissipation modulus(const GrowthConstants& k) { return {Mode::ModulusAuto, 0.0, k}; }
};

namespace detail {

/// max |dH/dp| over [p_lo, p_hi] at (t, x), estimated by central
/// differences on a short uniform sample.
inline double sampled_p_lipschitz(const Hamiltonian1D& H, double t, double x, double p_lo,
                                  double p_hi) {
    const int samples = 9;
    const double width = p_hi - p_lo;
    double best = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double p = samples > 1 ? p_lo + width * s / (samples - 1) : 0.5 * (p_lo + p_hi);
        const double delta = 1e-6 * (1.0 + std::abs(p));
        const double d = (H(t, x, p + delta) - H(t, x, p - delta)) / (2.0 * delta);
        best = std::max(best, std::abs(d));
    }
    return best;
}

}  // namespace detail

/// One local Lax-Friedrichs node update for the terminal-value problem
/// (marching backward in time):
///   V_i(t - dt) = V_i(t) + dt [ H(t, x, (p- + p+)/2) + alpha/2 (p+ - p-) ],
/// with one-sided differences p-, p+ built from the neighbors. Exposed so
/// monotonicity can be probed directly. Nondecreasing in each neighbor
/// whenever alpha >= |H_p| and dt * alpha / dx <= 1/2.
inline double llf_update(const Hamiltonian1D& H, double t, double x, double v_left, double v_center,
                         double v_right, double dx, double dt, double alpha) {
    const double p_minus = (v_center - v_left) / dx;
    const double p_plus = (v_right - v_center) / dx;
    return v_center + dt * (H(t, x, 0.5 * (p_minus + p_plus)) + 0.5 * alpha * (p_plus - p_minus));
}

namespace detail {

/// Per-node dissipation coefficients for one backward step over `prev`.
inline std::vector<double> step_dissipation(const Hamiltonian1D& H, const Grid1D& grid, double t,
                                            const double* prev, const Dissipation& diss) {
    const int nx = grid.nx;
    const double dx = grid.dx();
    std::vector<double> alpha(nx);
    if (diss.mode == Dissipation::Mode::Fixed) {
        std::fill(alpha.begin(), alpha.end(), diss.value);
        return alpha;
    }
    for (int i = 0; i < nx; ++i) {
        double p_minus, p_plus;
        if (i == 0) {
            p_plus = (prev[1] - prev[0]) / dx;
            p_minus = p_plus;
        } else if (i == nx - 1) {
            p_minus = (prev[nx - 1] - prev[nx - 2]) / dx;
            p_plus = p_minus;
        } else {
            p_minus = (prev[i] - prev[i - 1]) / dx;
            p_plus = (prev[i + 1] - prev[i]) / dx;
        }
        double lo = std::min(p_minus, p_plus);
        double hi = std::max(p_minus, p_plus);
        const double margin = 0.1 * (1.0 + hi - lo);
        lo -= margin;
        hi += margin;
        if (diss.mode == Dissipation::Mode::SampledAuto) {
            alpha[i] = 1.05 * sampled_p_lipschitz(H, t, grid.x(i), lo, hi);
        } else {
            const double pmax = std::max(std::abs(lo), std::abs(hi));
            alpha[i] = lipschitz_modulus_p(*diss.constants, std::abs(grid.x(i)), pmax, pmax);
        }
    }
    return alpha;
}

/// Backward step row update; boundary nodes reuse the interior one-sided
/// difference on both sides.
inline void march_row(const Hamiltonian1D& H, const Grid1D& grid, double t, const double* prev,
                      const std::vector<double>& alpha, double* next) {
    const int nx = grid.nx;
    const double dx = grid.dx();
    const double dt = grid.dt();
    for (int i = 0; i < nx; ++i) {
        double p_minus, p_plus;
        if (i == 0) {
            p_plus = (prev[1] - prev[0]) / dx;
            p_minus = p_plus;
        } else if (i == nx - 1) {
            p_minus = (prev[nx - 1] - prev[nx - 2]) / dx;
            p_plus = p_minus;
        } else {
            p_minus = (prev[i] - prev[i - 1]) / dx;
            p_plus = (prev[i + 1] - prev[i]) / dx;
        }
        const double v = prev[i] + dt * (H(t, grid.x(i), 0.5 * (p_minus + p_plus)) +
                                         0.5 * alpha[i] * (p_plus - p_minus));
        if (!std::isfinite(v)) throw NonFiniteValue("hj solve: value became non-finite");
        next[i] = v;
    }
}

}  // namespace detail

/// Monotone finite-difference solve of V_t + H(t, x, V_x) = 0 with
/// terminal data V(T, x) = h(x), local Lax-Friedrichs flux, backward
/// time marching. Throws UnstableParameters when dt * alpha / dx > 1/2.
inline ValueField solve(const Hamiltonian1D& H, const std::function<double(double)>& h,
                        const Grid1D& grid, const Dissipation& diss = Dissipation::automatic(),
                        std::string tag = "custom") {
    grid.validate();
    if (diss.mode == Dissipation::Mode::Fixed && !(diss.value >= 0.0))
        throw UnstableParameters("solve: fixed dissipation must be >= 0");

    ValueField field;
    field.grid = grid;
    field.hamiltonian_tag = std::move(tag);
    field.values.assign(static_cast<std::size_t>(grid.nt + 1) * grid.nx, 0.0);
    for (int i = 0; i < grid.nx; ++i) field.at(grid.nt, i) = h(grid.x(i));

    const double dx = grid.dx();
    const double dt = grid.dt();
    for (int k = grid.nt - 1; k >= 0; --k) {
        const double t_data = grid.t(k + 1);
        const double* prev = field.row(k + 1);
        const auto alpha = detail::step_dissipation(H, grid, t_data, prev, diss);
        const double alpha_max = *std::max_element(alpha.begin(), alpha.end());
        if (dt * alpha_max / dx > 0.5)
            throw UnstableParameters("solve: dt * dissipation / dx exceeds 1/2");
        detail::march_row(H, grid, t_data, prev, alpha, field.row(k));
    }
    return field;
}

struct ResidualReport {
    double median_abs = 0.0;
    double mean_abs = 0.0;
    double max_abs = 0.0;
    int interior_count = 0;
};

/// Centered-difference residual |V_t + H(t, x, V_x)| over interior nodes.
/// A smoke test where V is smooth, not a viscosity verification.
inline ResidualReport residual_check(const ValueField& field, const Hamiltonian1D& H) {
    const Grid1D& grid = field.grid;
    const double dt = grid.dt();
    const double dx = grid.dx();
    std::vector<double> residuals;
    residuals.reserve(static_cast<std::size_t>(std::max(grid.nt - 1, 0)) * std::max(grid.nx - 2, 0));
    for (int k = 1; k < grid.nt; ++k) {
        for (int i = 1; i + 1 < grid.nx; ++i) {
            const double vt = (field.at(k + 1, i) - field.at(k - 1, i)) / (2.0 * dt);
            const double vx = (field.at(k, i + 1) - field.at(k, i - 1)) / (2.0 * dx);
            residuals.push_back(std::abs(vt + H(grid.t(k), grid.x(i), vx)));
        }
    }
    ResidualReport rep;
    rep.interior_count = static_cast<int>(residuals.size());
    if (residuals.empty()) return rep;
    double total = 0.0;
    for (double r : residuals) {
        total += r;
        rep.max_abs = std::max(rep.max_abs, r);
    }
    rep.mean_abs = total / residuals.size();
    std::nth_element(residuals.begin(), residuals.begin() + residuals.size() / 2, residuals.end());
    rep.median_abs = residuals[residuals.size() / 2];
    return rep;
}

struct ComparisonReport {
    bool ordered = true;
    double max_violation = 0.0;  // max over nodes of (V_sub - V_super)
    int worst_k = -1;
    int worst_i = -1;
    ValueField sub, super;
};

/// Solves the two terminal problems in lockstep with shared per-node
/// dissipation (the larger of the two requirements) and checks the
/// discrete comparison principle V_sub <= V_super + tolerance everywhere.
/// Throws OrderingViolated beyond the tolerance; a violation would be a
/// scheme bug, not an input property.
inline ComparisonReport comparison_harness(const Hamiltonian1D& H,
                                           const std::function<double(double)>& h_sub,
                                           const std::function<double(double)>& h_super,
                                           const Grid1D& grid,
                                           const Dissipation& diss = Dissipation::automatic(),
                                           double tolerance = 1e-10) {
    grid.validate();
    ComparisonReport rep;
    for (ValueField* f : {&rep.sub, &rep.super}) {
        f->grid = grid;
        f->values.assign(static_cast<std::size_t>(grid.nt + 1) * grid.nx, 0.0);
    }
    for (int i = 0; i < grid.nx; ++i) {
        const double a = h_sub(grid.x(i));
        const double b = h_super(grid.x(i));
        if (a > b)
            throw std::invalid_argument("comparison_harness: h_sub must not exceed h_super");
        rep.sub.at(grid.nt, i) = a;
        rep.super.at(grid.nt, i) = b;
    }

    const double dx = grid.dx();
    const double dt = grid.dt();
    for (int k = grid.nt - 1; k >= 0; --k) {
        const double t_data = grid.t(k + 1);
        auto alpha = detail::step_dissipation(H, grid, t_data, rep.sub.row(k + 1), diss);
        const auto alpha_b = detail::step_dissipation(H, grid, t_data, rep.super.row(k + 1), diss);
        for (int i = 0; i < grid.nx; ++i) alpha[i] = std::max(alpha[i], alpha_b[i]);
        const double alpha_max = *std::max_element(alpha.begin(), alpha.end());
        if (dt * alpha_max / dx > 0.5)
            throw UnstableParameters("comparison_harness: CFL violated");
        detail::march_row(H, grid, t_data, rep.sub.row(k + 1), alpha, rep.sub.row(k));
        detail::march_row(H, grid, t_data, rep.super.row(k + 1), alpha, rep.super.row(k));
    }

    for (int k = 0; k <= grid.nt; ++k) {
        for (int i = 0; i < grid.nx; ++i) {
            const double gap = rep.sub.at(k, i) - rep.super.at(k, i);
            if (gap > rep.max_violation) {
                rep.max_violation = gap;
                rep.worst_k = k;
                rep.worst_i = i;
            }
        }
    }
    rep.ordered = rep.max_violation <= tolerance;
    if (!rep.ordered)
        throw OrderingViolated("comparison_harness: ordering violated at (k=" +
                               std::to_string(rep.worst_k) + ", i=" + std::to_string(rep.worst_i) +
                               ") by " + std::to_string(rep.max_violation));
    return rep;
}

struct Example45Roots {
    double a = 0.0;
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    double residual_plus = 0.0;   // |4 l^2 - 2 a l - 1| at lambda_plus
    double residual_minus = 0.0;
};

/// The stationary equation -x^2 - a x V' + (V')^2 = 0 admits two exact
/// solutions V(x) = lambda x^2 with lambda = (a +- sqrt(a^2 + 4)) / 4:
/// a two-solution demonstration for the stationary problem.
inline Example45Roots example45_roots(double a) {
    if (!(a >= 0.0)) throw std::invalid_argument("example45_roots: a must be >= 0");
    Example45Roots out;
    out.a = a;
    const double root = std::sqrt(a * a + 4.0);
    out.lambda_plus = (a + root) / 4.0;
    out.lambda_minus = (a - root) / 4.0;
    auto quad = [a](double l) { return std::abs(4.0 * l * l - 2.0 * a * l - 1.0); };
    out.residual_plus = quad(out.lambda_plus);
    out.residual_minus = quad(out.lambda_minus);
    return out;
}

/// Residual of V(x) = lambda x^2 in the stationary equation above.
inline double example45_stationary_residual(double a, double lambda, double x) {
    const double vp = 2.0 * lambda * x;
    return -x * x - a * x * vp + vp * vp;
}

}  // namespace hjgames
