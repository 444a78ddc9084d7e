#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hjgames/errors.hpp"
#include "hjgames/game_spec.hpp"

namespace hjgames {

/// Piecewise-constant open-loop control on [t0, t_end]. Sample times are
/// strictly increasing interval starts; the last value extends to t_end.
/// The L^rho and L^sigma power integrals are exact for step functions and
/// cached at construction.
class ControlSignal {
  public:
    ControlSignal(std::vector<double> sample_times, std::vector<Vec> values, double t_end,
                  double rho = 0.0, double sigma = 0.0)
        : times_(std::move(sample_times)), values_(std::move(values)), t_end_(t_end) {
        if (times_.empty() || times_.size() != values_.size())
            throw std::invalid_argument("ControlSignal: need one value per sample time");
        for (std::size_t i = 1; i < times_.size(); ++i)
            if (!(times_[i] > times_[i - 1]))
                throw std::invalid_argument("ControlSignal: sample times must be strictly increasing");
        if (!(t_end_ > times_.back()) && times_.size() > 1)
            throw std::invalid_argument("ControlSignal: t_end must exceed the last sample time");
        if (!(t_end_ >= times_.front()))
            throw std::invalid_argument("ControlSignal: empty time span");
        rho_ = rho;
        sigma_ = sigma;
        p_norm_cache_ = rho > 0.0 ? power_integral(rho, t_end_) : 0.0;
        sigma_norm_cache_ = sigma > 0.0 ? power_integral(sigma, t_end_) : 0.0;
    }

    static ControlSignal constant(double t0, double t_end, Vec value, double rho = 0.0,
                                  double sigma = 0.0) {
        return ControlSignal({t0}, {std::move(value)}, t_end, rho, sigma);
    }

    const Vec& at(double s) const {
        auto it = std::upper_bound(times_.begin(), times_.end(), s);
        const std::size_t idx = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
        return values_[idx];
    }

    /// Exact integral of |u(r)|^expo over [t0, min(s, t_end)].
    double power_integral(double expo, double s) const {
        const double stop = std::min(s, t_end_);
        double total = 0.0;
        for (std::size_t i = 0; i < times_.size(); ++i) {
            const double a = times_[i];
            const double b = i + 1 < times_.size() ? times_[i + 1] : t_end_;
            if (stop <= a) break;
            total += std::pow(values_[i].norm(), expo) * (std::min(b, stop) - a);
        }
        return total;
    }

    double t0() const { return times_.front(); }
    double t_end() const { return t_end_; }
    double p_norm_cache() const { return p_norm_cache_; }
    double sigma_norm_cache() const { return sigma_norm_cache_; }
    int dim() const { return static_cast<int>(values_.front().size()); }

  private:
    std::vector<double> times_;
    std::vector<Vec> values_;
    double t_end_;
    double rho_ = 0.0, sigma_ = 0.0;
    double p_norm_cache_ = 0.0, sigma_norm_cache_ = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    struct Provenance {
        double t0 = 0.0;
        Vec x0;
        int steps = 0;
        std::string method = "rk4";
    } provenance;

    const Vec& terminal_state() const { return states.back(); }
};

/// Classical fourth-order Runge-Kutta on a uniform step from t0 to the
/// spec horizon. Controls are read pointwise (piecewise constant).
inline Trajectory integrate(const GeneralGameSpec& spec, double t0, const Vec& x0,
                            const ControlSignal& u1, const ControlSignal& u2, int steps) {
    spec.validate();
    if (steps < 1) throw std::invalid_argument("integrate: steps must be >= 1");
    const double T = spec.horizon;
    if (!(t0 < T)) throw std::invalid_argument("integrate: t0 must precede the horizon");

    const double h = (T - t0) / steps;
    Trajectory traj;
    traj.provenance = {t0, x0, steps, "rk4"};
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.times.push_back(t0);
    traj.states.push_back(x0);

    Vec y = x0;
    // Controls are frozen per step at the midpoint time: for lattices
    // aligned with the sample breakpoints this reproduces the exact
    // piecewise-constant dynamics (a stage at the right endpoint would
    // otherwise read the next interval's value).
    auto rhs = [&](double s, const Vec& state, const Vec& v1, const Vec& v2) {
        Vec v = spec.f(s, state, v1, v2);
        if (!v.allFinite()) throw NonFiniteState("integrate: dynamics returned a non-finite value");
        return v;
    };
    for (int n = 0; n < steps; ++n) {
        const double s = t0 + n * h;
        const Vec& v1 = u1.at(s + 0.5 * h);
        const Vec& v2 = u2.at(s + 0.5 * h);
        const Vec k1 = rhs(s, y, v1, v2);
        const Vec k2 = rhs(s + 0.5 * h, y + 0.5 * h * k1, v1, v2);
        const Vec k3 = rhs(s + 0.5 * h, y + 0.5 * h * k2, v1, v2);
        const Vec k4 = rhs(s + h, y + h * k3, v1, v2);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!y.allFinite()) throw NonFiniteState("integrate: state became non-finite");
        traj.times.push_back(n + 1 == steps ? T : s + h);
        traj.states.push_back(y);
    }
    return traj;
}

/// Gronwall-type envelope: any theta with
///   theta(s)^2 <= theta0^2 + int_t^s [alpha theta^2 + beta theta]
/// satisfies theta(s) <= e^{1/2 int_t^T alpha} theta0
///                        + 1/2 e^{int_t^T alpha} int_t^s beta.
/// Integrals are composite Simpson with the requested resolution.
class GronwallBound {
  public:
    GronwallBound(double theta0, std::function<double(double)> alpha,
                  std::function<double(double)> beta, double t, double T, int quadrature_steps)
        : theta0_(theta0), beta_(std::move(beta)), t_(t), T_(T), steps_(quadrature_steps) {
        if (!(T_ >= t_)) throw std::invalid_argument("GronwallBound: need t <= T");
        if (steps_ < 2) steps_ = 2;
        const double ia = simpson(alpha, t_, T_, steps_);
        factor_theta0_ = std::exp(0.5 * ia);
        factor_beta_ = 0.5 * std::exp(ia);
    }

    double operator()(double s) const {
        const double stop = std::clamp(s, t_, T_);
        return factor_theta0_ * theta0_ + factor_beta_ * simpson(beta_, t_, stop, steps_);
    }

    static double simpson(const std::function<double(double)>& fn, double a, double b, int steps) {
        if (b <= a) return 0.0;
        const int n = steps % 2 == 0 ? steps : steps + 1;
        const double h = (b - a) / n;
        double sum = fn(a) + fn(b);
        for (int i = 1; i < n; ++i) sum += fn(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
        return sum * h / 3.0;
    }

  private:
    double theta0_;
    std::function<double(double)> beta_;
    double t_, T_;
    int steps_;
    double factor_theta0_ = 1.0, factor_beta_ = 0.5;
};

inline GronwallBound gronwall_bound(double theta0, std::function<double(double)> alpha,
                                    std::function<double(double)> beta, double t, double T,
                                    int quadrature_steps) {
    if (!(theta0 >= 0.0)) throw std::invalid_argument("gronwall_bound: theta0 must be >= 0");
    return GronwallBound(theta0, std::move(alpha), std::move(beta), t, T, quadrature_steps);
}

struct CertEntry {
    double s = 0.0;
    double lhs = 0.0;
    double bound = 0.0;
    double slack = 0.0;  // bound - lhs; negative flags a violation
};

struct CertReport {
    std::vector<CertEntry> entries;
    double min_slack = std::numeric_limits<double>::infinity();
    double max_slack = -std::numeric_limits<double>::infinity();
    int violation_count = 0;
    bool ok() const { return violation_count == 0; }

    void add(double s, double lhs, double bound) {
        const double slack = bound - lhs;
        entries.push_back({s, lhs, bound, slack});
        min_slack = std::min(min_slack, slack);
        max_slack = std::max(max_slack, slack);
        if (slack < 0.0) ++violation_count;
    }
};

/// Checks the a-priori state bound with the explicit constants from the
/// Gronwall argument:
///   <y(s)> <= e^{L(T-t)} <x> + L e^{2L(T-t)} int_t^s (1 + |u1|^s1 + |u2|^s2).
/// Negative slack is evidence that the asserted L (or sigma_i) is wrong
/// for this dynamics, not an exception.
inline CertReport certify_state_bound(const GeneralGameSpec& spec, const Trajectory& traj,
                                      const ControlSignal& u1, const ControlSignal& u2) {
    const GrowthConstants& k = spec.constants;
    const double t0 = traj.provenance.t0;
    const double T = spec.horizon;
    const double c_state = std::exp(k.L * (T - t0));
    const double c_ctrl = k.L * std::exp(2.0 * k.L * (T - t0));
    const double x_bracket = jbracket(traj.provenance.x0.norm());

    CertReport rep;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double s = traj.times[i];
        const double integral = (s - t0) + u1.power_integral(k.sigma1, s) + u2.power_integral(k.sigma2, s);
        rep.add(s, jbracket(traj.states[i].norm()), c_state * x_bracket + c_ctrl * integral);
    }
    return rep;
}

struct TwoPointCertReport {
    CertReport displacement;  // |y_{t,x}(s) - x| bound
    CertReport stability;     // |y_{t,x}(s) - y_{tb,xb}(s)| bound
    bool ok() const { return displacement.ok() && stability.ok(); }
};

/// Integrates from (t, x) and (t_bar, x_bar) under shared controls and
/// certifies the displacement and two-point stability bounds:
///   |y_{t,x}(s) - x|   <= L e^{2L(T-t)} { <x>(s-t) + int_t^s (|u1|^s1 + |u2|^s2) },
///   |y_{t,x}(s) - y_{tb,xb}(s)|
///     <= e^{L(s-tb)} { |x - xb| + L e^{2L(T-t)} ( <x>(tb-t) + int_t^tb (...) ) },
/// the latter on s in [t_bar, T].
inline TwoPointCertReport certify_displacement_and_stability(const GeneralGameSpec& spec, double t,
                                                             const Vec& x, double t_bar,
                                                             const Vec& x_bar,
                                                             const ControlSignal& u1,
                                                             const ControlSignal& u2, int steps) {
    if (!(t <= t_bar && t_bar <= spec.horizon))
        throw std::invalid_argument("certify_displacement_and_stability: need t <= t_bar <= T");
    const GrowthConstants& k = spec.constants;
    const double T = spec.horizon;

    // Phase A covers [t, t_bar]; phase B runs both trajectories on the same
    // nodes over [t_bar, T] so the two-point bound is sampled exactly.
    const double span = T - t;
    int steps_a = t_bar > t ? std::max(1, static_cast<int>(std::lround(steps * (t_bar - t) / span))) : 0;
    Vec y_at_tbar = x;
    std::vector<double> times_a;
    std::vector<Vec> states_a;
    if (steps_a > 0) {
        GeneralGameSpec clipped = spec;
        clipped.horizon = t_bar;
        const Trajectory head = integrate(clipped, t, x, u1, u2, steps_a);
        y_at_tbar = head.terminal_state();
        times_a = head.times;
        states_a = head.states;
    }

    TwoPointCertReport rep;
    const double c0 = k.L * std::exp(2.0 * k.L * (T - t));
    const double xb = jbracket(x.norm());
    auto displacement_bound = [&](double s) {
        return c0 * (xb * (s - t) + u1.power_integral(k.sigma1, s) + u2.power_integral(k.sigma2, s));
    };
    for (std::size_t i = 0; i < times_a.size(); ++i)
        rep.displacement.add(times_a[i], (states_a[i] - x).norm(), displacement_bound(times_a[i]));

    if (t_bar < T) {
        const int steps_b = std::max(1, steps - steps_a);
        const Trajectory from_x = integrate(spec, t_bar, y_at_tbar, u1, u2, steps_b);
        const Trajectory from_xbar = integrate(spec, t_bar, x_bar, u1, u2, steps_b);

        const double head_integral =
            u1.power_integral(k.sigma1, t_bar) + u2.power_integral(k.sigma2, t_bar);
        const double launch_gap = (x - x_bar).norm() + c0 * (xb * (t_bar - t) + head_integral);
        for (std::size_t i = 0; i < from_x.times.size(); ++i) {
            const double s = from_x.times[i];
            rep.displacement.add(s, (from_x.states[i] - x).norm(), displacement_bound(s));
            rep.stability.add(s, (from_x.states[i] - from_xbar.states[i]).norm(),
                              std::exp(k.L * (s - t_bar)) * launch_gap);
        }
    } else {
        rep.stability.add(t_bar, (y_at_tbar - x_bar).norm(),
                          (x - x_bar).norm() +
                              c0 * (xb * (t_bar - t) + u1.power_integral(k.sigma1, t_bar) +
                                    u2.power_integral(k.sigma2, t_bar)));
    }
    return rep;
}

}  // namespace hjgames
