#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hjgames/errors.hpp"
#include "hjgames/game_spec.hpp"
#include "hjgames/growth.hpp"
#include "hjgames/hj_solver.hpp"

namespace hjgames {

/// Configuration of the discrete min-max / max-min recursion on a 1-D
/// state lattice. Control grids are uniform with odd point counts so 0
/// is always a grid point; radii should dominate the truncation radii
/// for the largest |x| in the domain (the boundary-hit monitor is the
/// runtime safety net for radii chosen too small).
struct DPConfig {
    Grid1D grid;               // nt = number of time steps, T = horizon
    double radius1 = 1.0;
    double radius2 = 1.0;
    int count1 = 21;
    int count2 = 21;
    double interior_fraction = 0.5;  // quarantined interior for gap statistics
    double boundary_hit_limit = 0.01;

    void validate() const {
        grid.validate();
        if (!(radius1 > 0.0) || !(radius2 > 0.0))
            throw std::invalid_argument("DPConfig: control radii must be > 0");
        if (count1 < 1 || count2 < 1 || count1 % 2 == 0 || count2 % 2 == 0)
            throw std::invalid_argument("DPConfig: control counts must be odd and >= 1");
        if (!(interior_fraction > 0.0 && interior_fraction <= 1.0))
            throw std::invalid_argument("DPConfig: interior_fraction in (0, 1]");
    }

    std::vector<double> control_grid(int player) const {
        const int n = player == 1 ? count1 : count2;
        const double r = player == 1 ? radius1 : radius2;
        std::vector<double> g(n);
        for (int i = 0; i < n; ++i) g[i] = n > 1 ? -r + 2.0 * r * i / (n - 1) : 0.0;
        if (n % 2 == 1) g[n / 2] = 0.0;  // exact zero at the center
        return g;
    }

    /// Derives control radii from the truncation radii at the largest |x|
    /// in the domain and an anticipated gradient bound.
    static DPConfig for_domain(const GrowthConstants& k, double x_min, double x_max, int nx, int nt,
                               double T, int count1, int count2, double p_bound) {
        DPConfig cfg;
        cfg.grid = Grid1D{x_min, x_max, nx, nt, T};
        const double x_big = std::max(std::abs(x_min), std::abs(x_max));
        const TruncationRadii radii = truncation_radii(k, x_big, p_bound);
        cfg.radius1 = radii.r1;
        cfg.radius2 = radii.r2;
        cfg.count1 = count1 | 1;
        cfg.count2 = count2 | 1;
        cfg.validate();
        return cfg;
    }
};

struct ClampStats {
    long long clamped = 0;
    long long total = 0;
    double fraction() const { return total > 0 ? static_cast<double>(clamped) / total : 0.0; }
};

struct ValuePair {
    ValueField upper;  // per-step min over u1 of max over u2
    ValueField lower;  // per-step max over u2 of min over u1
    double gap = 0.0;  // max |upper - lower| over the quarantined interior
    ClampStats clamps;
    double boundary_hit_fraction = 0.0;
    bool h3_prime_satisfied = true;
};

namespace detail {

/// One backward DP step at a single state sample. The pair evaluator
/// supplies dynamics and running cost per control-index pair; both value
/// functions are reduced from the same sweep so they share every f and g
/// evaluation and the per-step order minmax >= maxmin is exact.
template <class PairEval>
struct DPNodeResult {
    double upper, lower;
    bool upper_boundary_hit, lower_boundary_hit;
};

struct DPScratch {
    std::vector<double> rowmax;
    std::vector<int> rowargmax;
    std::vector<double> colmin;
    std::vector<int> colargmin;
};

template <class PairEval>
DPNodeResult<PairEval> dp_node(PairEval&& pe, int count1, int count2, double dt, double x,
                               const ValueField& up_tail, const ValueField& lo_tail, int k_next,
                               DPScratch& ws, ClampStats& clamps) {
    ws.rowmax.assign(count1, -std::numeric_limits<double>::infinity());
    ws.rowargmax.assign(count1, 0);
    ws.colmin.assign(count2, std::numeric_limits<double>::infinity());
    ws.colargmin.assign(count2, 0);

    for (int i1 = 0; i1 < count1; ++i1) {
        for (int i2 = 0; i2 < count2; ++i2) {
            const auto [fval, gval] = pe(i1, i2);
            if (!std::isfinite(fval) || !std::isfinite(gval))
                throw NonFiniteEvaluation("value_iterate: f or g returned a non-finite value");
            const double x_next = x + dt * fval;
            bool clamped = false;
            const double tail_up = up_tail.interp(k_next, x_next, &clamped);
            const double tail_lo = lo_tail.interp(k_next, x_next);
            clamps.total += 1;
            clamps.clamped += clamped ? 1 : 0;
            const double stage = dt * gval;
            const double v_up = stage + tail_up;
            const double v_lo = stage + tail_lo;
            if (v_up > ws.rowmax[i1]) {
                ws.rowmax[i1] = v_up;
                ws.rowargmax[i1] = i2;
            }
            if (v_lo < ws.colmin[i2]) {
                ws.colmin[i2] = v_lo;
                ws.colargmin[i2] = i1;
            }
        }
    }

    int arg1 = 0;
    for (int i1 = 1; i1 < count1; ++i1)
        if (ws.rowmax[i1] < ws.rowmax[arg1]) arg1 = i1;
    int arg2 = 0;
    for (int i2 = 1; i2 < count2; ++i2)
        if (ws.colmin[i2] > ws.colmin[arg2]) arg2 = i2;

    auto extreme = [](int idx, int count) { return count >= 2 && (idx == 0 || idx == count - 1); };
    DPNodeResult<PairEval> out{};
    out.upper = ws.rowmax[arg1];
    out.lower = ws.colmin[arg2];
    out.upper_boundary_hit = extreme(arg1, count1) || extreme(ws.rowargmax[arg1], count2);
    out.lower_boundary_hit = extreme(arg2, count2) || extreme(ws.colargmin[arg2], count1);
    return out;
}

/// Shared backward sweep. NodePrep is called once per (t, x) and returns
/// the pair evaluator for that node.
template <class NodePrep>
ValuePair dp_sweep(NodePrep&& prep, const std::function<double(double)>& terminal,
                   const DPConfig& cfg, bool h3_prime) {
    cfg.validate();
    const Grid1D& grid = cfg.grid;
    const double dt = grid.dt();

    ValuePair out;
    out.h3_prime_satisfied = h3_prime;
    for (ValueField* f : {&out.upper, &out.lower}) {
        f->grid = grid;
        f->values.assign(static_cast<std::size_t>(grid.nt + 1) * grid.nx, 0.0);
        f->hamiltonian_tag = "dp";
    }
    for (int i = 0; i < grid.nx; ++i) {
        const double hx = terminal(grid.x(i));
        out.upper.at(grid.nt, i) = hx;
        out.lower.at(grid.nt, i) = hx;
    }

    DPScratch ws;
    long long decisions = 0, hits = 0;
    for (int k = grid.nt - 1; k >= 0; --k) {
        const double t = grid.t(k);
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.x(i);
            auto pe = prep(t, x);
            const auto node = dp_node(pe, cfg.count1, cfg.count2, dt, x, out.upper, out.lower,
                                      k + 1, ws, out.clamps);
            out.upper.at(k, i) = node.upper;
            out.lower.at(k, i) = node.lower;
            decisions += 2;
            hits += (node.upper_boundary_hit ? 1 : 0) + (node.lower_boundary_hit ? 1 : 0);
        }
    }
    out.boundary_hit_fraction = decisions > 0 ? static_cast<double>(hits) / decisions : 0.0;

    const double center = 0.5 * (grid.x_min + grid.x_max);
    const double reach = cfg.interior_fraction * 0.5 * (grid.x_max - grid.x_min) + 1e-12;
    for (int k = 0; k <= grid.nt; ++k)
        for (int i = 0; i < grid.nx; ++i)
            if (std::abs(grid.x(i) - center) <= reach)
                out.gap = std::max(out.gap, std::abs(out.upper.at(k, i) - out.lower.at(k, i)));

    if (out.boundary_hit_fraction > cfg.boundary_hit_limit)
        throw TruncationTooSmall("value_iterate: " +
                                 std::to_string(100.0 * out.boundary_hit_fraction) +
                                 "% of optimizers landed on the control-grid boundary");
    return out;
}

/// Per-node coefficient cache for scalar affine-quadratic games; the pair
/// loop is then pure arithmetic.
struct AQNodeEval {
    double a, b1, b2, q, r1, r2, s, th1, th2;
    const std::vector<double>* g1;
    const std::vector<double>* g2;

    struct FG {
        double f, g;
    };
    FG operator()(int i1, int i2) const {
        const double u1 = (*g1)[i1];
        const double u2 = (*g2)[i2];
        return {a + b1 * u1 + b2 * u2,
                q + 0.5 * r1 * u1 * u1 + s * u1 * u2 - 0.5 * r2 * u2 * u2 + th1 * u1 + th2 * u2};
    }
};

}  // namespace detail

/// Discrete upper/lower values for a scalar affine-quadratic game:
///   V+_k(x) = min_{u1} max_{u2} [ dt g(t_k, x, u1, u2) + V+_{k+1}(x + dt f) ],
/// V- with the order swapped, piecewise-linear interpolation in space,
/// states clamped to the domain (counted), terminal rows = G sampled.
inline ValuePair value_iterate(const AQGameSpec& aq, const GrowthConstants& constants,
                               const DPConfig& cfg) {
    aq.validate();
    if (aq.dim_state != 1 || aq.dim_u1 != 1 || aq.dim_u2 != 1)
        throw std::invalid_argument("value_iterate: the lattice recursion is scalar");
    const auto g1 = cfg.control_grid(1);
    const auto g2 = cfg.control_grid(2);
    Vec xv(1);
    auto prep = [&](double t, double x) {
        xv[0] = x;
        detail::AQNodeEval ne;
        ne.a = aq.A(t, xv)[0];
        ne.b1 = aq.B1(t, xv)(0, 0);
        ne.b2 = aq.B2(t, xv)(0, 0);
        ne.q = aq.Q(t, xv);
        ne.r1 = aq.R1(t, xv)(0, 0);
        ne.r2 = aq.R2(t, xv)(0, 0);
        ne.s = aq.S(t, xv)(0, 0);
        ne.th1 = aq.theta1(t, xv)[0];
        ne.th2 = aq.theta2(t, xv)[0];
        ne.g1 = &g1;
        ne.g2 = &g2;
        return ne;
    };
    auto terminal = [&](double x) {
        Vec v(1);
        v[0] = x;
        return aq.G(v);
    };
    return detail::dp_sweep(prep, terminal, cfg, check_h3_prime(constants));
}

/// Same recursion for a black-box scalar-state game. Controls are scalar
/// lattice points lifted into the players' control spaces axis 0; for
/// multi-axis control spaces use the AQ overload or reduce the game first.
inline ValuePair value_iterate(const GeneralGameSpec& spec, const DPConfig& cfg) {
    spec.validate();
    if (spec.dim_state != 1)
        throw std::invalid_argument("value_iterate: the lattice recursion is scalar");
    if (spec.dim_u1 != 1 || spec.dim_u2 != 1)
        throw std::invalid_argument("value_iterate: scalar controls required");
    const auto g1s = cfg.control_grid(1);
    const auto g2s = cfg.control_grid(2);
    std::vector<Vec> g1(g1s.size(), Vec(1)), g2(g2s.size(), Vec(1));
    for (std::size_t i = 0; i < g1s.size(); ++i) g1[i][0] = g1s[i];
    for (std::size_t i = 0; i < g2s.size(); ++i) g2[i][0] = g2s[i];

    struct GeneralNodeEval {
        const GeneralGameSpec* spec;
        double t;
        Vec x;
        const std::vector<Vec>* g1;
        const std::vector<Vec>* g2;
        struct FG {
            double f, g;
        };
        FG operator()(int i1, int i2) const {
            const Vec& u1 = (*g1)[i1];
            const Vec& u2 = (*g2)[i2];
            return {spec->f(t, x, u1, u2)[0], spec->g(t, x, u1, u2)};
        }
    };
    auto prep = [&](double t, double x) {
        GeneralNodeEval ne;
        ne.spec = &spec;
        ne.t = t;
        ne.x = Vec::Constant(1, x);
        ne.g1 = &g1;
        ne.g2 = &g2;
        return ne;
    };
    auto terminal = [&](double x) { return spec.h(Vec::Constant(1, x)); };
    return detail::dp_sweep(prep, terminal, cfg, check_h3_prime(spec.constants));
}

struct OptimalityCheckReport {
    double stored = 0.0;      // interpolated from the stored upper field
    double recomputed = 0.0;  // one fresh backward step on the stored tail
    double discrepancy = 0.0;
};

/// Recomputes the upper value at (t_index, x_sample) by one fresh
/// recursion step against the stored tail row and compares with the
/// stored value: the discrete shadow of the principle of optimality.
/// At lattice nodes the two computations are identical by construction.
inline OptimalityCheckReport optimality_principle_check(const AQGameSpec& aq, const DPConfig& cfg,
                                                        const ValuePair& pair, int t_index,
                                                        double x_sample) {
    cfg.validate();
    if (t_index < 0 || t_index >= cfg.grid.nt)
        throw std::invalid_argument("optimality_principle_check: t_index out of range");
    const auto g1 = cfg.control_grid(1);
    const auto g2 = cfg.control_grid(2);
    Vec xv = Vec::Constant(1, x_sample);
    const double t = cfg.grid.t(t_index);
    detail::AQNodeEval ne;
    ne.a = aq.A(t, xv)[0];
    ne.b1 = aq.B1(t, xv)(0, 0);
    ne.b2 = aq.B2(t, xv)(0, 0);
    ne.q = aq.Q(t, xv);
    ne.r1 = aq.R1(t, xv)(0, 0);
    ne.r2 = aq.R2(t, xv)(0, 0);
    ne.s = aq.S(t, xv)(0, 0);
    ne.th1 = aq.theta1(t, xv)[0];
    ne.th2 = aq.theta2(t, xv)[0];
    ne.g1 = &g1;
    ne.g2 = &g2;

    detail::DPScratch ws;
    ClampStats clamps;
    const auto node = detail::dp_node(ne, cfg.count1, cfg.count2, cfg.grid.dt(), x_sample,
                                      pair.upper, pair.lower, t_index + 1, ws, clamps);
    OptimalityCheckReport rep;
    rep.recomputed = node.upper;
    rep.stored = pair.upper.interp(t_index, x_sample);
    rep.discrepancy = std::abs(rep.recomputed - rep.stored);
    return rep;
}

struct IsaacsReport {
    std::vector<double> gaps;            // coarse -> fine
    std::vector<int> nx_levels;
    double final_gap = 0.0;
    bool shrinking = false;
    ValuePair finest;
};

/// Runs the recursion at three nested resolutions and reports the
/// upper/lower gap trend; for AQ games the saddle point exists, so the
/// gap must shrink as every grid refines.
inline IsaacsReport isaacs_coincidence(const AQGameSpec& aq, const GrowthConstants& constants,
                                       const DPConfig& cfg) {
    cfg.validate();
    auto coarsen = [](const DPConfig& fine, int factor) {
        DPConfig c = fine;
        c.grid.nx = (fine.grid.nx - 1) / factor + 1;
        c.grid.nt = std::max(1, fine.grid.nt / factor);
        c.count1 = std::max(3, (fine.count1 - 1) / factor + 1) | 1;
        c.count2 = std::max(3, (fine.count2 - 1) / factor + 1) | 1;
        if (c.grid.nx < 3) c.grid.nx = 3;
        return c;
    };

    IsaacsReport rep;
    for (int factor : {4, 2, 1}) {
        const DPConfig level = factor == 1 ? cfg : coarsen(cfg, factor);
        ValuePair pair = value_iterate(aq, constants, level);
        rep.gaps.push_back(pair.gap);
        rep.nx_levels.push_back(level.grid.nx);
        if (factor == 1) rep.finest = std::move(pair);
    }
    rep.final_gap = rep.gaps.back();
    rep.shrinking = rep.gaps[0] >= rep.gaps[1] - 1e-12 && rep.gaps[1] >= rep.gaps[2] - 1e-12;
    return rep;
}

struct GrowthEnvelopeReport {
    double fitted_C = 0.0;                // max |V| / <x>^mu over the interior
    double spatial_growth_exponent = 0.0; // log-log fit of |V(0, x)| vs |x|
    double spatial_lipschitz_K = 0.0;     // max |dV| / ((<x> v <x'>)^{mu-1} dx)
    double temporal_holder_exponent = 0.0;
    double max_temporal_delta = 0.0;
    double max_abs_value = 0.0;
};

/// Fits the growth envelope |V| <= C <x>^mu, the weighted spatial
/// Lipschitz modulus, and the temporal Hoelder exponent near the terminal
/// time from a computed value pair. All quantities are reported, not
/// asserted (the scheme error is conflated with the true moduli).
inline GrowthEnvelopeReport growth_envelope_check(const ValuePair& pair,
                                                  const GrowthConstants& constants) {
    const ValueField& v = pair.upper;
    const Grid1D& grid = v.grid;
    GrowthEnvelopeReport rep;

    const double center = 0.5 * (grid.x_min + grid.x_max);
    const double reach = 0.5 * (grid.x_max - grid.x_min) * 0.75;
    for (int k = 0; k <= grid.nt; ++k) {
        for (int i = 0; i < grid.nx; ++i) {
            if (std::abs(grid.x(i) - center) > reach) continue;
            const double val = std::abs(v.at(k, i));
            rep.max_abs_value = std::max(rep.max_abs_value, val);
            rep.fitted_C = std::max(rep.fitted_C, val / std::pow(jbracket(grid.x(i)), constants.mu));
            if (i + 1 < grid.nx && std::abs(grid.x(i + 1) - center) <= reach) {
                const double w =
                    std::pow(std::max(jbracket(grid.x(i)), jbracket(grid.x(i + 1))), constants.mu - 1.0);
                rep.spatial_lipschitz_K =
                    std::max(rep.spatial_lipschitz_K,
                             std::abs(v.at(k, i + 1) - v.at(k, i)) / (w * grid.dx()));
            }
        }
    }

    // Spatial growth exponent: slope of ln |V(0, x)| against ln |x| on the
    // band 0.5 <= |x| <= 1.5 (clipped to the interior).
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.x(i);
            const double val = std::abs(v.at(0, i));
            if (std::abs(x) < 0.5 || std::abs(x) > 1.5 || std::abs(x - center) > reach) continue;
            if (val < 1e-12) continue;
            const double lx = std::log(std::abs(x)), ly = std::log(val);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
            ++n;
        }
        if (n >= 2 && sxx * n - sx * sx > 1e-15)
            rep.spatial_growth_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }

    // Temporal Hoelder exponent: slope of ln(max_x |V(t) - V(T)|) against
    // ln(T - t) over the quarter of the horizon nearest the terminal time.
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (int k = grid.nt - 1; k >= 0; --k) {
            const double span = grid.T - grid.t(k);
            if (span > 0.25 * grid.T + 1e-15) break;
            double delta = 0.0;
            for (int i = 0; i < grid.nx; ++i) {
                if (std::abs(grid.x(i) - center) > reach) continue;
                delta = std::max(delta, std::abs(v.at(k, i) - v.at(grid.nt, i)));
            }
            rep.max_temporal_delta = std::max(rep.max_temporal_delta, delta);
            if (delta < 1e-14) continue;
            const double lx = std::log(span), ly = std::log(delta);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
            ++n;
        }
        if (n >= 2 && sxx * n - sx * sx > 1e-15)
            rep.temporal_holder_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return rep;
}

}  // namespace hjgames
