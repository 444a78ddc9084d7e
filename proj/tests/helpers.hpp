#pragma once

#include <random>

#include "hjgames/game_spec.hpp"
#include "hjgames/growth.hpp"

namespace testutil {

using hjgames::AQGameSpec;
using hjgames::GrowthConstants;
using hjgames::Mat;
using hjgames::Vec;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Random symmetric positive definite matrix with eigenvalues in
/// [eig_min, eig_min + spread].
inline Mat random_spd(std::mt19937_64& rng, int dim, double eig_min = 0.3, double spread = 2.0) {
    Mat a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = uniform(rng, -1.0, 1.0);
    Eigen::HouseholderQR<Mat> qr(a);
    Mat q = qr.householderQ();
    Vec eigs(dim);
    for (int i = 0; i < dim; ++i) eigs[i] = eig_min + uniform(rng, 0.0, spread);
    return q * eigs.asDiagonal() * q.transpose();
}

inline Vec random_vec(std::mt19937_64& rng, int dim, double radius) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = uniform(rng, -radius, radius);
    return v;
}

/// Constant-coefficient AQ game with random SPD weights; theta and S are
/// filled unless `separated`.
inline AQGameSpec random_aq_game(std::mt19937_64& rng, int n, int m1, int m2,
                                 bool separated = false) {
    AQGameSpec spec;
    spec.dim_state = n;
    spec.dim_u1 = m1;
    spec.dim_u2 = m2;
    spec.horizon = 1.0;
    const Vec a = random_vec(rng, n, 1.0);
    Mat b1(n, m1), b2(n, m2);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < m1; ++c) b1(r, c) = uniform(rng, -1.5, 1.5);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < m2; ++c) b2(r, c) = uniform(rng, -1.5, 1.5);
    const double q = uniform(rng, -2.0, 2.0);
    const Mat r1 = random_spd(rng, m1);
    const Mat r2 = random_spd(rng, m2);
    Mat s = Mat::Zero(m2, m1);
    Vec th1 = Vec::Zero(m1), th2 = Vec::Zero(m2);
    if (!separated) {
        // Keep S small relative to the R blocks so the quadratic form keeps
        // a genuine saddle structure in every tested dimension.
        for (int r = 0; r < m2; ++r)
            for (int c = 0; c < m1; ++c) s(r, c) = uniform(rng, -0.25, 0.25);
        th1 = random_vec(rng, m1, 1.0);
        th2 = random_vec(rng, m2, 1.0);
    }
    spec.A = [a](double, const Vec&) { return a; };
    spec.B1 = [b1](double, const Vec&) { return b1; };
    spec.B2 = [b2](double, const Vec&) { return b2; };
    spec.Q = [q](double, const Vec&) { return q; };
    spec.R1 = [r1](double, const Vec&) { return r1; };
    spec.R2 = [r2](double, const Vec&) { return r2; };
    spec.S = [s](double, const Vec&) { return s; };
    spec.theta1 = [th1](double, const Vec&) { return th1; };
    spec.theta2 = [th2](double, const Vec&) { return th2; };
    spec.G = [](const Vec& x) { return x.squaredNorm(); };
    return spec;
}

/// The scalar benchmark game (drift 0, unit control on player 1 only,
/// state cost x^2, unit weights, zero terminal): value p(t) x^2 with
/// p(t) = tanh(T - t).
inline AQGameSpec lq_benchmark(double horizon = 1.0) {
    return hjgames::aq_from_lq(0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0, horizon);
}

inline GrowthConstants lq_benchmark_constants() {
    GrowthConstants k;
    k.L = 1.0;
    k.c = 1.0;
    k.sigma1 = k.sigma2 = 1.0;
    k.rho1 = k.rho2 = 2.0;
    k.mu = 2.0;
    return k;
}

}  // namespace testutil
