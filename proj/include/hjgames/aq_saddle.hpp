#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "hjgames/errors.hpp"
#include "hjgames/game_spec.hpp"

namespace hjgames {

namespace detail {

/// Rejects matrices that are not symmetric positive definite. Symmetry is
/// checked to 1e-10 relative; definiteness by Cholesky.
inline void require_spd(const Mat& R, const char* name) {
    if (R.rows() != R.cols()) throw NotPositiveDefinite(std::string(name) + " is not square");
    const double scale = 1.0 + R.cwiseAbs().maxCoeff();
    if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NotPositiveDefinite(std::string(name) + " is not symmetric");
    Eigen::LLT<Mat> llt(R);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite(std::string(name) + " is not positive definite");
}

}  // namespace detail

/// The saddle block [[R1, S^T], [S, -R2]] of the quadratic control form.
/// Invertible whenever R1, R2 are positive definite; its determinant is
/// (-1)^{m2} det(R1) det(R2 + S R1^{-1} S^T).
inline Mat assemble_block_matrix(const AQGameSpec& spec, double t, const Vec& x) {
    const Mat r1 = spec.R1(t, x);
    const Mat r2 = spec.R2(t, x);
    const Mat s = spec.S(t, x);
    detail::require_spd(r1, "R1");
    detail::require_spd(r2, "R2");
    const int m1 = static_cast<int>(r1.rows());
    const int m2 = static_cast<int>(r2.rows());
    if (s.rows() != m2 || s.cols() != m1) throw std::invalid_argument("S must be m2 x m1");
    Mat block(m1 + m2, m1 + m2);
    block.topLeftCorner(m1, m1) = r1;
    block.topRightCorner(m1, m2) = s.transpose();
    block.bottomLeftCorner(m2, m1) = s;
    block.bottomRightCorner(m2, m2) = -r2;
    return block;
}

struct SaddleResult {
    Vec u1_bar;       // player-1 saddle control
    Vec u2_bar;       // player-2 saddle control
    double q0 = 0.0;  // saddle value of the pre-Hamiltonian
    Mat block_matrix;
    Mat hessian_pp;   // d^2 q0 / dp^2, indefinite in general
};

/// Closed-form saddle point of the quadratic pre-Hamiltonian: solves
/// block * (u1; u2) = -(B1^T p + th1; B2^T p + th2) and evaluates the
/// saddle value q0 = Q + <p, A> - 1/2 rhs^T block^{-1} rhs.
inline SaddleResult saddle_point(const AQGameSpec& spec, double t, const Vec& x, const Vec& p) {
    SaddleResult out;
    out.block_matrix = assemble_block_matrix(spec, t, x);
    const Mat b1 = spec.B1(t, x);
    const Mat b2 = spec.B2(t, x);
    const int m1 = static_cast<int>(b1.cols());
    const int m2 = static_cast<int>(b2.cols());

    Vec rhs(m1 + m2);
    rhs.head(m1) = b1.transpose() * p + spec.theta1(t, x);
    rhs.tail(m2) = b2.transpose() * p + spec.theta2(t, x);

    Eigen::FullPivLU<Mat> lu(out.block_matrix);
    if (!lu.isInvertible()) throw SingularSystem("saddle block matrix is singular");
    const Vec u = lu.solve(-rhs);
    out.u1_bar = u.head(m1);
    out.u2_bar = u.tail(m2);
    // -1/2 rhs^T block^{-1} rhs = +1/2 <rhs, u> since u = -block^{-1} rhs.
    out.q0 = spec.Q(t, x) + p.dot(spec.A(t, x)) + 0.5 * rhs.dot(u);

    Mat stacked(m1 + m2, b1.rows());
    stacked.topRows(m1) = b1.transpose();
    stacked.bottomRows(m2) = b2.transpose();
    out.hessian_pp = -stacked.transpose() * lu.solve(stacked);
    return out;
}

/// d^2/dp^2 of the saddle value: -(B1^T; B2^T)^T block^{-1} (B1^T; B2^T).
/// q0 is -1/2 <block^{-1} rhs, rhs> plus terms linear in p, so the
/// second derivative carries no 1/2 (the Hessian of 1/2 p^T A p is A);
/// it agrees with central differences of q0 to rounding.
inline Mat hessian_pp(const AQGameSpec& spec, double t, const Vec& x) {
    const Mat block = assemble_block_matrix(spec, t, x);
    const Mat b1 = spec.B1(t, x);
    const Mat b2 = spec.B2(t, x);
    Mat stacked(b1.cols() + b2.cols(), b1.rows());
    stacked.topRows(b1.cols()) = b1.transpose();
    stacked.bottomRows(b2.cols()) = b2.transpose();
    Eigen::FullPivLU<Mat> lu(block);
    if (!lu.isInvertible()) throw SingularSystem("saddle block matrix is singular");
    return -stacked.transpose() * lu.solve(stacked);
}

namespace detail {

/// Uniform per-axis lattice over the box [-radius, radius]^m kept inside
/// the Euclidean ball of the same radius. For m = 1 this is a plain
/// linspace.
inline std::vector<Vec> ball_lattice(int dim, double radius, int points_per_axis) {
    std::vector<Vec> out;
    if (points_per_axis < 1 || dim < 1) return out;
    const double step = points_per_axis > 1 ? 2.0 * radius / (points_per_axis - 1) : 0.0;
    std::vector<int> idx(dim, 0);
    Vec u(dim);
    const double r_keep = radius * (1.0 + 1e-12);
    while (true) {
        for (int d = 0; d < dim; ++d)
            u[d] = points_per_axis > 1 ? -radius + idx[d] * step : 0.0;
        if (u.norm() <= r_keep) out.push_back(u);
        int d = dim - 1;
        while (d >= 0 && ++idx[d] == points_per_axis) idx[d--] = 0;
        if (d < 0) break;
    }
    return out;
}

}  // namespace detail

struct MinMaxValues {
    double inf_sup = 0.0;
    double sup_inf = 0.0;
    double gap() const { return std::abs(inf_sup - sup_inf); }
};

/// Brute-forces inf-sup and sup-inf of the pre-Hamiltonian over uniform
/// control lattices inside balls of the given radius. Both orders use
/// the identical lattices; ties break toward the lowest lattice index.
inline MinMaxValues isaacs_bruteforce(const AQGameSpec& spec, double t, const Vec& x, const Vec& p,
                                      double search_radius, int grid_points) {
    if (!(search_radius > 0.0)) throw std::invalid_argument("isaacs_bruteforce: radius must be > 0");
    const auto g1 = detail::ball_lattice(spec.dim_u1, search_radius, grid_points);
    const auto g2 = detail::ball_lattice(spec.dim_u2, search_radius, grid_points);

    MinMaxValues out;
    double infsup = std::numeric_limits<double>::infinity();
    for (const Vec& u1 : g1) {
        double best = -std::numeric_limits<double>::infinity();
        for (const Vec& u2 : g2) best = std::max(best, spec.hamiltonian(t, x, p, u1, u2));
        if (best < infsup) infsup = best;
    }
    double supinf = -std::numeric_limits<double>::infinity();
    for (const Vec& u2 : g2) {
        double worst = std::numeric_limits<double>::infinity();
        for (const Vec& u1 : g1) worst = std::min(worst, spec.hamiltonian(t, x, p, u1, u2));
        if (worst > supinf) supinf = worst;
    }
    out.inf_sup = infsup;
    out.sup_inf = supinf;
    return out;
}

/// |inf-sup - sup-inf| on the brute-force lattice; converges to 0 under
/// refinement for AQ games (the saddle point exists and is unique).
inline double isaacs_gap(const AQGameSpec& spec, double t, const Vec& x, const Vec& p,
                         double search_radius, int grid_points) {
    return isaacs_bruteforce(spec, t, x, p, search_radius, grid_points).gap();
}

}  // namespace hjgames
