#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "helpers.hpp"
#include "hjgames/aq_saddle.hpp"

using namespace hjgames;
using testutil::random_aq_game;
using testutil::random_vec;

namespace {

AQGameSpec scalar_game(double r1, double r2, double s, double b1, double b2, double q = 0.0,
                       double a = 0.0) {
    AQGameSpec g;
    g.horizon = 1.0;
    g.A = [a](double, const Vec& x) { return Vec::Constant(1, a * x[0]); };
    g.B1 = [b1](double, const Vec&) { return Mat::Constant(1, 1, b1); };
    g.B2 = [b2](double, const Vec&) { return Mat::Constant(1, 1, b2); };
    g.Q = [q](double, const Vec&) { return q; };
    g.R1 = [r1](double, const Vec&) { return Mat::Constant(1, 1, r1); };
    g.R2 = [r2](double, const Vec&) { return Mat::Constant(1, 1, r2); };
    g.S = [s](double, const Vec&) { return Mat::Constant(1, 1, s); };
    g.theta1 = [](double, const Vec&) { return Vec::Zero(1); };
    g.theta2 = [](double, const Vec&) { return Vec::Zero(1); };
    g.G = [](const Vec&) { return 0.0; };
    return g;
}

const Vec x0 = Vec::Zero(1);

}  // namespace

TEST_CASE("block matrix assembly", "[aq]") {
    SECTION("diagonal case") {
        const Mat m = assemble_block_matrix(scalar_game(1, 1, 0, 1, 1), 0.0, x0);
        CHECK(m(0, 0) == 1.0);
        CHECK(m(0, 1) == 0.0);
        CHECK(m(1, 0) == 0.0);
        CHECK(m(1, 1) == -1.0);
        CHECK(m.determinant() == Catch::Approx(-1.0));
    }
    SECTION("coupled case") {
        const Mat m = assemble_block_matrix(scalar_game(2, 2, 1, 1, 0), 0.0, x0);
        CHECK(m.determinant() == Catch::Approx(-5.0));
    }
    SECTION("identity blocks in dimension two") {
        AQGameSpec g;
        g.dim_u1 = g.dim_u2 = 2;
        g.A = [](double, const Vec&) { return Vec::Zero(1); };
        g.B1 = [](double, const Vec&) { return Mat::Zero(1, 2); };
        g.B2 = [](double, const Vec&) { return Mat::Zero(1, 2); };
        g.Q = [](double, const Vec&) { return 0.0; };
        g.R1 = [](double, const Vec&) { return Mat::Identity(2, 2); };
        g.R2 = [](double, const Vec&) { return Mat::Identity(2, 2); };
        g.S = [](double, const Vec&) { return Mat::Zero(2, 2); };
        g.theta1 = [](double, const Vec&) { return Vec::Zero(2); };
        g.theta2 = [](double, const Vec&) { return Vec::Zero(2); };
        g.G = [](const Vec&) { return 0.0; };
        const Mat m = assemble_block_matrix(g, 0.0, x0);
        CHECK(m.determinant() == Catch::Approx(1.0));  // (-1)^{m2} with m2 = 2
    }
    SECTION("indefinite R1 is rejected") {
        CHECK_THROWS_AS(assemble_block_matrix(scalar_game(-1, 1, 0, 1, 1), 0.0, x0),
                        NotPositiveDefinite);
    }
    SECTION("asymmetric R1 is rejected") {
        AQGameSpec g = scalar_game(1, 1, 0, 1, 1);
        g.dim_u1 = 2;
        g.R1 = [](double, const Vec&) {
            Mat m(2, 2);
            m << 1.0, 0.5, 0.2, 1.0;
            return m;
        };
        g.B1 = [](double, const Vec&) { return Mat::Zero(1, 2); };
        g.S = [](double, const Vec&) { return Mat::Zero(1, 2); };
        g.theta1 = [](double, const Vec&) { return Vec::Zero(2); };
        CHECK_THROWS_AS(assemble_block_matrix(g, 0.0, x0), NotPositiveDefinite);
    }
}

TEST_CASE("saddle point worked examples", "[aq]") {
    SECTION("uncoupled unit weights") {
        const auto res = saddle_point(scalar_game(1, 1, 0, 1, 1), 0.0, x0, Vec::Constant(1, 1.0));
        CHECK(res.u1_bar[0] == Catch::Approx(-1.0));
        CHECK(res.u2_bar[0] == Catch::Approx(1.0));
        CHECK(res.q0 == Catch::Approx(0.0).margin(1e-14));
    }
    SECTION("coupled example") {
        const auto game = scalar_game(2, 2, 1, 1, 0);
        const auto res = saddle_point(game, 0.0, x0, Vec::Constant(1, 2.0));
        CHECK(res.u1_bar[0] == Catch::Approx(-0.8));
        CHECK(res.u2_bar[0] == Catch::Approx(-0.4));
        CHECK(res.q0 == Catch::Approx(-0.8));
        // stationarity of the quadratic form at the saddle
        CHECK(2.0 + 2.0 * res.u1_bar[0] + res.u2_bar[0] == Catch::Approx(0.0).margin(1e-12));
        CHECK(res.u1_bar[0] - 2.0 * res.u2_bar[0] == Catch::Approx(0.0).margin(1e-12));
        // brute-force confirmation over a coarse control grid
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 120; ++i) {
            const double u1 = -3.0 + 0.05 * i;
            double worst = -std::numeric_limits<double>::infinity();
            for (int j = 0; j <= 120; ++j) {
                const double u2 = -3.0 + 0.05 * j;
                worst = std::max(worst, game.hamiltonian(0.0, x0, Vec::Constant(1, 2.0),
                                                         Vec::Constant(1, u1), Vec::Constant(1, u2)));
            }
            best = std::min(best, worst);
        }
        CHECK(best == Catch::Approx(-0.8).margin(0.01));
    }
    SECTION("zero right-hand side returns Q") {
        auto game = scalar_game(2, 3, 1, 1, 1, 7.0);
        const auto res = saddle_point(game, 0.0, x0, Vec::Zero(1));
        CHECK(res.u1_bar[0] == 0.0);
        CHECK(res.u2_bar[0] == 0.0);
        CHECK(res.q0 == Catch::Approx(7.0));
    }
}

TEST_CASE("hessian in p", "[aq]") {
    SECTION("symmetric game cancels") {
        CHECK(hessian_pp(scalar_game(1, 1, 0, 1, 1), 0.0, x0)(0, 0) ==
              Catch::Approx(0.0).margin(1e-14));
    }
    SECTION("single controlled player") {
        // q0(p) = -p^2/2 here (minimize p u + u^2/2), so d^2 q0/dp^2 = -1;
        // equivalently twice the p^2 coefficient of the quadratic form.
        CHECK(hessian_pp(scalar_game(1, 1, 0, 1, 0), 0.0, x0)(0, 0) == Catch::Approx(-1.0));
    }
    SECTION("no control influence") {
        CHECK(hessian_pp(scalar_game(1, 1, 0, 0, 0), 0.0, x0)(0, 0) == Catch::Approx(0.0));
    }
    SECTION("matches central finite differences of q0") {
        std::mt19937_64 rng(99);
        for (int trial = 0; trial < 25; ++trial) {
            const int n = 1 + static_cast<int>(rng() % 3);
            const auto game = random_aq_game(rng, n, 1 + static_cast<int>(rng() % 3),
                                             1 + static_cast<int>(rng() % 3));
            const Vec x = random_vec(rng, n, 1.0);
            const Vec p = random_vec(rng, n, 2.0);
            const Mat hess = hessian_pp(game, 0.3, x);
            const double delta = 1e-4;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    Vec pp = p, pm = p, mp = p, mm = p;
                    pp[i] += delta; pp[j] += delta;
                    pm[i] += delta; pm[j] -= delta;
                    mp[i] -= delta; mp[j] += delta;
                    mm[i] -= delta; mm[j] -= delta;
                    const double fd = (saddle_point(game, 0.3, x, pp).q0 -
                                       saddle_point(game, 0.3, x, pm).q0 -
                                       saddle_point(game, 0.3, x, mp).q0 +
                                       saddle_point(game, 0.3, x, mm).q0) /
                                      (4.0 * delta * delta);
                    CHECK(hess(i, j) == Catch::Approx(fd).margin(1e-5 * (1.0 + std::abs(fd))));
                }
            }
        }
    }
}

TEST_CASE("saddle inequalities and q0 consistency on random games", "[aq]") {
    std::mt19937_64 rng(20240812);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const int m1 = 1 + static_cast<int>(rng() % 3);
        const int m2 = 1 + static_cast<int>(rng() % 3);
        const auto game = random_aq_game(rng, n, m1, m2);
        const Vec x = random_vec(rng, n, 1.5);
        const Vec p = random_vec(rng, n, 2.0);
        const double t = testutil::uniform(rng, 0.0, 1.0);
        const auto res = saddle_point(game, t, x, p);

        const double direct = game.hamiltonian(t, x, p, res.u1_bar, res.u2_bar);
        REQUIRE(res.q0 == Catch::Approx(direct).epsilon(1e-9).margin(1e-9));

        for (int probe = 0; probe < 20; ++probe) {
            const Vec u1 = res.u1_bar + random_vec(rng, m1, 2.0);
            const Vec u2 = res.u2_bar + random_vec(rng, m2, 2.0);
            REQUIRE(game.hamiltonian(t, x, p, res.u1_bar, u2) <= res.q0 + 1e-9);
            REQUIRE(res.q0 <= game.hamiltonian(t, x, p, u1, res.u2_bar) + 1e-9);
        }

        // determinant identity from the Schur factorization
        const Mat r1 = game.R1(t, x), r2 = game.R2(t, x), s = game.S(t, x);
        const double expected = std::pow(-1.0, m2) * r1.determinant() *
                                (r2 + s * r1.inverse() * s.transpose()).determinant();
        REQUIRE(res.block_matrix.determinant() ==
                Catch::Approx(expected).epsilon(1e-8).margin(1e-10));
    }
}

TEST_CASE("brute-forced isaacs values bracket the saddle value", "[aq]") {
    SECTION("coupled example converges to q0") {
        const auto game = scalar_game(2, 2, 1, 1, 0);
        const Vec p = Vec::Constant(1, 2.0);
        const auto values = isaacs_bruteforce(game, 0.0, x0, p, 3.0, 241);
        CHECK(std::abs(values.inf_sup - (-0.8)) <= 0.05);
        CHECK(std::abs(values.sup_inf - (-0.8)) <= 0.05);
        CHECK(values.gap() <= 0.05);
    }
    SECTION("saddle at origin with constant cost") {
        auto game = scalar_game(1, 1, 0, 1, 1, 7.0);
        const auto values = isaacs_bruteforce(game, 0.0, x0, Vec::Zero(1), 2.0, 81);
        CHECK(values.inf_sup == Catch::Approx(7.0).margin(1e-9));
        CHECK(values.sup_inf == Catch::Approx(7.0).margin(1e-9));
    }
    SECTION("separated game has zero gap by commuting optimizations") {
        const auto game = scalar_game(1.5, 2.5, 0.0, 1.0, 1.0);
        const auto values = isaacs_bruteforce(game, 0.0, x0, Vec::Constant(1, 1.2), 3.0, 121);
        CHECK(values.gap() <= 1e-9);
    }
    SECTION("gap shrinks under grid refinement") {
        const auto game = scalar_game(2, 2, 1, 1, 0);
        const Vec p = Vec::Constant(1, 2.0);
        const double g61 = isaacs_gap(game, 0.0, x0, p, 3.1, 61);
        const double g121 = isaacs_gap(game, 0.0, x0, p, 3.1, 121);
        const double g241 = isaacs_gap(game, 0.0, x0, p, 3.1, 241);
        CHECK(g61 >= g121 - 1e-12);
        CHECK(g121 >= g241 - 1e-12);
    }
}
