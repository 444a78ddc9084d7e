#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "hjgames/riccati.hpp"

using namespace hjgames;

namespace {

RiccatiProblem prob(double a, double b, double c, double g, double T) {
    return RiccatiProblem{a, b, c, g, T};
}

double max_closed_vs_numeric(const RiccatiProblem& p) {
    const auto numeric = integrate_numeric(p);
    REQUIRE_FALSE(numeric.blew_up);
    double worst = 0.0;
    for (std::size_t i = 0; i < numeric.times.size(); ++i)
        worst = std::max(worst, std::abs(closed_form(p, numeric.times[i]) - numeric.values[i]));
    return worst;
}

/// Blow-up threshold safely above every finite solution on [0, T] for
/// coefficients in [-3, 3]: the beta = 0 solutions reach (|g| + |gamma| T) e^{3T}.
double agreement_threshold(double T) {
    return std::max(1e8, 1e3 * (3.0 + 3.0 * T) * std::exp(3.0 * T));
}

}  // namespace

TEST_CASE("classification of the paper counterexamples", "[riccati]") {
    SECTION("negative discriminant") {
        const auto cls = classify(prob(1, 1, 1, 0, 1));
        CHECK(cls.case_tag == RiccatiCase::DiscNegativeTan);
        CHECK_FALSE(cls.solvable_all_T);
        // tangent-window horizon: (pi/2 - atan(1/sqrt(3))) / (sqrt(3)/2)
        CHECK(cls.max_horizon == Catch::Approx(2.0 * M_PI / (3.0 * std::sqrt(3.0))));
    }
    SECTION("positive discriminant with the solvability inequality violated") {
        const auto cls = classify(prob(0, -1, 1, -2, 1));
        CHECK(cls.case_tag == RiccatiCase::DiscPositiveExponential);
        CHECK_FALSE(cls.solvable_all_T);
        CHECK(cls.max_horizon == Catch::Approx(0.5 * std::log(3.0)));
    }
    SECTION("beta = 0 is always globally solvable") {
        for (double alpha : {-2.0, 0.0, 3.0}) {
            const auto cls = classify(prob(alpha, 0, 5, -7, 2));
            CHECK(cls.case_tag == RiccatiCase::LinearBetaZero);
            CHECK(cls.solvable_all_T);
            CHECK_FALSE(cls.kappa.has_value());
            CHECK(std::isinf(cls.max_horizon));
        }
    }
    SECTION("zero discriminant splits on the pivot") {
        const auto constant = classify(prob(2, 1, 1, -1, 1));  // 2bg + a = 0
        CHECK(constant.case_tag == RiccatiCase::DiscZeroConstant);
        CHECK(constant.solvable_all_T);
        const auto rational = classify(prob(2, 1, 1, 0, 0.5));  // pivot 2 > 0
        CHECK(rational.case_tag == RiccatiCase::DiscZeroRational);
        CHECK_FALSE(rational.solvable_all_T);
        CHECK(rational.max_horizon == Catch::Approx(1.0));
        const auto negative_pivot = classify(prob(-2, 1, 1, 0, 5));  // pivot -2 < 0
        CHECK(negative_pivot.case_tag == RiccatiCase::DiscZeroRational);
        CHECK(negative_pivot.solvable_all_T);
    }
    SECTION("positive discriminant constant branches") {
        // disc = 4, kappa = 1, g = -alpha/(2 beta) +- kappa
        const auto upper = classify(prob(0, 1, -1, 1, 3));
        CHECK(upper.case_tag == RiccatiCase::DiscPositiveConstant);
        CHECK(upper.solvable_all_T);
        const auto lower = classify(prob(0, 1, -1, -1, 3));
        CHECK(lower.case_tag == RiccatiCase::DiscPositiveConstant);
        CHECK(lower.solvable_all_T);
    }
}

TEST_CASE("closed forms against the numeric integrator", "[riccati]") {
    SECTION("pure accumulation") {
        CHECK(closed_form(prob(0, 0, 1, 0, 1), 0.0) == Catch::Approx(1.0));
    }
    SECTION("rational form with pole outside the horizon") {
        const auto p = prob(2, 1, 1, 0, 0.5);
        CHECK(closed_form(p, 0.0) == Catch::Approx(1.0));  // -1 + 1/(1 - 0.5)
        CHECK(max_closed_vs_numeric(p) <= 1e-6);
    }
    SECTION("hyperbolic tangent benchmark") {
        const auto p = prob(0, -1, 1, 0, 1);
        CHECK(closed_form(p, 0.0) == Catch::Approx(std::tanh(1.0)).margin(1e-12));
        CHECK(max_closed_vs_numeric(p) <= 1e-6);
        const auto numeric = integrate_numeric(p);
        CHECK(numeric.values.front() == Catch::Approx(std::tanh(1.0)).margin(1e-9));
    }
    SECTION("one representative problem per case tag") {
        const RiccatiProblem cases[] = {
            prob(1.5, 0, -2, 3, 2),     // LinearBetaZero
            prob(2, 1, 1, -1, 2),       // DiscZeroConstant
            prob(2, 1, 1, 0, 0.5),      // DiscZeroRational
            prob(1, 1, 1, 0, 1),        // DiscNegativeTan (horizon ~1.209)
            prob(0, 1, -1, 1, 2),       // DiscPositiveConstant
            prob(0, -1, 1, 0, 1),       // DiscPositiveExponential
        };
        const RiccatiCase expected[] = {
            RiccatiCase::LinearBetaZero,        RiccatiCase::DiscZeroConstant,
            RiccatiCase::DiscZeroRational,      RiccatiCase::DiscNegativeTan,
            RiccatiCase::DiscPositiveConstant,  RiccatiCase::DiscPositiveExponential,
        };
        for (int i = 0; i < 6; ++i) {
            INFO("case " << to_string(expected[i]));
            CHECK(classify(cases[i]).case_tag == expected[i]);
            CHECK(max_closed_vs_numeric(cases[i]) <= 1e-6);
        }
    }
    SECTION("ODE residual of the closed form under central differencing") {
        std::mt19937_64 rng(314);
        std::uniform_real_distribution<double> coeff(-2.0, 2.0);
        int tested = 0;
        while (tested < 100) {
            const RiccatiProblem p = prob(coeff(rng), coeff(rng), coeff(rng), coeff(rng), 1.0);
            const auto cls = classify(p);
            if (!cls.solvable_all_T && cls.max_horizon <= p.T * 1.5) continue;
            ++tested;
            for (double t : {0.1, 0.5, 0.9}) {
                const double d = 1e-5;
                const double pdot = (closed_form(p, t + d) - closed_form(p, t - d)) / (2.0 * d);
                const double val = closed_form(p, t);
                const double residual = pdot + p.alpha * val + p.beta * val * val + p.gamma;
                REQUIRE(std::abs(residual) <= 1e-7 * (1.0 + std::abs(val) * std::abs(val)));
            }
        }
    }
}

TEST_CASE("numeric blow-up detection", "[riccati]") {
    SECTION("rational pole inside the horizon") {
        const auto res = integrate_numeric(prob(2, 1, 1, 0, 1.5));
        REQUIRE(res.blew_up);
        REQUIRE(res.blowup_time.has_value());
        CHECK(*res.blowup_time == Catch::Approx(0.5).margin(0.05));  // pole at T - 1
    }
    SECTION("linear problems never blow up") {
        for (double alpha : {-3.0, 0.0, 3.0})
            CHECK_FALSE(integrate_numeric(prob(alpha, 0, 2, -5, 20), agreement_threshold(20)).blew_up);
    }
    SECTION("outside the validity window the closed form refuses") {
        const auto p = prob(2, 1, 1, 0, 1.5);  // horizon 1, pole at t = 0.5
        CHECK_THROWS_AS(closed_form(p, 0.2), OutsideValidityWindow);
        CHECK_NOTHROW(closed_form(p, 0.8));
    }
}

TEST_CASE("constant solutions stay constant", "[riccati]") {
    // (A1): 4 b^2 (g + a/2b - kappa)(g + a/2b + kappa) = 0
    const RiccatiProblem branches[] = {prob(0, 1, -1, 1, 4), prob(0, 1, -1, -1, 4),
                                       prob(2, 1, 1, -1, 4)};
    for (const auto& p : branches) {
        const auto cls = classify(p);
        for (double t : {0.0, 1.3, 4.0}) CHECK(closed_form(p, t) == Catch::Approx(p.g).margin(1e-12));
        CHECK(cls.solvable_all_T);
    }
}

TEST_CASE("classifier agrees with the integrator on random problems", "[riccati]") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> coeff(-3.0, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        RiccatiProblem p = prob(coeff(rng), coeff(rng), coeff(rng), coeff(rng), 1.0);
        const auto cls = classify(p);
        for (double T : {1.0, 5.0, 20.0}) {
            p.T = T;
            const bool predicted_blowup = !cls.solvable_all_T && T >= cls.max_horizon;
            const auto res = integrate_numeric(p, agreement_threshold(T));
            INFO("alpha=" << p.alpha << " beta=" << p.beta << " gamma=" << p.gamma << " g=" << p.g
                          << " T=" << T << " horizon=" << cls.max_horizon);
            REQUIRE(res.blew_up == predicted_blowup);
        }
    }
}

TEST_CASE("LQ-to-Riccati coefficient mapping", "[riccati]") {
    SECTION("benchmark data") {
        const auto p = lq_to_riccati(0, 1, 0, 1, 1, 1, 0, 1);
        CHECK(p.alpha == 0.0);
        CHECK(p.beta == -1.0);
        CHECK(p.gamma == 1.0);
        CHECK(p.g == 0.0);
    }
    SECTION("no control makes the equation linear") {
        const auto p = lq_to_riccati(1, 0, 0, 2, 1, 1, 3, 1);
        CHECK(p.beta == 0.0);
        CHECK(classify(p).solvable_all_T);
    }
    SECTION("matched control authority cancels") {
        const auto p = lq_to_riccati(0.5, 2, 2, 1, 4, 4, 0, 1);
        CHECK(p.beta == 0.0);
    }
    SECTION("weights must be positive") {
        CHECK_THROWS_AS(lq_to_riccati(0, 1, 0, 1, 0.0, 1, 0, 1), NonPositiveWeights);
    }
}
