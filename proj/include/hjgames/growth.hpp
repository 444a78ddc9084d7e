#pragma once

#include <array>
#include <cmath>
#include <string>

#include "hjgames/errors.hpp"

namespace hjgames {

/// The Japanese bracket <x> = sqrt(1 + |x|^2).
inline double jbracket(double norm) { return std::sqrt(1.0 + norm * norm); }

/// Coercivity and growth parameters of a two-player game:
///
///   |f(t,x,u1,u2)| <= L(<x> + |u1|^sigma1 + |u2|^sigma2)
///   c|u1|^rho1 - L(<x>^mu + |u2|^rho2) <= g <= L(<x>^mu + |u1|^rho1) - c|u2|^rho2
///
/// The user asserts these for their dynamics f and running cost g; the
/// library never tries to infer them (the sampling auditors can falsify
/// wrong constants, nothing more).
struct GrowthConstants {
    double L = 1.0;       // growth bound, > 0
    double c = 1.0;       // coercivity, > 0
    double sigma1 = 1.0;  // dynamics control exponents, >= 0
    double sigma2 = 1.0;
    double rho1 = 2.0;    // cost control exponents, > 0
    double rho2 = 2.0;
    double mu = 1.0;      // state growth exponent, >= 1

    double sigma(int player) const { return player == 1 ? sigma1 : sigma2; }
    double rho(int player) const { return player == 1 ? rho1 : rho2; }

    void validate() const {
        if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("GrowthConstants: L must be > 0");
        if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("GrowthConstants: c must be > 0");
        if (!(sigma1 >= 0.0) || !(sigma2 >= 0.0)) throw std::invalid_argument("GrowthConstants: sigma_i must be >= 0");
        if (!(rho1 > 0.0) || !(rho2 > 0.0)) throw std::invalid_argument("GrowthConstants: rho_i must be > 0");
        if (!(mu >= 1.0)) throw std::invalid_argument("GrowthConstants: mu must be >= 1");
    }
};

/// Coercivity compatibility: sigma_i < rho_i for both players.
inline bool check_h3(const GrowthConstants& k) {
    k.validate();
    return k.sigma1 < k.rho1 && k.sigma2 < k.rho2;
}

/// Strengthened compatibility: sigma_i * mu < rho_i for both players.
inline bool check_h3_prime(const GrowthConstants& k) {
    k.validate();
    return k.sigma1 * k.mu < k.rho1 && k.sigma2 * k.mu < k.rho2;
}

struct InequalityVerdict {
    std::string id;  // readable formula of the left-hand side
    double lhs;      // evaluated left-hand side (must be <= 1)
    bool holds;
};

struct CompatibilityReport {
    std::array<InequalityVerdict, 12> items;
    bool all_hold = true;
};

/// Evaluates the twelve exponent inequalities that bound the Lipschitz
/// modulus terms of the Hamiltonian against the uniqueness class.
/// Comparisons are exact <= 1 in floating point, no epsilon slack.
inline CompatibilityReport check_compatibility_524(const GrowthConstants& k) {
    k.validate();
    const double s1 = k.sigma1, s2 = k.sigma2, r1 = k.rho1, r2 = k.rho2, m = k.mu;
    if (!(r1 - s1 > 0.0) || !(r2 - s2 > 0.0))
        throw DegenerateExponents("check_compatibility_524: rho_i - sigma_i must be > 0");

    CompatibilityReport rep;
    int n = 0;
    auto put = [&](std::string id, double lhs) {
        rep.items[n++] = InequalityVerdict{std::move(id), lhs, lhs <= 1.0};
    };
    put("s1*mu/r1", s1 * m / r1);
    put("s2*mu/r2", s2 * m / r2);
    put("(mu-1)*s1/(r1-s1)", (m - 1.0) * s1 / (r1 - s1));
    put("(mu-1)*s2/(r2-s2)", (m - 1.0) * s2 / (r2 - s2));
    put("(mu-1)*s1*r2/(r1*(r2-s2))", (m - 1.0) * s1 * r2 / (r1 * (r2 - s2)));
    put("(mu-1)*s2*r1/(r2*(r1-s1))", (m - 1.0) * s2 * r1 / (r2 * (r1 - s1)));
    put("s1*s2*mu/(r1*r2)+(mu-1)*s1/r1", s1 * s2 * m / (r1 * r2) + (m - 1.0) * s1 / r1);
    put("s1*s2*mu/(r1*r2)+(mu-1)*s2/r2", s1 * s2 * m / (r1 * r2) + (m - 1.0) * s2 / r2);
    put("s1*s2/(r1*r2)+(mu-1)*s2*(s1+r1)/(r1*r2)",
        s1 * s2 / (r1 * r2) + (m - 1.0) * s2 * (s1 + r1) / (r1 * r2));
    put("s1*s2/(r1*r2)+(mu-1)*s1*(s2+r2)/(r1*r2)",
        s1 * s2 / (r1 * r2) + (m - 1.0) * s1 * (s2 + r2) / (r1 * r2));
    put("(mu-1)*s1*s2/(r1*(r2-s2))+(mu-1)*s2/r2",
        (m - 1.0) * s1 * s2 / (r1 * (r2 - s2)) + (m - 1.0) * s2 / r2);
    put("(mu-1)*s1*s2/(r2*(r1-s1))+(mu-1)*s1/r1",
        (m - 1.0) * s1 * s2 / (r2 * (r1 - s1)) + (m - 1.0) * s1 / r1);

    for (const auto& item : rep.items) rep.all_hold = rep.all_hold && item.holds;
    return rep;
}

/// Self-test of the two predicates above: whenever mu*sigma_i <= rho_i
/// for both players, every one of the twelve inequalities must hold.
/// Returns true when the implication is respected (always, if the two
/// predicates are implemented correctly).
inline bool prop57_implication_holds(const GrowthConstants& k) {
    k.validate();
    const bool hypothesis = (k.mu * k.sigma1 <= k.rho1) && (k.mu * k.sigma2 <= k.rho2);
    if (!hypothesis) return true;  // vacuous
    if (!(k.rho1 - k.sigma1 > 0.0) || !(k.rho2 - k.sigma2 > 0.0)) {
        // mu >= 1 and mu*sigma_i <= rho_i force sigma_i < rho_i unless
        // sigma_i == rho_i with mu == 1; the conjunction degenerates there.
        return k.mu == 1.0;
    }
    return check_compatibility_524(k).all_hold;
}

}  // namespace hjgames
