#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hjgames/aq_saddle.hpp"
#include "hjgames/dp_value.hpp"
#include "hjgames/errors.hpp"
#include "hjgames/game_spec.hpp"
#include "hjgames/hamiltonian.hpp"
#include "hjgames/hj_solver.hpp"
#include "hjgames/io.hpp"
#include "hjgames/riccati.hpp"
#include "hjgames/trajectory.hpp"

namespace hjgames::scenario {

using nlohmann::json;

/// Polynomial in (t, x) given as a list of [coefficient, t-power, x-power]
/// terms: the only coefficient-function format the file schema accepts.
struct Poly2 {
    struct Term {
        double c = 0.0;
        int tp = 0;
        int xp = 0;
    };
    std::vector<Term> terms;

    double eval(double t, double x) const {
        double total = 0.0;
        for (const auto& term : terms) {
            double v = term.c;
            for (int i = 0; i < term.tp; ++i) v *= t;
            for (int i = 0; i < term.xp; ++i) v *= x;
            total += v;
        }
        return total;
    }

    bool time_free() const {
        for (const auto& term : terms)
            if (term.tp != 0 && term.c != 0.0) return false;
        return true;
    }

    static Poly2 constant(double c) { return {{{c, 0, 0}}}; }
};

namespace detail {

inline std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

struct Validator {
    std::vector<std::string> problems;

    void check_keys(const json& node, const std::set<std::string>& allowed,
                    const std::string& where) {
        if (!node.is_object()) {
            problems.push_back(where + ": expected an object");
            return;
        }
        for (auto it = node.begin(); it != node.end(); ++it)
            if (!allowed.count(it.key()))
                problems.push_back(where + ": unknown key '" + it.key() + "'");
    }

    const json* need(const json& node, const std::string& key, const std::string& where) {
        if (!node.is_object() || !node.contains(key)) {
            problems.push_back(where + ": missing required key '" + key + "'");
            return nullptr;
        }
        return &node.at(key);
    }

    void finish(const std::string& file) const {
        if (problems.empty()) return;
        std::string msg = "schema violations in " + file + ":";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw ParseError(msg);
    }
};

inline double as_number(const json& node, const std::string& where) {
    if (!node.is_number()) throw ParseError(where + ": expected a number");
    return node.get<double>();
}

inline int as_int(const json& node, const std::string& where) {
    if (!node.is_number_integer()) throw ParseError(where + ": expected an integer");
    return node.get<int>();
}

inline Poly2 parse_poly(const json& node, const std::string& where) {
    if (node.is_number()) return Poly2::constant(node.get<double>());
    if (node.is_object() && node.contains("terms") && node.size() == 1) {
        const json& terms = node.at("terms");
        if (!terms.is_array()) throw ParseError(where + ".terms: expected an array");
        Poly2 poly;
        for (const auto& term : terms) {
            if (!term.is_array() || term.size() != 3)
                throw ParseError(where + ".terms: each term is [coeff, t_power, x_power]");
            Poly2::Term parsed;
            parsed.c = as_number(term[0], where + ".terms[0]");
            parsed.tp = as_int(term[1], where + ".terms[1]");
            parsed.xp = as_int(term[2], where + ".terms[2]");
            if (parsed.tp < 0 || parsed.xp < 0)
                throw ParseError(where + ".terms: powers must be >= 0");
            poly.terms.push_back(parsed);
        }
        return poly;
    }
    throw ParseError(where + ": expected a number or {\"terms\": [[c, i, j], ...]}");
}

/// Vector of polynomials; a bare poly is accepted for length-1 vectors.
inline std::vector<Poly2> parse_poly_vector(const json& node, int len, const std::string& where) {
    std::vector<Poly2> out;
    if (!node.is_array()) {
        if (len != 1) throw ParseError(where + ": expected an array of length " + std::to_string(len));
        out.push_back(parse_poly(node, where));
        return out;
    }
    if (static_cast<int>(node.size()) != len)
        throw ParseError(where + ": expected length " + std::to_string(len));
    for (std::size_t i = 0; i < node.size(); ++i)
        out.push_back(parse_poly(node[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

/// Matrix of polynomials (array of rows); a bare poly stands for 1x1.
inline std::vector<std::vector<Poly2>> parse_poly_matrix(const json& node, int rows, int cols,
                                                         const std::string& where) {
    std::vector<std::vector<Poly2>> out;
    if (!node.is_array()) {
        if (rows != 1 || cols != 1) throw ParseError(where + ": expected a matrix");
        out.push_back({parse_poly(node, where)});
        return out;
    }
    if (static_cast<int>(node.size()) != rows)
        throw ParseError(where + ": expected " + std::to_string(rows) + " rows");
    for (int r = 0; r < rows; ++r) {
        const json& row = node[r];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw ParseError(where + ": row " + std::to_string(r) + " must have " +
                             std::to_string(cols) + " entries");
        std::vector<Poly2> parsed;
        for (int c = 0; c < cols; ++c)
            parsed.push_back(parse_poly(row[c], where + "[" + std::to_string(r) + "][" +
                                                    std::to_string(c) + "]"));
        out.push_back(std::move(parsed));
    }
    return out;
}

inline GrowthConstants parse_constants(const json& node, Validator& v, const std::string& where) {
    v.check_keys(node, {"L", "c", "sigma1", "sigma2", "rho1", "rho2", "mu"}, where);
    GrowthConstants k;
    auto grab = [&](const char* key, double& slot) {
        if (const json* j = v.need(node, key, where)) slot = as_number(*j, where + "." + key);
    };
    grab("L", k.L);
    grab("c", k.c);
    grab("sigma1", k.sigma1);
    grab("sigma2", k.sigma2);
    grab("rho1", k.rho1);
    grab("rho2", k.rho2);
    grab("mu", k.mu);
    return k;
}

inline Vec parse_vec(const json& node, int len, const std::string& where) {
    Vec out(len);
    if (node.is_number()) {
        if (len != 1) throw ParseError(where + ": expected an array of length " + std::to_string(len));
        out[0] = node.get<double>();
        return out;
    }
    if (!node.is_array() || static_cast<int>(node.size()) != len)
        throw ParseError(where + ": expected an array of length " + std::to_string(len));
    for (int i = 0; i < len; ++i) out[i] = as_number(node[i], where);
    return out;
}

inline json vec_to_json(const Vec& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

inline json mat_to_json(const Mat& m) {
    json out = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(row);
    }
    return out;
}

/// Parses an affine-quadratic game whose coefficient functions are
/// polynomials in (t, x). For dims > 1 the polynomials read x as |x|_1
/// would be ambiguous, so multi-dimensional games restrict coefficient
/// polynomials to x-power 0 except on the diagonal drift term; in
/// practice the file schema is used for scalar games.
inline AQGameSpec parse_aq_game(const json& node, Validator& v, const std::string& where) {
    v.check_keys(node,
                 {"dims", "A", "B1", "B2", "Q", "R1", "R2", "S", "theta1", "theta2", "G", "horizon"},
                 where);
    int n = 1, m1 = 1, m2 = 1;
    if (node.contains("dims")) {
        const json& dims = node.at("dims");
        if (!dims.is_array() || dims.size() != 3) throw ParseError(where + ".dims: expected [n, m1, m2]");
        n = as_int(dims[0], where + ".dims");
        m1 = as_int(dims[1], where + ".dims");
        m2 = as_int(dims[2], where + ".dims");
        if (n != 1) throw ParseError(where + ".dims: the file schema supports scalar states (n = 1)");
    }

    AQGameSpec spec;
    spec.dim_state = n;
    spec.dim_u1 = m1;
    spec.dim_u2 = m2;
    if (const json* j = v.need(node, "horizon", where))
        spec.horizon = as_number(*j, where + ".horizon");

    auto poly_vec = [&](const char* key, int len) {
        const json* j = v.need(node, key, where);
        return j ? parse_poly_vector(*j, len, where + "." + key) : std::vector<Poly2>(len);
    };
    auto poly_mat = [&](const char* key, int rows, int cols) {
        const json* j = v.need(node, key, where);
        return j ? parse_poly_matrix(*j, rows, cols, where + "." + key)
                 : std::vector<std::vector<Poly2>>(rows, std::vector<Poly2>(cols));
    };

    const auto a = poly_vec("A", n);
    const auto b1 = poly_mat("B1", n, m1);
    const auto b2 = poly_mat("B2", n, m2);
    const Poly2 q = [&] {
        const json* j = v.need(node, "Q", where);
        return j ? parse_poly(*j, where + ".Q") : Poly2{};
    }();
    const auto r1 = poly_mat("R1", m1, m1);
    const auto r2 = poly_mat("R2", m2, m2);
    const auto s = poly_mat("S", m2, m1);
    const auto th1 = poly_vec("theta1", m1);
    const auto th2 = poly_vec("theta2", m2);
    const Poly2 gterm = [&] {
        const json* j = v.need(node, "G", where);
        if (!j) return Poly2{};
        Poly2 parsed = parse_poly(*j, where + ".G");
        if (!parsed.time_free()) throw ParseError(where + ".G: terminal cost must not depend on t");
        return parsed;
    }();

    auto x0 = [](const Vec& x) { return x.size() > 0 ? x[0] : 0.0; };
    spec.A = [a, x0](double t, const Vec& x) {
        Vec out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i].eval(t, x0(x));
        return out;
    };
    auto mat_fn = [x0](std::vector<std::vector<Poly2>> polys) {
        return [polys, x0](double t, const Vec& x) {
            Mat out(polys.size(), polys[0].size());
            for (std::size_t r = 0; r < polys.size(); ++r)
                for (std::size_t c = 0; c < polys[r].size(); ++c)
                    out(r, c) = polys[r][c].eval(t, x0(x));
            return out;
        };
    };
    spec.B1 = mat_fn(b1);
    spec.B2 = mat_fn(b2);
    spec.R1 = mat_fn(r1);
    spec.R2 = mat_fn(r2);
    spec.S = mat_fn(s);
    spec.Q = [q, x0](double t, const Vec& x) { return q.eval(t, x0(x)); };
    auto vec_fn = [x0](std::vector<Poly2> polys) {
        return [polys, x0](double t, const Vec& x) {
            Vec out(polys.size());
            for (std::size_t i = 0; i < polys.size(); ++i) out[i] = polys[i].eval(t, x0(x));
            return out;
        };
    };
    spec.theta1 = vec_fn(th1);
    spec.theta2 = vec_fn(th2);
    spec.G = [gterm, x0](const Vec& x) { return gterm.eval(0.0, x0(x)); };
    return spec;
}

struct LQData {
    double A, B1, B2, Q, R1, R2, G;
};

inline LQData parse_lq(const json& node, Validator& v, const std::string& where) {
    v.check_keys(node, {"A", "B1", "B2", "Q", "R1", "R2", "G"}, where);
    LQData d{};
    auto grab = [&](const char* key, double& slot) {
        if (const json* j = v.need(node, key, where)) slot = as_number(*j, where + "." + key);
    };
    grab("A", d.A);
    grab("B1", d.B1);
    grab("B2", d.B2);
    grab("Q", d.Q);
    grab("R1", d.R1);
    grab("R2", d.R2);
    grab("G", d.G);
    return d;
}

inline ControlSignal parse_control(const json& node, Validator& v, const std::string& where,
                                   int dim, double t_end, double rho, double sigma) {
    v.check_keys(node, {"times", "values"}, where);
    const json* jt = v.need(node, "times", where);
    const json* jv = v.need(node, "values", where);
    if (!jt || !jv) throw ParseError(where + ": incomplete control signal");
    if (!jt->is_array() || !jv->is_array() || jt->size() != jv->size() || jt->empty())
        throw ParseError(where + ": times and values must be nonempty arrays of equal length");
    std::vector<double> times;
    std::vector<Vec> values;
    for (std::size_t i = 0; i < jt->size(); ++i) {
        times.push_back(as_number((*jt)[i], where + ".times"));
        values.push_back(parse_vec((*jv)[i], dim, where + ".values"));
    }
    return ControlSignal(std::move(times), std::move(values), t_end, rho, sigma);
}

}  // namespace detail

struct RunOutcome {
    int exit_code = 0;
    json summary;
    std::vector<std::filesystem::path> artifacts;
};

/// Loads, validates, and executes one scenario file. Artifacts land in
/// out_dir under the scenario name; the summary is also returned. Exit
/// code 0 = success, 1 = input error (thrown as ParseError instead),
/// 2 = an assertion-style violation was detected and recorded.
inline RunOutcome run_scenario(const std::filesystem::path& file,
                               const std::filesystem::path& out_dir,
                               std::optional<std::uint64_t> seed_override = std::nullopt,
                               std::optional<std::string> expected_kind = std::nullopt) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open scenario file: " + file.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(file.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                         ": " + e.what());
    }

    detail::Validator v;
    if (!doc.is_object()) v.problems.push_back("top level: expected an object");
    v.finish(file.string());
    const std::string kind = [&] {
        const json* j = v.need(doc, "kind", "top level");
        v.finish(file.string());
        if (!j->is_string()) throw ParseError("kind: expected a string");
        return j->get<std::string>();
    }();
    if (expected_kind && kind != *expected_kind)
        throw ParseError("scenario kind '" + kind + "' does not match subcommand '" +
                         *expected_kind + "'");

    const std::string name = doc.contains("name") && doc["name"].is_string()
                                 ? doc["name"].get<std::string>()
                                 : file.stem().string();
    std::uint64_t seed = 0;
    if (doc.contains("seed")) seed = doc["seed"].get<std::uint64_t>();
    if (seed_override) seed = *seed_override;

    std::filesystem::create_directories(out_dir);
    auto artifact = [&](const std::string& suffix) { return out_dir / (name + suffix); };

    RunOutcome out;
    json& summary = out.summary;
    summary["kind"] = kind;
    summary["name"] = name;
    summary["seed"] = seed;

    const std::set<std::string> common = {"kind", "name", "seed"};
    auto with_common = [&](std::set<std::string> extra) {
        extra.insert(common.begin(), common.end());
        return extra;
    };

    if (kind == "check-hypotheses") {
        v.check_keys(doc, with_common({"constants"}), "top level");
        const json* jk = v.need(doc, "constants", "top level");
        v.finish(file.string());
        const GrowthConstants k = detail::parse_constants(*jk, v, "constants");
        v.finish(file.string());
        summary["h3"] = check_h3(k);
        summary["h3_prime"] = check_h3_prime(k);
        if (check_h3(k)) {
            const CompatibilityReport rep = check_compatibility_524(k);
            json items = json::array();
            for (const auto& item : rep.items)
                items.push_back({{"id", item.id}, {"lhs", item.lhs}, {"holds", item.holds}});
            summary["inequalities_524"] = items;
            summary["all_524"] = rep.all_hold;
        } else {
            summary["inequalities_524"] = nullptr;
            summary["all_524"] = nullptr;
        }
        summary["prop57_consistent"] = prop57_implication_holds(k);
    } else if (kind == "saddle") {
        v.check_keys(doc, with_common({"game", "t", "x", "p"}), "top level");
        const json* jg = v.need(doc, "game", "top level");
        const json* jt = v.need(doc, "t", "top level");
        const json* jx = v.need(doc, "x", "top level");
        const json* jp = v.need(doc, "p", "top level");
        v.finish(file.string());
        const AQGameSpec game = detail::parse_aq_game(*jg, v, "game");
        v.finish(file.string());
        const double t = detail::as_number(*jt, "t");
        const Vec x = detail::parse_vec(*jx, game.dim_state, "x");
        const Vec p = detail::parse_vec(*jp, game.dim_state, "p");
        const SaddleResult res = saddle_point(game, t, x, p);
        summary["u1_bar"] = detail::vec_to_json(res.u1_bar);
        summary["u2_bar"] = detail::vec_to_json(res.u2_bar);
        summary["q0"] = res.q0;
        summary["det_block"] = res.block_matrix.determinant();
        summary["hessian_pp"] = detail::mat_to_json(res.hessian_pp);
    } else if (kind == "hamiltonian") {
        v.check_keys(doc, with_common({"game", "constants", "t", "x", "p", "grid_points"}),
                     "top level");
        const json* jg = v.need(doc, "game", "top level");
        const json* jk = v.need(doc, "constants", "top level");
        const json* jt = v.need(doc, "t", "top level");
        const json* jx = v.need(doc, "x", "top level");
        const json* jp = v.need(doc, "p", "top level");
        const json* jn = v.need(doc, "grid_points", "top level");
        v.finish(file.string());
        const AQGameSpec game = detail::parse_aq_game(*jg, v, "game");
        const GrowthConstants k = detail::parse_constants(*jk, v, "constants");
        v.finish(file.string());
        const GeneralGameSpec spec = game.to_general(k);
        const double t = detail::as_number(*jt, "t");
        const Vec x = detail::parse_vec(*jx, game.dim_state, "x");
        const Vec p = detail::parse_vec(*jp, game.dim_state, "p");
        const int pts = detail::as_int(*jn, "grid_points");
        const HamiltonianValue up = eval_upper(spec, t, x, p, pts);
        const HamiltonianValue lo = eval_lower(spec, t, x, p, pts);
        summary["upper"] = up.value;
        summary["lower"] = lo.value;
        summary["gap"] = up.value - lo.value;
        summary["r1"] = up.radii.r1;
        summary["r2"] = up.radii.r2;
        summary["grid_points"] = pts;
        const SaddleResult saddle = saddle_point(game, t, x, p);
        summary["q0_closed_form"] = saddle.q0;
    } else if (kind == "trajectory") {
        v.check_keys(doc, with_common({"game", "constants", "t0", "x0", "steps", "u1", "u2"}),
                     "top level");
        const json* jg = v.need(doc, "game", "top level");
        const json* jk = v.need(doc, "constants", "top level");
        const json* jt0 = v.need(doc, "t0", "top level");
        const json* jx0 = v.need(doc, "x0", "top level");
        const json* js = v.need(doc, "steps", "top level");
        const json* ju1 = v.need(doc, "u1", "top level");
        const json* ju2 = v.need(doc, "u2", "top level");
        v.finish(file.string());
        const AQGameSpec game = detail::parse_aq_game(*jg, v, "game");
        const GrowthConstants k = detail::parse_constants(*jk, v, "constants");
        v.finish(file.string());
        const GeneralGameSpec spec = game.to_general(k);
        const double t0 = detail::as_number(*jt0, "t0");
        const Vec x0 = detail::parse_vec(*jx0, game.dim_state, "x0");
        const int steps = detail::as_int(*js, "steps");
        const ControlSignal u1 =
            detail::parse_control(*ju1, v, "u1", game.dim_u1, game.horizon, k.rho1, k.sigma1);
        const ControlSignal u2 =
            detail::parse_control(*ju2, v, "u2", game.dim_u2, game.horizon, k.rho2, k.sigma2);
        v.finish(file.string());

        const Trajectory traj = integrate(spec, t0, x0, u1, u2, steps);
        const CertReport cert = certify_state_bound(spec, traj, u1, u2);
        write_trajectory_csv(artifact("_trajectory.csv"), traj, u1, u2);
        out.artifacts.push_back(artifact("_trajectory.csv"));
        summary["terminal_state"] = detail::vec_to_json(traj.terminal_state());
        summary["state_bound_min_slack"] = cert.min_slack;
        summary["state_bound_violations"] = cert.violation_count;
        if (!cert.ok()) out.exit_code = 2;
    } else if (kind == "riccati") {
        v.check_keys(doc, with_common({"alpha", "beta", "gamma", "g", "T", "lq"}), "top level");
        const json* jT = v.need(doc, "T", "top level");
        v.finish(file.string());
        RiccatiProblem prob;
        prob.T = detail::as_number(*jT, "T");
        if (doc.contains("lq")) {
            if (doc.contains("alpha") || doc.contains("beta") || doc.contains("gamma") ||
                doc.contains("g"))
                throw ParseError("riccati: give either direct coefficients or lq data, not both");
            const detail::LQData lq = detail::parse_lq(doc["lq"], v, "lq");
            v.finish(file.string());
            prob = lq_to_riccati(lq.A, lq.B1, lq.B2, lq.Q, lq.R1, lq.R2, lq.G, prob.T);
        } else {
            for (const char* key : {"alpha", "beta", "gamma", "g"})
                if (!doc.contains(key)) v.problems.push_back(std::string("missing key '") + key + "'");
            v.finish(file.string());
            prob.alpha = detail::as_number(doc["alpha"], "alpha");
            prob.beta = detail::as_number(doc["beta"], "beta");
            prob.gamma = detail::as_number(doc["gamma"], "gamma");
            prob.g = detail::as_number(doc["g"], "g");
        }

        const RiccatiClassification cls = classify(prob);
        const RiccatiNumericResult numeric = integrate_numeric(prob);
        summary["case_tag"] = to_string(cls.case_tag);
        if (cls.kappa) summary["kappa"] = *cls.kappa;
        summary["solvable_all_T"] = cls.solvable_all_T;
        summary["max_horizon"] =
            std::isfinite(cls.max_horizon) ? json(cls.max_horizon) : json("inf");
        summary["blew_up"] = numeric.blew_up;
        if (numeric.blowup_time) summary["blowup_time"] = *numeric.blowup_time;

        std::vector<std::optional<double>> closed(numeric.times.size());
        double max_dev = 0.0;
        for (std::size_t i = 0; i < numeric.times.size(); ++i) {
            try {
                closed[i] = closed_form(prob, numeric.times[i]);
                max_dev = std::max(max_dev, std::abs(*closed[i] - numeric.values[i]));
            } catch (const OutsideValidityWindow&) {
            }
        }
        if (!numeric.blew_up && !numeric.values.empty()) summary["p0_numeric"] = numeric.values.front();
        summary["max_closed_vs_numeric"] = max_dev;
        write_riccati_csv(artifact("_riccati.csv"), numeric.times, closed, numeric.values);
        out.artifacts.push_back(artifact("_riccati.csv"));
    } else if (kind == "hj-solve") {
        v.check_keys(doc,
                     with_common({"lq", "T", "grid", "dissipation", "cfl", "reference_riccati"}),
                     "top level");
        const json* jlq = v.need(doc, "lq", "top level");
        const json* jT = v.need(doc, "T", "top level");
        const json* jgrid = v.need(doc, "grid", "top level");
        v.finish(file.string());
        const detail::LQData lq = detail::parse_lq(*jlq, v, "lq");
        v.check_keys(*jgrid, {"x_min", "x_max", "nx", "nt"}, "grid");
        v.finish(file.string());
        if (!(lq.R1 > 0.0) || !(lq.R2 > 0.0)) throw NonPositiveWeights("hj-solve: R1, R2 must be > 0");

        const double T = detail::as_number(*jT, "T");
        const double x_min = detail::as_number(jgrid->at("x_min"), "grid.x_min");
        const double x_max = detail::as_number(jgrid->at("x_max"), "grid.x_max");
        const int nx = detail::as_int(jgrid->at("nx"), "grid.nx");
        const double quad = lq.B2 * lq.B2 / (4.0 * lq.R2) - lq.B1 * lq.B1 / (4.0 * lq.R1);
        Hamiltonian1D H = [lq, quad](double, double x, double p) {
            return lq.A * x * p + lq.Q * x * x + quad * p * p;
        };
        auto h = [lq](double x) { return lq.G * x * x; };

        Dissipation diss = Dissipation::automatic();
        if (doc.contains("dissipation") && doc["dissipation"].is_number())
            diss = Dissipation::fixed(doc["dissipation"].get<double>());
        else if (doc.contains("dissipation") && doc["dissipation"] != "auto")
            throw ParseError("dissipation: expected a number or \"auto\"");

        Grid1D grid;
        if (jgrid->contains("nt")) {
            grid = Grid1D{x_min, x_max, nx, detail::as_int(jgrid->at("nt"), "grid.nt"), T};
        } else {
            const double cfl = doc.contains("cfl") ? detail::as_number(doc["cfl"], "cfl") : 0.4;
            // Conservative sizing bound: |H_p| <= |A| x_big + 2|quad| p_big with
            // p on the scale of the terminal gradient plus cost growth.
            const double x_big = std::max(std::abs(x_min), std::abs(x_max));
            const double p_big = 2.0 * (std::abs(lq.G) + std::abs(lq.Q) * T +
                                        std::abs(lq.A) * T + 1.0) * x_big;
            const double bound = std::abs(lq.A) * x_big + 2.0 * std::abs(quad) * p_big + 1e-9;
            grid = Grid1D::with_cfl(x_min, x_max, nx, T, bound, cfl);
        }

        const ValueField field = solve(H, h, grid, diss, "lq");
        write_value_field_csv(artifact("_field.csv"), field);
        out.artifacts.push_back(artifact("_field.csv"));

        json sidecar;
        sidecar["grid"] = {{"x_min", x_min}, {"x_max", x_max}, {"nx", nx}, {"nt", grid.nt}, {"T", T}};
        sidecar["lq"] = {{"A", lq.A}, {"B1", lq.B1}, {"B2", lq.B2}, {"Q", lq.Q},
                         {"R1", lq.R1}, {"R2", lq.R2}, {"G", lq.G}};
        sidecar["dissipation"] =
            diss.mode == Dissipation::Mode::Fixed ? json(diss.value) : json("auto");

        if (doc.contains("reference_riccati") && doc["reference_riccati"].get<bool>()) {
            const RiccatiProblem prob =
                lq_to_riccati(lq.A, lq.B1, lq.B2, lq.Q, lq.R1, lq.R2, lq.G, T);
            const RiccatiClassification cls = classify(prob);
            if (!cls.solvable_all_T && cls.max_horizon <= T)
                throw OutsideValidityWindow("hj-solve: riccati reference blows up before t = 0");
            // Field-relative max error on the inner half of the domain.
            const double center = 0.5 * (x_min + x_max);
            const double reach = 0.25 * (x_max - x_min);
            double max_err = 0.0, scale = 0.0;
            for (int k = 0; k <= grid.nt; ++k) {
                const double pt = closed_form(prob, grid.t(k));
                for (int i = 0; i < grid.nx; ++i) {
                    const double x = grid.x(i);
                    if (std::abs(x - center) > reach) continue;
                    const double ref = pt * x * x;
                    max_err = std::max(max_err, std::abs(field.at(k, i) - ref));
                    scale = std::max(scale, std::abs(ref));
                }
            }
            sidecar["err_vs_riccati"] = scale > 0.0 ? max_err / scale : max_err;
            summary["err_vs_riccati"] = sidecar["err_vs_riccati"];
        }
        const auto sidecar_path = artifact("_field.json");
        open_out(sidecar_path) << sidecar.dump(2) << '\n';
        out.artifacts.push_back(sidecar_path);
        summary["nt"] = grid.nt;
    } else if (kind == "dp-value") {
        v.check_keys(doc, with_common({"game", "constants", "grid", "controls", "interior_fraction"}),
                     "top level");
        const json* jg = v.need(doc, "game", "top level");
        const json* jk = v.need(doc, "constants", "top level");
        const json* jgrid = v.need(doc, "grid", "top level");
        const json* jc = v.need(doc, "controls", "top level");
        v.finish(file.string());
        const AQGameSpec game = detail::parse_aq_game(*jg, v, "game");
        const GrowthConstants k = detail::parse_constants(*jk, v, "constants");
        v.check_keys(*jgrid, {"x_min", "x_max", "nx", "nt"}, "grid");
        v.check_keys(*jc, {"radius1", "radius2", "count1", "count2"}, "controls");
        v.finish(file.string());

        DPConfig cfg;
        cfg.grid = Grid1D{detail::as_number(jgrid->at("x_min"), "grid.x_min"),
                          detail::as_number(jgrid->at("x_max"), "grid.x_max"),
                          detail::as_int(jgrid->at("nx"), "grid.nx"),
                          detail::as_int(jgrid->at("nt"), "grid.nt"), game.horizon};
        cfg.radius1 = detail::as_number(jc->at("radius1"), "controls.radius1");
        cfg.radius2 = detail::as_number(jc->at("radius2"), "controls.radius2");
        cfg.count1 = detail::as_int(jc->at("count1"), "controls.count1");
        cfg.count2 = detail::as_int(jc->at("count2"), "controls.count2");
        if (doc.contains("interior_fraction"))
            cfg.interior_fraction = detail::as_number(doc["interior_fraction"], "interior_fraction");

        const ValuePair pair = value_iterate(game, k, cfg);
        write_value_field_csv(artifact("_upper.csv"), pair.upper);
        write_value_field_csv(artifact("_lower.csv"), pair.lower);
        out.artifacts.push_back(artifact("_upper.csv"));
        out.artifacts.push_back(artifact("_lower.csv"));
        summary["gap"] = pair.gap;
        summary["clamped_fraction"] = pair.clamps.fraction();
        summary["boundary_hit_fraction"] = pair.boundary_hit_fraction;
        summary["h3_prime_satisfied"] = pair.h3_prime_satisfied;
    } else {
        throw ParseError("unknown scenario kind '" + kind + "'");
    }

    const auto summary_path = artifact("_summary.json");
    open_out(summary_path) << summary.dump(2) << '\n';
    out.artifacts.push_back(summary_path);
    return out;
}

}  // namespace hjgames::scenario
