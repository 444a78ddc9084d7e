#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "hjgames/errors.hpp"
#include "hjgames/hj_solver.hpp"
#include "hjgames/trajectory.hpp"

namespace hjgames {

/// 17 significant digits: enough for bit-exact double round trips.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path.string());
    return out;
}

/// CSV export `t,x,V`, row-major by time then space.
inline void write_value_field_csv(const std::filesystem::path& path, const ValueField& field) {
    auto out = open_out(path);
    out << "t,x,V\n";
    for (int k = 0; k <= field.grid.nt; ++k)
        for (int i = 0; i < field.grid.nx; ++i)
            out << fmt17(field.grid.t(k)) << ',' << fmt17(field.grid.x(i)) << ','
                << fmt17(field.at(k, i)) << '\n';
}

/// CSV export `s,y_1..y_n,u1_1..,u2_1..`.
inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                                 const ControlSignal& u1, const ControlSignal& u2) {
    auto out = open_out(path);
    const int n = static_cast<int>(traj.states.front().size());
    out << "s";
    for (int i = 1; i <= n; ++i) out << ",y_" << i;
    for (int i = 1; i <= u1.dim(); ++i) out << ",u1_" << i;
    for (int i = 1; i <= u2.dim(); ++i) out << ",u2_" << i;
    out << '\n';
    for (std::size_t row = 0; row < traj.times.size(); ++row) {
        const double s = traj.times[row];
        out << fmt17(s);
        for (int i = 0; i < n; ++i) out << ',' << fmt17(traj.states[row][i]);
        const Vec& v1 = u1.at(std::min(s, u1.t_end()));
        const Vec& v2 = u2.at(std::min(s, u2.t_end()));
        for (int i = 0; i < v1.size(); ++i) out << ',' << fmt17(v1[i]);
        for (int i = 0; i < v2.size(); ++i) out << ',' << fmt17(v2[i]);
        out << '\n';
    }
}

/// CSV export `t,p_closed,p_numeric`; closed-form entries may be absent
/// outside the validity window.
inline void write_riccati_csv(const std::filesystem::path& path, const std::vector<double>& times,
                              const std::vector<std::optional<double>>& p_closed,
                              const std::vector<double>& p_numeric) {
    auto out = open_out(path);
    out << "t,p_closed,p_numeric\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << fmt17(times[i]) << ',';
        if (p_closed[i]) out << fmt17(*p_closed[i]);
        out << ',' << fmt17(p_numeric[i]) << '\n';
    }
}

}  // namespace hjgames
