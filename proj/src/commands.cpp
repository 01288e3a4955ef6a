#include "escvs/commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>

#include "escvs/errors.hpp"

namespace escvs {

namespace {

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot write '" + file.string() + "'");
    return out;
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "'");
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

void write_trajectory_csv(const std::filesystem::path& file, const Plant& plant,
                          const Trajectory& traj) {
    std::ofstream out = open_out(file);
    const bool has_h = !traj.states.empty() && traj.states.front().h.has_value();
    const std::size_t n = plant.vel_dim();

    out << "time_s";
    for (const auto& name : plant.vel_names()) out << ',' << name;
    for (const auto& name : plant.kin_names()) out << ',' << name;
    out << ",u_hat";
    if (has_h) out << ",h";
    out << ",J";
    for (std::size_t i = 0; i < n; ++i) out << ",u" << i + 1;
    out << '\n';

    for (std::size_t s = 0; s < traj.size(); ++s) {
        out << fmt(traj.times[s]);
        const SimState& st = traj.states[s];
        for (double v : st.qdot) out << ',' << fmt(v);
        for (double v : st.kin) out << ',' << fmt(v);
        out << ',' << fmt(st.u_hat);
        if (has_h) out << ',' << fmt(*st.h);
        out << ',' << fmt(traj.objective[s]);
        for (double v : traj.inputs[s]) out << ',' << fmt(v);
        out << '\n';
    }
    if (!out) throw IoError("error while writing '" + file.string() + "'");
}

RunReport make_report(const Scenario& s, const Trajectory& traj, double wall_seconds,
                      std::size_t step_count) {
    RunReport rep;
    rep.final_window_j_mean = final_window_mean(traj.times, traj.objective);
    for (const auto& st : traj.states)
        rep.max_abs_u_hat = std::max(rep.max_abs_u_hat, std::abs(st.u_hat));
    rep.wall_seconds = wall_seconds;
    rep.step_count = step_count;
    rep.warnings = runtime_controller(s).warnings();
    if (s.application() == "quadcopter") {
        double max_pitch = 0.0;
        for (const auto& st : traj.states) max_pitch = std::max(max_pitch, std::abs(st.kin[1]));
        if (max_pitch > M_PI_2 - 0.11)
            rep.warnings.push_back("pitch reached " + fmt(max_pitch) +
                                   " rad, within 0.1 rad of the kinematic guard");
    }
    return rep;
}

RunReport cmd_run(const Scenario& s, const std::filesystem::path& out_dir) {
    s.validate();
    ensure_dir(out_dir);
    const auto plant = make_plant(s);
    const EscVsParams params = runtime_controller(s);

    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory traj = simulate(*plant, params, s.x0, s.t_final_s, s.dt(), s.decimate);
    const double wall = elapsed_s(t0);
    const std::size_t steps = (traj.size() - 1) * s.decimate;

    write_trajectory_csv(out_dir / "trajectory.csv", *plant, traj);
    const RunReport rep = make_report(s, traj, wall, steps);

    std::ofstream out = open_out(out_dir / "summary.txt");
    out << "scenario = " << s.name << '\n';
    out << "application = " << s.application() << '\n';
    out << "t_final_s = " << fmt(s.t_final_s) << '\n';
    out << "dt_s = " << fmt(s.dt()) << '\n';
    out << "decimate = " << s.decimate << '\n';
    out << "steps = " << rep.step_count << '\n';
    out << "final_window_j_mean = " << fmt(rep.final_window_j_mean) << '\n';
    out << "max_abs_u_hat = " << fmt(rep.max_abs_u_hat) << '\n';
    out << "wall_seconds = " << fmt(rep.wall_seconds) << '\n';
    for (const auto& w : rep.warnings) out << "warning = " << w << '\n';
    if (!out) throw IoError("error while writing summary");
    return rep;
}

ClosenessReport cmd_compare_averaged(const Scenario& s, const std::filesystem::path& out_dir,
                                     std::vector<double> omegas) {
    s.validate();
    ensure_dir(out_dir);
    const auto plant = make_plant(s);
    const EscVsParams params = runtime_controller(s);
    if (omegas.empty())
        omegas = {params.omega, 2.0 * params.omega, 4.0 * params.omega};

    const double horizon = std::min(s.t_final_s, kClosenessHorizonS);
    const ClosenessReport rep = closeness_sweep(*plant, params, s.x0, horizon, omegas);

    const AveragedSystem sys = make_averaged(*plant, params);
    const double dt_avg = default_dt(omegas.front());
    write_trajectory_csv(out_dir / "averaged.csv", *plant,
                         simulate_averaged(sys, s.x0, horizon, dt_avg, 1));
    for (double w : omegas) {
        EscVsParams pw = params;
        pw.omega = w;
        write_trajectory_csv(out_dir / ("full_omega_" + fmt(w) + ".csv"), *plant,
                             simulate(*plant, pw, s.x0, horizon, default_dt(w), 1));
    }

    std::ofstream out = open_out(out_dir / "closeness.csv");
    out << "omega_rad_per_s,sup_error,ratio_to_prev\n";
    for (std::size_t i = 0; i < rep.omegas.size(); ++i) {
        out << fmt(rep.omegas[i]) << ',' << fmt(rep.sup_errors[i]) << ',';
        if (i > 0) out << fmt(rep.decay_ratios[i - 1]);
        out << '\n';
    }
    if (!out) throw IoError("error while writing closeness table");
    return rep;
}

std::vector<SweepRow> cmd_sweep(const Scenario& s, const std::string& param,
                                const std::vector<double>& values,
                                const std::filesystem::path& out_dir) {
    if (values.empty()) throw ValidationError("sweep needs at least one value");
    if (param != "omega" && param != "k" && param != "a_scale" && param != "c_scale")
        throw ValidationError("unknown sweep parameter '" + param +
                              "'; expected omega, k, a_scale or c_scale");
    s.validate();
    ensure_dir(out_dir);

    std::vector<SweepRow> rows;
    for (double v : values) {
        SweepRow row;
        row.value = v;
        Scenario sv = s;
        if (param == "omega") {
            sv.controller.omega = v;
        } else if (param == "k") {
            sv.controller.k = v;
        } else if (param == "a_scale") {
            for (double& a : sv.controller.a) a *= v;
        } else {
            for (double& c : sv.controller.c) c *= v;
        }
        try {
            row.report = cmd_run(sv, out_dir / (param + "_" + fmt(v)));
            row.ok = true;
        } catch (const Error& e) {
            row.ok = false;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }

    std::ofstream out = open_out(out_dir / "sweep.csv");
    out << "param,value,ok,final_window_j_mean,max_abs_u_hat,error\n";
    for (const auto& row : rows) {
        out << param << ',' << fmt(row.value) << ',' << (row.ok ? "1" : "0") << ',';
        if (row.ok) out << fmt(row.report.final_window_j_mean) << ',' << fmt(row.report.max_abs_u_hat);
        else out << ',';
        out << ',' << row.error << '\n';
    }
    if (!out) throw IoError("error while writing sweep table");
    return rows;
}

} // namespace escvs
