#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "escvs/commands.hpp"
#include "escvs/errors.hpp"

namespace {

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::filesystem::path pick_out_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("ESCVS_OUT_DIR"); env && *env) return env;
    return "escvs-out";
}

void print_report(const escvs::RunReport& rep, const std::filesystem::path& out_dir) {
    std::cout << "steps = " << rep.step_count << "\n"
              << "final_window_j_mean = " << fmt(rep.final_window_j_mean) << "\n"
              << "max_abs_u_hat = " << fmt(rep.max_abs_u_hat) << "\n"
              << "wall_seconds = " << fmt(rep.wall_seconds) << "\n";
    for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
    std::cout << "wrote " << (out_dir / "trajectory.csv").string() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ESC-VS: extremum-seeking vibrational stabilization simulator"};
    app.require_subcommand(1);

    std::string scenario_arg;
    std::string out_flag;
    double dt_override = 0.0;
    double t_final_override = 0.0;
    std::size_t decimate_override = 0;
    std::vector<double> omegas;
    std::vector<double> values;
    std::string param;
    std::string preset_action;
    std::string preset_name;

    auto* run = app.add_subcommand("run", "integrate a scenario; write trajectory and summary");
    run->add_option("scenario", scenario_arg, "preset name or scenario file")->required();
    run->add_option("--out", out_flag, "output directory");
    auto* dt_opt = run->add_option("--dt", dt_override, "integration step (s)");
    auto* tf_opt = run->add_option("--t-final", t_final_override, "run length (s)");
    auto* dec_opt = run->add_option("--decimate", decimate_override, "record every Nth step");

    auto* cmp = app.add_subcommand("compare-averaged",
                                   "compare the full loop against the averaged system");
    cmp->add_option("scenario", scenario_arg, "preset name or scenario file")->required();
    cmp->add_option("--out", out_flag, "output directory");
    cmp->add_option("--omegas", omegas, "frequencies to test (rad/s)")->delimiter(',');

    auto* swp = app.add_subcommand("sweep", "re-run a scenario across parameter values");
    swp->add_option("scenario", scenario_arg, "preset name or scenario file")->required();
    swp->add_option("--out", out_flag, "output directory");
    swp->add_option("--param", param, "omega | k | a_scale | c_scale")->required();
    swp->add_option("--values", values, "comma-separated values")->required()->delimiter(',');

    auto* pre = app.add_subcommand("presets", "list bundled presets or show one");
    pre->add_option("action", preset_action, "list | show")->required();
    pre->add_option("name", preset_name, "preset name (for show)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        const std::filesystem::path out_dir = pick_out_dir(out_flag);
        if (run->parsed()) {
            escvs::Scenario s = escvs::resolve_scenario(scenario_arg);
            if (dt_opt->count() > 0) s.dt_s = dt_override;
            if (tf_opt->count() > 0) s.t_final_s = t_final_override;
            if (dec_opt->count() > 0) s.decimate = decimate_override;
            const escvs::RunReport rep = escvs::cmd_run(s, out_dir);
            print_report(rep, out_dir);
        } else if (cmp->parsed()) {
            const escvs::Scenario s = escvs::resolve_scenario(scenario_arg);
            const escvs::ClosenessReport rep = escvs::cmd_compare_averaged(s, out_dir, omegas);
            std::cout << "omega_rad_per_s,sup_error,ratio_to_prev\n";
            for (std::size_t i = 0; i < rep.omegas.size(); ++i) {
                std::cout << fmt(rep.omegas[i]) << ',' << fmt(rep.sup_errors[i]) << ',';
                if (i > 0) std::cout << fmt(rep.decay_ratios[i - 1]);
                std::cout << "\n";
            }
            std::cout << "wrote " << (out_dir / "closeness.csv").string() << "\n";
        } else if (swp->parsed()) {
            const escvs::Scenario s = escvs::resolve_scenario(scenario_arg);
            const auto rows = escvs::cmd_sweep(s, param, values, out_dir);
            std::cout << "param,value,ok,final_window_j_mean\n";
            for (const auto& row : rows) {
                std::cout << param << ',' << fmt(row.value) << ',' << (row.ok ? "1" : "0") << ',';
                if (row.ok) std::cout << fmt(row.report.final_window_j_mean);
                else std::cout << row.error;
                std::cout << "\n";
            }
            std::cout << "wrote " << (out_dir / "sweep.csv").string() << "\n";
        } else if (pre->parsed()) {
            if (preset_action == "list") {
                for (const auto& name : escvs::preset_names()) std::cout << name << "\n";
            } else if (preset_action == "show") {
                if (preset_name.empty())
                    throw escvs::ValidationError("presets show needs a preset name");
                std::cout << escvs::preset_text(preset_name);
            } else {
                throw escvs::ValidationError("unknown presets action '" + preset_action +
                                             "'; expected list or show");
            }
        }
    } catch (const escvs::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const escvs::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const escvs::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
