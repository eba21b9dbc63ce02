#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "hhw/harness.hpp"

namespace hhw {

namespace {

void print_summary(const ExperimentSummary& s, std::ostream& out) {
    out << "experiment=" << s.experiment << " case=" << s.case_name << " order=";
    if (s.fitted_order) {
        out << std::fixed << std::setprecision(3) << *s.fitted_order;
    } else {
        out << "n/a";
    }
    out << " wall_s=" << std::fixed << std::setprecision(2) << s.wall_seconds << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite-difference ADI experiments for the Heston-Hull-White model", "hhw_bench"};

    std::string experiment, case_name = "A", option = "call", scheme = "mcs", damping = "off";
    ExperimentConfig cfg;
    double theta = 0.0;
    std::size_t ref_steps = 0;

    app.add_option("--experiment", experiment, "spatial|temporal|price|uniform-compare|barrier-surface")
        ->required()
        ->check(CLI::IsMember({"spatial", "temporal", "price", "uniform-compare", "barrier-surface"}));
    app.add_option("--case", case_name, "Parameter case A..F")
        ->check(CLI::IsMember({"A", "B", "C", "D", "E", "F", "a", "b", "c", "d", "e", "f"}));
    app.add_option("--option", option, "call|uoc")->check(CLI::IsMember({"call", "uoc"}));
    app.add_option("--scheme", scheme, "do|cs|mcs|hv")
        ->check(CLI::IsMember({"do", "cs", "mcs", "hv"}));
    auto* theta_opt = app.add_option("--theta", theta, "Override the scheme's default theta");
    app.add_option("--m", cfg.m, "Grid parameter (m1 = 2m, m2 = m3 = m)")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
    app.add_option("--steps", cfg.steps, "Time steps for price surfaces")
        ->check(CLI::PositiveNumber);
    app.add_option("--dt-sweep", cfg.dt_sweep, "Comma-separated time steps for temporal runs")
        ->delimiter(',');
    app.add_option("--damping", damping, "on|off")->check(CLI::IsMember({"on", "off"}));
    app.add_flag("--zero-cross-corr", cfg.zero_cross_corr, "Set rho13 = rho23 = 0");
    app.add_option("--barrier", cfg.barrier, "Up-and-out barrier level");
    auto* ref_opt = app.add_option("--ref-steps", ref_steps, "Reference time steps")
                        ->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "Random seed");
    app.add_option("--out", cfg.out, "CSV output path (default: standard output)");

    if (argc <= 1) {
        err << app.help();
        return 2;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        cfg.experiment = parse_experiment(experiment);
        cfg.case_id = parse_case(case_name);
        cfg.option = option == "uoc" ? OptionKind::UpAndOutCall : OptionKind::VanillaCall;
        cfg.scheme = parse_scheme(scheme);
        cfg.damping = damping == "on";
        if (theta_opt->count() > 0) {
            cfg.theta = theta;
        }
        if (ref_opt->count() > 0) {
            cfg.ref_steps = ref_steps;
        }

        ExperimentSummary summary;
        if (cfg.out.empty()) {
            summary = run_experiment(cfg, out);
            print_summary(summary, err);
        } else {
            std::ostringstream buffer;
            summary = run_experiment(cfg, buffer);
            std::ofstream file(cfg.out, std::ios::binary);
            if (!file) {
                err << "error: cannot open " << cfg.out << " for writing\n";
                return 1;
            }
            file << buffer.str();
            if (!file) {
                err << "error: failed writing " << cfg.out << '\n';
                return 1;
            }
            print_summary(summary, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace hhw
