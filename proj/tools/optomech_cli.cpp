// Command-line front end: single points, stability reports, sweeps and the
// reference-figure presets. Exit codes: 0 success, 1 config error, 2
// numerical failure.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "optomech/optomech.hpp"

namespace {

using namespace optomech;

constexpr int exit_config = 1;
constexpr int exit_numerical = 2;

struct Options {
    std::string config;
    std::string out;
    std::size_t points = 0;
    unsigned threads = 1;
    bool quiet = false;
    std::string figure;
};

void print_params(std::ostream& os, const EffectiveParams& ep) {
    os << "parameters (units of omega_m1):\n"
       << "  g1_eff=" << ep.g1_eff << " g2_eff=" << ep.g2_eff << " Delta_a=" << ep.Delta_a
       << " kappa=" << ep.kappa << "\n"
       << "  gamma1=" << ep.gamma1 << " gamma2=" << ep.gamma2 << " lambda=" << ep.lambda_mpa
       << " omega'_m1=" << ep.omega_m1_prime() << "\n"
       << "  chi=" << ep.chi << " theta=" << ep.theta << " n_th1=" << ep.n_th1
       << " n_th2=" << ep.n_th2 << "\n";
}

void print_observables(std::ostream& os, const ObservablesRecord& o) {
    os << "observables:\n"
       << "  n1 = " << o.n1 << "\n"
       << "  n2 = " << o.n2 << "\n"
       << "  S_dB(b1) = " << o.s_db_b1 << "  (optimal quadrature " << o.s_db_b1_opt << ")\n"
       << "  S_dB(b2) = " << o.s_db_b2 << "  (optimal quadrature " << o.s_db_b2_opt << ")\n"
       << "  E_N(a|b1) = " << o.en_a_b1 << "\n"
       << "  E_N(a|b2) = " << o.en_a_b2 << "\n"
       << "  E_N(b1|b2) = " << o.en_b1_b2 << "\n"
       << "  E_N(a|b1b2) = " << o.en_one_vs_two[0] << "\n"
       << "  E_N(b1|ab2) = " << o.en_one_vs_two[1] << "\n"
       << "  E_N(b2|ab1) = " << o.en_one_vs_two[2] << "\n"
       << "  residual contangles = " << o.residuals[0] << ", " << o.residuals[1] << ", "
       << o.residuals[2] << "\n"
       << "  R_min = " << o.r_min << (o.r_min > 0.0 ? "  (genuine tripartite)" : "") << "\n";
}

RunConfig require_config(const Options& opt) {
    if (opt.config.empty()) {
        throw ConfigError("--config is required");
    }
    return load_config(opt.config);
}

void write_result(const SweepResult& result, const std::vector<std::string>& metadata,
                  const std::string& path) {
    if (path.empty() || path == "-") {
        write_csv(std::cout, result, metadata);
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write '" + path + "'");
    }
    write_csv(out, result, metadata);
}

int run_point(const Options& opt) {
    const auto cfg = require_config(opt);
    SweepResult result;
    result.spec.name = "point";
    result.spec.axis = "none";
    result.metadata.timestamp = utc_timestamp();
    result.rows.push_back(evaluate_point(cfg.effective));
    const auto& row = result.rows.front();
    if (!opt.quiet) {
        print_params(std::cout, cfg.effective);
        std::cout << "stable: " << (row.stable ? "yes" : "no")
                  << " (max real part " << row.max_real_part << ")\n";
        if (row.observables) {
            print_observables(std::cout, *row.observables);
        }
    }
    if (!opt.out.empty()) {
        write_result(result, {"config: " + cfg.source.dump()}, opt.out);
    }
    return 0;
}

int run_stability(const Options& opt) {
    const auto cfg = require_config(opt);
    const auto report = stability(build_drift(cfg.effective));
    std::cout << std::setprecision(17);
    std::cout << "stable: " << (report.stable ? "yes" : "no") << "\n"
              << "max_real_part: " << report.max_real_part << "\n";
    if (!opt.quiet) {
        std::cout << "eigenvalues:\n";
        for (const auto& z : report.eigenvalues) {
            std::cout << "  " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag())
                      << "i\n";
        }
    }
    return 0;
}

int run_sweep_command(const Options& opt) {
    auto cfg = require_config(opt);
    if (!cfg.has_sweep) {
        throw ConfigError("config has no 'sweep' section");
    }
    json echo = cfg.source;
    if (opt.points) {
        echo["sweep"]["n_points"] = opt.points;
        cfg = parse_config(echo);
    }
    const auto result = run_sweep(cfg.sweep, opt.threads);
    write_result(result, {"config: " + echo.dump()}, opt.out);
    if (!opt.quiet && !opt.out.empty() && opt.out != "-") {
        std::cerr << "wrote " << result.rows.size() << " rows to " << opt.out << "\n";
    }
    return 0;
}

int run_figure(const Options& opt) {
    const std::filesystem::path dir = opt.out.empty() ? "." : opt.out;
    std::filesystem::create_directories(dir);
    for (auto doc : preset_documents(opt.figure)) {
        if (opt.points) {
            doc["sweep"]["n_points"] = opt.points;
        }
        const auto cfg = parse_config(doc);
        const auto result = run_sweep(cfg.sweep, opt.threads);
        const auto path = dir / (cfg.sweep.name + ".csv");
        write_result(result, {"config: " + doc.dump()}, path.string());
        if (!opt.quiet) {
            std::cout << "wrote " << path.string() << " (" << result.rows.size() << " rows)\n";
        }
    }
    return 0;
}

int run_hybrid(const Options& opt) {
    const auto cfg = require_config(opt);
    const auto h = hybrid_decomposition(cfg.effective);
    std::cout << std::setprecision(17) << "g_plus: " << h.g_plus << "\n"
              << "omega_B: " << h.omega_B << "\n"
              << "omega_D: " << h.omega_D << "\n"
              << "omega_B_lambda: " << h.omega_B_lambda << "\n"
              << "omega_D_lambda: " << h.omega_D_lambda << "\n"
              << "g_BD_omega: " << h.g_BD_omega << "\n"
              << "g_BD_lambda: " << h.g_BD_lambda << "\n"
              << "dark_mode_broken: " << (dark_mode_broken(cfg.effective) ? "yes" : "no") << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady-state cooling, squeezing and entanglement of a three-mode "
                 "optomechanical system with OPA and Coulomb-induced MPA"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON configuration file");
        sub->add_option("--out", opt.out, "output path (CSV file, or directory for figure)");
        sub->add_flag("--quiet", opt.quiet, "suppress human-readable output");
    };

    auto* point = app.add_subcommand("point", "evaluate one parameter set");
    add_common(point);
    auto* stab = app.add_subcommand("stability", "eigenvalues of the drift matrix");
    add_common(stab);
    auto* sweep = app.add_subcommand("sweep", "run the sweep described by a config file");
    add_common(sweep);
    sweep->add_option("--points", opt.points, "override the number of axis points")->check(CLI::Range(2, 1000000));
    sweep->add_option("--threads", opt.threads, "worker threads")->check(CLI::Range(1, 256));
    auto* figure = app.add_subcommand("figure", "reproduce a reference figure (fig1, fig2, fig3)");
    figure->add_option("name", opt.figure, "preset name")->required();
    figure->add_option("--out", opt.out, "output directory (default: current)");
    figure->add_option("--points", opt.points, "override the number of axis points")->check(CLI::Range(2, 1000000));
    figure->add_option("--threads", opt.threads, "worker threads")->check(CLI::Range(1, 256));
    figure->add_flag("--quiet", opt.quiet, "suppress progress output");
    auto* hybrid = app.add_subcommand("hybrid", "bright/dark mode coefficients and dark-mode flag");
    add_common(hybrid);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (point->parsed()) return run_point(opt);
        if (stab->parsed()) return run_stability(opt);
        if (sweep->parsed()) return run_sweep_command(opt);
        if (figure->parsed()) return run_figure(opt);
        if (hybrid->parsed()) return run_hybrid(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return exit_config;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }
    return exit_config;
}
