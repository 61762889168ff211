// Command-line front end: solve value tables, run seeded closed-loop
// simulations, generate figure data files, and run the validation suite.
//
// Exit codes: 0 success, 1 validation failure, 2 bad arguments, 3 I/O failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "restim/analysis.hpp"
#include "restim/coding.hpp"
#include "restim/dp_solver.hpp"
#include "restim/format.hpp"
#include "restim/simulator.hpp"
#include "restim/validation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitBadArguments = 2;
constexpr int kExitIoFailure = 3;

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out << content;
    out.flush();
    return static_cast<bool>(out);
}

struct RunConfig {
    int horizon = 100;
    int budget = 100;
    double rate = 1.0;    // lambda
    double shape = 1.0;   // k; gamma = 1/k
    double power = 1.0;   // P; theta = sqrt(P)
    std::int64_t episodes = 100000;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";

    restim::ModelParams params() const {
        return restim::ModelParams::from_rate_shape_power(rate, shape, power);
    }
};

void add_model_flags(CLI::App* cmd, RunConfig* cfg) {
    cmd->add_option("--horizon", cfg->horizon, "Time horizon T")->capture_default_str();
    cmd->add_option("--rate", cfg->rate, "Source rate lambda")->capture_default_str();
    cmd->add_option("--shape", cfg->shape, "Channel noise shape k (SNR gamma = 1/k)")
        ->capture_default_str();
    cmd->add_option("--power", cfg->power, "Transmit power P (noise scale sqrt(P))")
        ->capture_default_str();
}

std::string threshold_summary(const restim::ValueTable& table) {
    const int t_end = table.horizon().horizon;
    const int cap = table.budget_cap();
    std::ostringstream out;
    out << "thresholds beta*(t,e) over t=1.." << t_end << ", e=1.." << cap << ":\n";
    if (cap == 0) {
        out << "  (no transmissions allowed; threshold is infinite everywhere)\n";
        return out.str();
    }
    double lo = table.policy_threshold(1, 1);
    double hi = lo;
    for (int t = 1; t <= t_end; ++t) {
        for (int e = 1; e <= cap; ++e) {
            const double b = table.policy_threshold(t, e);
            lo = std::min(lo, b);
            hi = std::max(hi, b);
        }
    }
    out << "  global min " << restim::format_double(lo) << ", global max "
        << restim::format_double(hi) << '\n';
    for (int e = 1; e <= cap && e <= 8; ++e) {
        out << "  e=" << e << ": beta*(1,e)=" << restim::format_double(table.policy_threshold(1, e))
            << ", beta*(T,e)=" << restim::format_double(table.policy_threshold(t_end, e)) << '\n';
    }
    if (cap > 8) out << "  ... (" << cap - 8 << " more budget levels)\n";
    return out.str();
}

int cmd_solve(const RunConfig& cfg) {
    const restim::ValueTable table =
        restim::solve(restim::HorizonSpec{cfg.horizon, cfg.budget}, cfg.params());
    const std::string payload = table.to_json().dump(2) + "\n";
    if (!write_file(cfg.out, payload)) {
        std::cerr << "error: cannot write value table to '" << cfg.out << "'\n";
        return kExitIoFailure;
    }
    std::cout << "solved T=" << cfg.horizon << " N=" << cfg.budget
              << " (rate=" << restim::format_double(cfg.rate)
              << " shape=" << restim::format_double(cfg.shape)
              << " power=" << restim::format_double(cfg.power)
              << " gamma=" << restim::format_double(cfg.params().snr()) << ")\n";
    std::cout << "J*(1," << cfg.budget << ") = "
              << restim::format_double(table.value(1, cfg.budget)) << '\n';
    std::cout << threshold_summary(table);
    std::cout << "wrote " << cfg.out << '\n';
    return kExitOk;
}

std::string stats_to_csv(const restim::BatchStats& stats) {
    std::ostringstream out;
    out << "episodes,mean_total_cost,std_err_total_cost,mean_transmissions";
    for (std::size_t i = 0; i < stats.leftover_budget_histogram.size(); ++i) {
        out << ",leftover_" << i;
    }
    out << '\n'
        << stats.episodes << ',' << restim::format_double(stats.mean_total_cost) << ','
        << restim::format_double(stats.std_err_total_cost) << ','
        << restim::format_double(stats.mean_transmissions);
    for (std::int64_t count : stats.leftover_budget_histogram) out << ',' << count;
    out << '\n';
    return out.str();
}

nlohmann::json stats_to_json(const restim::BatchStats& stats) {
    return nlohmann::json{{"episodes", stats.episodes},
                          {"mean_total_cost", stats.mean_total_cost},
                          {"std_err_total_cost", stats.std_err_total_cost},
                          {"mean_transmissions", stats.mean_transmissions},
                          {"leftover_budget_histogram", stats.leftover_budget_histogram}};
}

int cmd_simulate(const RunConfig& cfg, const std::string& trace_path) {
    const restim::ValueTable table =
        restim::solve(restim::HorizonSpec{cfg.horizon, cfg.budget}, cfg.params());
    const restim::BatchStats stats = restim::run_batch(table, cfg.episodes, cfg.seed);

    const std::string payload =
        cfg.format == "csv" ? stats_to_csv(stats) : stats_to_json(stats).dump(2) + "\n";
    if (!write_file(cfg.out, payload)) {
        std::cerr << "error: cannot write batch stats to '" << cfg.out << "'\n";
        return kExitIoFailure;
    }
    std::cout << "episodes=" << stats.episodes << " mean_total_cost="
              << restim::format_double(stats.mean_total_cost) << " +- "
              << restim::format_double(stats.std_err_total_cost)
              << " (J*(1," << cfg.budget << ") = "
              << restim::format_double(table.value(1, cfg.budget)) << ")\n";
    std::cout << "mean_transmissions=" << restim::format_double(stats.mean_transmissions) << '\n';
    std::cout << "wrote " << cfg.out << '\n';

    if (!trace_path.empty()) {
        restim::RngStream rng(cfg.seed, 0);
        const restim::EpisodeTrace trace = restim::run_episode(table, rng);
        std::ostringstream csv;
        restim::write_trace_csv(trace, csv);
        if (!write_file(trace_path, csv.str())) {
            std::cerr << "error: cannot write trace to '" << trace_path << "'\n";
            return kExitIoFailure;
        }
        std::cout << "wrote " << trace_path << " (transmissions used: "
                  << trace.transmissions_used << ")\n";
    }
    return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const std::vector<double>& gammas) {
    const restim::SweepResult sweep =
        restim::sweep_error_vs_budget(cfg.horizon, gammas, cfg.rate);
    const auto curve = restim::threshold_vs_minimal_error_curve(gammas, cfg.horizon, cfg.rate);

    std::error_code ec;
    std::filesystem::create_directories(cfg.out.empty() ? "." : cfg.out, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory '" << cfg.out << "'\n";
        return kExitIoFailure;
    }
    const std::filesystem::path dir = cfg.out.empty() ? "." : cfg.out;

    std::ostringstream fig2;
    restim::write_sweep_csv(sweep, fig2);
    std::ostringstream fig4;
    restim::write_curve_csv(curve, fig4);
    const std::string overlay = restim::overlay_to_json(sweep).dump(2) + "\n";

    const std::string fig2_path = (dir / "fig2.csv").string();
    const std::string overlay_path = (dir / "fig2_overlay.json").string();
    const std::string fig4_path = (dir / "fig4.csv").string();
    if (!write_file(fig2_path, fig2.str()) || !write_file(overlay_path, overlay) ||
        !write_file(fig4_path, fig4.str())) {
        std::cerr << "error: cannot write sweep outputs under '" << dir.string() << "'\n";
        return kExitIoFailure;
    }
    std::cout << "wrote " << fig2_path << '\n'
              << "wrote " << overlay_path << '\n'
              << "wrote " << fig4_path << '\n';
    return kExitOk;
}

int cmd_validate(std::uint64_t seed, const std::string& out_path) {
    const restim::validation::ValidationReport report = restim::validation::run_validation(seed);
    for (const auto& check : report.checks) {
        std::cerr << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << ": " << check.details
                  << '\n';
    }
    const std::string payload = report.to_json().dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << payload;
    } else if (!write_file(out_path, payload)) {
        std::cerr << "error: cannot write report to '" << out_path << "'\n";
        return kExitIoFailure;
    } else {
        std::cout << "wrote " << out_path << '\n';
    }
    return report.all_passed() ? kExitOk : kExitValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal sensor scheduling and remote estimation over a noisy channel "
                 "with a hard transmission budget"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string trace_path;
    std::vector<double> gammas;
    std::uint64_t validate_seed = 20240811;
    std::string validate_out;

    CLI::App* solve = app.add_subcommand("solve", "Solve the value table and write it as JSON");
    add_model_flags(solve, &cfg);
    solve->add_option("--budget", cfg.budget, "Transmission budget N")->capture_default_str();
    solve->add_option("--out", cfg.out, "Output path for the value-table JSON")->required();

    CLI::App* simulate =
        app.add_subcommand("simulate", "Run seeded closed-loop rollouts under the solved policy");
    add_model_flags(simulate, &cfg);
    simulate->add_option("--budget", cfg.budget, "Transmission budget N")->capture_default_str();
    simulate->add_option("--episodes", cfg.episodes, "Number of episodes")->capture_default_str();
    simulate->add_option("--seed", cfg.seed, "Base RNG seed; episode i uses stream i")
        ->capture_default_str();
    simulate->add_option("--out", cfg.out, "Output path for batch statistics")->required();
    simulate->add_option("--format", cfg.format, "Batch statistics format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    simulate->add_option("--trace", trace_path,
                         "Also write one episode trace (stream 0) as CSV to this path");

    CLI::App* sweep =
        app.add_subcommand("sweep", "Generate error-vs-budget and threshold-vs-error figure data");
    add_model_flags(sweep, &cfg);
    sweep->add_option("--gammas", gammas, "Comma-separated SNR list")
        ->required()
        ->delimiter(',');
    sweep->add_option("--out", cfg.out, "Output directory")->capture_default_str();

    CLI::App* validate = app.add_subcommand("validate", "Run the oracle suite and emit a report");
    validate->add_option("--seed", validate_seed, "RNG seed for the Monte Carlo checks")
        ->capture_default_str();
    validate->add_option("--out", validate_out, "Report path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadArguments;
    }

    try {
        if (solve->parsed()) return cmd_solve(cfg);
        if (simulate->parsed()) return cmd_simulate(cfg, trace_path);
        if (sweep->parsed()) return cmd_sweep(cfg, gammas);
        if (validate->parsed()) return cmd_validate(validate_seed, validate_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadArguments;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadArguments;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIoFailure;
    }
    return kExitBadArguments;
}
