// blowup_lab: thresholds, criterion, simulate and sweep from the command line.
//
// Exit codes: 0 ok, 2 parameter-domain error, 3 numerical failure. Errors are
// reported as a JSON object on stderr.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "blowup/commands.hpp"

namespace {

using blowup::cli::ExperimentConfig;
using json = nlohmann::json;

constexpr int exit_domain = 2;
constexpr int exit_numerical = 3;

struct CommonFlags {
    std::optional<int> d;
    std::optional<std::string> p;
    std::optional<double> beta;
    std::optional<double> T;
    std::optional<std::string> config;
    std::optional<std::string> profile;
    std::optional<double> t_max;
    std::optional<std::string> out;
    std::string format = "json";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--d", f.d, "spatial dimension");
    cmd->add_option("--p", f.p, "exponent p; \"a/b\" gives an exact ratio");
    cmd->add_option("--beta", f.beta, "weight exponent of |x|^beta");
    cmd->add_option("--T", f.T, "horizon for the weighted bound");
    cmd->add_option("--config", f.config, "experiment JSON file");
    cmd->add_option("--profile", f.profile, "profile record as inline JSON");
    cmd->add_option("--t-max", f.t_max, "simulation horizon");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

ExperimentConfig resolve(const CommonFlags& f) {
    ExperimentConfig c = f.config ? blowup::cli::load_config(*f.config) : ExperimentConfig{};
    if (f.d) c.d = *f.d;
    if (f.p) c.p = blowup::cli::parse_exponent(*f.p);
    if (f.beta) c.beta = *f.beta;
    if (f.T) c.weighted_T = *f.T;
    if (f.t_max) c.t_max = *f.t_max;
    if (f.out) c.outputs = *f.out;
    if (f.profile) {
        try {
            c.profile = json::parse(*f.profile);
        } catch (const json::parse_error& e) {
            throw blowup::DomainError(std::string("--profile is not valid JSON: ") + e.what());
        }
    }
    return c;
}

int fail(int code, std::string_view kind, std::string_view message) {
    std::cerr << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Blowup criteria, thresholds and radial simulations for u_t = Δu + |u|^{p-1}u"};
    app.require_subcommand(1);
    CommonFlags flags;
    auto* thresholds = app.add_subcommand("thresholds", "threshold numbers for multiples of the singular solution");
    auto* criterion = app.add_subcommand("criterion", "Gaussian-moment blowup criterion for a profile");
    auto* simulate = app.add_subcommand("simulate", "radial method-of-lines run with moment diagnostics");
    auto* sweep = app.add_subcommand("sweep", "simulate over a range of one parameter");
    for (auto* cmd : {thresholds, criterion, simulate, sweep}) add_common(cmd, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(exit_domain, "usage_error", e.what());
    }

    const bool csv = flags.format == "csv";
    try {
        const auto config = resolve(flags);
        if (thresholds->parsed()) {
            const auto rep = blowup::cli::cmd_thresholds(config);
            if (csv)
                blowup::io::write_thresholds_csv(std::cout, rep);
            else
                std::cout << blowup::io::to_json(rep).dump(2) << '\n';
        } else if (criterion->parsed()) {
            const auto rep = blowup::cli::cmd_criterion(config);
            if (csv)
                blowup::io::write_criterion_csv(std::cout, blowup::io::criterion_report_from_json(rep));
            else
                std::cout << rep.dump(2) << '\n';
        } else if (simulate->parsed()) {
            const auto out = blowup::cli::cmd_simulate(config);
            if (csv)
                blowup::io::write_series_csv(std::cout, out.result.series);
            else
                std::cout << blowup::io::to_json(out.summary).dump(2) << '\n';
            if (out.summary.status == "step_failure")
                return fail(exit_numerical, "step_failure", out.summary.reason);
        } else if (sweep->parsed()) {
            const auto rows = blowup::cli::cmd_sweep(config);
            if (!config.outputs.empty()) {
                std::filesystem::create_directories(config.outputs);
                auto f = blowup::cli::open_output(config.outputs / "sweep.csv");
                blowup::cli::write_sweep_csv(f, rows);
            }
            if (csv) {
                blowup::cli::write_sweep_csv(std::cout, rows);
            } else {
                json arr = json::array();
                for (const auto& r : rows) arr.push_back(blowup::cli::to_json(r));
                std::cout << arr.dump(2) << '\n';
            }
        }
    } catch (const blowup::DomainError& e) {
        return fail(exit_domain, "domain_error", e.what());
    } catch (const blowup::NumericalFailure& e) {
        return fail(exit_numerical, "numerical_failure", e.what());
    } catch (const json::exception& e) {
        return fail(exit_domain, "config_error", e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(exit_domain, "io_error", e.what());
    }
    return 0;
}
