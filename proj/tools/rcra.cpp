#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "rcra/cli.hpp"

namespace {

void add_common(CLI::App* sub, rcra::CommandOptions& o, std::string& config, std::string& mode) {
    sub->add_option("--config", config, "Config file");
    sub->add_option_function<std::uint64_t>("--seed", [&o](std::uint64_t v) { o.seed = v; }, "Base seed");
    sub->add_option_function<int>("--replications", [&o](int v) { o.replications = v; }, "Replications per point")
        ->check(CLI::PositiveNumber);
    sub->add_option_function<std::uint64_t>("--horizon", [&o](std::uint64_t v) { o.horizon = v; },
                                            "Slots (rounds in protocol mode)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--mode", mode, "slotted or protocol")->check(CLI::IsMember({"slotted", "protocol"}));
    sub->add_option("--out", o.out_dir, "Output directory")->required();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random-access power control simulator with an analytic equilibrium oracle"};
    app.require_subcommand(1);

    rcra::CommandOptions opts;
    std::string config, mode;
    const std::map<std::string, rcra::CommandResult (*)(const rcra::CommandOptions&)> commands{
        {"run", rcra::cmd_run},
        {"sweep1", rcra::cmd_sweep_scenario1},
        {"sweep2", rcra::cmd_sweep_scenario2},
        {"oracle", rcra::cmd_oracle},
    };
    add_common(app.add_subcommand("run", "Simulate one configuration"), opts, config, mode);
    add_common(app.add_subcommand("sweep1", "Rate sweep: group 2 target 50..110 kbps"), opts, config, mode);
    add_common(app.add_subcommand("sweep2", "Channel sweep: group 2 mean gain 0.05..1.3867"), opts, config, mode);
    add_common(app.add_subcommand("oracle", "Simulate and compare with the Nash fixed point"), opts, config, mode);
    CLI11_PARSE(app, argc, argv);

    if (!config.empty()) opts.config_path = config;
    if (!mode.empty()) opts.mode = rcra::parse_mode("--mode", mode);
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        const rcra::CommandResult res = commands.at(name)(opts);
        std::cout << "run_id " << res.manifest.run_id() << " -> " << opts.out_dir << '\n';
        return res.exit_code;
    } catch (const rcra::config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return rcra::kExitConfig;
    } catch (const rcra::output_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return rcra::kExitOutput;
    } catch (const rcra::infeasible_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return rcra::kExitOracle;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return rcra::kExitConfig;
    }
}
