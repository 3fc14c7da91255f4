#include "hzreach/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Data-driven reachability and set-based estimation with hybrid zonotopes"};
    app.require_subcommand(1, 1);

    std::string config;
    std::string out = "out";
    std::optional<int> steps;
    std::optional<std::string> method;
    std::optional<int> repeats;
    std::optional<std::uint64_t> seed;

    for (const char* name : {"simulate", "identify", "reach", "estimate", "bench"})
    {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory");
        sub->add_option("--steps", steps, "horizon / estimation steps")->check(CLI::NonNegativeNumber);
        sub->add_option("--method", method, "measurement update")->check(CLI::IsMember({"rm", "in", "gi", "all"}));
        sub->add_option("--repeats", repeats, "benchmark repetitions")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "random seed");
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : hzreach::cli::kExitError;
    }

    hzreach::cli::Overrides o;
    o.steps = steps;
    o.repeats = repeats;
    o.seed = seed;
    if (method)
        o.method = hzreach::parse_method(*method);
    return hzreach::cli::run(app.get_subcommands().front()->get_name(), config, out, o, std::cout, std::cerr);
}
