// Copyright 2026 sklab developers
// SPDX-License-Identifier: Apache-2.0

#include "sklab/sklab.h"

#include <CLI11.hpp>

#include <cstdio>
#include <optional>
#include <string>

namespace {

int exit_code(sklab_status st)
{
    switch (st)
    {
    case SKLAB_OK:
        return 0;
    case SKLAB_ERR_INVALID_ARGUMENT:
    case SKLAB_ERR_VALIDATION:
        return 2;
    case SKLAB_ERR_NUMERIC:
        return 3;
    default:
        return 1;
    }
}

struct Options
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool quiet = false;
};

int run(const std::string& command, const Options& opt)
{
    sklab_config* cfg = nullptr;
    sklab_status st = sklab_config_from_file(opt.config.c_str(), &cfg);
    if (st != SKLAB_OK)
    {
        std::fprintf(stderr, "sklab %s: %s\n", command.c_str(), sklab_last_error());
        return exit_code(st);
    }
    if (opt.seed)
        sklab_config_set_seed(cfg, *opt.seed);
    if (opt.out)
        sklab_config_set_output_dir(cfg, opt.out->c_str());

    sklab_report* report = nullptr;
    st = sklab_run(cfg, command.c_str(), &report);
    if (report && !opt.quiet)
        std::fputs(sklab_report_json(report), stdout);
    if (st != SKLAB_OK)
        std::fprintf(stderr, "sklab %s: %s\n", command.c_str(), sklab_last_error());
    sklab_report_free(report);
    sklab_config_free(cfg);
    return exit_code(st);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Small-mass limit experiments for interacting Langevin particles"};
    app.require_subcommand(1);
    app.set_version_flag("--version", sklab_version());

    const std::pair<const char*, const char*> commands[] = {
        {"audit", "Sample the model assumptions on a box"},
        {"simulate", "Simulate the underdamped system for each epsilon"},
        {"limit", "Simulate the small-mass limit, with and without the noise-induced drift"},
        {"lyapunov-check", "Check the Lyapunov solver on random stable instances"},
        {"converge", "Epsilon sweep: W2 and weak gaps against the limit"},
        {"slice-diag", "Frozen-coefficient slice diagnostic at delta and 2 delta"},
        {"fp", "1-D Fokker-Planck solve cross-checked against limit particles"},
    };

    Options opt;
    std::uint64_t seed = 0;
    std::string out;
    for (const auto& [name, help] : commands)
    {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", opt.config, "JSON experiment config")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Override the master seed");
        sub->add_option("--out", out, "Override the output directory");
        sub->add_flag("--quiet", opt.quiet, "Do not print the manifest");
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    for (auto* sub : app.get_subcommands())
    {
        if (sub->count("--seed") > 0)
            opt.seed = seed;
        if (sub->count("--out") > 0)
            opt.out = out;
        return run(sub->get_name(), opt);
    }
    return 2;
}
