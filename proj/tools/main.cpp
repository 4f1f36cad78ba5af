#include <CLI11.hpp>

#include "commands.hpp"

using expfunc::cli::Options;

int main(int argc, char** argv) {
    CLI::App app{"Exponential functionals of Levy processes: moments, densities, samplers and verification suites"};
    app.require_subcommand(1);
    Options o;
    std::string grid;
    double tol = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "family config file (key = value)")->required();
        sub->add_option("--out", o.out_dir, "output directory");
        sub->add_option("--seed", o.seed, "random seed");
        sub->add_option("--workers", o.workers, "worker threads (0 = all cores, 1 = serial)");
        sub->add_option("--tol", tol, "overrides the command's default tolerance");
    };

    CLI::App* moments = app.add_subcommand("moments", "positive moments of I_H and negative moments of I_Y");
    add_common(moments);
    moments->add_option("--m-max", o.m_max, "largest moment order");

    CLI::App* density = app.add_subcommand("density", "density of I on a log grid");
    add_common(density);
    density->add_option("--grid", grid, "lo:hi:points");

    CLI::App* verify = app.add_subcommand("verify", "factorization, residual and Mellin suites");
    add_common(verify);
    verify->add_option("--suite", o.suite, "factorize | residual | mellin | all")
        ->check(CLI::IsMember({"factorize", "residual", "mellin", "all"}));
    verify->add_option("--n", o.n, "samples per pool");
    verify->add_option("--grid", grid, "lo:hi:points for the residual candidate");

    CLI::App* sample = app.add_subcommand("sample", "Monte Carlo pool of an exponential functional");
    add_common(sample);
    sample->add_option("--n", o.n, "pool size");
    sample->add_option("--sampler", o.sampler, "xi | H | Y | dual_Y")->check(CLI::IsMember({"xi", "H", "Y", "dual_Y"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : expfunc::cli::invalid_config;
    }
    if (!grid.empty()) o.grid = grid;
    for (CLI::App* sub : {moments, density, verify, sample})
        if (sub->parsed() && sub->count("--tol")) o.tol = tol;

    return expfunc::cli::run_guarded([&] {
        if (moments->parsed()) return expfunc::cli::cmd_moments(o);
        if (density->parsed()) return expfunc::cli::cmd_density(o);
        if (verify->parsed()) return expfunc::cli::cmd_verify(o);
        return expfunc::cli::cmd_sample(o);
    });
}
