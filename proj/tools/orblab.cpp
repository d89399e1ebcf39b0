#include "orblab/config.hpp"
#include "orblab/experiments.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"orblab: numerical experiments on the planetary hierarchy of canonical charts"};
    app.require_subcommand(1);

    std::string out_dir;
    if (const char* env = std::getenv("ORBLAB_OUT")) out_dir = env;
    if (out_dir.empty()) out_dir = "out";

    // run
    auto* run = app.add_subcommand("run", "run an experiment described by a config file");
    std::string config_path;
    run->add_option("config", config_path, "experiment configuration")->required();
    std::uint64_t seed = 0;
    const auto* seed_opt = run->add_option("--seed", seed, "override the master seed");
    run->add_option("--out", out_dir, "output directory");
    int jobs = 1;
    run->add_option("--jobs", jobs, "worker threads for independent items");

    // plot
    auto* plot = app.add_subcommand("plot", "render a result CSV to SVG");
    std::string csv_path, kind = "line";
    plot->add_option("csv", csv_path, "CSV produced by an experiment")->required();
    plot->add_option("--kind", kind, "line or heatmap");
    plot->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            orblab::RunOptions opts;
            opts.out_dir = out_dir;
            opts.jobs = jobs;
            if (seed_opt->count() > 0) opts.seed_override = seed;
            const orblab::Config cfg = orblab::Config::parse_file(config_path);
            return orblab::run_experiment(cfg, opts, std::cout);
        }
        std::filesystem::create_directories(out_dir);
        const std::string stem = std::filesystem::path(csv_path).stem().string();
        const std::string svg = (std::filesystem::path(out_dir) / (stem + ".svg")).string();
        return orblab::plot_csv(csv_path, kind, svg, std::cout);
    } catch (const orblab::config_error& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
}
