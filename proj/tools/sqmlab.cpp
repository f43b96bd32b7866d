#include "experiments.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

std::string experiment_list()
{
    std::string s;
    for (const auto& n : sqm::cli::experiment_names()) s += "  " + n + "\n";
    return s;
}

} // namespace

int main(int argc, char** argv)
{
    using namespace sqm::cli;

    CLI::App app{"sqmlab: verification experiments for the quantum-time lattice library"};
    app.footer("experiments:\n" + experiment_list());

    std::string experiment, config_file, out_dir;
    std::uint64_t seed = 0;
    double tol = 0;
    std::vector<std::string> sets;
    bool as_json = false, as_csv = false, tau_sweep = false;

    app.add_option("experiment", experiment, "experiment name")->required();
    app.add_option("--config", config_file, "key = value settings file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "write <experiment>.json or .csv into this directory");
    auto* seed_opt = app.add_option("--seed", seed, "seed of the random generator");
    auto* tol_opt = app.add_option("--tol", tol, "override every tolerance of the run")->check(CLI::NonNegativeNumber);
    auto* j = app.add_flag("--json", as_json, "JSON report (default)");
    auto* c = app.add_flag("--csv", as_csv, "CSV rows, one per case");
    j->excludes(c);
    app.add_option("--set", sets, "extra setting key=value (repeatable)");
    app.add_flag("--tau-sweep", tau_sweep, "add one case per tau of the sweep");

    // common parameters, stored under the same keys as in a config file
    std::map<std::string, std::string> direct;
    for (const auto& [flag, key] : std::vector<std::pair<std::string, std::string>>{{"--N", "N"},
                                                                                    {"--M", "M"},
                                                                                    {"--d", "d"},
                                                                                    {"--eps", "eps"},
                                                                                    {"--eps-i", "eps_i"},
                                                                                    {"--tau", "tau"},
                                                                                    {"--n-max", "n_max"},
                                                                                    {"--mass", "mass"},
                                                                                    {"--lambda", "lambda"},
                                                                                    {"--order", "order"},
                                                                                    {"--process", "process"},
                                                                                    {"--N-list", "N_list"},
                                                                                    {"--T", "T"},
                                                                                    {"--cases", "cases"}})
        app.add_option(flag, direct[key], "sets '" + key + "'");

    CLI11_PARSE(app, argc, argv);

    try {
        Config cfg = config_file.empty() ? Config{} : Config::load(config_file);
        for (const auto& [key, v] : direct)
            if (!v.empty()) cfg.set(key, v);
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
            cfg.set(s.substr(0, eq), s.substr(eq + 1));
        }
        if (*seed_opt) cfg.set("seed", std::to_string(seed));
        if (*tol_opt) cfg.set("tol", CLI::detail::to_string(tol));
        if (tau_sweep) cfg.set("tau_sweep", "true");

        const Report r = run_experiment(experiment, cfg);
        const std::string text = as_csv ? r.to_csv() : r.to_json().dump(2) + "\n";
        if (out_dir.empty()) {
            std::cout << text;
        } else {
            std::filesystem::create_directories(out_dir);
            const auto path = std::filesystem::path(out_dir) / (experiment + (as_csv ? ".csv" : ".json"));
            std::ofstream f(path, std::ios::binary);
            f << text;
            if (!f) throw std::runtime_error("cannot write " + path.string());
            std::cerr << experiment << ": " << r.cases.size() << " cases, all_pass = " << (r.all_pass() ? "true" : "false")
                      << ", written to " << path.string() << "\n";
        }
        return r.all_pass() ? 0 : 1;
    } catch (const ConfigError& e) {
        std::cerr << "sqmlab: " << e.what() << "\n";
        if (e.what() == std::string("unknown experiment '") + experiment + "'")
            std::cerr << "usage: sqmlab <experiment> [--config FILE] [--out DIR] [--seed U64] [--tol FLOAT] [--json|--csv]\n"
                      << "experiments:\n"
                      << experiment_list();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "sqmlab: error: " << e.what() << "\n";
        return 3;
    }
}
