#include "hpmd/commands.hpp"
#include "hpmd/errors.hpp"
#include "hpmd/io.hpp"
#include "hpmd/verify/criteria.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

hpmd::CommandOptions make_options(const std::string& out, int threads, const std::optional<std::uint64_t>& seed) {
    hpmd::CommandOptions o;
    o.out_dir = out;
    if (threads > 0) o.threads = threads;
    o.seed_override = seed;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Homotopic policy mirror descent for tabular MDPs"};
    app.require_subcommand(1);

    std::string config_path, out_dir, env_out;
    int threads = 0;
    std::optional<std::uint64_t> seed_override;

    auto* run = app.add_subcommand("run", "Run one configuration and write trace, snapshots and manifest");
    run->add_option("--config", config_path, "Config or manifest JSON")->required();
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--threads", threads, "Worker threads");
    run->add_option("--seed-override", seed_override, "Replace the config seed");

    auto* sweep = app.add_subcommand("sweep", "Run every seed of a configuration and aggregate");
    sweep->add_option("--config", config_path, "Config JSON")->required();
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_option("--threads", threads, "Worker threads");

    auto* verify = app.add_subcommand("verify", "Run the acceptance criteria");
    std::vector<int> only;
    double eta_scale = 1.0;
    verify->add_option("--only", only, "Criterion ids to run")->delimiter(',');
    verify->add_option("--eta-scale", eta_scale, "Scale the linear stepsize in the formula self-check");
    verify->add_option("--threads", threads, "Worker threads");
    verify->add_option("--out", out_dir, "Scratch directory");
    verify->add_option("--config", config_path, "Optional JSON with only, threads, eta_scale, scratch_dir");

    auto* exp = app.add_subcommand("export-env", "Write the environment of a config as MDP JSON");
    exp->add_option("--config", config_path, "Config or environment JSON")->required();
    exp->add_option("--out", env_out, "Output file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto res = hpmd::cmd_run(hpmd::read_json_file(config_path), make_options(out_dir, threads, seed_override));
            std::cout << "wrote " << res.out_dir << "\n";
            for (const auto& f : res.result.trace.flags) std::cout << "flag: " << f << "\n";
        } else if (sweep->parsed()) {
            const auto res = hpmd::cmd_sweep(hpmd::read_json_file(config_path), make_options(out_dir, threads, std::nullopt));
            std::cout << "wrote " << res.runs.size() << " runs to " << res.out_dir << "\n";
        } else if (verify->parsed()) {
            hpmd::verify::VerifyOptions o;
            if (!config_path.empty()) {
                const auto j = hpmd::read_json_file(config_path);
                o.only = j.value("only", o.only);
                o.threads = j.value("threads", o.threads);
                o.eta_scale = j.value("eta_scale", o.eta_scale);
                o.scratch_dir = j.value("scratch_dir", o.scratch_dir);
            }
            if (threads > 0) o.threads = threads;
            if (!verify->get_option("--eta-scale")->empty()) o.eta_scale = eta_scale;
            if (!only.empty()) o.only = only;
            if (!out_dir.empty()) o.scratch_dir = out_dir;
            const auto results = hpmd::verify::run_suite(o);
            hpmd::verify::print_table(results, std::cout);
            for (const auto& r : results)
                if (!r.passed) return 1;
        } else if (exp->parsed()) {
            hpmd::cmd_export_env(hpmd::read_json_file(config_path), env_out);
            std::cout << "wrote " << env_out << "\n";
        }
    } catch (const hpmd::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
