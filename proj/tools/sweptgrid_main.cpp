#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sweptgrid/bench.hpp"
#include "sweptgrid/engine.hpp"

using namespace sweptgrid;

namespace {

PoolSpec parse_pool(const std::string& s) {
    // "workers:cost"
    const auto colon = s.find(':');
    PoolSpec p;
    p.workers = std::stoi(s.substr(0, colon));
    if (colon != std::string::npos) p.cost = std::stod(s.substr(colon + 1));
    return p;
}

struct CommonFlags {
    std::string problem, engine, mode, config, pool_a, pool_b, out;
    int nx = -1, block = -1, ranks = -1;
    long steps = -1;
    double share = -1.0, latency = -1.0, bandwidth = -1.0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--problem", f.problem, "heat or euler");
    cmd->add_option("--nx", f.nx, "grid points per side");
    cmd->add_option("--block", f.block, "block edge size");
    cmd->add_option("--share", f.share, "fraction of block columns on pool A");
    cmd->add_option("--steps", f.steps, "requested timesteps");
    cmd->add_option("--ranks", f.ranks, "number of ranks");
    cmd->add_option("--engine", f.engine, "swept or standard");
    cmd->add_option("--mode", f.mode, "wall or virtual");
    cmd->add_option("--latency", f.latency, "seconds per message");
    cmd->add_option("--bandwidth", f.bandwidth, "bytes per second");
    cmd->add_option("--pool-a", f.pool_a, "workers:cost for pool A");
    cmd->add_option("--pool-b", f.pool_b, "workers:cost for pool B");
    cmd->add_option("--config", f.config, "JSON config file (flags override)");
    cmd->add_option("--out", f.out, "output path");
}

SolverConfig build_config(const CommonFlags& f) {
    SolverConfig cfg;
    if (!f.config.empty()) cfg = SolverConfig::load(f.config);
    if (!f.problem.empty()) cfg.problem = problem_from_name(f.problem);
    if (f.nx >= 0) cfg.nx = f.nx;
    if (f.block >= 0) cfg.block = f.block;
    if (f.share >= 0) cfg.share = f.share;
    if (f.steps >= 0) cfg.steps = f.steps;
    if (f.ranks >= 0) cfg.ranks = f.ranks;
    if (!f.engine.empty()) cfg.engine = engine_from_name(f.engine);
    if (!f.mode.empty()) cfg.mode = mode_from_name(f.mode);
    if (f.latency >= 0) cfg.link.latency = f.latency;
    if (f.bandwidth >= 0) cfg.link.bandwidth = f.bandwidth;
    if (!f.pool_a.empty()) cfg.pool_a = parse_pool(f.pool_a);
    if (!f.pool_b.empty()) cfg.pool_b = parse_pool(f.pool_b);
    if (!f.out.empty()) cfg.snapshot_path = f.out;
    return cfg;
}

SweepSpec build_spec(const CommonFlags& f, bool paper) {
    SweepSpec spec = paper ? SweepSpec::paper_scale() : SweepSpec::desk_default();
    if (!f.problem.empty()) spec.problems = {problem_from_name(f.problem)};
    if (f.steps >= 0) spec.steps = f.steps;
    if (f.ranks >= 0) spec.ranks = f.ranks;
    if (!f.mode.empty()) spec.mode = mode_from_name(f.mode);
    if (f.latency >= 0) spec.link.latency = f.latency;
    if (f.bandwidth >= 0) spec.link.bandwidth = f.bandwidth;
    if (!f.pool_a.empty()) spec.pool_a = parse_pool(f.pool_a);
    if (!f.pool_b.empty()) spec.pool_b = parse_pool(f.pool_b);
    if (!f.out.empty()) spec.out_dir = f.out;
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"swept-rule PDE solver and benchmark harness"};
    app.require_subcommand(1);

    CommonFlags rf, sf, wf, vf;
    auto* cmd_run = app.add_subcommand("run", "single solve, prints a JSON record");
    add_common(cmd_run, rf);

    auto* cmd_sweep = app.add_subcommand("sweep", "parameter sweep to CSV + heatmaps");
    bool paper = false;
    int reps = -1;
    add_common(cmd_sweep, sf);
    cmd_sweep->add_flag("--paper-scale", paper, "use the full-size array list");
    cmd_sweep->add_option("--reps", reps, "repetitions per cell (median)");

    auto* cmd_weak = app.add_subcommand("weak-scaling", "constant work per rank");
    add_common(cmd_weak, wf);

    auto* cmd_verify = app.add_subcommand("verify", "convergence vs analytic solutions");
    std::vector<int> sizes;
    add_common(cmd_verify, vf);
    cmd_verify->add_option("--sizes", sizes, "refinement ladder");

    auto* cmd_render = app.add_subcommand("render", "heatmaps from an existing CSV");
    std::string render_csv, render_out = ".";
    cmd_render->add_option("--csv", render_csv, "sweep CSV")->required();
    cmd_render->add_option("--out", render_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            RunResult res = run(build_config(rf));
            std::cout << res.record.to_json().dump(2) << std::endl;
        } else if (cmd_sweep->parsed()) {
            SweepSpec spec = build_spec(sf, paper);
            if (reps >= 1) spec.repetitions = reps;
            std::filesystem::create_directories(spec.out_dir);
            const std::string csv = spec.out_dir + "/sweep.csv";
            run_sweep(spec, csv, std::cerr);
            for (const auto& p : render_heatmaps(csv, spec.out_dir))
                std::cout << p << '\n';
            std::cout << csv << std::endl;
        } else if (cmd_weak->parsed()) {
            SweepSpec spec = build_spec(wf, false);
            spec.mode = wf.mode.empty() ? TransportMode::Virtual : spec.mode;
            std::filesystem::create_directories(spec.out_dir);
            const std::string csv = spec.out_dir + "/weak_scaling.csv";
            run_weak_scaling(spec, csv, std::cerr);
            std::cout << csv << std::endl;
        } else if (cmd_verify->parsed()) {
            const Problem problem =
                vf.problem.empty() ? Problem::Heat : problem_from_name(vf.problem);
            if (sizes.empty())
                sizes = problem == Problem::Heat ? std::vector<int>{32, 64, 128}
                                                 : std::vector<int>{64, 128, 256};
            VerifyReport rep = run_verify(problem, sizes, std::cout);
            return rep.passed ? 0 : 1;
        } else if (cmd_render->parsed()) {
            for (const auto& p : render_heatmaps(render_csv, render_out))
                std::cout << p << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
