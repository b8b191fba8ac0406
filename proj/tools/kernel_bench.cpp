// Compares the serial reference kernels against the OpenMP drivers and
// reports cell-update throughput for both schemes.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include <CLI11.hpp>

#include "sweptgrid/engine.hpp"
#include "sweptgrid/physics.hpp"

using namespace sweptgrid;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double bench_one(Problem problem, int nx, int iters, int threads) {
    SolverConfig cfg;
    cfg.problem = problem;
    cfg.nx = nx;
    cfg.block = 8;
    ProblemSetup setup = make_setup(cfg);
    const int nvars = setup.nvars;
    const int halo = setup.stencil.halo;

    std::vector<double> a = setup.initial.data, b = a, c = a;
    std::vector<CellBlock> blocks{{{halo, nx - halo, 0, nx}, 1}};

    SubstepArgs args;
    args.problem = problem;
    args.heat = setup.heat;
    args.euler = setup.euler;

    const double t0 = now_seconds();
    for (int i = 0; i < iters; ++i) {
        args.stage = problem == Problem::Euler ? i % 2 : 0;
        args.read1 = {a.data(), nvars, nx, nx};
        args.read2 = {c.data(), nvars, nx, nx};
        args.out = {b.data(), nvars, nx, nx};
        if (threads <= 0)
            run_substep_serial(args, blocks);
        else
            run_substep_omp(args, blocks, threads);
        std::swap(c, a);
        std::swap(a, b);
    }
    const double dt = now_seconds() - t0;
    const double updates = static_cast<double>(iters) * (nx - 2 * halo) * nx;
    return updates / dt;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kernel throughput: serial reference vs OpenMP driver"};
    int nx = 512, iters = 50, threads = 1;
    app.add_option("--nx", nx, "grid edge");
    app.add_option("--iters", iters, "sub-steps to time");
    app.add_option("--threads", threads, "OpenMP threads");
    CLI11_PARSE(app, argc, argv);

    for (Problem p : {Problem::Heat, Problem::Euler}) {
        const double serial = bench_one(p, nx, iters, 0);
        const double omp = bench_one(p, nx, iters, threads);
        std::printf("%-6s serial %8.2f Mcells/s   omp(%d) %8.2f Mcells/s   ratio %.2f\n",
                    problem_name(p), serial / 1e6, threads, omp / 1e6, omp / serial);
    }
    return 0;
}
