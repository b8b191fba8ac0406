// End-to-end acceptance gate: every release-blocking property in one binary.
// Each check prints a single PASS/FAIL line; the exit code is the number of
// failures.  An optional list of check numbers restricts the run.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "sweptgrid/bench.hpp"
#include "sweptgrid/engine.hpp"
#include "sweptgrid/snapshot.hpp"

using namespace sweptgrid;

namespace {

int failures = 0;
std::set<int> selected;

bool wanted(int id) { return selected.empty() || selected.count(id); }

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << id << ". " << name;
    if (!detail.empty()) std::cout << "  [" << detail << "]";
    std::cout << std::endl;
    if (!ok) ++failures;
}

double linf(const FieldState& a, const FieldState& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    return worst;
}

double maxabs(const FieldState& a) {
    double m = 0.0;
    for (double v : a.data) m = std::max(m, std::abs(v));
    return m;
}

SolverConfig base_cfg(Problem p, int nx, int b, long steps) {
    SolverConfig cfg;
    cfg.problem = p;
    cfg.nx = nx;
    cfg.block = b;
    cfg.steps = steps;
    return cfg;
}

// --- 1: schedule validity, tiling, and flatness against the replay oracle ---
void check_geometry_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    for (int n : {1, 2})
        for (int b : {8, 12, 16, 24, 32}) {
            if (b % (2 * n) != 0) continue;
            for (int substeps : {1, 2}) {
                const StencilShape st = StencilShape::generic(n, substeps);
                const PhasePlan plan =
                    build_schedule_cycles(2, BlockGeometry(b, n), st);
                CoverageOracle oracle(b, n, st);
                if (!oracle.walk(plan)) {
                    ok = false;
                    std::ostringstream os;
                    os << "b=" << b << " n=" << n << " substeps=" << substeps
                       << ": " << oracle.error();
                    detail = os.str();
                }
            }
        }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    ok = ok && secs < 60.0;
    if (detail.empty()) {
        std::ostringstream os;
        os << "all region sets valid, disjoint, and flat; " << secs << " s";
        detail = os.str();
    }
    report(1, "phase schedules replay cleanly on a periodic tile", ok, detail);
}

// --- 2: levels-per-block relation and terminal stage width ---
void check_level_relation() {
    bool ok = true;
    const std::map<std::pair<int, int>, int> expect{
        {{8, 1}, 3},  {{12, 1}, 5}, {{16, 1}, 7}, {{24, 1}, 11}, {{32, 1}, 15},
        {{8, 2}, 1},  {{12, 2}, 2}, {{16, 2}, 3}, {{24, 2}, 5},  {{32, 2}, 7}};
    for (const auto& [key, k] : expect) {
        ok = ok && max_levels(key.first, key.second) == k;
        const Region top = phase_region(Phase::OctahedronUp, key.first, key.second, 2 * k);
        ok = ok && top.width() == 2 * key.second && top.height() == 2 * key.second;
    }
    report(2, "computable levels equal b/(2n) - 1 with a 2n-wide final stage", ok,
           "10 block/halo pairs, exact");
}

// --- 3: swept and standard solutions coincide across the config grid ---
void check_engines_agree() {
    bool ok = true;
    std::string detail;
    int combos = 0;
    std::map<std::string, RunResult> standards;
    for (Problem p : {Problem::Heat, Problem::Euler})
        for (int nx : {96, 192})
            for (int b : {8, 16})
                for (double share : {0.0, 0.5, 1.0})
                    for (int ranks : {1, 2, 4}) {
                        if ((nx / b) % ranks != 0) continue;
                        SolverConfig cfg = base_cfg(p, nx, b, 50);
                        cfg.share = share;
                        cfg.ranks = ranks;
                        RunResult swe = run(cfg);
                        std::ostringstream key;
                        key << problem_name(p) << nx << 'b' << b << 's'
                            << swe.record.actual_steps;
                        auto it = standards.find(key.str());
                        if (it == standards.end()) {
                            SolverConfig sc = base_cfg(p, nx, b, swe.record.actual_steps);
                            sc.engine = EngineKind::Standard;
                            it = standards.emplace(key.str(), run(sc)).first;
                        }
                        const double rel = linf(swe.final_field, it->second.final_field) /
                                           maxabs(it->second.final_field);
                        ++combos;
                        if (!(rel <= 1e-10)) {
                            ok = false;
                            std::ostringstream os;
                            os << key.str() << " share=" << share
                               << " ranks=" << ranks << " rel=" << rel;
                            detail = os.str();
                        }
                    }
    if (detail.empty())
        detail = std::to_string(combos) + " configurations within 1e-10";
    report(3, "swept solutions match the halo-exchange baseline", ok, detail);
}

// --- 4: decomposition count cannot affect the baseline ---
void check_rank_invariance() {
    bool ok = true;
    double worst = 0.0;
    for (Problem p : {Problem::Heat, Problem::Euler}) {
        SolverConfig cfg = base_cfg(p, 96, 8, 50);
        cfg.engine = EngineKind::Standard;
        RunResult one = run(cfg);
        cfg.ranks = 4;
        RunResult four = run(cfg);
        const double rel = linf(one.final_field, four.final_field) / maxabs(one.final_field);
        worst = std::max(worst, rel);
        ok = ok && rel <= 1e-12;
    }
    std::ostringstream os;
    os << "4-rank vs 1-rank rel Linf = " << worst;
    report(4, "standard runs are invariant to the rank count", ok, os.str());
}

// --- 5 & 6: convergence versus the analytic solutions ---
void check_heat_convergence() {
    std::ostringstream sink;
    VerifyReport rep = run_verify(Problem::Heat, {32, 64, 128}, sink);
    std::ostringstream os;
    os << "observed order " << rep.observed_order;
    report(5, "diffusion converges at second order to the analytic field",
           rep.observed_order >= 1.8, os.str());
}

void check_euler_vortex() {
    std::ostringstream sink;
    VerifyReport rep = run_verify(Problem::Euler, {64, 128, 256}, sink);
    bool monotone = rep.passed;

    SolverConfig cfg = base_cfg(Problem::Euler, 64, 8, 100);
    cfg.engine = EngineKind::Standard;
    const ProblemSetup setup = make_setup(cfg);
    const RunResult res = run(cfg);
    double drift = 0.0;
    for (int v = 0; v < 4; ++v) {
        double s0 = 0.0, s1 = 0.0, norm = 0.0;
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x) {
                s0 += setup.initial.at(v, x, y);
                s1 += res.final_field.at(v, x, y);
                norm += std::abs(setup.initial.at(v, x, y));
            }
        drift = std::max(drift, std::abs(s1 - s0) / norm);
    }
    std::ostringstream os;
    os << "Linf errors";
    for (const auto& r : rep.rows) os << ' ' << r.err_linf;
    os << "; conserved-sum drift " << drift;
    report(6, "vortex error shrinks with resolution and stays conservative",
           monotone && drift <= 1e-11, os.str());
}

// --- 7: message-count ratio ---
void check_message_ratio() {
    SolverConfig cfg = base_cfg(Problem::Heat, 96, 16, 500);
    cfg.ranks = 2;
    const RunResult swe = run(cfg);
    SolverConfig sc = cfg;
    sc.engine = EngineKind::Standard;
    sc.steps = swe.record.actual_steps;
    const RunResult std_ = run(sc);
    const long per_rank_std = std_.record.messages / 2;   // 2M
    const long per_rank_swe = swe.record.messages / 2;    // m + 1
    const bool divides = per_rank_std % per_rank_swe == 0;
    const long ratio = divides ? per_rank_std / per_rank_swe : -1;
    const long expect = 2 * std_.record.total_levels / swe.record.communicates;
    std::ostringstream os;
    os << per_rank_std << "/" << per_rank_swe << " = " << ratio << " (2k = 14)";
    report(7, "message ledger ratio equals 2M/(m+1)",
           divides && ratio == expect && ratio >= 14, os.str());
}

// --- 8: step rounding ---
void check_step_rounding() {
    SolverConfig big = base_cfg(Problem::Heat, 96, 16, 500);
    SolverConfig small = base_cfg(Problem::Heat, 32, 16, 10);
    const RunResult a = run(big);
    const RunResult b = run(small);
    std::ostringstream os;
    os << "500 -> " << a.record.actual_steps << ", 10 -> " << b.record.actual_steps;
    report(8, "requested steps round to the nearest flat level",
           a.record.actual_steps == 497 && b.record.actual_steps == 7, os.str());
}

// --- 9: virtual-clock speedups match the closed-form prediction ---
void check_model_consistency() {
    struct Regime {
        const char* name;
        double latency, bandwidth;
    };
    const double cell_cost = 5e-8;
    const int nx = 64, b = 16, ranks = 2;
    const double tau = (nx / ranks) * nx * cell_cost;
    const Regime regimes[] = {
        {"latency", 100.0 * tau, 1e18},
        {"balanced", tau, 1e8},
        {"bandwidth", 0.0, 1e7},
    };
    bool ok = true;
    std::string detail;
    double latency_dominated_speedup = 0.0;
    for (const auto& r : regimes) {
        SolverConfig cfg = base_cfg(Problem::Heat, nx, b, 500);
        cfg.ranks = ranks;
        cfg.mode = TransportMode::Virtual;
        cfg.link = {r.latency, r.bandwidth};
        cfg.cell_cost = cell_cost;
        const RunResult swe = run(cfg);
        SolverConfig sc = cfg;
        sc.engine = EngineKind::Standard;
        sc.steps = swe.record.actual_steps;
        const RunResult std_ = run(sc);
        const double measured =
            std_.record.modeled_seconds / swe.record.modeled_seconds;

        const LinkModel link{r.latency, r.bandwidth};
        const int k = b / 2 - 1;
        const double lambda = link.cost((1 * nx * 1 + 1) * sizeof(double));
        const double lambda_shift =
            link.cost(static_cast<std::size_t>(b / 2) * nx * (2 * k + 1) *
                      sizeof(double));
        const double predicted =
            predict_speedup(swe.record.total_levels, swe.record.octahedra, tau,
                            lambda, lambda_shift);
        const double err = std::abs(measured - predicted) / predicted;
        if (std::string(r.name) == "latency") latency_dominated_speedup = measured;
        if (err > 0.10) {
            ok = false;
            detail = std::string(r.name) + " regime off by " + std::to_string(err);
        }
    }
    ok = ok && latency_dominated_speedup >= 5.0;
    if (detail.empty()) {
        std::ostringstream os;
        os << "three regimes within 10%; latency-bound speedup "
           << latency_dominated_speedup;
        detail = os.str();
    }
    report(9, "modeled speedups track the closed-form prediction", ok, detail);
}

// --- 10: real-time crossover under injected latency ---
void check_wall_crossover() {
    SolverConfig cfg = base_cfg(Problem::Heat, 96, 16, 200);
    cfg.ranks = 2;
    cfg.link = {1e-3, 1e18};
    const RunResult swe = run(cfg);
    SolverConfig sc = cfg;
    sc.engine = EngineKind::Standard;
    sc.steps = swe.record.actual_steps;
    const RunResult std_ = run(sc);
    const double bytes_per_event_swe =
        static_cast<double>(swe.record.bytes) / swe.record.communicates;
    const double bytes_per_event_std =
        static_cast<double>(std_.record.bytes) / std_.record.total_levels;
    const bool faster = swe.record.wall_seconds < std_.record.wall_seconds;
    std::ostringstream os;
    os << "wall " << swe.record.wall_seconds << " s vs " << std_.record.wall_seconds
       << " s; bytes/event " << bytes_per_event_swe << " vs " << bytes_per_event_std;
    report(10, "swept wins wall time at 1 ms latency while moving more data",
           faster && bytes_per_event_swe > bytes_per_event_std, os.str());
}

// --- 11: snapshot persistence ---
void check_snapshot_roundtrip() {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string path = (dir / "acceptance_snapshot.bin").string();
    SolverConfig cfg = base_cfg(Problem::Heat, 32, 8, 10);
    cfg.snapshot_path = path;
    const RunResult res = run(cfg);
    bool ok = res.record.snapshot_frames == res.record.total_levels + 1;

    const SnapshotReader reader(path);
    ok = ok && static_cast<long>(reader.frames().size()) == res.record.total_levels + 1;

    const std::string copy = (dir / "acceptance_snapshot_copy.bin").string();
    {
        SnapshotWriter w(copy, reader.meta());
        for (const auto& f : reader.frames()) w.append_frame(f.level, f.data);
        w.flush();
    }
    std::ifstream fa(path, std::ios::binary), fb(copy, std::ios::binary);
    const std::vector<char> ba((std::istreambuf_iterator<char>(fa)),
                               std::istreambuf_iterator<char>());
    const std::vector<char> bb((std::istreambuf_iterator<char>(fb)),
                               std::istreambuf_iterator<char>());
    ok = ok && !ba.empty() && ba == bb;
    std::remove(path.c_str());
    std::remove(copy.c_str());
    std::ostringstream os;
    os << reader.frames().size() << " frames (flat level "
       << res.record.total_levels << "), byte-identical rewrite";
    report(11, "snapshots hold every level and re-read byte-identically", ok, os.str());
}

// --- 12: default sweep end to end ---
void check_default_sweep() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dir =
        std::filesystem::temp_directory_path() / "acceptance_sweep";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const std::string csv = (dir / "sweep.csv").string();

    const SweepSpec spec = SweepSpec::desk_default();
    std::ostringstream sink;
    bool ok = true;
    std::string detail;
    try {
        run_sweep(spec, csv, sink);
        long expected = 0;
        for (int nx : spec.array_sizes)
            for (int bl : spec.block_sizes)
                if (nx % bl == 0) expected += static_cast<long>(spec.shares.size());
        expected *= static_cast<long>(spec.problems.size());
        const auto rows = load_bench_csv(csv);
        long clean = 0;
        for (const auto& r : rows)
            if (r.error.empty() && r.speedup > 0.0) ++clean;
        ok = static_cast<long>(rows.size()) == expected && clean == expected;

        const auto maps = render_heatmaps(csv, dir.string());
        ok = ok && !maps.empty();
        for (const auto& m : maps) {
            std::ifstream f(m);
            std::stringstream ss;
            ss << f.rdbuf();
            const std::string svg = ss.str();
            ok = ok && svg.find("fill=\"white\" stroke=\"black\"") != std::string::npos &&
                 svg.find("fill=\"black\" stroke=\"white\"") != std::string::npos;
        }
        const double secs = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0)
                                .count();
        ok = ok && secs < 1800.0;
        std::ostringstream os;
        os << rows.size() << " cells, " << maps.size() << " heatmaps, "
           << secs << " s";
        detail = os.str();
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(12, "desk-scale sweep finishes under 30 minutes with figures", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    try {
        if (wanted(1)) check_geometry_oracle();
        if (wanted(2)) check_level_relation();
        if (wanted(3)) check_engines_agree();
        if (wanted(4)) check_rank_invariance();
        if (wanted(5)) check_heat_convergence();
        if (wanted(6)) check_euler_vortex();
        if (wanted(7)) check_message_ratio();
        if (wanted(8)) check_step_rounding();
        if (wanted(9)) check_model_consistency();
        if (wanted(10)) check_wall_crossover();
        if (wanted(11)) check_snapshot_roundtrip();
        if (wanted(12)) check_default_sweep();
    } catch (const std::exception& e) {
        std::cout << "FAIL  fatal: " << e.what() << std::endl;
        ++failures;
    }
    std::cout << (failures == 0 ? "ALL CHECKS PASSED" : "FAILURES: ")
              << (failures == 0 ? "" : std::to_string(failures)) << std::endl;
    return failures;
}
