#ifndef SWEPTGRID_BENCH_HPP
#define SWEPTGRID_BENCH_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "sweptgrid/config.hpp"

namespace sweptgrid {

struct SweepSpec {
    std::vector<Problem> problems{Problem::Heat, Problem::Euler};
    std::vector<int> array_sizes;
    std::vector<int> block_sizes{8, 12, 16, 24, 32};
    std::vector<double> shares;  // 0..1 step 0.1 by default
    long steps = 500;
    int repetitions = 1;
    int ranks = 1;
    TransportMode mode = TransportMode::Wall;
    LinkModel link;
    PoolSpec pool_a{1, 1.0};
    PoolSpec pool_b{1, 1.0};
    double cell_cost = 5.0e-8;
    std::string out_dir = ".";

    /// Quarter-size arrays and half the steps so a full sweep finishes on a
    /// workstation.
    static SweepSpec desk_default();
    /// The original array list (320..1120); expect hours.
    static SweepSpec paper_scale();
};

struct BenchRow {
    std::string problem;
    int nx = 0, block = 0;
    double share = 0.0;
    int ranks = 0;
    std::string mode;
    int repetition = 0;  // repetitions aggregated (median)
    long actual_steps = 0;
    double run_seconds_standard = 0.0;
    double run_seconds_swept = 0.0;
    double modeled_seconds_standard = 0.0;
    double modeled_seconds_swept = 0.0;
    long messages_standard = 0;
    long messages_swept = 0;
    double speedup = 0.0;
    std::string error;

    std::string key() const;  // resume identity: problem,nx,block,share,ranks,mode
};

extern const char* const kBenchCsvHeader;

std::string bench_row_csv(const BenchRow& row);
std::vector<BenchRow> load_bench_csv(const std::string& path);

/// Runs the sweep, appending rows as cells finish; cells already present in
/// the CSV are skipped so an interrupted sweep can resume.
void run_sweep(const SweepSpec& spec, const std::string& csv_path,
               std::ostream& log);

/// Weak scaling at ~constant points per rank (block 16, share 0.9).
void run_weak_scaling(const SweepSpec& spec, const std::string& csv_path,
                      std::ostream& log);

struct VerifyRow {
    int nx = 0;
    long steps = 0;
    double t_final = 0.0;
    double err_linf = 0.0;
    double err_l2 = 0.0;
};

struct VerifyReport {
    std::vector<VerifyRow> rows;
    double observed_order = 0.0;  // from the coarsest/finest Linf pair
    bool passed = false;
};

VerifyReport run_verify(Problem problem, const std::vector<int>& sizes,
                        std::ostream& log);

/// CSV -> one SVG per (problem, nx): share x block cells colored by speedup,
/// best cell marked with a white dot (black border), worst with a black dot
/// (white border).
std::vector<std::string> render_heatmaps(const std::string& csv_path,
                                         const std::string& out_dir);

}  // namespace sweptgrid

#endif
