#include "sweptgrid/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "sweptgrid/engine.hpp"

namespace sweptgrid {

namespace {

std::vector<double> default_shares() {
    std::vector<double> s;
    for (int i = 0; i <= 10; ++i) s.push_back(i / 10.0);
    return s;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '"') c = ';';
    return s;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

}  // namespace

SweepSpec SweepSpec::desk_default() {
    SweepSpec s;
    s.array_sizes = {80, 120, 160, 200, 240, 280};
    s.steps = 250;
    s.shares = default_shares();
    return s;
}

SweepSpec SweepSpec::paper_scale() {
    SweepSpec s;
    s.array_sizes = {320, 480, 640, 800, 960, 1120};
    s.shares = default_shares();
    return s;
}

const char* const kBenchCsvHeader =
    "problem,nx,block,share,ranks,mode,repetition,actual_steps,"
    "run_seconds_standard,run_seconds_swept,modeled_seconds_standard,"
    "modeled_seconds_swept,messages_standard,messages_swept,speedup,error";

std::string BenchRow::key() const {
    std::ostringstream os;
    os << problem << '|' << nx << '|' << block << '|' << share << '|' << ranks
       << '|' << mode;
    return os.str();
}

std::string bench_row_csv(const BenchRow& r) {
    std::ostringstream os;
    os.precision(12);
    os << r.problem << ',' << r.nx << ',' << r.block << ',' << r.share << ','
       << r.ranks << ',' << r.mode << ',' << r.repetition << ','
       << r.actual_steps << ',' << r.run_seconds_standard << ','
       << r.run_seconds_swept << ',' << r.modeled_seconds_standard << ','
       << r.modeled_seconds_swept << ',' << r.messages_standard << ','
       << r.messages_swept << ',' << r.speedup << ',' << sanitize(r.error);
    return os.str();
}

std::vector<BenchRow> load_bench_csv(const std::string& path) {
    std::vector<BenchRow> rows;
    std::ifstream in(path);
    if (!in) return rows;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() < 15) continue;
        BenchRow r;
        r.problem = f[0];
        r.nx = std::stoi(f[1]);
        r.block = std::stoi(f[2]);
        r.share = std::stod(f[3]);
        r.ranks = std::stoi(f[4]);
        r.mode = f[5];
        r.repetition = std::stoi(f[6]);
        r.actual_steps = std::stol(f[7]);
        r.run_seconds_standard = std::stod(f[8]);
        r.run_seconds_swept = std::stod(f[9]);
        r.modeled_seconds_standard = std::stod(f[10]);
        r.modeled_seconds_swept = std::stod(f[11]);
        r.messages_standard = std::stol(f[12]);
        r.messages_swept = std::stol(f[13]);
        r.speedup = std::stod(f[14]);
        if (f.size() > 15) r.error = f[15];
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

SolverConfig cell_config(const SweepSpec& spec, Problem problem, int nx, int b,
                         double share, EngineKind engine) {
    SolverConfig cfg;
    cfg.problem = problem;
    cfg.nx = nx;
    cfg.block = b;
    cfg.share = share;
    cfg.steps = spec.steps;
    cfg.ranks = spec.ranks;
    cfg.engine = engine;
    cfg.mode = spec.mode;
    cfg.link = spec.link;
    cfg.pool_a = spec.pool_a;
    cfg.pool_b = spec.pool_b;
    cfg.cell_cost = spec.cell_cost;
    return cfg;
}

}  // namespace

void run_sweep(const SweepSpec& spec, const std::string& csv_path,
               std::ostream& log) {
    std::set<std::string> done;
    for (const auto& r : load_bench_csv(csv_path)) done.insert(r.key());

    const bool fresh = !std::filesystem::exists(csv_path);
    std::ofstream out(csv_path, std::ios::app);
    if (!out) throw std::runtime_error("sweep: cannot open " + csv_path);
    if (fresh) out << kBenchCsvHeader << '\n';

    const bool use_model = spec.mode == TransportMode::Virtual;
    for (Problem problem : spec.problems)
        for (int nx : spec.array_sizes)
            for (int b : spec.block_sizes) {
                if (nx % b != 0) continue;
                if ((nx / b) % spec.ranks != 0) continue;
                for (double share : spec.shares) {
                    BenchRow row;
                    row.problem = problem_name(problem);
                    row.nx = nx;
                    row.block = b;
                    row.share = share;
                    row.ranks = spec.ranks;
                    row.mode = mode_name(spec.mode);
                    row.repetition = spec.repetitions;
                    if (done.count(row.key())) continue;
                    try {
                        std::vector<double> swe_run, swe_model, std_run, std_model;
                        long actual = 0, msg_swe = 0, msg_std = 0;
                        for (int rep = 0; rep < spec.repetitions; ++rep) {
                            SolverConfig cfg = cell_config(spec, problem, nx, b,
                                                           share, EngineKind::Swept);
                            RunResult swe = run(cfg);
                            actual = swe.record.actual_steps;
                            msg_swe = swe.record.messages;
                            swe_run.push_back(swe.record.wall_seconds);
                            swe_model.push_back(swe.record.modeled_seconds);

                            cfg.engine = EngineKind::Standard;
                            cfg.steps = actual;
                            RunResult std_ = run(cfg);
                            msg_std = std_.record.messages;
                            std_run.push_back(std_.record.wall_seconds);
                            std_model.push_back(std_.record.modeled_seconds);
                        }
                        row.actual_steps = actual;
                        row.messages_swept = msg_swe;
                        row.messages_standard = msg_std;
                        row.modeled_seconds_swept = median(swe_model);
                        row.modeled_seconds_standard = median(std_model);
                        row.run_seconds_swept =
                            use_model ? row.modeled_seconds_swept : median(swe_run);
                        row.run_seconds_standard =
                            use_model ? row.modeled_seconds_standard : median(std_run);
                        row.speedup = row.run_seconds_standard / row.run_seconds_swept;
                    } catch (const std::exception& e) {
                        row.error = e.what();
                    }
                    out << bench_row_csv(row) << '\n';
                    out.flush();
                    log << row.problem << " nx=" << row.nx << " b=" << row.block
                        << " share=" << row.share
                        << (row.error.empty()
                                ? " speedup=" + std::to_string(row.speedup)
                                : " ERROR " + row.error)
                        << '\n';
                }
            }
}

void run_weak_scaling(const SweepSpec& spec, const std::string& csv_path,
                      std::ostream& log) {
    // ~4e4 points per rank; sizes chosen so block columns split evenly and
    // the per-rank load stays within one block-column of the 192^2 target.
    const std::vector<std::pair<int, int>> ladder{{1, 192}, {2, 288}, {3, 336}, {4, 384}};
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("weak-scaling: cannot open " + csv_path);
    out << "problem,ranks,nx,points_per_rank,engine,actual_steps,seconds,"
           "seconds_per_step,messages,bytes,bytes_per_event\n";
    const bool use_model = spec.mode == TransportMode::Virtual;
    for (Problem problem : spec.problems)
        for (auto [ranks, nx] : ladder)
            for (EngineKind engine : {EngineKind::Standard, EngineKind::Swept}) {
                SweepSpec s = spec;
                s.ranks = ranks;
                SolverConfig cfg = cell_config(s, problem, nx, 16, 0.9, engine);
                RunResult res = run(cfg);
                const double secs = use_model ? res.record.modeled_seconds
                                              : res.record.wall_seconds;
                const long events =
                    engine == EngineKind::Swept
                        ? res.record.communicates
                        : res.record.total_levels;
                out << problem_name(problem) << ',' << ranks << ',' << nx << ','
                    << static_cast<long>(nx) * nx / ranks << ','
                    << engine_name(engine) << ',' << res.record.actual_steps << ','
                    << secs << ',' << secs / res.record.actual_steps << ','
                    << res.record.messages << ',' << res.record.bytes << ','
                    << (events > 0 ? static_cast<double>(res.record.bytes) / events
                                   : 0.0)
                    << '\n';
                out.flush();
                log << problem_name(problem) << " ranks=" << ranks
                    << " engine=" << engine_name(engine) << " s/step="
                    << secs / res.record.actual_steps << '\n';
            }
}

VerifyReport run_verify(Problem problem, const std::vector<int>& sizes,
                        std::ostream& log) {
    VerifyReport rep;
    for (int nx : sizes) {
        SolverConfig cfg;
        cfg.problem = problem;
        cfg.nx = nx;
        cfg.block = 8;
        cfg.engine = EngineKind::Standard;
        cfg.ranks = 1;
        ProblemSetup setup = make_setup(cfg);
        if (problem == Problem::Heat) {
            // fixed final time: 40 coarse-grid steps, dt ~ dx^2
            const int base = sizes.front();
            cfg.steps = 40L * (nx / base) * (nx / base);
        } else {
            cfg.steps = std::max(1L, std::lround(0.5 / setup.dt));
        }
        RunResult res = run(cfg);
        const double t = res.record.actual_steps * setup.dt;

        VerifyRow row;
        row.nx = nx;
        row.steps = res.record.actual_steps;
        row.t_final = t;
        double linf = 0.0, l2 = 0.0;
        if (problem == Problem::Heat) {
            for (int y = 0; y < nx; ++y)
                for (int x = 0; x < nx; ++x) {
                    const double e = res.final_field.at(0, x, y) -
                                     heat_analytic(setup.xpos(x), setup.ypos(y), t,
                                                   cfg.heat_alpha);
                    linf = std::max(linf, std::abs(e));
                    l2 += e * e;
                }
        } else {
            FieldState exact =
                vortex_analytic(nx, nx, setup.vortex, cfg.gamma, t);
            for (int y = 0; y < nx; ++y)
                for (int x = 0; x < nx; ++x) {
                    const double e =
                        res.final_field.at(0, x, y) - exact.at(0, x, y);
                    linf = std::max(linf, std::abs(e));
                    l2 += e * e;
                }
        }
        row.err_linf = linf;
        row.err_l2 = std::sqrt(l2 / (static_cast<double>(nx) * nx));
        rep.rows.push_back(row);
        log << "nx=" << nx << " steps=" << row.steps << " t=" << t
            << " Linf=" << linf << " L2=" << row.err_l2 << '\n';
    }

    const auto& first = rep.rows.front();
    const auto& last = rep.rows.back();
    rep.observed_order = std::log(first.err_linf / last.err_linf) /
                         std::log(static_cast<double>(last.nx) / first.nx);
    bool monotone = true;
    for (std::size_t i = 1; i < rep.rows.size(); ++i)
        monotone = monotone && rep.rows[i].err_linf < rep.rows[i - 1].err_linf;
    rep.passed = problem == Problem::Heat ? rep.observed_order >= 1.9 : monotone;
    log << "observed order " << rep.observed_order
        << (rep.passed ? " (pass)" : " (FAIL)") << '\n';
    return rep;
}

namespace {

struct Rgb {
    int r, g, b;
};

/// Diverging blue -> white -> red map over [0, 1].
Rgb colormap(double t) {
    t = std::clamp(t, 0.0, 1.0);
    auto lerp = [](int a, int b, double u) {
        return static_cast<int>(std::lround(a + (b - a) * u));
    };
    const Rgb lo{49, 54, 149}, mid{247, 247, 247}, hi{165, 0, 38};
    if (t < 0.5) {
        const double u = t * 2.0;
        return {lerp(lo.r, mid.r, u), lerp(lo.g, mid.g, u), lerp(lo.b, mid.b, u)};
    }
    const double u = (t - 0.5) * 2.0;
    return {lerp(mid.r, hi.r, u), lerp(mid.g, hi.g, u), lerp(mid.b, hi.b, u)};
}

}  // namespace

std::vector<std::string> render_heatmaps(const std::string& csv_path,
                                         const std::string& out_dir) {
    auto rows = load_bench_csv(csv_path);
    std::map<std::pair<std::string, int>, std::vector<BenchRow>> groups;
    for (auto& r : rows)
        if (r.error.empty() && r.speedup > 0.0)
            groups[{r.problem, r.nx}].push_back(r);

    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;
    for (auto& [key, cells] : groups) {
        std::set<int> blocks;
        std::set<double> shares;
        for (auto& c : cells) {
            blocks.insert(c.block);
            shares.insert(c.share);
        }
        std::vector<int> bx(blocks.begin(), blocks.end());
        std::vector<double> sy(shares.begin(), shares.end());
        double lo = cells.front().speedup, hi = lo;
        const BenchRow *best = &cells.front(), *worst = &cells.front();
        for (auto& c : cells) {
            lo = std::min(lo, c.speedup);
            hi = std::max(hi, c.speedup);
            if (c.speedup > best->speedup) best = &c;
            if (c.speedup < worst->speedup) worst = &c;
        }
        const double span = hi > lo ? hi - lo : 1.0;

        const int cw = 72, ch = 34, mx = 70, my = 50;
        const int width = mx + cw * static_cast<int>(bx.size()) + 20;
        const int height = my + ch * static_cast<int>(sy.size()) + 40;
        std::ostringstream svg;
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
            << "\" height=\"" << height << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
        svg << "<text x=\"" << mx << "\" y=\"20\" font-size=\"14\">" << key.first
            << " " << key.second << "\xc2\xb2, speedup standard/swept</text>\n";
        for (std::size_t i = 0; i < bx.size(); ++i)
            svg << "<text x=\"" << mx + cw * i + cw / 2 - 8 << "\" y=\""
                << my - 8 << "\">b=" << bx[i] << "</text>\n";
        for (std::size_t j = 0; j < sy.size(); ++j)
            svg << "<text x=\"" << 10 << "\" y=\"" << my + ch * j + ch / 2 + 4
                << "\">s=" << sy[j] << "</text>\n";
        for (auto& c : cells) {
            const std::size_t i =
                std::find(bx.begin(), bx.end(), c.block) - bx.begin();
            const std::size_t j =
                std::find(sy.begin(), sy.end(), c.share) - sy.begin();
            const int x = mx + static_cast<int>(i) * cw;
            const int y = my + static_cast<int>(j) * ch;
            const Rgb col = colormap((c.speedup - lo) / span);
            svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw
                << "\" height=\"" << ch << "\" fill=\"rgb(" << col.r << ','
                << col.g << ',' << col.b << ")\" stroke=\"#888\"/>\n";
            std::ostringstream val;
            val.precision(3);
            val << c.speedup;
            svg << "<text x=\"" << x + 6 << "\" y=\"" << y + ch / 2 + 4
                << "\">" << val.str() << "</text>\n";
            if (&c == best)
                svg << "<circle cx=\"" << x + cw - 12 << "\" cy=\"" << y + 10
                    << "\" r=\"6\" fill=\"white\" stroke=\"black\" stroke-width=\"2\"/>\n";
            if (&c == worst)
                svg << "<circle cx=\"" << x + cw - 12 << "\" cy=\"" << y + 10
                    << "\" r=\"6\" fill=\"black\" stroke=\"white\" stroke-width=\"2\"/>\n";
        }
        svg << "</svg>\n";

        std::ostringstream name;
        name << out_dir << "/heatmap_" << key.first << "_" << key.second << ".svg";
        std::ofstream f(name.str());
        f << svg.str();
        written.push_back(name.str());
    }
    return written;
}

}  // namespace sweptgrid
