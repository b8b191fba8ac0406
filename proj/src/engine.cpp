#include "sweptgrid/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "sweptgrid/snapshot.hpp"

namespace sweptgrid {

namespace {

using WallClock = std::chrono::steady_clock;

double seconds_since(WallClock::time_point t0) {
    return std::chrono::duration<double>(WallClock::now() - t0).count();
}

}  // namespace

ProblemSetup make_setup(const SolverConfig& cfg) {
    cfg.validate();
    ProblemSetup s;
    const int nx = cfg.nx, ny = cfg.ny();
    if (cfg.problem == Problem::Heat) {
        s.stencil = StencilShape::heat();
        s.nvars = 1;
        s.dx = 1.0 / nx;
        s.dy = 1.0 / ny;
        s.dt = cfg.heat_fourier * s.dx * s.dx / cfg.heat_alpha;
        s.heat = {cfg.heat_alpha, s.dx, s.dy, s.dt};
        s.initial = FieldState(1, nx, ny, 0);
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x)
                s.initial.at(0, x, y) =
                    heat_analytic(s.xpos(x), s.ypos(y), 0.0, cfg.heat_alpha);
    } else {
        s.stencil = StencilShape::euler();
        s.nvars = 4;
        s.vortex = VortexSpec::standard(cfg.gamma);
        s.cell_centered = true;
        const double L = s.vortex.half_extent;
        s.dx = 2.0 * L / nx;
        s.dy = 2.0 * L / ny;
        s.origin_x = -L;
        s.origin_y = -L;
        s.initial = vortex_init(nx, ny, s.vortex, cfg.gamma);
        // CFL timestep from the initial condition's peak spectral radius,
        // held constant for the whole run.
        double radius = 0.0;
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                Vec4 q = load_q(s.initial.view(), x, y);
                const double p = pressure(q, cfg.gamma);
                const double c = std::sqrt(cfg.gamma * p / q[0]);
                const double rx = std::abs(q[1] / q[0]) + c;
                const double ry = std::abs(q[2] / q[0]) + c;
                radius = std::max(radius, rx / s.dx + ry / s.dy);
            }
        s.dt = cfg.cfl / radius;
        s.euler = {cfg.gamma, s.dx, s.dy, s.dt, cfg.cfl};
    }
    return s;
}

namespace {

/// Snapshot/gather sink shared by all ranks of a run.
class FrameSink {
  public:
    FrameSink(const SolverConfig& cfg, const ProblemSetup& setup, long final_level)
        : final_level_(final_level), every_(cfg.snapshot_every) {
        if (!cfg.snapshot_path.empty()) {
            SnapshotMeta meta;
            meta.problem = problem_name(cfg.problem);
            meta.nx = cfg.nx;
            meta.ny = cfg.ny();
            meta.nvars = setup.nvars;
            meta.b = cfg.block;
            meta.dt = setup.dt;
            meta.dx = setup.dx;
            meta.dy = setup.dy;
            meta.params = {{"alpha", cfg.heat_alpha}, {"gamma", cfg.gamma}};
            writer_.emplace(cfg.snapshot_path, meta);
        }
        collector_.emplace(cfg.ranks, setup.nvars, cfg.nx, cfg.ny(),
                           [this](long level, const std::vector<double>& data) {
                               if (writer_ && level % every_ == 0) {
                                   writer_->append_frame(level, data);
                                   ++frames_;
                               }
                               if (level == final_level_) final_ = data;
                           });
    }

    bool snapshotting() const { return writer_.has_value(); }
    FrameCollector& collector() { return *collector_; }
    long frames() const { return frames_; }
    const std::vector<double>& final_frame() const { return final_; }
    void close() {
        if (writer_) writer_->flush();
    }

  private:
    long final_level_;
    long every_;
    std::optional<SnapshotWriter> writer_;
    std::optional<FrameCollector> collector_;
    long frames_ = 0;
    std::vector<double> final_;
};

struct RankContext {
    const SolverConfig* cfg;
    const ProblemSetup* setup;
    const PhasePlan* plan;  // swept only
    const WorkAllocation* alloc;
    Transport* transport;
    FrameSink* sink;
    long final_level;
    int lw;          // local width (columns owned), full ny height
    int cols_total;  // global block columns
    int cols_local;
};

int wall_repeats(double cost) {
    const long r = std::lround(cost);
    return static_cast<int>(std::max(1L, r));
}

/// Modeled seconds for one phase across the two pools: the slower pool bounds
/// the step.
double modeled_phase_seconds(const SolverConfig& cfg, long cells_a, long cells_b) {
    const double ta = static_cast<double>(cells_a) * cfg.pool_a.cost / cfg.pool_a.workers;
    const double tb = static_cast<double>(cells_b) * cfg.pool_b.cost / cfg.pool_b.workers;
    return std::max(ta, tb) * cfg.cell_cost;
}

SubstepArgs make_args(const RankContext& ctx, int stage, GridView read1,
                      GridView read2, GridSpan out) {
    SubstepArgs a;
    a.problem = ctx.cfg->problem;
    a.stage = stage;
    a.read1 = read1;
    a.read2 = read2;
    a.out = out;
    a.heat = ctx.setup->heat;
    a.euler = ctx.setup->euler;
    return a;
}

void run_pools(const RankContext& ctx, const SubstepArgs& args,
               const std::vector<CellBlock>& pool_a,
               const std::vector<CellBlock>& pool_b) {
    if (!pool_a.empty())
        run_substep_omp(args, pool_a, ctx.cfg->pool_a.workers);
    if (!pool_b.empty())
        run_substep_omp(args, pool_b, ctx.cfg->pool_b.workers);
}

// ---- swept engine ----

class SweptRank {
  public:
    SweptRank(const RankContext& ctx, int rank)
        : ctx_(ctx), rank_(rank), b_(ctx.cfg->block), ny_(ctx.cfg->ny()),
          nvars_(ctx.setup->nvars),
          slab_(2 * ctx.plan->k + ctx.plan->substeps, ctx.setup->nvars, ctx.lw, ny_) {}

    void run() {
        load_initial();
        const bool snap = ctx_.sink->snapshotting();
        long flushed = -1;  // highest level already contributed
        long comm_seq = 0;
        for (const PhaseEntry& e : ctx_.plan->entries) {
            if (e.phase == Phase::Communicate) {
                if (snap) {
                    for (long l = flushed + 1; l <= e.frontier; ++l) contribute(l);
                    flushed = e.frontier;
                }
                shift(e.shift_sign, comm_seq++);
            } else {
                compute(e);
            }
        }
        if (snap)
            for (long l = flushed + 1; l <= ctx_.plan->flat_level; ++l) contribute(l);
        else
            contribute(ctx_.final_level);
    }

  private:
    void load_initial() {
        slab_.retag(0);
        auto& plane = slab_.plane(0);
        const FieldState& init = ctx_.setup->initial;
        const int x0 = rank_ * ctx_.lw;
        for (int v = 0; v < nvars_; ++v)
            for (int y = 0; y < ny_; ++y)
                std::memcpy(&plane[(static_cast<std::size_t>(v) * ny_ + y) * ctx_.lw],
                            &init.data[(static_cast<std::size_t>(v) * ny_ + y) * init.nx + x0],
                            sizeof(double) * ctx_.lw);
    }

    void compute(const PhaseEntry& e) {
        const long abs = e.abs_level;
        if (!slab_.holds(abs)) slab_.retag(abs);
        const int stage = static_cast<int>((abs - 1) % ctx_.plan->substeps);
        GridView read1 = slab_.view(abs - 1);
        GridView read2 = abs >= 2 ? slab_.view(abs - 2) : read1;
        SubstepArgs args = make_args(ctx_, stage, read1, read2, slab_.span(abs));

        std::vector<CellBlock> pa, pb;
        long cells_a = 0, cells_b = 0;
        const bool wall = ctx_.cfg->mode == TransportMode::Wall;
        for (int bi = 0; bi < ctx_.cols_local; ++bi) {
            const int pool = ctx_.alloc->pool_of_column(rank_ * ctx_.cols_local + bi);
            const double cost = pool == 0 ? ctx_.cfg->pool_a.cost : ctx_.cfg->pool_b.cost;
            for (int bj = 0; bj < ny_ / b_; ++bj) {
                CellBlock cb;
                cb.rect = {bi * b_ + e.region.x0, bi * b_ + e.region.x1,
                           bj * b_ + e.region.y0, bj * b_ + e.region.y1};
                cb.repeats = wall ? wall_repeats(cost) : 1;
                (pool == 0 ? pa : pb).push_back(cb);
                (pool == 0 ? cells_a : cells_b) += e.region.area();
            }
        }
        run_pools(ctx_, args, pa, pb);
        if (!wall)
            ctx_.transport->add_compute(
                rank_, modeled_phase_seconds(*ctx_.cfg, cells_a, cells_b));
    }

    void shift(int sign, long comm_seq) {
        const int s = sign * b_ / 2;
        const int w = b_ / 2;
        const int lw = ctx_.lw;
        const int ranks = ctx_.cfg->ranks;
        auto& planes = slab_.planes();
        const int np = static_cast<int>(planes.size());

        // Pack the departing edge columns of every ring plane into one message.
        Envelope env;
        env.dst = sign > 0 ? (rank_ + 1) % ranks : (rank_ + ranks - 1) % ranks;
        env.payload.reserve(static_cast<std::size_t>(np) * nvars_ * ny_ * w);
        const int src0 = sign > 0 ? lw - w : 0;
        for (const auto& plane : planes)
            for (int v = 0; v < nvars_; ++v)
                for (int y = 0; y < ny_; ++y) {
                    const double* row = &plane[(static_cast<std::size_t>(v) * ny_ + y) * lw];
                    env.payload.insert(env.payload.end(), row + src0, row + src0 + w);
                }

        auto recv = ctx_.transport->exchange(rank_, {std::move(env)}, 1, comm_seq);
        const std::vector<double>& in = recv.front().payload;

        // Slide every plane by s columns, fill the vacated edge from the
        // neighbor, then roll the rows by the same amount.
        std::size_t off = 0;
        for (auto& plane : planes) {
            for (int v = 0; v < nvars_; ++v)
                for (int y = 0; y < ny_; ++y) {
                    double* row = &plane[(static_cast<std::size_t>(v) * ny_ + y) * lw];
                    if (sign > 0) {
                        std::memmove(row + w, row, sizeof(double) * (lw - w));
                        std::memcpy(row, &in[off], sizeof(double) * w);
                    } else {
                        std::memmove(row, row + w, sizeof(double) * (lw - w));
                        std::memcpy(row + lw - w, &in[off], sizeof(double) * w);
                    }
                    off += w;
                }
            for (int v = 0; v < nvars_; ++v) {
                auto first = plane.begin() + static_cast<std::ptrdiff_t>(v) * ny_ * lw;
                auto last = first + static_cast<std::ptrdiff_t>(ny_) * lw;
                // new row y holds old row y - s
                if (sign > 0)
                    std::rotate(first, last - static_cast<std::ptrdiff_t>(w) * lw, last);
                else
                    std::rotate(first, first + static_cast<std::ptrdiff_t>(w) * lw, last);
            }
        }
        sx_ = (sx_ + s % ctx_.cfg->nx + ctx_.cfg->nx) % ctx_.cfg->nx;
        sy_ = (sy_ + s % ny_ + ny_) % ny_;
    }

    void contribute(long level) {
        if (!slab_.holds(level))
            throw std::logic_error("swept: level left the time slab before output");
        ctx_.sink->collector().contribute(level, rank_, rank_ * ctx_.lw, ctx_.lw,
                                          sx_, sy_, slab_.plane(level).data());
    }

    RankContext ctx_;
    int rank_, b_, ny_, nvars_;
    int sx_ = 0, sy_ = 0;
    TimeSlab slab_;
};

// ---- standard halo-exchange engine ----

class StandardRank {
  public:
    StandardRank(const RankContext& ctx, int rank)
        : ctx_(ctx), rank_(rank), n_(ctx.setup->stencil.halo),
          ny_(ctx.cfg->ny()), nvars_(ctx.setup->nvars), lw_(ctx.lw),
          gw_(ctx.lw + 2 * ctx.setup->stencil.halo),
          ring_(ctx.setup->stencil.substeps + 1,
                std::vector<double>(static_cast<std::size_t>(ctx.setup->nvars) *
                                        (ctx.lw + 2 * ctx.setup->stencil.halo) * ctx.cfg->ny(),
                                    0.0)) {}

    void run() {
        load_initial();
        const bool snap = ctx_.sink->snapshotting();
        if (snap) contribute(0);
        for (long level = 1; level <= ctx_.final_level; ++level) {
            exchange_ghosts(level - 1);
            compute(level);
            if (snap || level == ctx_.final_level) contribute(level);
        }
    }

  private:
    std::vector<double>& plane(long level) { return ring_[level % ring_.size()]; }
    double* row(std::vector<double>& p, int v, int y) {
        return &p[(static_cast<std::size_t>(v) * ny_ + y) * gw_];
    }

    void load_initial() {
        auto& p = plane(0);
        const FieldState& init = ctx_.setup->initial;
        const int x0 = rank_ * lw_;
        for (int v = 0; v < nvars_; ++v)
            for (int y = 0; y < ny_; ++y)
                std::memcpy(row(p, v, y) + n_,
                            &init.data[(static_cast<std::size_t>(v) * ny_ + y) * init.nx + x0],
                            sizeof(double) * lw_);
    }

    /// Fill the ghost columns of `level`'s plane from the neighbors' edge
    /// columns.  Both directions travel in one transport round; the first
    /// payload element tags the direction so two-rank (and one-rank periodic)
    /// runs can tell the messages apart.
    void exchange_ghosts(long level) {
        const int ranks = ctx_.cfg->ranks;
        auto& p = plane(level);
        auto pack = [&](int x0, double dir, int dst) {
            Envelope e;
            e.dst = dst;
            e.payload.reserve(1 + static_cast<std::size_t>(nvars_) * ny_ * n_);
            e.payload.push_back(dir);
            for (int v = 0; v < nvars_; ++v)
                for (int y = 0; y < ny_; ++y) {
                    const double* r = row(p, v, y) + x0;
                    e.payload.insert(e.payload.end(), r, r + n_);
                }
            return e;
        };
        std::vector<Envelope> sends;
        sends.push_back(pack(n_, -1.0, (rank_ + ranks - 1) % ranks));       // leftward
        sends.push_back(pack(lw_, +1.0, (rank_ + 1) % ranks));              // rightward
        auto recvs = ctx_.transport->exchange(rank_, std::move(sends), 2, level);
        for (const auto& e : recvs) {
            // a rightward-travelling message fills our left ghosts
            const int x0 = e.payload.front() > 0 ? 0 : n_ + lw_;
            std::size_t off = 1;
            for (int v = 0; v < nvars_; ++v)
                for (int y = 0; y < ny_; ++y) {
                    std::memcpy(row(p, v, y) + x0, &e.payload[off], sizeof(double) * n_);
                    off += n_;
                }
        }
    }

    void compute(long level) {
        const int stage = static_cast<int>((level - 1) % ctx_.setup->stencil.substeps);
        GridView read1{plane(level - 1).data(), nvars_, gw_, ny_};
        GridView read2 = level >= 2
                             ? GridView{plane(level - 2).data(), nvars_, gw_, ny_}
                             : read1;
        GridSpan out{plane(level).data(), nvars_, gw_, ny_};
        SubstepArgs args = make_args(ctx_, stage, read1, read2, out);

        const int b = ctx_.cfg->block;
        const bool wall = ctx_.cfg->mode == TransportMode::Wall;
        std::vector<CellBlock> pa, pb;
        long cells_a = 0, cells_b = 0;
        for (int bi = 0; bi < ctx_.cols_local; ++bi) {
            const int pool = ctx_.alloc->pool_of_column(rank_ * ctx_.cols_local + bi);
            const double cost = pool == 0 ? ctx_.cfg->pool_a.cost : ctx_.cfg->pool_b.cost;
            CellBlock cb;
            cb.rect = {n_ + bi * b, n_ + (bi + 1) * b, 0, ny_};
            cb.repeats = wall ? wall_repeats(cost) : 1;
            (pool == 0 ? pa : pb).push_back(cb);
            (pool == 0 ? cells_a : cells_b) += static_cast<long>(b) * ny_;
        }
        run_pools(ctx_, args, pa, pb);
        if (!wall)
            ctx_.transport->add_compute(
                rank_, modeled_phase_seconds(*ctx_.cfg, cells_a, cells_b));
    }

    void contribute(long level) {
        auto& p = plane(level);
        strip_.resize(static_cast<std::size_t>(nvars_) * ny_ * lw_);
        for (int v = 0; v < nvars_; ++v)
            for (int y = 0; y < ny_; ++y)
                std::memcpy(&strip_[(static_cast<std::size_t>(v) * ny_ + y) * lw_],
                            row(p, v, y) + n_, sizeof(double) * lw_);
        ctx_.sink->collector().contribute(level, rank_, rank_ * lw_, lw_, 0, 0,
                                          strip_.data());
    }

    RankContext ctx_;
    int rank_, n_, ny_, nvars_, lw_, gw_;
    std::vector<std::vector<double>> ring_;
    std::vector<double> strip_;
};

template <typename Rank>
void run_ranks(const RankContext& ctx) {
    const int ranks = ctx.cfg->ranks;
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(ranks);
    for (int r = 0; r < ranks; ++r)
        threads.emplace_back([&ctx, &errors, r] {
            try {
                Rank worker(ctx, r);
                worker.run();
            } catch (...) {
                errors[r] = std::current_exception();
                ctx.transport->abort();  // free peers blocked in exchange
            }
        });
    for (auto& t : threads) t.join();
    // Prefer the root cause over the secondary abort errors it triggers.
    std::exception_ptr first;
    for (auto& e : errors) {
        if (!e) continue;
        if (!first) first = e;
        try {
            std::rethrow_exception(e);
        } catch (const TransportError&) {
        } catch (...) {
            first = e;
            break;
        }
    }
    if (first) std::rethrow_exception(first);
}

}  // namespace

nlohmann::json RunRecord::to_json() const {
    nlohmann::json j;
    j["engine"] = engine;
    j["problem"] = problem;
    j["mode"] = mode;
    j["nx"] = nx;
    j["block"] = block;
    j["ranks"] = ranks;
    j["steps_requested"] = steps_requested;
    j["actual_steps"] = actual_steps;
    j["total_levels"] = total_levels;
    j["octahedra"] = octahedra;
    j["communicates"] = communicates;
    j["dt"] = dt;
    j["setup_seconds"] = setup_seconds;
    j["wall_seconds"] = wall_seconds;
    j["modeled_seconds"] = modeled_seconds;
    j["messages"] = messages;
    j["bytes"] = bytes;
    j["cell_updates"] = cell_updates;
    j["snapshot_frames"] = snapshot_frames;
    nlohmann::json per_rank = nlohmann::json::array();
    for (const auto& r : ledger.ranks)
        per_rank.push_back({{"messages", r.messages},
                            {"bytes", r.bytes_sent},
                            {"comm_seconds", r.comm_seconds},
                            {"compute_seconds", r.compute_seconds},
                            {"clock", r.clock}});
    j["per_rank"] = per_rank;
    return j;
}

RunResult run(const SolverConfig& cfg) {
    const auto t0 = WallClock::now();
    ProblemSetup setup = make_setup(cfg);
    const BlockGeometry geom(cfg.block, setup.stencil.halo);
    const WorkAllocation alloc =
        allocate_blocks(cfg.nx / cfg.block, cfg.ny() / cfg.block, cfg.share);

    RunRecord rec;
    rec.engine = engine_name(cfg.engine);
    rec.problem = problem_name(cfg.problem);
    rec.mode = mode_name(cfg.mode);
    rec.nx = cfg.nx;
    rec.block = cfg.block;
    rec.ranks = cfg.ranks;
    rec.steps_requested = cfg.steps;
    rec.dt = setup.dt;

    PhasePlan plan;
    long final_level;
    if (cfg.engine == EngineKind::Swept) {
        plan = build_schedule(cfg.steps, geom, setup.stencil);
        rec.actual_steps = plan.completed_steps();
        rec.total_levels = plan.flat_level;
        rec.octahedra = plan.octahedra;
        rec.communicates = plan.communicate_count();
        final_level = rec.actual_steps * setup.stencil.substeps;
        const long blocks = static_cast<long>(cfg.nx / cfg.block) * (cfg.ny() / cfg.block);
        for (const auto& e : plan.entries)
            if (e.phase != Phase::Communicate)
                rec.cell_updates += e.region.area() * blocks;
    } else {
        rec.actual_steps = cfg.steps;
        rec.total_levels = cfg.steps * setup.stencil.substeps;
        final_level = rec.total_levels;
        rec.cell_updates =
            rec.total_levels * static_cast<long long>(cfg.nx) * cfg.ny();
    }

    auto transport = Transport::make(cfg.mode, cfg.ranks, cfg.link);
    FrameSink sink(cfg, setup, final_level);

    RankContext ctx;
    ctx.cfg = &cfg;
    ctx.setup = &setup;
    ctx.plan = &plan;
    ctx.alloc = &alloc;
    ctx.transport = transport.get();
    ctx.sink = &sink;
    ctx.final_level = final_level;
    ctx.cols_total = cfg.nx / cfg.block;
    ctx.cols_local = ctx.cols_total / cfg.ranks;
    ctx.lw = ctx.cols_local * cfg.block;

    rec.setup_seconds = seconds_since(t0);
    const auto t1 = WallClock::now();
    if (cfg.engine == EngineKind::Swept)
        run_ranks<SweptRank>(ctx);
    else
        run_ranks<StandardRank>(ctx);
    rec.wall_seconds = seconds_since(t1);
    sink.close();

    rec.ledger = transport->ledger();
    rec.messages = rec.ledger.total_messages();
    rec.bytes = rec.ledger.total_bytes();
    rec.modeled_seconds = rec.ledger.max_clock();
    rec.snapshot_frames = sink.frames();

    RunResult result;
    result.record = rec;
    result.final_field = FieldState(setup.nvars, cfg.nx, cfg.ny(), final_level);
    if (sink.final_frame().size() != result.final_field.data.size())
        throw std::logic_error("run: final frame was never assembled");
    result.final_field.data = sink.final_frame();
    return result;
}

}  // namespace sweptgrid
