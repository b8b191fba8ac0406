#include "sweptgrid/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "sweptgrid/geometry.hpp"

namespace sweptgrid {

const char* engine_name(EngineKind e) {
    return e == EngineKind::Swept ? "swept" : "standard";
}

EngineKind engine_from_name(const std::string& s) {
    if (s == "swept") return EngineKind::Swept;
    if (s == "standard") return EngineKind::Standard;
    throw std::invalid_argument("unknown engine: " + s);
}

const char* mode_name(TransportMode m) {
    return m == TransportMode::Wall ? "wall" : "virtual";
}

TransportMode mode_from_name(const std::string& s) {
    if (s == "wall") return TransportMode::Wall;
    if (s == "virtual") return TransportMode::Virtual;
    throw std::invalid_argument("unknown transport mode: " + s);
}

void SolverConfig::validate() const {
    const StencilShape st = stencil_for(problem);
    max_levels(block, st.halo);  // checks block vs halo constraints
    if (nx <= 0 || nx % block != 0)
        throw std::invalid_argument("config: nx must be a positive multiple of block");
    if (ranks <= 0 || (nx / block) % ranks != 0)
        throw std::invalid_argument(
            "config: ranks must evenly divide the block-column count");
    if (steps <= 0) throw std::invalid_argument("config: steps must be positive");
    if (share < 0.0 || share > 1.0)
        throw std::invalid_argument("config: share must be in [0, 1]");
    if (pool_a.workers <= 0 || pool_b.workers <= 0)
        throw std::invalid_argument("config: pool workers must be positive");
    if (pool_a.cost <= 0.0 || pool_b.cost <= 0.0)
        throw std::invalid_argument("config: pool cost must be positive");
    if (cell_cost < 0.0)
        throw std::invalid_argument("config: cell cost must be non-negative");
    if (problem == Problem::Heat) {
        if (heat_fourier <= 0.0 || heat_fourier > 0.25)
            throw std::invalid_argument(
                "config: heat stability requires fourier number in (0, 0.25]");
        if (heat_alpha <= 0.0)
            throw std::invalid_argument("config: heat alpha must be positive");
    } else {
        if (cfl <= 0.0 || cfl > 1.0)
            throw std::invalid_argument("config: cfl must be in (0, 1]");
        if (gamma <= 1.0) throw std::invalid_argument("config: gamma must exceed 1");
    }
    if (snapshot_every <= 0)
        throw std::invalid_argument("config: snapshot cadence must be positive");
    link.validate();
}

namespace {

PoolSpec pool_from_json(const nlohmann::json& j) {
    PoolSpec p;
    p.workers = j.value("workers", 1);
    p.cost = j.value("cost", 1.0);
    return p;
}

nlohmann::json pool_to_json(const PoolSpec& p) {
    return {{"workers", p.workers}, {"cost", p.cost}};
}

}  // namespace

SolverConfig SolverConfig::from_json(const nlohmann::json& j) {
    SolverConfig c;
    if (j.contains("problem")) c.problem = problem_from_name(j["problem"]);
    c.nx = j.value("nx", c.nx);
    c.block = j.value("block", c.block);
    c.share = j.value("share", c.share);
    c.steps = j.value("steps", c.steps);
    c.ranks = j.value("ranks", c.ranks);
    if (j.contains("engine")) c.engine = engine_from_name(j["engine"]);
    if (j.contains("mode")) c.mode = mode_from_name(j["mode"]);
    c.link.latency = j.value("latency", c.link.latency);
    c.link.bandwidth = j.value("bandwidth", c.link.bandwidth);
    if (j.contains("pool_a")) c.pool_a = pool_from_json(j["pool_a"]);
    if (j.contains("pool_b")) c.pool_b = pool_from_json(j["pool_b"]);
    c.cell_cost = j.value("cell_cost", c.cell_cost);
    c.heat_alpha = j.value("heat_alpha", c.heat_alpha);
    c.heat_fourier = j.value("heat_fourier", c.heat_fourier);
    c.gamma = j.value("gamma", c.gamma);
    c.cfl = j.value("cfl", c.cfl);
    c.snapshot_path = j.value("snapshot", c.snapshot_path);
    c.snapshot_every = j.value("snapshot_every", c.snapshot_every);
    return c;
}

nlohmann::json SolverConfig::to_json() const {
    nlohmann::json j;
    j["problem"] = problem_name(problem);
    j["nx"] = nx;
    j["block"] = block;
    j["share"] = share;
    j["steps"] = steps;
    j["ranks"] = ranks;
    j["engine"] = engine_name(engine);
    j["mode"] = mode_name(mode);
    j["latency"] = link.latency;
    if (std::isfinite(link.bandwidth)) j["bandwidth"] = link.bandwidth;
    j["pool_a"] = pool_to_json(pool_a);
    j["pool_b"] = pool_to_json(pool_b);
    j["cell_cost"] = cell_cost;
    j["heat_alpha"] = heat_alpha;
    j["heat_fourier"] = heat_fourier;
    j["gamma"] = gamma;
    j["cfl"] = cfl;
    if (!snapshot_path.empty()) j["snapshot"] = snapshot_path;
    j["snapshot_every"] = snapshot_every;
    return j;
}

SolverConfig SolverConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

}  // namespace sweptgrid
