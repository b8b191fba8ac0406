#ifndef SWEPTGRID_CONFIG_HPP
#define SWEPTGRID_CONFIG_HPP

#include <string>

#include "sweptgrid/physics.hpp"
#include "sweptgrid/transport.hpp"

#include <json.hpp>

namespace sweptgrid {

enum class EngineKind { Swept, Standard };
const char* engine_name(EngineKind e);
EngineKind engine_from_name(const std::string& s);

const char* mode_name(TransportMode m);
TransportMode mode_from_name(const std::string& s);

/// One of the two heterogeneous worker pools.  `workers` is the intra-rank
/// thread count; `cost` scales the per-cell work (wall mode runs the kernel
/// that many extra times, the virtual clock just multiplies).
struct PoolSpec {
    int workers = 1;
    double cost = 1.0;
};

struct SolverConfig {
    Problem problem = Problem::Heat;
    int nx = 64;  // ny == nx
    int block = 8;
    double share = 1.0;  // fraction of block columns on pool A
    long steps = 10;
    int ranks = 1;
    EngineKind engine = EngineKind::Swept;
    TransportMode mode = TransportMode::Wall;
    LinkModel link;
    PoolSpec pool_a;
    PoolSpec pool_b;
    double cell_cost = 5.0e-8;  // virtual seconds per cell-update

    double heat_alpha = 1.0;
    double heat_fourier = 0.2;
    double gamma = 1.4;
    double cfl = 0.4;

    std::string snapshot_path;  // empty = no snapshot
    long snapshot_every = 1;    // in completed sub-step levels

    int ny() const { return nx; }
    void validate() const;

    static SolverConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    static SolverConfig load(const std::string& path);
};

}  // namespace sweptgrid

#endif
