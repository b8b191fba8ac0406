#ifndef SWEPTGRID_ENGINE_HPP
#define SWEPTGRID_ENGINE_HPP

#include <string>

#include "sweptgrid/config.hpp"
#include "sweptgrid/field.hpp"
#include "sweptgrid/geometry.hpp"
#include "sweptgrid/physics.hpp"
#include "sweptgrid/transport.hpp"

#include <json.hpp>

namespace sweptgrid {

/// Everything derived from a config before the solver loop starts: scheme,
/// grid spacing, timestep and initial condition.
struct ProblemSetup {
    StencilShape stencil;
    int nvars = 1;
    double dx = 0.0, dy = 0.0, dt = 0.0;
    double origin_x = 0.0, origin_y = 0.0;  // position of index 0
    bool cell_centered = false;
    HeatParams heat;
    EulerParams euler;
    VortexSpec vortex = VortexSpec::standard(1.4);
    FieldState initial;

    double xpos(int i) const { return origin_x + (i + (cell_centered ? 0.5 : 0.0)) * dx; }
    double ypos(int j) const { return origin_y + (j + (cell_centered ? 0.5 : 0.0)) * dy; }
};

ProblemSetup make_setup(const SolverConfig& cfg);

struct RunRecord {
    std::string engine, problem, mode;
    int nx = 0, block = 0, ranks = 0;
    long steps_requested = 0;
    long actual_steps = 0;
    long total_levels = 0;   // completed sub-step levels
    long octahedra = 0;      // swept only
    long communicates = 0;   // swept only
    double dt = 0.0;
    double setup_seconds = 0.0;
    double wall_seconds = 0.0;     // solver loop, wall clock
    double modeled_seconds = 0.0;  // virtual mode: max rank clock
    long messages = 0;
    long long bytes = 0;
    long long cell_updates = 0;
    long snapshot_frames = 0;
    CostLedger ledger;

    nlohmann::json to_json() const;
};

struct RunResult {
    FieldState final_field;  // physical layout, at level actual_steps * substeps
    RunRecord record;
};

RunResult run(const SolverConfig& cfg);

}  // namespace sweptgrid

#endif
