#ifndef SWEPTGRID_GEOMETRY_HPP
#define SWEPTGRID_GEOMETRY_HPP

#include <string>
#include <vector>

namespace sweptgrid {

/// One read performed by a sub-step: a plane at `level_offset` relative to the
/// level being written, over a Chebyshev `radius` neighborhood.
struct StencilRead {
    int level_offset;
    int radius;
};

/// Space-time footprint of a numerical scheme.  `halo` is the maximum number
/// of points read on either side of a point; `substeps` the number of
/// intermediate levels per timestep.
struct StencilShape {
    int halo = 1;
    int substeps = 1;
    std::vector<std::vector<StencilRead>> reads;  // one list per sub-step

    static StencilShape heat();   // forward Euler, 5-point cross
    static StencilShape euler();  // RK2, radius-2 reconstruction
    static StencilShape generic(int halo, int substeps);

    const std::vector<StencilRead>& reads_for_level(long abs_level) const;
    void validate() const;
};

/// Square block of edge b with stencil halo n; k levels fit in a pyramid
/// before communication is needed.
struct BlockGeometry {
    int b = 0;
    int n = 0;
    int k = 0;

    BlockGeometry(int b, int n);
};

/// k = b/(2n) - 1.  Rejects b not divisible by 2n or b < 4n.
int max_levels(int b, int n);

/// Half-open index rectangle; coordinates are interpreted modulo the periodic
/// extents by the consumers.  `level` is the absolute sub-step index.
struct Region {
    int x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    long level = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    long area() const { return static_cast<long>(width()) * height(); }
};

enum class Phase {
    UpPyramid,
    YBridge,
    Communicate,
    XBridge,
    OctahedronDown,
    OctahedronUp,
    DownPyramid,
};

const char* phase_name(Phase p);

/// Per-block region template for a swept phase at relative level l, block
/// origin (0,0).  XBridge / Octahedron templates are valid in the post-shift
/// frame.
Region phase_region(Phase phase, int b, int n, int l);

struct PhaseEntry {
    Phase phase;
    int level = 0;        // relative level within the phase
    long abs_level = 0;   // absolute sub-step index written
    Region region;        // template (not meaningful for Communicate)
    int shift_sign = 0;   // Communicate only: +1 / -1
    long frontier = -1;   // Communicate only: flat frontier at this event
};

struct PhasePlan {
    std::vector<PhaseEntry> entries;
    long octahedra = 0;   // m
    long flat_level = 0;  // final uniform completed sub-step level
    int k = 0;
    int substeps = 1;

    long completed_steps() const { return flat_level / substeps; }
    long communicate_count() const { return octahedra + 1; }
};

/// Full swept schedule for a requested number of timesteps.  The octahedron
/// count is rounded (half-up) so the achievable flat level is nearest the
/// request.
PhasePlan build_schedule(long requested_steps, const BlockGeometry& geom,
                         const StencilShape& stencil);

/// Schedule with an explicit octahedron count (m >= 0).
PhasePlan build_schedule_cycles(long octahedra, const BlockGeometry& geom,
                                const StencilShape& stencil);

/// Block-column assignment between the two worker pools.
struct WorkAllocation {
    long total = 0;   // W
    long pool_a = 0;  // G
    long pool_b = 0;  // C
    int columns_a = 0;
    std::vector<int> column_pool;  // 0 = pool A, 1 = pool B, x-major

    int pool_of_column(int col) const { return column_pool[col]; }
};

/// Splits whole block-columns between pools; ties round toward pool B.
WorkAllocation allocate_blocks(int blocks_x, int blocks_y, double share);

}  // namespace sweptgrid

#endif
