#include "sweptgrid/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace sweptgrid {

StencilShape StencilShape::heat() {
    StencilShape s;
    s.halo = 1;
    s.substeps = 1;
    s.reads = {{{-1, 1}}};
    return s;
}

StencilShape StencilShape::euler() {
    StencilShape s;
    s.halo = 2;
    s.substeps = 2;
    // predictor reads the previous level at radius 2; the corrector
    // additionally re-reads the base level at the point itself.
    s.reads = {{{-1, 2}}, {{-1, 2}, {-2, 0}}};
    return s;
}

StencilShape StencilShape::generic(int halo, int substeps) {
    StencilShape s;
    s.halo = halo;
    s.substeps = substeps;
    s.reads.resize(substeps);
    s.reads[0] = {{-1, halo}};
    for (int i = 1; i < substeps; ++i)
        s.reads[i] = {{-1, halo}, {-1 - i, 0}};
    return s;
}

const std::vector<StencilRead>& StencilShape::reads_for_level(long abs_level) const {
    int stage = static_cast<int>((abs_level - 1) % substeps);
    return reads[stage];
}

void StencilShape::validate() const {
    if (halo < 1 || substeps < 1)
        throw std::invalid_argument("StencilShape: halo and substeps must be >= 1");
    if (static_cast<int>(reads.size()) != substeps)
        throw std::invalid_argument("StencilShape: one read list per sub-step required");
    for (const auto& lst : reads) {
        bool has_primary = false;
        for (const auto& r : lst) {
            if (r.radius > halo || r.level_offset < -substeps)
                throw std::invalid_argument("StencilShape: read outside declared footprint");
            if (r.level_offset == -1 && r.radius == halo) has_primary = true;
        }
        if (!has_primary)
            throw std::invalid_argument("StencilShape: every sub-step must read level -1 at the halo radius");
    }
}

int max_levels(int b, int n) {
    if (n < 1) throw std::invalid_argument("max_levels: halo must be >= 1");
    if (b % (2 * n) != 0)
        throw std::invalid_argument("max_levels: block size must be divisible by 2n");
    if (b < 4 * n)
        throw std::invalid_argument("max_levels: block size must be at least 4n");
    return b / (2 * n) - 1;
}

BlockGeometry::BlockGeometry(int b_, int n_) : b(b_), n(n_), k(max_levels(b_, n_)) {}

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::UpPyramid: return "UpPyramid";
        case Phase::YBridge: return "YBridge";
        case Phase::Communicate: return "Communicate";
        case Phase::XBridge: return "XBridge";
        case Phase::OctahedronDown: return "OctahedronDown";
        case Phase::OctahedronUp: return "OctahedronUp";
        case Phase::DownPyramid: return "DownPyramid";
    }
    return "?";
}

Region phase_region(Phase phase, int b, int n, int l) {
    const int k = max_levels(b, n);
    auto check = [&](int lo, int hi) {
        if (l < lo || l > hi)
            throw std::invalid_argument(std::string(phase_name(phase)) +
                                        ": level " + std::to_string(l) + " out of range [" +
                                        std::to_string(lo) + "," + std::to_string(hi) + "]");
    };
    Region r;
    switch (phase) {
        case Phase::UpPyramid:
            check(1, k);
            r = {n * l, b - n * l, n * l, b - n * l};
            break;
        case Phase::YBridge:
            check(1, k);
            r = {n * l, b - n * l, b - n * l, b + n * l};
            break;
        case Phase::XBridge:
            check(1, k);
            r = {b / 2 - n * l, b / 2 + n * l, b / 2 + n * l, 3 * b / 2 - n * l};
            break;
        case Phase::OctahedronDown:
        case Phase::DownPyramid:
            check(1, k);
            r = {b / 2 - n * l, b / 2 + n * l, b / 2 - n * l, b / 2 + n * l};
            break;
        case Phase::OctahedronUp: {
            check(k + 1, 2 * k);
            int w = b - 2 * n * (l - k);
            r = {b / 2 - w / 2, b / 2 + w / 2, b / 2 - w / 2, b / 2 + w / 2};
            break;
        }
        case Phase::Communicate:
            throw std::invalid_argument("phase_region: Communicate has no region");
    }
    return r;
}

PhasePlan build_schedule_cycles(long m, const BlockGeometry& geom,
                                const StencilShape& stencil) {
    if (m < 0) throw std::invalid_argument("build_schedule_cycles: m must be >= 0");
    stencil.validate();
    const int b = geom.b, n = geom.n, k = geom.k;

    PhasePlan plan;
    plan.octahedra = m;
    plan.k = k;
    plan.substeps = stencil.substeps;
    plan.flat_level = static_cast<long>(k) * (m + 1);

    auto emit = [&](Phase p, int l, long abs) {
        PhaseEntry e;
        e.phase = p;
        e.level = l;
        e.abs_level = abs;
        e.region = phase_region(p, b, n, l);
        e.region.level = abs;
        plan.entries.push_back(e);
    };
    int comm_index = 0;
    auto communicate = [&](long frontier) {
        PhaseEntry e;
        e.phase = Phase::Communicate;
        e.shift_sign = (comm_index % 2 == 0) ? +1 : -1;
        e.frontier = frontier;
        ++comm_index;
        plan.entries.push_back(e);
    };

    for (int l = 1; l <= k; ++l) emit(Phase::UpPyramid, l, l);
    for (int l = 1; l <= k; ++l) emit(Phase::YBridge, l, l);
    communicate(0);
    for (int l = 1; l <= k; ++l) emit(Phase::XBridge, l, l);
    for (long j = 1; j <= m; ++j) {
        const long base = (j - 1) * k;
        for (int l = 1; l <= k; ++l) emit(Phase::OctahedronDown, l, base + l);
        for (int l = k + 1; l <= 2 * k; ++l) emit(Phase::OctahedronUp, l, base + l);
        for (int l = 1; l <= k; ++l) emit(Phase::YBridge, l, j * k + l);
        communicate(j * k);
        for (int l = 1; l <= k; ++l) emit(Phase::XBridge, l, j * k + l);
    }
    for (int l = 1; l <= k; ++l) emit(Phase::DownPyramid, l, m * k + l);
    return plan;
}

PhasePlan build_schedule(long requested_steps, const BlockGeometry& geom,
                         const StencilShape& stencil) {
    if (requested_steps < 1)
        throw std::invalid_argument("build_schedule: requested steps must be >= 1");
    stencil.validate();
    const long levels = requested_steps * stencil.substeps;
    const int k = geom.k;
    // Each octahedron cycle advances the flat frontier by k levels; pick the
    // cycle count whose flat level is nearest the request (half-up).
    long m = static_cast<long>(std::floor(static_cast<double>(levels - k) / k + 0.5));
    if (m < 0) m = 0;
    PhasePlan plan = build_schedule_cycles(m, geom, stencil);
    if (plan.completed_steps() < 1)
        throw std::invalid_argument("build_schedule: nearest achievable step count is 0");
    return plan;
}

WorkAllocation allocate_blocks(int blocks_x, int blocks_y, double share) {
    if (blocks_x < 1 || blocks_y < 1)
        throw std::invalid_argument("allocate_blocks: block counts must be >= 1");
    if (share < 0.0 || share > 1.0)
        throw std::invalid_argument("allocate_blocks: share must be in [0,1]");
    // Whole block-columns, x-major; half-column ties go to pool B.
    int ca = static_cast<int>(std::ceil(share * blocks_x - 0.5));
    if (ca < 0) ca = 0;
    if (ca > blocks_x) ca = blocks_x;

    WorkAllocation w;
    w.total = static_cast<long>(blocks_x) * blocks_y;
    w.columns_a = ca;
    w.pool_a = static_cast<long>(ca) * blocks_y;
    w.pool_b = w.total - w.pool_a;
    w.column_pool.resize(blocks_x);
    for (int c = 0; c < blocks_x; ++c) w.column_pool[c] = (c < ca) ? 0 : 1;
    return w;
}

}  // namespace sweptgrid
