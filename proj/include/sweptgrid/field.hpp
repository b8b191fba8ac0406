#ifndef SWEPTGRID_FIELD_HPP
#define SWEPTGRID_FIELD_HPP

#include <cstddef>
#include <vector>

namespace sweptgrid {

/// Read-only view of one multi-variable plane, layout [var][y][x].
/// y indices wrap periodically; x indices must be in range (swept regions and
/// ghosted standard planes never read out of range in x).
struct GridView {
    const double* d = nullptr;
    int nvars = 0;
    int nx = 0;
    int ny = 0;

    int wy(int y) const {
        y %= ny;
        return y < 0 ? y + ny : y;
    }
    double at(int v, int x, int y) const {
        return d[(static_cast<std::size_t>(v) * ny + wy(y)) * nx + x];
    }
};

struct GridSpan {
    double* d = nullptr;
    int nvars = 0;
    int nx = 0;
    int ny = 0;

    int wy(int y) const {
        y %= ny;
        return y < 0 ? y + ny : y;
    }
    double& at(int v, int x, int y) {
        return d[(static_cast<std::size_t>(v) * ny + wy(y)) * nx + x];
    }
    GridView view() const { return {d, nvars, nx, ny}; }
};

/// A full grid plane of one or more variables at a single sub-step level.
struct FieldState {
    int nvars = 0;
    int nx = 0;
    int ny = 0;
    long level = 0;
    std::vector<double> data;  // [var][y][x]

    FieldState() = default;
    FieldState(int nvars_, int nx_, int ny_, long level_ = 0)
        : nvars(nvars_), nx(nx_), ny(ny_), level(level_),
          data(static_cast<std::size_t>(nvars_) * nx_ * ny_, 0.0) {}

    double& at(int v, int x, int y) {
        return data[(static_cast<std::size_t>(v) * ny + y) * nx + x];
    }
    double at(int v, int x, int y) const {
        return data[(static_cast<std::size_t>(v) * ny + y) * nx + x];
    }
    GridView view() const { return {data.data(), nvars, nx, ny}; }
    GridSpan span() { return {data.data(), nvars, nx, ny}; }
};

/// Ring of 2k + substeps planes indexed by sub-step level.
class TimeSlab {
  public:
    TimeSlab() = default;
    TimeSlab(int capacity, int nvars, int nx, int ny)
        : capacity_(capacity), nvars_(nvars), nx_(nx), ny_(ny),
          planes_(capacity, std::vector<double>(
                                static_cast<std::size_t>(nvars) * nx * ny, 0.0)),
          levels_(capacity, -1) {}

    int capacity() const { return capacity_; }
    int slot_of(long level) const { return static_cast<int>(level % capacity_); }
    long level_in_slot(int slot) const { return levels_[slot]; }

    /// Plane holding `level`; the caller asserts the tag where it matters.
    std::vector<double>& plane(long level) { return planes_[slot_of(level)]; }
    const std::vector<double>& plane(long level) const { return planes_[slot_of(level)]; }

    GridView view(long level) const {
        return {planes_[slot_of(level)].data(), nvars_, nx_, ny_};
    }
    GridSpan span(long level) {
        return {planes_[slot_of(level)].data(), nvars_, nx_, ny_};
    }

    /// Claim the ring slot for a new level (recycling whatever it held).
    void retag(long level) { levels_[slot_of(level)] = level; }
    bool holds(long level) const { return levels_[slot_of(level)] == level; }

    std::vector<std::vector<double>>& planes() { return planes_; }

  private:
    int capacity_ = 0;
    int nvars_ = 0, nx_ = 0, ny_ = 0;
    std::vector<std::vector<double>> planes_;
    std::vector<long> levels_;
};

}  // namespace sweptgrid

#endif
