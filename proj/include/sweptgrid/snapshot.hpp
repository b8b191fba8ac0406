#ifndef SWEPTGRID_SNAPSHOT_HPP
#define SWEPTGRID_SNAPSHOT_HPP

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "sweptgrid/field.hpp"

#include <json.hpp>

namespace sweptgrid {

/// Snapshot file: magic "SWPT2D\0\0", u32 version, u64 header length, JSON
/// header, then frames of (u64 level, nvars*ny*nx float64 LE, [var][y][x]).
struct SnapshotMeta {
    std::string problem;
    int nx = 0, ny = 0, nvars = 0, b = 0;
    double dt = 0.0, dx = 0.0, dy = 0.0;
    nlohmann::json params;  // scheme-specific extras

    nlohmann::json to_json() const;
    static SnapshotMeta from_json(const nlohmann::json& j);
};

class SnapshotWriter {
  public:
    SnapshotWriter(const std::string& path, const SnapshotMeta& meta);
    void append_frame(long level, const std::vector<double>& data);
    long frames_written() const { return frames_; }
    void flush();

  private:
    std::ofstream out_;
    SnapshotMeta meta_;
    long frames_ = 0;
    long last_level_ = -1;
};

struct SnapshotFrame {
    long level = 0;
    std::vector<double> data;
};

class SnapshotReader {
  public:
    explicit SnapshotReader(const std::string& path);
    const SnapshotMeta& meta() const { return meta_; }
    const std::vector<SnapshotFrame>& frames() const { return frames_; }

  private:
    SnapshotMeta meta_;
    std::vector<SnapshotFrame> frames_;
};

/// Assembles physical-layout frames from per-rank strips.  Ranks hand in
/// their columns in array coordinates together with the cumulative shift; the
/// collector un-rotates, buffers until every rank contributed, and emits
/// frames in level order.
class FrameCollector {
  public:
    using FrameFn = std::function<void(long level, const std::vector<double>&)>;

    FrameCollector(int ranks, int nvars, int nx, int ny, FrameFn on_frame);

    /// `strip` is [var][y][x_local] for columns [col0, col0 + w) of the rank's
    /// array; array position (x, y) holds physical point (x - sx, y - sy).
    void contribute(long level, int rank, int col0, int w, int sx, int sy,
                    const double* strip);

  private:
    struct Pending {
        std::vector<double> data;
        int remaining;
    };

    std::mutex mutex_;
    int ranks_, nvars_, nx_, ny_;
    FrameFn on_frame_;
    std::map<long, Pending> pending_;
    long emitted_ = -1;
};

}  // namespace sweptgrid

#endif
