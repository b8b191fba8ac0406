#include "sweptgrid/snapshot.hpp"

#include <cstring>
#include <stdexcept>
#include <type_traits>

namespace sweptgrid {

namespace {

constexpr char kMagic[8] = {'S', 'W', 'P', 'T', '2', 'D', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_le(std::ofstream& out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_le(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

}  // namespace

nlohmann::json SnapshotMeta::to_json() const {
    nlohmann::json j;
    j["problem"] = problem;
    j["nx"] = nx;
    j["ny"] = ny;
    j["nvars"] = nvars;
    j["block"] = b;
    j["dt"] = dt;
    j["dx"] = dx;
    j["dy"] = dy;
    j["params"] = params.is_null() ? nlohmann::json::object() : params;
    return j;
}

SnapshotMeta SnapshotMeta::from_json(const nlohmann::json& j) {
    SnapshotMeta m;
    m.problem = j.at("problem").get<std::string>();
    m.nx = j.at("nx").get<int>();
    m.ny = j.at("ny").get<int>();
    m.nvars = j.at("nvars").get<int>();
    m.b = j.at("block").get<int>();
    m.dt = j.at("dt").get<double>();
    m.dx = j.at("dx").get<double>();
    m.dy = j.at("dy").get<double>();
    m.params = j.value("params", nlohmann::json::object());
    return m;
}

SnapshotWriter::SnapshotWriter(const std::string& path, const SnapshotMeta& meta)
    : out_(path, std::ios::binary | std::ios::trunc), meta_(meta) {
    if (!out_) throw std::runtime_error("snapshot: cannot open " + path);
    out_.write(kMagic, sizeof(kMagic));
    write_le(out_, kVersion);
    const std::string header = meta_.to_json().dump();
    write_le(out_, static_cast<std::uint64_t>(header.size()));
    out_.write(header.data(), static_cast<std::streamsize>(header.size()));
}

void SnapshotWriter::append_frame(long level, const std::vector<double>& data) {
    const std::size_t expect =
        static_cast<std::size_t>(meta_.nvars) * meta_.nx * meta_.ny;
    if (data.size() != expect)
        throw std::runtime_error("snapshot: frame size mismatch");
    if (level <= last_level_)
        throw std::runtime_error("snapshot: frames must be appended in level order");
    last_level_ = level;
    write_le(out_, static_cast<std::uint64_t>(level));
    out_.write(reinterpret_cast<const char*>(data.data()),
               static_cast<std::streamsize>(data.size() * sizeof(double)));
    ++frames_;
}

void SnapshotWriter::flush() {
    out_.flush();
    if (!out_) throw std::runtime_error("snapshot: write failed");
}

SnapshotReader::SnapshotReader(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw std::runtime_error("snapshot: bad magic");
    const auto version = read_le<std::uint32_t>(in);
    if (version != kVersion)
        throw std::runtime_error("snapshot: unsupported version");
    const auto hlen = read_le<std::uint64_t>(in);
    std::string header(hlen, '\0');
    in.read(header.data(), static_cast<std::streamsize>(hlen));
    if (!in) throw std::runtime_error("snapshot: truncated header");
    meta_ = SnapshotMeta::from_json(nlohmann::json::parse(header));

    const std::size_t plane =
        static_cast<std::size_t>(meta_.nvars) * meta_.nx * meta_.ny;
    while (true) {
        const auto level = read_le<std::uint64_t>(in);
        if (in.eof()) break;
        SnapshotFrame f;
        f.level = static_cast<long>(level);
        f.data.resize(plane);
        in.read(reinterpret_cast<char*>(f.data.data()),
                static_cast<std::streamsize>(plane * sizeof(double)));
        if (!in) throw std::runtime_error("snapshot: truncated frame");
        frames_.push_back(std::move(f));
    }
}

FrameCollector::FrameCollector(int ranks, int nvars, int nx, int ny,
                               FrameFn on_frame)
    : ranks_(ranks), nvars_(nvars), nx_(nx), ny_(ny),
      on_frame_(std::move(on_frame)) {}

void FrameCollector::contribute(long level, int rank, int col0, int w, int sx,
                                int sy, const double* strip) {
    std::lock_guard<std::mutex> lk(mutex_);
    (void)rank;
    auto [it, inserted] = pending_.try_emplace(level);
    auto& p = it->second;
    if (inserted) {
        p.data.assign(static_cast<std::size_t>(nvars_) * nx_ * ny_, 0.0);
        p.remaining = ranks_;
    }
    for (int v = 0; v < nvars_; ++v)
        for (int y = 0; y < ny_; ++y) {
            // array (x, y) holds physical (x - sx, y - sy), modulo the grid
            const int py = ((y - sy) % ny_ + ny_) % ny_;
            double* row = &p.data[(static_cast<std::size_t>(v) * ny_ + py) * nx_];
            const double* src =
                &strip[(static_cast<std::size_t>(v) * ny_ + y) * w];
            for (int x = 0; x < w; ++x) {
                const int px = ((col0 + x - sx) % nx_ + nx_) % nx_;
                row[px] = src[x];
            }
        }
    if (--p.remaining == 0) {
        // emit everything contiguous in level order
        while (!pending_.empty() && pending_.begin()->second.remaining == 0) {
            auto front = pending_.begin();
            on_frame_(front->first, front->second.data);
            emitted_ = front->first;
            pending_.erase(front);
        }
    }
}

}  // namespace sweptgrid
