#ifndef SWEPTGRID_TRANSPORT_HPP
#define SWEPTGRID_TRANSPORT_HPP

#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

namespace sweptgrid {

struct Envelope {
    int src = 0;
    int dst = 0;
    long tag = 0;
    std::vector<double> payload;

    std::size_t bytes() const { return payload.size() * sizeof(double); }
};

/// Uniform link: fixed per-message latency plus a bandwidth-proportional cost.
struct LinkModel {
    double latency = 0.0;                                      // seconds/message
    double bandwidth = std::numeric_limits<double>::infinity();  // bytes/second

    double cost(std::size_t bytes) const {
        return latency + static_cast<double>(bytes) / bandwidth;
    }
    void validate() const {
        if (latency < 0.0 || !(bandwidth > 0.0))
            throw std::invalid_argument("LinkModel: latency >= 0 and bandwidth > 0 required");
    }
};

struct CostLedger {
    struct PerRank {
        long messages = 0;
        long long bytes_sent = 0;
        double comm_seconds = 0.0;     // modeled
        double compute_seconds = 0.0;  // modeled
        double clock = 0.0;            // virtual rank clock
    };
    std::vector<PerRank> ranks;

    long total_messages() const {
        long n = 0;
        for (const auto& r : ranks) n += r.messages;
        return n;
    }
    long long total_bytes() const {
        long long n = 0;
        for (const auto& r : ranks) n += r.bytes_sent;
        return n;
    }
    double max_clock() const {
        double t = 0.0;
        for (const auto& r : ranks) t = std::max(t, r.clock);
        return t;
    }
};

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TransportMode { Wall, Virtual };

/// Bulk-synchronous message substrate for in-process ranks.  Every rank calls
/// exchange() once per communication round; self-sends short-circuit with zero
/// cost and no ledger entry.
class Transport {
  public:
    virtual ~Transport() = default;

    /// Deliver `sends` and return exactly `expected_recvs` messages addressed
    /// to `rank` carrying `tag`, in per-sender order.  Tags identify the
    /// communication round so a fast neighbor cannot race ahead of a slow one.
    virtual std::vector<Envelope> exchange(int rank, std::vector<Envelope> sends,
                                           int expected_recvs, long tag) = 0;

    /// Charge modeled compute time to a rank's clock.
    virtual void add_compute(int rank, double seconds) = 0;

    /// Wake every blocked rank with a TransportError; used when a peer dies
    /// mid-run so the survivors do not wait out the full timeout.
    virtual void abort() = 0;

    virtual const CostLedger& ledger() const = 0;
    int rank_count() const { return rank_count_; }

    static std::unique_ptr<Transport> make(TransportMode mode, int ranks,
                                           const LinkModel& link);

  protected:
    explicit Transport(int ranks) : rank_count_(ranks) {}
    int rank_count_;
};

/// Closed-form speedup prediction for the virtual cost model:
///   S = M (tau + lambda) / (M tau + (m+1) lambda')
/// with M total sub-step levels, tau per-level compute seconds, lambda the
/// per-sub-step halo exchange cost and lambda' the per-shift cost.
double predict_speedup(long total_levels, long octahedra, double per_level_compute,
                       double halo_exchange_cost, double shift_cost);

}  // namespace sweptgrid

#endif
