#include "sweptgrid/transport.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

namespace sweptgrid {

namespace {

using Clock = std::chrono::steady_clock;

/// Wall-clock transport: per-rank mailboxes, real blocking receives, and the
/// link model applied as an injected delivery delay.
class WallTransport final : public Transport {
  public:
    WallTransport(int ranks, const LinkModel& link)
        : Transport(ranks), link_(link), boxes_(ranks) {
        link_.validate();
        ledger_.ranks.resize(ranks);
    }

    std::vector<Envelope> exchange(int rank, std::vector<Envelope> sends,
                                   int expected_recvs, long tag) override {
        std::vector<Envelope> result;
        for (auto& e : sends) {
            e.src = rank;
            e.tag = tag;
            if (e.dst == rank) {  // local rotation, zero cost
                result.push_back(std::move(e));
                continue;
            }
            if (e.dst < 0 || e.dst >= rank_count_)
                throw TransportError("exchange: destination rank does not exist");
            const double cost = link_.cost(e.bytes());
            {
                std::lock_guard<std::mutex> lk(mutex_);
                auto& lr = ledger_.ranks[rank];
                lr.messages += 1;
                lr.bytes_sent += static_cast<long long>(e.bytes());
                lr.comm_seconds += cost;
                boxes_[e.dst].push_back(
                    {Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                        std::chrono::duration<double>(cost)),
                     std::move(e)});
            }
            cv_.notify_all();
        }
        int need = expected_recvs - static_cast<int>(result.size());
        while (need > 0) {
            Timed msg;
            {
                std::unique_lock<std::mutex> lk(mutex_);
                auto matching = [&] {
                    auto& box = boxes_[rank];
                    return std::find_if(box.begin(), box.end(), [&](const Timed& t) {
                        return t.env.tag == tag;
                    });
                };
                if (!cv_.wait_for(lk, std::chrono::seconds(60), [&] {
                        return aborted_ || matching() != boxes_[rank].end();
                    }))
                    throw TransportError("exchange: receive timed out (unmatched message)");
                if (aborted_) throw TransportError("exchange: aborted by a peer failure");
                auto it = matching();
                msg = std::move(*it);
                boxes_[rank].erase(it);
            }
            std::this_thread::sleep_until(msg.ready);
            result.push_back(std::move(msg.env));
            --need;
        }
        return result;
    }

    void add_compute(int rank, double seconds) override {
        std::lock_guard<std::mutex> lk(mutex_);
        ledger_.ranks[rank].compute_seconds += seconds;
        ledger_.ranks[rank].clock += seconds;
    }

    const CostLedger& ledger() const override { return ledger_; }

    void abort() override {
        std::lock_guard<std::mutex> lk(mutex_);
        aborted_ = true;
        cv_.notify_all();
    }

  private:
    struct Timed {
        Clock::time_point ready;
        Envelope env;
    };

    LinkModel link_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::vector<std::deque<Timed>> boxes_;
    CostLedger ledger_;
    bool aborted_ = false;
};

/// Deterministic discrete-event transport: ranks synchronize at every
/// exchange, align to the max clock, and pay the largest of their per-message
/// costs.  Works from concurrent rank threads; the accounting is independent
/// of scheduling order.
class VirtualTransport final : public Transport {
  public:
    VirtualTransport(int ranks, const LinkModel& link)
        : Transport(ranks), link_(link), inbox_(ranks), round_cost_(ranks, 0.0) {
        link_.validate();
        ledger_.ranks.resize(ranks);
    }

    std::vector<Envelope> exchange(int rank, std::vector<Envelope> sends,
                                   int expected_recvs, long tag) override {
        std::unique_lock<std::mutex> lk(mutex_);
        std::vector<Envelope> result;
        double cost = 0.0;
        for (auto& e : sends) {
            e.src = rank;
            e.tag = tag;
            if (e.dst == rank) {
                result.push_back(std::move(e));
                continue;
            }
            if (e.dst < 0 || e.dst >= rank_count_)
                throw TransportError("exchange: destination rank does not exist");
            cost = std::max(cost, link_.cost(e.bytes()));
            auto& lr = ledger_.ranks[rank];
            lr.messages += 1;
            lr.bytes_sent += static_cast<long long>(e.bytes());
            lr.comm_seconds += link_.cost(e.bytes());
            inbox_[e.dst].push_back(std::move(e));
        }
        round_cost_[rank] = cost;

        if (aborted_) throw TransportError("exchange: aborted by a peer failure");
        const long my_round = round_;
        if (++arrived_ == rank_count_) {
            // Round complete: bulk-synchronous clock alignment.
            double sync = 0.0;
            for (const auto& r : ledger_.ranks) sync = std::max(sync, r.clock);
            for (int r = 0; r < rank_count_; ++r) {
                double recv_cost = 0.0;
                for (const auto& e : inbox_[r])
                    recv_cost = std::max(recv_cost, link_.cost(e.bytes()));
                ledger_.ranks[r].clock =
                    sync + std::max(round_cost_[r], recv_cost);
                round_cost_[r] = 0.0;
            }
            arrived_ = 0;
            ++round_;
            cv_.notify_all();
        } else {
            cv_.wait(lk, [&] { return aborted_ || round_ != my_round; });
            if (aborted_) throw TransportError("exchange: aborted by a peer failure");
        }

        // Collect messages addressed to this rank, per-sender order preserved.
        auto& box = inbox_[rank];
        int need = expected_recvs - static_cast<int>(result.size());
        if (static_cast<int>(box.size()) < need)
            throw TransportError("exchange: fewer messages delivered than expected");
        for (int i = 0; i < need; ++i) {
            result.push_back(std::move(box.front()));
            box.pop_front();
        }
        return result;
    }

    void add_compute(int rank, double seconds) override {
        std::lock_guard<std::mutex> lk(mutex_);
        ledger_.ranks[rank].compute_seconds += seconds;
        ledger_.ranks[rank].clock += seconds;
    }

    const CostLedger& ledger() const override { return ledger_; }

    void abort() override {
        std::lock_guard<std::mutex> lk(mutex_);
        aborted_ = true;
        cv_.notify_all();
    }

  private:
    LinkModel link_;
    std::mutex mutex_;
    std::condition_variable cv_;
    std::vector<std::deque<Envelope>> inbox_;
    std::vector<double> round_cost_;
    int arrived_ = 0;
    long round_ = 0;
    bool aborted_ = false;
    CostLedger ledger_;
};

}  // namespace

std::unique_ptr<Transport> Transport::make(TransportMode mode, int ranks,
                                           const LinkModel& link) {
    if (mode == TransportMode::Wall)
        return std::make_unique<WallTransport>(ranks, link);
    return std::make_unique<VirtualTransport>(ranks, link);
}

double predict_speedup(long total_levels, long octahedra, double per_level_compute,
                       double halo_exchange_cost, double shift_cost) {
    const double m = static_cast<double>(total_levels);
    const double standard = m * (per_level_compute + halo_exchange_cost);
    const double swept =
        m * per_level_compute + static_cast<double>(octahedra + 1) * shift_cost;
    return standard / swept;
}

}  // namespace sweptgrid
