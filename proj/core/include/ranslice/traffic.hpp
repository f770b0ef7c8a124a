#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <vector>

#include "ranslice/rng.hpp"
#include "ranslice/scenario.hpp"

namespace ranslice {

enum class Location { RadioQueue, AwaitingRetx, ComputeQueue, Cloud, Done, Dropped };

// One task-bearing packet. Timestamps partition the end-to-end delay:
//   d_que  = service_start - arrival
//   d_tx   = first_tx_end  - service_start
//   d_rtx  = tx_done       - first_tx_end
//   d_comp = compute_done  - compute_enqueue   (edge if alpha == 1, cloud otherwise)
// compute_enqueue == tx_done, so the terms telescope to compute_done - arrival.
struct Packet {
    std::uint64_t id = 0;
    SliceId slice = SliceId::Embb;
    int ue = 0;  // local UE id within the cell
    double size_bits = 0.0;
    double residual_bits = 0.0;
    double arrival_s = 0.0;
    std::optional<double> service_start_s;
    std::optional<double> first_tx_end_s;
    std::optional<double> tx_done_s;
    std::optional<double> compute_enqueue_s;
    std::optional<double> offload_s;
    std::optional<double> compute_done_s;
    int retx_count = 0;
    std::int64_t retx_ready_tti = 0;
    int alpha = 1;  // 1: MEC, 0: cloud
    Location location = Location::RadioQueue;

    double queue_delay_s() const { return service_start_s.value() - arrival_s; }
    double tx_delay_s() const { return first_tx_end_s.value() - service_start_s.value(); }
    double retx_delay_s() const { return tx_done_s.value() - first_tx_end_s.value(); }
    double compute_delay_s() const { return compute_done_s.value() - compute_enqueue_s.value(); }
    double end_to_end_s() const { return compute_done_s.value() - arrival_s; }
};

// Per-slice radio buffer of one cell. `fifo` holds packets waiting for
// radio resources (RadioQueue); `retx` holds packets waiting out a HARQ
// round trip and is not part of the queue length.
struct SliceQueue {
    SliceId slice = SliceId::Embb;
    std::deque<Packet> fifo;
    std::vector<Packet> retx;
    std::uint64_t dropped_deadline = 0;
    std::uint64_t dropped_harq = 0;
    double bits_arrived = 0.0;
    double bits_delivered = 0.0;

    std::size_t length() const noexcept { return fifo.size(); }

    // Moves retransmissions whose round trip has elapsed to the head of
    // the FIFO, oldest first.
    void release_retx(std::int64_t tti);
};

// Per-UE Poisson arrival rate (packets/s) of a slice: per-cell load split
// evenly across the slice's UEs.
double per_ue_rate_pps(const Scenario& s, SliceId slice);

// Poisson packet source for one cell, both slices. Holds its own traffic
// substream so the arrival trace is independent of every other draw.
class TrafficSource {
public:
    TrafficSource(const Scenario& s, Rng rng);

    // Arrivals of one slice at the start of `tti`, ordered by UE id.
    std::vector<Packet> generate(SliceId slice, std::int64_t tti);

private:
    double tti_s_;
    std::array<double, kNumSlices> bits_{};
    std::array<int, kNumSlices> n_ue_{};
    std::array<int, kNumSlices> first_ue_{};
    std::array<bool, kNumSlices> active_{};
    std::array<std::poisson_distribution<int>, kNumSlices> dist_;
    Rng rng_;
    std::uint64_t next_id_ = 0;
};

// One-shot form: draws every UE's arrivals of `slice` for one TTI from rng.
std::vector<Packet> generate_arrivals(const Scenario& s, SliceId slice, Rng& rng, std::int64_t tti);

enum class HarqOutcome { Delivered, ScheduleRetx, DropAfterRetx };

// Resolves a finished transmission attempt ending at now_s. Draws exactly
// one uniform from rng. Throws ContractViolation unless the packet is in the
// radio queue with no residual bits.
HarqOutcome harq_resolve(Packet& p, Rng& rng, double now_s, std::int64_t tti, const Scenario& s);

// Drops queued packets that have waited strictly longer than the slice
// deadline. Returns how many were dropped.
std::size_t expire_drops(SliceQueue& q, double now_s, const Scenario& s);

}  // namespace ranslice
