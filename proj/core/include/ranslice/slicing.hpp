#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ranslice/channel.hpp"
#include "ranslice/scenario.hpp"
#include "ranslice/traffic.hpp"

namespace ranslice {

// RB index ranges of each RBG.
class RbgLayout {
public:
    explicit RbgLayout(const std::vector<int>& sizes);
    int size() const noexcept { return static_cast<int>(first_.size()); }
    int first_rb(int rbg) const { return first_[rbg]; }
    int rb_count(int rbg) const { return count_[rbg]; }
    int n_rbs() const noexcept { return n_rbs_; }

private:
    std::vector<int> first_;
    std::vector<int> count_;
    int n_rbs_ = 0;
};

// RBGs granted to each slice: eMBB takes the low ids, URLLC the rest.
std::array<std::vector<int>, kNumSlices> split_rbgs(const AllocationAction& a);

// Exponentially averaged served rate per UE of a cell.
struct PfState {
    static constexpr double kTimeConstantTtis = 100.0;
    static constexpr double kFloorBps = 1.0;

    std::vector<double> avg_rate_bps;

    explicit PfState(int n_ue = 0) : avg_rate_bps(static_cast<std::size_t>(n_ue), kFloorBps) {}
};

// Instantaneous rate (bps) of every UE of a cell on every RBG.
struct RbgRates {
    int n_ue = 0;
    int n_rbg = 0;
    std::vector<double> bps;

    RbgRates() = default;
    RbgRates(int ues, int rbgs) : n_ue(ues), n_rbg(rbgs), bps(static_cast<std::size_t>(ues) * rbgs, 0.0) {}
    double& at(int ue, int rbg) { return bps[static_cast<std::size_t>(ue) * n_rbg + rbg]; }
    double at(int ue, int rbg) const { return bps[static_cast<std::size_t>(ue) * n_rbg + rbg]; }
};

// Fills rates for `ue` of cell `bs` from a materialized channel.
void fill_rbg_rates(RbgRates& out, int bs, int ue, const RbgLayout& layout, const ChannelState& ch,
                    const LinkBudget& b);

// Bits each UE still has to send, indexed by local UE id.
std::vector<double> pending_bits(const SliceQueue& q, int n_ue);

// Assignment of the slice's RBGs: result[i] is the UE granted rbgs[i], or
// kNoUe. Greedy in RBG order, maximizing rate/avg_rate among UEs that still
// have unserved bits after the RBGs already granted this TTI; ties go to the
// lowest UE id.
std::vector<int> pf_schedule(std::span<const int> rbgs, const SliceQueue& queue, const RbgRates& rates,
                             const PfState& pf, double tti_s);

// avg <- (1 - 1/tau) avg + (1/tau) served/tti for the listed UEs.
void pf_update(PfState& pf, std::span<const int> ues, std::span<const double> served_bits, double tti_s);

struct ServeResult {
    std::vector<Packet> delivered;   // HARQ success, ready for compute
    std::vector<Packet> harq_drops;  // retransmission budget exhausted
    std::vector<double> sent_bits;   // per local UE id, bits put on air
    std::size_t retx_scheduled = 0;
};

// Drains each scheduled UE's FIFO packets at its link capacity (the sum of
// its RBG rates) for one TTI starting at t0. Packets that finish go through
// HARQ. Throws ContractViolation if the assignment names a UE outside the
// slice.
ServeResult serve_queue(SliceQueue& queue, std::span<const int> rbgs, std::span<const int> assignment,
                        const RbgRates& rates, double t0, std::int64_t tti, Rng& harq_rng, const Scenario& s);

struct SliceMetrics {
    double served_bits = 0.0;  // bits of packets delivered over the air this TTI
    std::vector<double> completed_delays_s;
    std::uint64_t arrivals = 0;
    std::uint64_t drops = 0;
    std::uint64_t harq_drops = 0;  // subset of drops: retransmission budget exhausted
    std::uint64_t completed_mec = 0;
    std::uint64_t completed_cloud = 0;
    std::size_t queue_len = 0;

    bool operator==(const SliceMetrics&) const = default;
};

struct TtiReport {
    std::int64_t tti = 0;
    int bs = 0;
    AllocationAction action;
    std::array<SliceMetrics, kNumSlices> slices;
    double reward = 0.0;

    const SliceMetrics& slice(SliceId s) const noexcept { return slices[index_of(s)]; }
    SliceMetrics& slice(SliceId s) noexcept { return slices[index_of(s)]; }
    bool operator==(const TtiReport&) const = default;
};

// Per-TTI quantities the reward needs.
struct RewardSample {
    double embb_served_bits = 0.0;
    double urllc_delay_sum_s = 0.0;
    std::uint64_t urllc_completions = 0;
    std::uint64_t drops = 0;

    static RewardSample of(const TtiReport& r);
};

struct RewardValue {
    double reward = 0.0;
    double throughput_mbps = 0.0;
    double delay_ms = 0.0;  // window mean, or the fallback when undefined
    bool delay_defined = false;
};

//   w_embb * T + w_urllc * (d_tar - D) - penalty * drops
// T: eMBB Mbps over the window, D: mean URLLC end-to-end delay (ms) of the
// window's completions, falling back to `last_delay_ms` when there are none.
RewardValue reward(std::span<const RewardSample> window, const Scenario& s, double last_delay_ms = 0.0);
RewardValue reward(std::span<const TtiReport> window, const Scenario& s, double last_delay_ms = 0.0);

// Trailing-window reward for one cell.
class RewardTracker {
public:
    explicit RewardTracker(int window_ttis) : window_(static_cast<std::size_t>(window_ttis)) {}
    double push(const RewardSample& sample, const Scenario& s);

private:
    std::size_t window_;
    std::vector<RewardSample> ring_;
    std::size_t head_ = 0;
    double last_delay_ms_ = 0.0;
};

}  // namespace ranslice
