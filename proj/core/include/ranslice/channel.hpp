#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ranslice/rng.hpp"
#include "ranslice/scenario.hpp"

namespace ranslice {

inline constexpr int kNoUe = -1;

double db_to_linear(double db) noexcept;
double linear_to_db(double lin) noexcept;
double dbm_to_watt(double dbm) noexcept;

// 128.1 + 37.6 log10(d_km); distances below 10 m are clamped to 10 m.
// Throws DomainError for d <= 0.
double pathloss_db(double distance_m);

struct LinkBudget {
    double tx_power_per_rb_w = 0.0;
    double noise_w_per_rb = 0.0;
    double antenna_gain_db = 0.0;
    double rb_bandwidth_hz = 0.0;

    static LinkBudget from(const Scenario& s);
};

struct Position {
    double x = 0.0;
    double y = 0.0;
};
double distance(Position a, Position b) noexcept;

// Cells on a line at the inter-site distance; UEs uniform in a disk around
// their serving cell. Local UE ids: eMBB first, then URLLC.
struct Topology {
    std::vector<Position> bs;
    std::vector<std::vector<Position>> ue;  // [bs][local ue]

    static Topology place(const Scenario& s, Rng& rng);
};

// Snapshot of who used which RB in each cell, kNoUe for idle RBs.
using RbUsage = std::vector<std::vector<int>>;  // [bs][rb]

// Materialized channel of one TTI.
struct ChannelState {
    int n_bs = 0;
    int n_ue = 0;  // per cell
    int n_rb = 0;
    std::vector<double> gain_db;        // serving links, [bs][ue][rb]
    std::vector<double> cross_gain_db;  // large-scale gain [tx_bs][bs][ue]
    RbUsage rb_usage_prev;

    double serving_gain_db(int bs, int ue, int rb) const {
        return gain_db[(static_cast<std::size_t>(bs) * n_ue + ue) * n_rb + rb];
    }
    double interferer_gain_db(int tx_bs, int bs, int ue) const {
        return cross_gain_db[(static_cast<std::size_t>(tx_bs) * n_bs + bs) * n_ue + ue];
    }
};

// Large-scale state of one run (positions, per-link shadowing) plus a
// counter-keyed Rayleigh block-fading field, so any (bs, ue, rb, tti) gain
// can be evaluated on demand and always yields the same value.
class ChannelModel {
public:
    // Draws topology, shadowing and the fading key from the channel stream.
    ChannelModel(const Scenario& s, Rng& channel_stream);
    // Fully specified model. shadowing_db is indexed [tx_bs][bs][ue].
    ChannelModel(const Scenario& s, Topology topo, std::vector<double> shadowing_db, std::uint64_t fading_key);

    int n_bs() const noexcept { return n_bs_; }
    int n_ue() const noexcept { return n_ue_; }
    int n_rb() const noexcept { return n_rb_; }
    const Topology& topology() const noexcept { return topo_; }

    // -pathloss + antenna gain + shadowing, dB.
    double large_scale_db(int tx_bs, int bs, int ue) const {
        return large_scale_db_[index(tx_bs, bs, ue)];
    }
    double large_scale_linear(int tx_bs, int bs, int ue) const {
        return large_scale_lin_[index(tx_bs, bs, ue)];
    }
    double shadowing_db(int tx_bs, int bs, int ue) const { return shadowing_db_[index(tx_bs, bs, ue)]; }

    // Exponential(1) power gain of the serving link; 1 when fading is off.
    double fading_power(int bs, int ue, int rb, std::int64_t tti) const;
    double serving_gain_db(int bs, int ue, int rb, std::int64_t tti) const;

    ChannelState draw(std::int64_t tti, RbUsage rb_usage_prev) const;

private:
    std::size_t index(int tx_bs, int bs, int ue) const {
        return (static_cast<std::size_t>(tx_bs) * n_bs_ + bs) * n_ue_ + ue;
    }
    void init_gains(double antenna_gain_db);

    int n_bs_ = 0;
    int n_ue_ = 0;
    int n_rb_ = 0;
    bool fading_ = true;
    Topology topo_;
    std::vector<double> shadowing_db_;
    std::vector<double> large_scale_db_;
    std::vector<double> large_scale_lin_;
    std::uint64_t fading_key_ = 0;
};

// Draws a channel for one TTI with no interference history.
ChannelState draw_channel(const Scenario& s, Rng& channel_stream, std::int64_t tti);

// Shannon rate of a single RB (log2, bits/s).
inline double rb_rate_bps(double signal_w, double interference_w, const LinkBudget& b) noexcept {
    return b.rb_bandwidth_hz * std::log2(1.0 + signal_w / (b.noise_w_per_rb + interference_w));
}

// Sum of per-RB Shannon rates over the RBs granted to `ue` of cell `bs`.
// Interference is co-channel: other cells that used the same RB index in
// the previous TTI.
double link_capacity_bps(int bs, int ue, std::span<const int> rbs, const ChannelState& ch, const LinkBudget& b);

// L / E. Returns +infinity for zero capacity. Throws DomainError on
// negative inputs.
double tx_delay_s(double packet_bits, double capacity_bps);

}  // namespace ranslice

