#include "ranslice/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ranslice/errors.hpp"

namespace ranslice {

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) noexcept { return 10.0 * std::log10(lin); }
double dbm_to_watt(double dbm) noexcept { return db_to_linear(dbm - 30.0); }

double pathloss_db(double distance_m) {
    if (!(distance_m > 0.0)) throw DomainError("pathloss_db: distance must be positive");
    const double d = std::max(distance_m, 10.0);
    return 128.1 + 37.6 * std::log10(d / 1000.0);
}

LinkBudget LinkBudget::from(const Scenario& s) {
    LinkBudget b;
    b.rb_bandwidth_hz = s.rb_bandwidth_hz();
    b.tx_power_per_rb_w = dbm_to_watt(s.tx_power_dbm) / s.bandwidth_rbs;
    b.noise_w_per_rb = dbm_to_watt(s.noise_density_dbm_hz) * b.rb_bandwidth_hz;
    b.antenna_gain_db = s.antenna_gain_db;
    return b;
}

double distance(Position a, Position b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

Topology Topology::place(const Scenario& s, Rng& rng) {
    Topology t;
    const int n_ue = s.n_embb_ue + s.n_urllc_ue;
    for (int j = 0; j < s.n_bs; ++j) {
        const Position c{j * s.inter_site_distance_m, 0.0};
        t.bs.push_back(c);
        auto& ues = t.ue.emplace_back();
        for (int u = 0; u < n_ue; ++u) {
            const double r = s.ue_radius_m * std::sqrt(uniform01(rng));
            const double th = 2.0 * std::numbers::pi * uniform01(rng);
            ues.push_back({c.x + r * std::cos(th), c.y + r * std::sin(th)});
        }
    }
    return t;
}

ChannelModel::ChannelModel(const Scenario& s, Rng& channel_stream)
    : n_bs_(s.n_bs), n_ue_(s.n_embb_ue + s.n_urllc_ue), n_rb_(s.bandwidth_rbs), fading_(s.fast_fading) {
    topo_ = Topology::place(s, channel_stream);
    std::normal_distribution<double> shadow(0.0, s.shadowing_sigma_db);
    shadowing_db_.resize(static_cast<std::size_t>(n_bs_) * n_bs_ * n_ue_);
    for (auto& v : shadowing_db_) v = s.shadowing_sigma_db > 0 ? shadow(channel_stream) : 0.0;
    fading_key_ = channel_stream();
    init_gains(s.antenna_gain_db);
}

ChannelModel::ChannelModel(const Scenario& s, Topology topo, std::vector<double> shadowing_db,
                           std::uint64_t fading_key)
    : n_bs_(s.n_bs),
      n_ue_(s.n_embb_ue + s.n_urllc_ue),
      n_rb_(s.bandwidth_rbs),
      fading_(s.fast_fading),
      topo_(std::move(topo)),
      shadowing_db_(std::move(shadowing_db)),
      fading_key_(fading_key) {
    if (topo_.bs.size() != static_cast<std::size_t>(n_bs_) || topo_.ue.size() != topo_.bs.size())
        throw ContractViolation("ChannelModel: topology does not match scenario cell count");
    for (const auto& ues : topo_.ue)
        if (ues.size() != static_cast<std::size_t>(n_ue_))
            throw ContractViolation("ChannelModel: topology does not match scenario UE count");
    if (shadowing_db_.size() != static_cast<std::size_t>(n_bs_) * n_bs_ * n_ue_)
        throw ContractViolation("ChannelModel: shadowing table has the wrong size");
    init_gains(s.antenna_gain_db);
}

void ChannelModel::init_gains(double antenna_gain_db) {
    large_scale_db_.resize(shadowing_db_.size());
    large_scale_lin_.resize(shadowing_db_.size());
    for (int tx = 0; tx < n_bs_; ++tx)
        for (int j = 0; j < n_bs_; ++j)
            for (int u = 0; u < n_ue_; ++u) {
                const auto i = index(tx, j, u);
                const double pl = pathloss_db(distance(topo_.bs[tx], topo_.ue[j][u]));
                large_scale_db_[i] = -pl + antenna_gain_db + shadowing_db_[i];
                large_scale_lin_[i] = db_to_linear(large_scale_db_[i]);
            }
}

double ChannelModel::fading_power(int bs, int ue, int rb, std::int64_t tti) const {
    if (!fading_) return 1.0;
    return -std::log(counter_uniform(fading_key_, static_cast<std::uint64_t>(bs), static_cast<std::uint64_t>(ue),
                                     static_cast<std::uint64_t>(rb), static_cast<std::uint64_t>(tti)));
}

double ChannelModel::serving_gain_db(int bs, int ue, int rb, std::int64_t tti) const {
    return large_scale_db(bs, bs, ue) + linear_to_db(fading_power(bs, ue, rb, tti));
}

ChannelState ChannelModel::draw(std::int64_t tti, RbUsage rb_usage_prev) const {
    ChannelState st;
    st.n_bs = n_bs_;
    st.n_ue = n_ue_;
    st.n_rb = n_rb_;
    st.gain_db.resize(static_cast<std::size_t>(n_bs_) * n_ue_ * n_rb_);
    for (int j = 0; j < n_bs_; ++j)
        for (int u = 0; u < n_ue_; ++u)
            for (int r = 0; r < n_rb_; ++r)
                st.gain_db[(static_cast<std::size_t>(j) * n_ue_ + u) * n_rb_ + r] = serving_gain_db(j, u, r, tti);
    st.cross_gain_db = large_scale_db_;
    if (rb_usage_prev.empty()) rb_usage_prev.assign(n_bs_, std::vector<int>(n_rb_, kNoUe));
    st.rb_usage_prev = std::move(rb_usage_prev);
    return st;
}

ChannelState draw_channel(const Scenario& s, Rng& channel_stream, std::int64_t tti) {
    return ChannelModel(s, channel_stream).draw(tti, {});
}

double link_capacity_bps(int bs, int ue, std::span<const int> rbs, const ChannelState& ch, const LinkBudget& b) {
    double total = 0.0;
    for (int r : rbs) {
        const double signal = b.tx_power_per_rb_w * db_to_linear(ch.serving_gain_db(bs, ue, r));
        double interference = 0.0;
        for (int other = 0; other < ch.n_bs; ++other) {
            if (other == bs || ch.rb_usage_prev[other][r] == kNoUe) continue;
            interference += b.tx_power_per_rb_w * db_to_linear(ch.interferer_gain_db(other, bs, ue));
        }
        total += rb_rate_bps(signal, interference, b);
    }
    return total;
}

double tx_delay_s(double packet_bits, double capacity_bps) {
    if (packet_bits < 0 || capacity_bps < 0) throw DomainError("tx_delay_s: negative input");
    if (packet_bits == 0) return 0.0;
    if (capacity_bps == 0) return std::numeric_limits<double>::infinity();
    return packet_bits / capacity_bps;
}

}  // namespace ranslice
