#include "ranslice/traffic.hpp"

#include <algorithm>

#include "ranslice/errors.hpp"

namespace ranslice {

void SliceQueue::release_retx(std::int64_t tti) {
    std::vector<Packet> ready;
    auto it = std::stable_partition(retx.begin(), retx.end(), [&](const Packet& p) { return p.retx_ready_tti > tti; });
    ready.assign(std::make_move_iterator(it), std::make_move_iterator(retx.end()));
    retx.erase(it, retx.end());
    std::sort(ready.begin(), ready.end(), [](const Packet& a, const Packet& b) {
        return a.arrival_s != b.arrival_s ? a.arrival_s > b.arrival_s : a.id > b.id;
    });
    for (auto& p : ready) {
        p.location = Location::RadioQueue;
        fifo.push_front(std::move(p));
    }
}

double per_ue_rate_pps(const Scenario& s, SliceId slice) {
    return s.load_bps(slice) / (s.packet_bits(slice) * s.n_ue(slice));
}

TrafficSource::TrafficSource(const Scenario& s, Rng rng) : tti_s_(s.tti_s), rng_(std::move(rng)) {
    for (SliceId sl : {SliceId::Embb, SliceId::Urllc}) {
        const int i = index_of(sl);
        bits_[i] = s.packet_bits(sl);
        n_ue_[i] = s.n_ue(sl);
        first_ue_[i] = sl == SliceId::Embb ? 0 : s.n_embb_ue;
        // poisson_distribution requires a strictly positive mean; a zero
        // load is handled in generate().
        const double mean = per_ue_rate_pps(s, sl) * s.tti_s;
        active_[i] = mean > 0;
        dist_[i] = std::poisson_distribution<int>(active_[i] ? mean : 1.0);
    }
}

std::vector<Packet> TrafficSource::generate(SliceId slice, std::int64_t tti) {
    const int i = index_of(slice);
    std::vector<Packet> out;
    if (!active_[i]) return out;
    const double t0 = static_cast<double>(tti) * tti_s_;
    for (int u = 0; u < n_ue_[i]; ++u) {
        const int k = dist_[i](rng_);
        for (int n = 0; n < k; ++n) {
            Packet p;
            p.id = next_id_++;
            p.slice = slice;
            p.ue = first_ue_[i] + u;
            p.size_bits = bits_[i];
            p.residual_bits = bits_[i];
            p.arrival_s = t0;
            out.push_back(p);
        }
    }
    return out;
}

std::vector<Packet> generate_arrivals(const Scenario& s, SliceId slice, Rng& rng, std::int64_t tti) {
    const double mean = per_ue_rate_pps(s, slice) * s.tti_s;
    std::vector<Packet> out;
    if (!(mean > 0)) return out;
    std::poisson_distribution<int> dist(mean);
    const int first = slice == SliceId::Embb ? 0 : s.n_embb_ue;
    const double t0 = static_cast<double>(tti) * s.tti_s;
    std::uint64_t id = 0;
    for (int u = 0; u < s.n_ue(slice); ++u) {
        const int k = dist(rng);
        for (int n = 0; n < k; ++n) {
            Packet p;
            p.id = id++;
            p.slice = slice;
            p.ue = first + u;
            p.size_bits = s.packet_bits(slice);
            p.residual_bits = p.size_bits;
            p.arrival_s = t0;
            out.push_back(p);
        }
    }
    return out;
}

HarqOutcome harq_resolve(Packet& p, Rng& rng, double now_s, std::int64_t tti, const Scenario& s) {
    if (p.location != Location::RadioQueue || p.residual_bits != 0.0)
        throw ContractViolation("harq_resolve: packet " + std::to_string(p.id) + " is not finishing a transmission");
    if (!p.first_tx_end_s) p.first_tx_end_s = now_s;

    const bool failed = uniform01(rng) < s.harq_err_prob;
    if (!failed) {
        p.tx_done_s = now_s;
        p.location = Location::ComputeQueue;
        return HarqOutcome::Delivered;
    }
    if (p.retx_count >= s.harq_max_retx) {
        p.location = Location::Dropped;
        return HarqOutcome::DropAfterRetx;
    }
    ++p.retx_count;
    p.residual_bits = p.size_bits;
    p.retx_ready_tti = tti + s.harq_rtt_ttis;
    p.location = Location::AwaitingRetx;
    return HarqOutcome::ScheduleRetx;
}

std::size_t expire_drops(SliceQueue& q, double now_s, const Scenario& s) {
    // Timestamps are tti * tti_s products; absorb their rounding so a packet
    // aged exactly the deadline stays.
    const double deadline = s.drop_deadline_s(q.slice) + 1e-12;
    const auto before = q.fifo.size();
    std::erase_if(q.fifo, [&](const Packet& p) { return now_s - p.arrival_s > deadline; });
    const auto dropped = before - q.fifo.size();
    q.dropped_deadline += dropped;
    return dropped;
}

}  // namespace ranslice
