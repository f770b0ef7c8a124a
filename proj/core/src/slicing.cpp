#include "ranslice/slicing.hpp"

#include <algorithm>

#include "ranslice/errors.hpp"

namespace ranslice {

RbgLayout::RbgLayout(const std::vector<int>& sizes) {
    for (int n : sizes) {
        first_.push_back(n_rbs_);
        count_.push_back(n);
        n_rbs_ += n;
    }
}

std::array<std::vector<int>, kNumSlices> split_rbgs(const AllocationAction& a) {
    std::array<std::vector<int>, kNumSlices> out;
    for (int g = 0; g < a.r_embb; ++g) out[index_of(SliceId::Embb)].push_back(g);
    for (int g = a.r_embb; g < a.r_embb + a.r_urllc; ++g) out[index_of(SliceId::Urllc)].push_back(g);
    return out;
}

void fill_rbg_rates(RbgRates& out, int bs, int ue, const RbgLayout& layout, const ChannelState& ch,
                    const LinkBudget& b) {
    std::vector<int> rbs;
    for (int g = 0; g < layout.size(); ++g) {
        rbs.clear();
        for (int r = 0; r < layout.rb_count(g); ++r) rbs.push_back(layout.first_rb(g) + r);
        out.at(ue, g) = link_capacity_bps(bs, ue, rbs, ch, b);
    }
}

std::vector<double> pending_bits(const SliceQueue& q, int n_ue) {
    std::vector<double> out(static_cast<std::size_t>(n_ue), 0.0);
    for (const auto& p : q.fifo) out[p.ue] += p.residual_bits;
    return out;
}

std::vector<int> pf_schedule(std::span<const int> rbgs, const SliceQueue& queue, const RbgRates& rates,
                             const PfState& pf, double tti_s) {
    std::vector<int> assignment(rbgs.size(), kNoUe);
    if (queue.fifo.empty()) return assignment;

    auto pending = pending_bits(queue, rates.n_ue);
    for (std::size_t i = 0; i < rbgs.size(); ++i) {
        int best = kNoUe;
        double best_metric = -1.0;
        for (int u = 0; u < rates.n_ue; ++u) {
            if (pending[u] <= 0.0) continue;
            const double metric = rates.at(u, rbgs[i]) / pf.avg_rate_bps[u];
            if (metric > best_metric) {
                best_metric = metric;
                best = u;
            }
        }
        if (best == kNoUe) break;
        assignment[i] = best;
        pending[best] -= rates.at(best, rbgs[i]) * tti_s;
    }
    return assignment;
}

void pf_update(PfState& pf, std::span<const int> ues, std::span<const double> served_bits, double tti_s) {
    constexpr double k = 1.0 / PfState::kTimeConstantTtis;
    for (int u : ues) {
        const double served_rate = served_bits[u] / tti_s;
        pf.avg_rate_bps[u] = std::max((1.0 - k) * pf.avg_rate_bps[u] + k * served_rate, PfState::kFloorBps);
    }
}

ServeResult serve_queue(SliceQueue& queue, std::span<const int> rbgs, std::span<const int> assignment,
                        const RbgRates& rates, double t0, std::int64_t tti, Rng& harq_rng, const Scenario& s) {
    if (assignment.size() != rbgs.size()) throw ContractViolation("serve_queue: assignment/RBG size mismatch");
    const int first = queue.slice == SliceId::Embb ? 0 : s.n_embb_ue;
    const int last = first + s.n_ue(queue.slice);

    ServeResult out;
    out.sent_bits.assign(static_cast<std::size_t>(rates.n_ue), 0.0);
    std::vector<double> capacity(static_cast<std::size_t>(rates.n_ue), 0.0);
    bool any = false;
    for (std::size_t i = 0; i < rbgs.size(); ++i) {
        const int ue = assignment[i];
        if (ue == kNoUe) continue;
        if (ue < first || ue >= last)
            throw ContractViolation("serve_queue: UE " + std::to_string(ue) + " is not in slice " +
                                    std::string(to_string(queue.slice)));
        capacity[ue] += rates.at(ue, rbgs[i]);
        any = true;
    }
    if (!any) return out;

    // Relative slack so a budget of exactly k packets sends all k.
    constexpr double kSlack = 1e-9;
    std::vector<double> budget(capacity.size());
    for (std::size_t u = 0; u < capacity.size(); ++u) budget[u] = capacity[u] * s.tti_s;

    for (auto& p : queue.fifo) {
        const int u = p.ue;
        if (capacity[u] <= 0.0 || budget[u] <= 0.0) continue;
        const double used_before = out.sent_bits[u];
        if (!p.service_start_s) p.service_start_s = t0 + used_before / capacity[u];
        if (p.residual_bits <= budget[u] * (1.0 + kSlack)) {
            const double sent = p.residual_bits;
            budget[u] = std::max(budget[u] - sent, 0.0);
            out.sent_bits[u] += sent;
            p.residual_bits = 0.0;
            const double finish = std::min(t0 + out.sent_bits[u] / capacity[u], t0 + s.tti_s);
            switch (harq_resolve(p, harq_rng, finish, tti, s)) {
                case HarqOutcome::Delivered:
                    out.delivered.push_back(p);
                    break;
                case HarqOutcome::ScheduleRetx:
                    queue.retx.push_back(p);
                    ++out.retx_scheduled;
                    break;
                case HarqOutcome::DropAfterRetx:
                    out.harq_drops.push_back(p);
                    ++queue.dropped_harq;
                    break;
            }
        } else {
            p.residual_bits -= budget[u];
            out.sent_bits[u] += budget[u];
            budget[u] = 0.0;
        }
    }
    std::erase_if(queue.fifo, [](const Packet& p) { return p.location != Location::RadioQueue; });
    for (const auto& p : out.delivered) queue.bits_delivered += p.size_bits;
    return out;
}

RewardSample RewardSample::of(const TtiReport& r) {
    RewardSample x;
    x.embb_served_bits = r.slice(SliceId::Embb).served_bits;
    const auto& u = r.slice(SliceId::Urllc);
    for (double d : u.completed_delays_s) x.urllc_delay_sum_s += d;
    x.urllc_completions = u.completed_delays_s.size();
    x.drops = r.slice(SliceId::Embb).drops + u.drops;
    return x;
}

RewardValue reward(std::span<const RewardSample> window, const Scenario& s, double last_delay_ms) {
    RewardValue v;
    if (window.empty()) {
        v.delay_ms = last_delay_ms;
        v.reward = s.w_urllc * (s.d_target_s * 1e3 - last_delay_ms);
        return v;
    }
    double bits = 0.0;
    double delay_sum = 0.0;
    std::uint64_t n = 0;
    std::uint64_t drops = 0;
    for (const auto& x : window) {
        bits += x.embb_served_bits;
        delay_sum += x.urllc_delay_sum_s;
        n += x.urllc_completions;
        drops += x.drops;
    }
    v.throughput_mbps = bits / (static_cast<double>(window.size()) * s.tti_s) / 1e6;
    v.delay_defined = n > 0;
    v.delay_ms = v.delay_defined ? delay_sum / static_cast<double>(n) * 1e3 : last_delay_ms;
    v.reward = s.w_embb * v.throughput_mbps + s.w_urllc * (s.d_target_s * 1e3 - v.delay_ms) -
               s.drop_penalty * static_cast<double>(drops);
    return v;
}

RewardValue reward(std::span<const TtiReport> window, const Scenario& s, double last_delay_ms) {
    std::vector<RewardSample> samples;
    samples.reserve(window.size());
    for (const auto& r : window) samples.push_back(RewardSample::of(r));
    return reward(samples, s, last_delay_ms);
}

double RewardTracker::push(const RewardSample& sample, const Scenario& s) {
    if (ring_.size() < window_) {
        ring_.push_back(sample);
    } else {
        ring_[head_] = sample;
        head_ = (head_ + 1) % window_;
    }
    const auto v = reward(ring_, s, last_delay_ms_);
    if (v.delay_defined) last_delay_ms_ = v.delay_ms;
    return v.reward;
}

}  // namespace ranslice
