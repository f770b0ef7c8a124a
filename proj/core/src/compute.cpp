#include "ranslice/compute.hpp"

#include <algorithm>

#include "ranslice/errors.hpp"

namespace ranslice {

ComputeTask make_task(Packet p, const Scenario& s) {
    ComputeTask t;
    t.cycles = p.size_bits * s.cycles_per_bit;
    t.remaining_cycles = t.cycles;
    t.enqueue_s = p.tx_done_s.value();
    p.compute_enqueue_s = t.enqueue_s;
    p.alpha = 1;
    p.location = Location::ComputeQueue;
    t.packet = std::move(p);
    return t;
}

void MecServer::set_shares(double embb, double urllc) {
    constexpr double kSlack = 1e-12;
    if (embb < 0 || urllc < 0 || embb > 1 || urllc > 1 || embb + urllc > 1 + kSlack)
        throw ContractViolation("MecServer: compute shares violate the capacity budget");
    share_ = {embb, urllc};
}

MecStepResult mec_step(MecServer& server, double t0, double tti_s) {
    MecStepResult out;
    const double t1 = t0 + tti_s;
    for (SliceId sl : {SliceId::Embb, SliceId::Urllc}) {
        const double rate = server.share(sl) * server.capacity_hz();
        if (!(rate > 0)) continue;
        auto& q = server.queue(sl);
        double cursor = t0;
        while (!q.empty()) {
            auto& task = q.front();
            const double start = std::max(cursor, task.enqueue_s);
            if (start >= t1) break;
            const double finish = start + task.remaining_cycles / rate;
            if (finish <= t1) {
                out.cycles_used += task.remaining_cycles;
                task.remaining_cycles = 0.0;
                task.packet.compute_done_s = finish;
                task.packet.location = Location::Done;
                cursor = finish;
                out.completed.push_back(std::move(task));
                q.pop_front();
            } else {
                const double used = std::min((t1 - start) * rate, task.remaining_cycles);
                task.remaining_cycles -= used;
                out.cycles_used += used;
                break;
            }
        }
    }
    return out;
}

double cloud_delay_s(const Scenario& s, double packet_bits, double arrival_rate_pps) {
    const double service_rate = s.backhaul_bps / packet_bits;
    if (arrival_rate_pps >= service_rate)
        throw UnstableQueue("backhaul arrival rate " + std::to_string(arrival_rate_pps) +
                            " pkt/s reaches service rate " + std::to_string(service_rate) + " pkt/s");
    return 1.0 / (service_rate - arrival_rate_pps) + s.cloud_queue_s;
}

std::vector<ComputeTask> offload_check(MecServer& server, double now_s, const Scenario& s, double cloud_rate_pps) {
    std::vector<ComputeTask> moved;
    for (SliceId sl : {SliceId::Embb, SliceId::Urllc}) {
        auto& q = server.queue(sl);
        for (auto it = q.begin(); it != q.end();) {
            if (now_s - it->enqueue_s <= s.offload_wait_s) {
                ++it;
                continue;
            }
            ComputeTask t = std::move(*it);
            it = q.erase(it);
            t.packet.alpha = 0;
            t.packet.offload_s = t.enqueue_s + s.offload_wait_s;
            try {
                t.packet.compute_done_s = *t.packet.offload_s + cloud_delay_s(s, t.packet.size_bits, cloud_rate_pps);
                t.packet.location = Location::Cloud;
            } catch (const UnstableQueue&) {
                t.packet.location = Location::Dropped;
            }
            moved.push_back(std::move(t));
        }
    }
    return moved;
}

}  // namespace ranslice
