#pragma once

#include <array>
#include <deque>
#include <vector>

#include "ranslice/scenario.hpp"
#include "ranslice/traffic.hpp"

namespace ranslice {

struct ComputeTask {
    Packet packet;
    double cycles = 0.0;
    double remaining_cycles = 0.0;
    double enqueue_s = 0.0;

    SliceId slice() const noexcept { return packet.slice; }
};

// Wraps a packet that just cleared the radio link into an MEC task. Tasks
// start on the MEC path (alpha = 1).
ComputeTask make_task(Packet p, const Scenario& s);

// Edge server of one cell. Each slice owns a FIFO and a share of the CPU;
// shares come from the current inter-slice action.
class MecServer {
public:
    explicit MecServer(double capacity_hz = 0.0) : capacity_hz_(capacity_hz) {}

    double capacity_hz() const noexcept { return capacity_hz_; }
    double share(SliceId s) const noexcept { return share_[index_of(s)]; }
    // Throws ContractViolation unless both shares are in [0,1] and sum to at most 1.
    void set_shares(double embb, double urllc);

    void enqueue(ComputeTask t) { queue_[index_of(t.slice())].push_back(std::move(t)); }
    std::deque<ComputeTask>& queue(SliceId s) noexcept { return queue_[index_of(s)]; }
    const std::deque<ComputeTask>& queue(SliceId s) const noexcept { return queue_[index_of(s)]; }
    std::size_t size() const noexcept { return queue_[0].size() + queue_[1].size(); }

private:
    double capacity_hz_;
    std::array<double, kNumSlices> share_{0.5, 0.5};
    std::array<std::deque<ComputeTask>, kNumSlices> queue_;
};

struct MecStepResult {
    std::vector<ComputeTask> completed;
    double cycles_used = 0.0;
};

// Processes [t0, t0 + tti_s). Each slice serves its FIFO at share * capacity
// cycles/s; a task cannot start before it was enqueued, and cycles left
// after a completion flow to the next task within the same TTI.
MecStepResult mec_step(MecServer& server, double t0, double tti_s);

// M/M/1 upload over the backhaul plus the fixed cloud queuing delay:
//   1 / (B / L - lambda) + d_cque
// Throws UnstableQueue when lambda >= B / L.
double cloud_delay_s(const Scenario& s, double packet_bits, double arrival_rate_pps);

// Moves every MEC task that has waited longer than offload_wait_s to the
// cloud. The offload instant is enqueue + offload_wait_s; completion is that
// instant plus cloud_delay_s at the given backhaul arrival rate. Tasks that
// hit an unstable backhaul come back with location Dropped.
std::vector<ComputeTask> offload_check(MecServer& server, double now_s, const Scenario& s, double cloud_rate_pps);

}  // namespace ranslice
