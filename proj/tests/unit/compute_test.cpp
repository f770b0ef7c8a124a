#include <gtest/gtest.h>

#include <random>

#include "ranslice/compute.hpp"
#include "ranslice/errors.hpp"

using namespace ranslice;

namespace {

ComputeTask task(SliceId slice, double bits, double done_s, const Scenario& s) {
    Packet p;
    p.slice = slice;
    p.size_bits = bits;
    p.tx_done_s = done_s;
    p.location = Location::ComputeQueue;
    return make_task(p, s);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Mec, UrllcTaskAtFullShare) {
    const Scenario s;
    MecServer m(3e9);
    m.set_shares(0, 1);
    m.enqueue(task(SliceId::Urllc, 400, 0.0, s));
    const auto r = mec_step(m, 0.0, s.tti_s);
    ASSERT_EQ(r.completed.size(), 1u);
    EXPECT_EQ(r.completed[0].cycles, 80000);
    EXPECT_LE(rel_err(r.completed[0].packet.compute_delay_s(), 80000 / 3e9), 1e-9);
    EXPECT_LE(rel_err(r.completed[0].packet.compute_delay_s(), 26.67e-6), 1e-3);
    EXPECT_EQ(r.completed[0].packet.alpha, 1);
}

TEST(Mec, EmbbTaskAtHalfShare) {
    const Scenario s;
    MecServer m(3e9);
    m.set_shares(0.5, 0.5);
    m.enqueue(task(SliceId::Embb, 800, 0.0, s));
    const auto r = mec_step(m, 0.0, s.tti_s);
    ASSERT_EQ(r.completed.size(), 1u);
    EXPECT_LE(rel_err(r.completed[0].packet.compute_delay_s(), 160000 / 1.5e9), 1e-9);
}

TEST(Mec, ZeroShareLeavesTaskUntouched) {
    const Scenario s;
    MecServer m(3e9);
    m.set_shares(1, 0);
    m.enqueue(task(SliceId::Urllc, 400, 0.0, s));
    const auto r = mec_step(m, 0.0, s.tti_s);
    EXPECT_TRUE(r.completed.empty());
    EXPECT_EQ(m.queue(SliceId::Urllc).front().remaining_cycles, 80000);
}

TEST(Mec, SharesMustFitBudget) {
    MecServer m(1e9);
    EXPECT_THROW(m.set_shares(0.7, 0.4), ContractViolation);
    EXPECT_THROW(m.set_shares(-0.1, 0.4), ContractViolation);
    EXPECT_NO_THROW(m.set_shares(0.3, 0.7));
}

TEST(Mec, LeftoverCyclesFlowToNextTask) {
    const Scenario s;
    MecServer m(3e9);
    m.set_shares(0, 1);
    for (int i = 0; i < 3; ++i) m.enqueue(task(SliceId::Urllc, 400, 0.0, s));
    const auto r = mec_step(m, 0.0, s.tti_s);
    ASSERT_EQ(r.completed.size(), 3u);
    EXPECT_LE(rel_err(*r.completed[2].packet.compute_done_s, 3 * 80000 / 3e9), 1e-9);
}

TEST(Mec, CyclesNeverExceedBudgetProperty) {
    const Scenario s;
    std::mt19937_64 g(8);
    std::uniform_real_distribution<double> u(0, 1);
    for (int trial = 0; trial < 500; ++trial) {
        MecServer m(1e9 * (0.5 + 3 * u(g)));
        const double e = u(g);
        m.set_shares(e, 1 - e);
        const int n = static_cast<int>(g() % 30);
        for (int i = 0; i < n; ++i)
            m.enqueue(task(g() % 2 ? SliceId::Embb : SliceId::Urllc, 400.0 * (1 + g() % 4), u(g) * s.tti_s, s));
        const auto r = mec_step(m, 0.0, s.tti_s);
        EXPECT_LE(r.cycles_used, m.capacity_hz() * s.tti_s * (1 + 1e-12));
    }
}

TEST(Mec, SingleTaskCompletionWithinQuantizationBound) {
    const Scenario s;
    std::mt19937_64 g(12);
    std::uniform_real_distribution<double> u(0.05, 1);
    for (int trial = 0; trial < 300; ++trial) {
        const double beta = u(g);
        MecServer m(3e9);
        m.set_shares(1 - beta, beta);
        const double enq = u(g) * s.tti_s;
        m.enqueue(task(SliceId::Urllc, 400, enq, s));
        double t = 0;
        std::optional<double> done;
        for (int k = 0; k < 100 && !done; ++k, t += s.tti_s) {
            auto r = mec_step(m, t, s.tti_s);
            if (!r.completed.empty()) done = r.completed[0].packet.compute_delay_s();
        }
        ASSERT_TRUE(done);
        const double ideal = 80000 / (beta * 3e9);
        EXPECT_GE(*done, ideal * (1 - 1e-9));
        EXPECT_LE(*done, ideal + s.tti_s);
    }
}

TEST(Cloud, DelayExamples) {
    const Scenario s;
    EXPECT_LE(rel_err(cloud_delay_s(s, 400, 5000), 1.05e-3), 1e-9);
    EXPECT_LE(rel_err(cloud_delay_s(s, 400, 0), 1.04e-3), 1e-9);
    EXPECT_THROW(cloud_delay_s(s, 400, 25000), UnstableQueue);
}

TEST(Offload, EmptyQueuesNothingMoves) {
    MecServer m(3e9);
    EXPECT_TRUE(offload_check(m, 1.0, Scenario{}, 0).empty());
}

TEST(Offload, WaitedPastThresholdGoesToCloud) {
    const Scenario s;
    MecServer m(3e9);
    m.set_shares(1, 0);
    m.enqueue(task(SliceId::Urllc, 400, 0.0, s));
    EXPECT_TRUE(offload_check(m, 2.0e-3, s, 0).empty());
    const auto moved = offload_check(m, 2.1e-3, s, 0);
    ASSERT_EQ(moved.size(), 1u);
    EXPECT_EQ(moved[0].packet.alpha, 0);
    EXPECT_EQ(moved[0].packet.location, Location::Cloud);
    EXPECT_LE(rel_err(*moved[0].packet.compute_done_s, 2e-3 + 1.04e-3), 1e-9);
    EXPECT_EQ(m.size(), 0u);
}

TEST(Offload, StarvedServerOffloadsAfterExactlyTheThreshold) {
    const Scenario s;
    MecServer m(0.0);
    for (int i = 0; i < 5; ++i) m.enqueue(task(SliceId::Urllc, 400, i * s.tti_s, s));
    std::vector<ComputeTask> all;
    for (int k = 0; k < 40; ++k) {
        mec_step(m, k * s.tti_s, s.tti_s);
        for (auto& t : offload_check(m, (k + 1) * s.tti_s, s, 0)) all.push_back(std::move(t));
    }
    ASSERT_EQ(all.size(), 5u);
    for (const auto& t : all) EXPECT_DOUBLE_EQ(*t.packet.offload_s - t.enqueue_s, s.offload_wait_s);
}

TEST(Offload, UnstableBackhaulDrops) {
    const Scenario s;
    MecServer m(0.0);
    m.enqueue(task(SliceId::Urllc, 400, 0.0, s));
    const auto moved = offload_check(m, 1.0, s, 1e6);
    ASSERT_EQ(moved.size(), 1u);
    EXPECT_EQ(moved[0].packet.location, Location::Dropped);
}
