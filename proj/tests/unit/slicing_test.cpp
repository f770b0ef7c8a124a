#include <gtest/gtest.h>

#include "ranslice/errors.hpp"
#include "ranslice/slicing.hpp"

using namespace ranslice;

namespace {

// One cell with two URLLC UEs (local ids 0 and 1) and no eMBB UEs.
Scenario two_ue_cell() {
    Scenario s;
    s.n_bs = 1;
    s.n_embb_ue = 0;
    s.n_urllc_ue = 2;
    s.embb_load_bps = 0;
    s.harq_err_prob = 0;
    return s;
}

Packet packet(int ue, double bits, std::uint64_t id = 0, double arrival = 0.0) {
    Packet p;
    p.id = id;
    p.slice = SliceId::Urllc;
    p.ue = ue;
    p.size_bits = bits;
    p.residual_bits = bits;
    p.arrival_s = arrival;
    return p;
}

SliceQueue urllc_queue() {
    SliceQueue q;
    q.slice = SliceId::Urllc;
    return q;
}

}  // namespace

TEST(SplitRbgs, EmbbTakesLowIds) {
    const auto split = split_rbgs(AllocationAction{3, 10, ComputeSplit{5, 5}});
    EXPECT_EQ(split[0], (std::vector<int>{0, 1, 2}));
    ASSERT_EQ(split[1].size(), 10u);
    EXPECT_EQ(split[1].front(), 3);
    EXPECT_EQ(split[1].back(), 12);
}

TEST(RbgLayout, DefaultSizes) {
    const RbgLayout l(Scenario{}.rbg_sizes);
    EXPECT_EQ(l.size(), 13);
    EXPECT_EQ(l.n_rbs(), 100);
    EXPECT_EQ(l.first_rb(12), 96);
    EXPECT_EQ(l.rb_count(12), 4);
}

TEST(PfSchedule, EmptyQueueAssignsNothing) {
    const auto q = urllc_queue();
    RbgRates rates(2, 13);
    const PfState pf(2);
    const std::vector<int> rbgs{0, 1, 2};
    for (int a : pf_schedule(rbgs, q, rates, pf, 1.0 / 7000)) EXPECT_EQ(a, kNoUe);
}

TEST(PfSchedule, DominantUeTakesEverything) {
    auto q = urllc_queue();
    q.fifo.push_back(packet(0, 1e9));
    q.fifo.push_back(packet(1, 1e9));
    RbgRates rates(2, 13);
    for (int g = 0; g < 13; ++g) {
        rates.at(0, g) = 1e6;
        rates.at(1, g) = 1e6 * db_to_linear(3.0);
    }
    const PfState pf(2);
    const std::vector<int> rbgs{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    for (int a : pf_schedule(rbgs, q, rates, pf, 1.0 / 7000)) EXPECT_EQ(a, 1);
}

TEST(PfSchedule, TiesGoToLowestUe) {
    auto q = urllc_queue();
    q.fifo.push_back(packet(1, 1e9));
    q.fifo.push_back(packet(0, 1e9));
    RbgRates rates(2, 1);
    rates.at(0, 0) = rates.at(1, 0) = 5e5;
    const std::vector<int> rbgs{0};
    EXPECT_EQ(pf_schedule(rbgs, q, rates, PfState(2), 1.0 / 7000)[0], 0);
}

TEST(PfSchedule, SatisfiedUeYieldsRemainingRbgs) {
    auto q = urllc_queue();
    q.fifo.push_back(packet(0, 100));
    q.fifo.push_back(packet(1, 1e9));
    RbgRates rates(2, 3);
    for (int g = 0; g < 3; ++g) {
        rates.at(0, g) = 1e7;
        rates.at(1, g) = 1e6;
    }
    const std::vector<int> rbgs{0, 1, 2};
    const auto a = pf_schedule(rbgs, q, rates, PfState(2), 1.0 / 7000);
    EXPECT_EQ(a, (std::vector<int>{0, 1, 1}));
}

TEST(PfSchedule, UnassignedWhenDemandMet) {
    auto q = urllc_queue();
    q.fifo.push_back(packet(0, 100));
    RbgRates rates(2, 3);
    for (int g = 0; g < 3; ++g) rates.at(0, g) = 1e7;
    const std::vector<int> rbgs{0, 1, 2};
    EXPECT_EQ(pf_schedule(rbgs, q, rates, PfState(2), 1.0 / 7000), (std::vector<int>{0, kNoUe, kNoUe}));
}

TEST(PfSchedule, SymmetricUesShareEvenlyOverTime) {
    const double tti = 1.0 / 7000;
    auto q = urllc_queue();
    q.fifo.push_back(packet(0, 1e12));
    q.fifo.push_back(packet(1, 1e12));
    PfState pf(2);
    Rng rng(42);
    std::array<std::int64_t, 2> share{};
    const std::vector<int> rbgs{0, 1, 2, 3};
    const std::vector<int> both{0, 1};
    for (int t = 0; t < 10000; ++t) {
        RbgRates rates(2, 4);
        for (int u = 0; u < 2; ++u)
            for (int g = 0; g < 4; ++g) rates.at(u, g) = 1e6 * -std::log(1.0 - uniform01(rng));
        const auto a = pf_schedule(rbgs, q, rates, pf, tti);
        std::vector<double> served(2, 0.0);
        for (std::size_t i = 0; i < a.size(); ++i) {
            ++share[a[i]];
            served[a[i]] += rates.at(a[i], rbgs[i]) * tti;
        }
        pf_update(pf, both, served, tti);
    }
    const double frac = static_cast<double>(share[0]) / static_cast<double>(share[0] + share[1]);
    EXPECT_NEAR(frac, 0.5, 0.05);
}

TEST(PfSchedule, DeterministicProperty) {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        auto q = urllc_queue();
        for (int i = 0; i < 5; ++i) q.fifo.push_back(packet(static_cast<int>(rng() % 2), 400.0 * (1 + rng() % 5)));
        RbgRates rates(2, 13);
        for (auto& r : rates.bps) r = 1e5 + 1e7 * uniform01(rng);
        PfState pf(2);
        pf.avg_rate_bps = {1 + 1e6 * uniform01(rng), 1 + 1e6 * uniform01(rng)};
        const std::vector<int> rbgs{2, 5, 7, 11};
        EXPECT_EQ(pf_schedule(rbgs, q, rates, pf, 1e-4), pf_schedule(rbgs, q, rates, pf, 1e-4));
    }
}

TEST(PfUpdate, ExponentialAverageWithFloor) {
    PfState pf(2);
    const std::vector<int> ues{0, 1};
    const std::vector<double> bits{1000.0, 0.0};
    pf_update(pf, ues, bits, 1e-3);
    EXPECT_DOUBLE_EQ(pf.avg_rate_bps[0], 0.99 * 1.0 + 0.01 * 1e6);
    EXPECT_EQ(pf.avg_rate_bps[1], PfState::kFloorBps);
}

TEST(ServeQueue, ResidualBitsAcrossThreeTtis) {
    const Scenario s = two_ue_cell();
    auto q = urllc_queue();
    q.fifo.push_back(packet(0, 400));
    RbgRates rates(2, 13);
    rates.at(0, 0) = 1e6;
    const std::vector<int> rbgs{0};
    const std::vector<int> assign{0};
    Rng rng(1);
    const double per_tti = 1e6 * s.tti_s;
    for (int k = 1; k <= 2; ++k) {
        const auto r = serve_queue(q, rbgs, assign, rates, (k - 1) * s.tti_s, k - 1, rng, s);
        EXPECT_TRUE(r.delivered.empty());
        ASSERT_EQ(q.fifo.size(), 1u);
        EXPECT_NEAR(q.fifo.front().residual_bits, 400 - per_tti * k, 1e-9);
    }
    const auto r = serve_queue(q, rbgs, assign, rates, 2 * s.tti_s, 2, rng, s);
    ASSERT_EQ(r.delivered.size(), 1u);
    EXPECT_TRUE(q.fifo.empty());
    EXPECT_NEAR(r.delivered[0].tx_delay_s(), 400 / 1e6, 1e-12);
    EXPECT_DOUBLE_EQ(r.delivered[0].queue_delay_s(), 0.0);
}

TEST(ServeQueue, NoAssignmentLeavesQueue) {
    const Scenario s = two_ue_cell();
    auto q = urllc_queue();
    q.fifo.push_back(packet(0, 400));
    RbgRates rates(2, 13);
    const std::vector<int> rbgs{0};
    const std::vector<int> assign{kNoUe};
    Rng rng(1);
    const auto r = serve_queue(q, rbgs, assign, rates, 0, 0, rng, s);
    EXPECT_TRUE(r.delivered.empty());
    ASSERT_EQ(q.fifo.size(), 1u);
    EXPECT_EQ(q.fifo.front().residual_bits, 400);
    EXPECT_FALSE(q.fifo.front().service_start_s);
}

TEST(ServeQueue, ExactlyTwoPacketsPerTtiBothComplete) {
    const Scenario s = two_ue_cell();
    auto q = urllc_queue();
    q.fifo.push_back(packet(0, 400, 0));
    q.fifo.push_back(packet(0, 400, 1));
    RbgRates rates(2, 13);
    rates.at(0, 0) = 800 / s.tti_s;
    const std::vector<int> rbgs{0};
    const std::vector<int> assign{0};
    Rng rng(1);
    const auto r = serve_queue(q, rbgs, assign, rates, 0, 0, rng, s);
    ASSERT_EQ(r.delivered.size(), 2u);
    EXPECT_TRUE(q.fifo.empty());
    EXPECT_NEAR(r.delivered[1].queue_delay_s(), s.tti_s / 2, 1e-15);
    EXPECT_NEAR(r.sent_bits[0], 800, 1e-9);
}

TEST(ServeQueue, ForeignUeIsContractViolation) {
    Scenario s = two_ue_cell();
    s.n_embb_ue = 1;
    auto q = urllc_queue();
    q.fifo.push_back(packet(1, 400));
    RbgRates rates(3, 13);
    const std::vector<int> rbgs{0};
    const std::vector<int> assign{0};
    Rng rng(1);
    EXPECT_THROW(serve_queue(q, rbgs, assign, rates, 0, 0, rng, s), ContractViolation);
}

TEST(Reward, Examples) {
    const Scenario s;
    RewardSample a;
    a.embb_served_bits = 2e6 * s.tti_s;
    a.urllc_delay_sum_s = 1e-3;
    a.urllc_completions = 1;
    const std::vector<RewardSample> w{a};
    EXPECT_NEAR(reward(w, s).reward, 3.0, 1e-12);

    RewardSample b;
    b.urllc_delay_sum_s = 2e-3;
    b.urllc_completions = 1;
    std::vector<RewardSample> w2{b};
    EXPECT_NEAR(reward(w2, s).reward, 0.0, 1e-12);
    w2[0].drops = 1;
    EXPECT_NEAR(reward(w2, s).reward, -5.0, 1e-12);
}

TEST(Reward, UndefinedDelayFallsBack) {
    const Scenario s;
    const std::vector<RewardSample> empty_ttis(10);
    EXPECT_DOUBLE_EQ(reward(empty_ttis, s).reward, 2.0);
    EXPECT_DOUBLE_EQ(reward(empty_ttis, s, 1.5).reward, 0.5);
    EXPECT_FALSE(reward(empty_ttis, s).delay_defined);
}

TEST(Reward, TrackerUsesTrailingWindowAndRemembersDelay) {
    Scenario s;
    s.reward_window_ttis = 2;
    RewardTracker tr(2);
    RewardSample d;
    d.urllc_delay_sum_s = 1e-3;
    d.urllc_completions = 1;
    EXPECT_NEAR(tr.push(d, s), 1.0, 1e-12);
    EXPECT_NEAR(tr.push(RewardSample{}, s), 1.0, 1e-12);
    EXPECT_NEAR(tr.push(RewardSample{}, s), 1.0, 1e-12);  // window empty of completions, reuses 1 ms
    RewardSample e;
    e.embb_served_bits = 1e6 * s.tti_s;
    EXPECT_NEAR(tr.push(e, s), 0.5 + 1.0, 1e-12);
}

TEST(Reward, MonotoneProperty) {
    const Scenario s;
    Rng rng(77);
    for (int i = 0; i < 1000; ++i) {
        RewardSample x;
        x.embb_served_bits = 1000 * uniform01(rng);
        x.urllc_delay_sum_s = 1e-3 * uniform01(rng);
        x.urllc_completions = 1;
        x.drops = rng() % 3;
        const std::vector<RewardSample> base{x};
        const double r0 = reward(base, s).reward;
        auto more_tp = base;
        more_tp[0].embb_served_bits += 10;
        auto more_delay = base;
        more_delay[0].urllc_delay_sum_s += 1e-4;
        auto more_drops = base;
        more_drops[0].drops += 1;
        EXPECT_GT(reward(more_tp, s).reward, r0);
        EXPECT_LT(reward(more_delay, s).reward, r0);
        EXPECT_LT(reward(more_drops, s).reward, r0);
    }
}
