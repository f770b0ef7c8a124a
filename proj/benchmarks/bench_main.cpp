#include <benchmark/benchmark.h>

#include <numeric>

#include "ranslice/engine.hpp"

using namespace ranslice;

static void BM_StepTti(benchmark::State& state) {
    Scenario s;
    s.urllc_load_bps = static_cast<double>(state.range(0)) * 1e6;
    SimRun run(s, Case::Qlra);
    for (auto _ : state) benchmark::DoNotOptimize(run.step_tti());
    state.SetItemsProcessed(state.iterations() * s.n_bs);
}
BENCHMARK(BM_StepTti)->Arg(2)->Arg(4);

static void BM_StepTtiKtra(benchmark::State& state) {
    Scenario s;
    auto expert = std::make_shared<const ExpertTables>(run_case(s, Case::Expert, 2000).tables);
    SimRun run(s, Case::Ktra, expert);
    for (auto _ : state) benchmark::DoNotOptimize(run.step_tti());
}
BENCHMARK(BM_StepTtiKtra);

static void BM_LinkCapacity(benchmark::State& state) {
    const Scenario s;
    Rng rng = make_stream(1, Substream::Channel);
    const ChannelModel m(s, rng);
    RbUsage usage(s.n_bs, std::vector<int>(s.bandwidth_rbs, 0));
    const auto ch = m.draw(0, usage);
    const auto b = LinkBudget::from(s);
    std::vector<int> rbs(static_cast<std::size_t>(state.range(0)));
    std::iota(rbs.begin(), rbs.end(), 0);
    for (auto _ : state) benchmark::DoNotOptimize(link_capacity_bps(2, 3, rbs, ch, b));
}
BENCHMARK(BM_LinkCapacity)->Arg(8)->Arg(100);

static void BM_PfSchedule(benchmark::State& state) {
    const Scenario s;
    SliceQueue q;
    q.slice = SliceId::Urllc;
    Rng rng(1);
    for (int i = 0; i < 40; ++i) {
        Packet p;
        p.ue = s.n_embb_ue + static_cast<int>(rng() % s.n_urllc_ue);
        p.size_bits = p.residual_bits = 400;
        q.fifo.push_back(p);
    }
    RbgRates rates(s.n_embb_ue + s.n_urllc_ue, s.n_rbgs());
    for (auto& r : rates.bps) r = 1e6 + 1e7 * uniform01(rng);
    const PfState pf(s.n_embb_ue + s.n_urllc_ue);
    std::vector<int> rbgs(13);
    std::iota(rbgs.begin(), rbgs.end(), 0);
    for (auto _ : state) benchmark::DoNotOptimize(pf_schedule(rbgs, q, rates, pf, s.tti_s));
}
BENCHMARK(BM_PfSchedule);

static void BM_SelectAction(benchmark::State& state) {
    const Scenario s;
    QTable q(QTableKind::Learner, action_space_descriptor(s, true));
    Rng rng(2);
    for (int i = 0; i < 5000; ++i)
        q.set({static_cast<int>(rng() % 11), static_cast<int>(rng() % 11)}, rng() % 154, uniform01(rng));
    const AgentConfig cfg = AgentConfig::from(s);
    for (auto _ : state) benchmark::DoNotOptimize(select_action(q, {static_cast<int>(rng() % 11), 0}, cfg, rng));
}
BENCHMARK(BM_SelectAction);
BENCHMARK_MAIN();
