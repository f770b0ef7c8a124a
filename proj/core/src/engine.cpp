#include "ranslice/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ranslice/errors.hpp"

namespace ranslice {

std::string_view to_string(Case c) noexcept {
    switch (c) {
        case Case::Expert: return "expert";
        case Case::Ktra: return "ktra";
        case Case::Qlra: return "qlra";
    }
    return "?";
}

Case parse_case(std::string_view s) {
    if (s == "expert") return Case::Expert;
    if (s == "ktra") return Case::Ktra;
    if (s == "qlra") return Case::Qlra;
    throw ConfigError("unknown case '" + std::string(s) + "' (expected expert, ktra or qlra)");
}

Scenario effective_scenario(const Scenario& s, Case c) {
    Scenario out = s;
    if (c == Case::Expert) out.mec_capacity_hz = 0.0;
    return out;
}

namespace {

struct Cell {
    std::array<SliceQueue, kNumSlices> queues;
    MecServer mec;
    std::vector<Packet> cloud;
    PfState pf;
    QTable table;
    RewardTracker tracker;
    std::vector<std::uint32_t> offload_ring;
    std::size_t offload_head = 0;
    std::uint64_t offload_window_sum = 0;
    TrafficSource traffic;
    Rng harq_rng;
    Rng policy_rng;
    PacketLedger ledger;
    ConstraintAudit audit;

    Cell(const Scenario& s, int bs, QTable t)
        : mec(s.mec_capacity_hz),
          pf(s.n_embb_ue + s.n_urllc_ue),
          table(std::move(t)),
          tracker(s.reward_window_ttis),
          offload_ring(static_cast<std::size_t>(s.reward_window_ttis), 0),
          traffic(s, make_stream(s.master_seed, Substream::Traffic, static_cast<std::uint64_t>(bs))),
          harq_rng(make_stream(s.master_seed, Substream::Harq, static_cast<std::uint64_t>(bs))),
          policy_rng(make_stream(s.master_seed, Substream::Policy, static_cast<std::uint64_t>(bs))) {
        queues[0].slice = SliceId::Embb;
        queues[1].slice = SliceId::Urllc;
    }

    SliceState observe(int cap) const {
        return clip_state(queues[0].length(), queues[1].length(), cap);
    }

    double cloud_rate_pps(double tti_s) const {
        return static_cast<double>(offload_window_sum) / (static_cast<double>(offload_ring.size()) * tti_s);
    }

    void record_offloads(std::uint32_t n) {
        offload_window_sum -= offload_ring[offload_head];
        offload_ring[offload_head] = n;
        offload_window_sum += n;
        offload_head = (offload_head + 1) % offload_ring.size();
    }
};

void fail(int bs, std::int64_t tti, const std::string& what) {
    throw ContractViolation("invariant violated at TTI " + std::to_string(tti) + ", cell " + std::to_string(bs) +
                            ": " + what);
}

}  // namespace

struct SimRun::Impl {
    Scenario s;
    Case c;
    std::shared_ptr<const ExpertTables> expert;
    RunOptions opt;
    AgentConfig cfg;
    LinkBudget budget;
    RbgLayout layout;
    ChannelModel channel;
    std::vector<Cell> cells;
    RbUsage usage_prev;
    RbUsage usage_next;
    std::int64_t tti = 0;
    std::vector<Packet> completed_last;

    // Scratch, reused every TTI.
    RbgRates rates;
    std::vector<double> interferer_w;
    std::vector<int> rb_owner;
    std::vector<double> zero_bits;

    static ChannelModel make_channel(const Scenario& s) {
        auto rng = make_stream(s.master_seed, Substream::Channel);
        return ChannelModel(s, rng);
    }

    Impl(const Scenario& base, Case cs, std::shared_ptr<const ExpertTables> ex, RunOptions o)
        : s(effective_scenario(base, cs)),
          c(cs),
          expert(std::move(ex)),
          opt(o),
          budget(LinkBudget::from(s)),
          layout(s.rbg_sizes),
          channel((s.validate(), make_channel(s))) {
        cfg = AgentConfig::from(s, c == Case::Ktra ? opt.transfer_mode : TransferMode::None);
        if (c == Case::Ktra) {
            if (cfg.transfer == TransferMode::None) throw ConfigError("KTRA needs a transfer mode other than none");
            if (!expert) throw ConfigError("KTRA requires expert Q-tables");
            if (expert->size() != static_cast<std::size_t>(s.n_bs))
                throw ConfigError("KTRA requires one expert Q-table per cell (" + std::to_string(s.n_bs) +
                                  "), got " + std::to_string(expert->size()));
            for (const auto& t : *expert) {
                if (t.kind() != QTableKind::Expert) throw ConfigError("KTRA knowledge source is not an expert table");
                if (t.descriptor().n_rbgs != s.n_rbgs())
                    throw ConfigError("expert table RBG count does not match the scenario");
            }
        }
        const bool joint = c != Case::Expert;
        const auto kind = joint ? QTableKind::Learner : QTableKind::Expert;
        const auto hash = scenario_hash(s);
        for (int j = 0; j < s.n_bs; ++j) cells.emplace_back(s, j, QTable(kind, action_space_descriptor(s, joint), hash));
        usage_prev.assign(s.n_bs, std::vector<int>(s.bandwidth_rbs, kNoUe));
        usage_next = usage_prev;
        rates = RbgRates(s.n_embb_ue + s.n_urllc_ue, s.n_rbgs());
        interferer_w.resize(s.n_bs);
        rb_owner.resize(s.bandwidth_rbs);
        zero_bits.assign(static_cast<std::size_t>(s.n_embb_ue + s.n_urllc_ue), 0.0);
    }

    void fill_rates(int bs, int ue, std::span<const int> rbgs) {
        for (int other = 0; other < s.n_bs; ++other)
            interferer_w[other] = other == bs ? 0.0 : budget.tx_power_per_rb_w * channel.large_scale_linear(other, bs, ue);
        const double signal_scale = budget.tx_power_per_rb_w * channel.large_scale_linear(bs, bs, ue);
        for (int g : rbgs) {
            double total = 0.0;
            const int first = layout.first_rb(g);
            for (int r = first; r < first + layout.rb_count(g); ++r) {
                double interference = 0.0;
                for (int other = 0; other < s.n_bs; ++other)
                    if (other != bs && usage_prev[other][r] != kNoUe) interference += interferer_w[other];
                total += rb_rate_bps(signal_scale * channel.fading_power(bs, ue, r, tti), interference, budget);
            }
            rates.at(ue, g) = total;
        }
    }

    TtiReport step_cell(int bs) {
        Cell& cell = cells[bs];
        const double t0 = static_cast<double>(tti) * s.tti_s;
        const double t1 = t0 + s.tti_s;
        TtiReport rep;
        rep.tti = tti;
        rep.bs = bs;

        // (1) arrivals, HARQ retransmissions due this TTI go first
        for (auto& q : cell.queues) {
            q.release_retx(tti);
            auto arrivals = cell.traffic.generate(q.slice, tti);
            rep.slice(q.slice).arrivals = arrivals.size();
            cell.ledger.arrivals += arrivals.size();
            for (auto& p : arrivals) {
                q.bits_arrived += p.size_bits;
                q.fifo.push_back(std::move(p));
            }
        }
        // (2) deadline expiry
        for (auto& q : cell.queues) {
            const auto n = expire_drops(q, t0, s);
            rep.slice(q.slice).drops += n;
            cell.ledger.dropped += n;
        }
        // (3)-(4) observe and act
        const SliceState state = cell.observe(s.state_queue_cap);
        const std::size_t a_idx = select_action(cell.table, state, cfg, cell.policy_rng);
        const AllocationAction action = cell.table.space()[a_idx];
        rep.action = action;

        // (5) radio: inter-slice split, PF inside each slice, transmission
        auto& audit = cell.audit;
        audit = {};
        std::fill(rb_owner.begin(), rb_owner.end(), kNoUe);
        auto& usage = usage_next[bs];
        std::fill(usage.begin(), usage.end(), kNoUe);
        std::vector<Packet> delivered;
        const auto split = split_rbgs(action);
        for (auto& q : cell.queues) {
            const auto& rbgs = split[index_of(q.slice)];
            const int first_ue = q.slice == SliceId::Embb ? 0 : s.n_embb_ue;
            std::vector<int> slice_ues(static_cast<std::size_t>(s.n_ue(q.slice)));
            std::iota(slice_ues.begin(), slice_ues.end(), first_ue);
            if (q.fifo.empty() || rbgs.empty()) {
                pf_update(cell.pf, slice_ues, zero_bits, s.tti_s);
                continue;
            }
            std::vector<int> ues;
            for (const auto& p : q.fifo)
                if (std::find(ues.begin(), ues.end(), p.ue) == ues.end()) ues.push_back(p.ue);
            for (int u : ues) fill_rates(bs, u, rbgs);

            const auto assignment = pf_schedule(rbgs, q, rates, cell.pf, s.tti_s);
            auto served = serve_queue(q, rbgs, assignment, rates, t0, tti, cell.harq_rng, s);
            pf_update(cell.pf, slice_ues, served.sent_bits.empty() ? zero_bits : served.sent_bits, s.tti_s);

            for (std::size_t i = 0; i < rbgs.size(); ++i) {
                const int ue = assignment[i];
                if (ue == kNoUe) continue;
                const int first = layout.first_rb(rbgs[i]);
                for (int r = first; r < first + layout.rb_count(rbgs[i]); ++r) {
                    if (rb_owner[r] != kNoUe) ++audit.rb_conflicts;
                    rb_owner[r] = ue;
                    usage[r] = ue;
                    ++audit.rbs_allocated;
                }
            }
            auto& m = rep.slice(q.slice);
            for (const auto& p : served.delivered) m.served_bits += p.size_bits;
            m.drops += served.harq_drops.size();
            m.harq_drops += served.harq_drops.size();
            cell.ledger.dropped += served.harq_drops.size();
            for (auto& p : served.delivered) delivered.push_back(std::move(p));
        }

        // (6) compute: MEC shares from the action, MEC service, offload
        double share_embb = 0.5;
        double share_urllc = 0.5;
        if (action.compute) {
            const double k = static_cast<double>(*cell.table.descriptor().compute_steps);
            share_embb = action.compute->embb / k;
            share_urllc = action.compute->urllc / k;
        }
        cell.mec.set_shares(share_embb, share_urllc);
        audit.compute_share_sum = share_embb + share_urllc;
        audit.cycles_budget = cell.mec.capacity_hz() * s.tti_s;
        for (auto& p : delivered) cell.mec.enqueue(make_task(std::move(p), s));

        std::vector<Packet> done;
        auto mec = mec_step(cell.mec, t0, s.tti_s);
        audit.cycles_used = mec.cycles_used;
        for (auto& t : mec.completed) {
            rep.slice(t.slice()).completed_mec += 1;
            done.push_back(std::move(t.packet));
        }
        const double cloud_rate = cell.cloud_rate_pps(s.tti_s);
        auto moved = offload_check(cell.mec, t1, s, cloud_rate);
        cell.record_offloads(static_cast<std::uint32_t>(moved.size()));
        for (auto& t : moved) {
            if (t.packet.location == Location::Dropped) {
                rep.slice(t.slice()).drops += 1;
                cell.ledger.dropped += 1;
            } else {
                cell.cloud.push_back(std::move(t.packet));
            }
        }
        for (auto it = cell.cloud.begin(); it != cell.cloud.end();) {
            if (*it->compute_done_s <= t1) {
                it->location = Location::Done;
                rep.slice(it->slice).completed_cloud += 1;
                done.push_back(std::move(*it));
                it = cell.cloud.erase(it);
            } else {
                ++it;
            }
        }

        // (7) report and reward
        for (auto& p : done) {
            if (opt.audit) {
                const double e2e = p.end_to_end_s();
                const double parts = p.queue_delay_s() + p.tx_delay_s() + p.retx_delay_s() + p.compute_delay_s();
                if (std::abs(parts - e2e) > 1e-12 + 1e-9 * e2e) fail(bs, tti, "delay decomposition does not add up");
                if (p.alpha == 1 && p.offload_s) fail(bs, tti, "MEC-completed packet carries an offload time");
            }
            rep.slice(p.slice).completed_delays_s.push_back(p.end_to_end_s());
            completed_last.push_back(p);
        }
        cell.ledger.completed += done.size();
        for (const auto& q : cell.queues) rep.slice(q.slice).queue_len = q.length();
        rep.reward = cell.tracker.push(RewardSample::of(rep), s);

        // (8) learn from the transition
        const SliceState next = cell.observe(s.state_queue_cap);
        if (cfg.transfer == TransferMode::None)
            q_update(cell.table, state, a_idx, rep.reward, next, cfg);
        else
            transfer_update(cell.table, (*expert)[bs], state, a_idx, rep.reward, next, cfg);

        auto& led = cell.ledger;
        led.in_radio = cell.queues[0].fifo.size() + cell.queues[1].fifo.size();
        led.in_retx = cell.queues[0].retx.size() + cell.queues[1].retx.size();
        led.in_mec = cell.mec.size();
        led.in_cloud = cell.cloud.size();
        if (opt.audit) {
            if (audit.rb_conflicts != 0) fail(bs, tti, "an RB was granted to more than one UE");
            if (audit.rbs_allocated > s.bandwidth_rbs) fail(bs, tti, "RB budget exceeded");
            if (audit.compute_share_sum > 1.0 + 1e-12) fail(bs, tti, "compute shares exceed the MEC capacity");
            if (audit.cycles_used > audit.cycles_budget * (1.0 + 1e-9) + 1e-6) fail(bs, tti, "MEC cycles exceed capacity");
            if (!led.conserved()) fail(bs, tti, "packet conservation broken");
        }
        return rep;
    }

    std::vector<TtiReport> step() {
        completed_last.clear();
        std::vector<TtiReport> out;
        out.reserve(cells.size());
        for (int j = 0; j < s.n_bs; ++j) out.push_back(step_cell(j));
        // (9) this TTI's RB usage is the next TTI's interference snapshot
        std::swap(usage_prev, usage_next);
        ++tti;
        return out;
    }
};

SimRun::SimRun(const Scenario& s, Case c, std::shared_ptr<const ExpertTables> expert, RunOptions opt)
    : impl_(std::make_unique<Impl>(s, c, std::move(expert), opt)) {}
SimRun::~SimRun() = default;
SimRun::SimRun(SimRun&&) noexcept = default;
SimRun& SimRun::operator=(SimRun&&) noexcept = default;

std::vector<TtiReport> SimRun::step_tti() { return impl_->step(); }
std::int64_t SimRun::tti() const noexcept { return impl_->tti; }
const Scenario& SimRun::scenario() const noexcept { return impl_->s; }
Case SimRun::run_case() const noexcept { return impl_->c; }
SliceState SimRun::observe(int bs) const { return impl_->cells.at(bs).observe(impl_->s.state_queue_cap); }
const PacketLedger& SimRun::ledger(int bs) const { return impl_->cells.at(bs).ledger; }
const ConstraintAudit& SimRun::last_audit(int bs) const { return impl_->cells.at(bs).audit; }
const QTable& SimRun::table(int bs) const { return impl_->cells.at(bs).table; }
const std::vector<Packet>& SimRun::last_completed() const { return impl_->completed_last; }
const RbUsage& SimRun::rb_usage() const { return impl_->usage_prev; }

std::vector<QTable> SimRun::tables() const {
    std::vector<QTable> out;
    for (const auto& c : impl_->cells) out.push_back(c.table);
    return out;
}

RunArtifacts run_case(const Scenario& s, Case c, std::int64_t ttis, std::shared_ptr<const ExpertTables> expert,
                      RunOptions opt, const ReportSink& sink) {
    SimRun run(s, c, std::move(expert), opt);
    RunArtifacts out;
    if (!sink) out.reports.reserve(static_cast<std::size_t>(std::max<std::int64_t>(ttis, 0)) * s.n_bs);
    for (std::int64_t t = 0; t < ttis; ++t) {
        auto reps = run.step_tti();
        if (sink)
            sink(reps);
        else
            for (auto& r : reps) out.reports.push_back(std::move(r));
    }
    out.tables = run.tables();
    return out;
}

}  // namespace ranslice
