#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "ranslice/agents.hpp"
#include "ranslice/channel.hpp"
#include "ranslice/compute.hpp"
#include "ranslice/scenario.hpp"
#include "ranslice/slicing.hpp"
#include "ranslice/traffic.hpp"

namespace ranslice {

enum class Case { Expert, Ktra, Qlra };

std::string_view to_string(Case c) noexcept;
Case parse_case(std::string_view s);  // "expert" | "ktra" | "qlra"

// Scenario actually simulated for a case: the expert runs without MEC.
Scenario effective_scenario(const Scenario& s, Case c);

// Packet counters of one cell; conservation requires
//   arrivals == in_flight() + completed + dropped.
struct PacketLedger {
    std::uint64_t arrivals = 0;
    std::uint64_t completed = 0;
    std::uint64_t dropped = 0;
    std::uint64_t in_radio = 0;
    std::uint64_t in_retx = 0;
    std::uint64_t in_mec = 0;
    std::uint64_t in_cloud = 0;

    std::uint64_t in_flight() const noexcept { return in_radio + in_retx + in_mec + in_cloud; }
    bool conserved() const noexcept { return arrivals == in_flight() + completed + dropped; }
};

// Resource usage of one cell in one TTI, checked against the per-TTI
// constraints (one UE per RB, RB budget, compute budget).
struct ConstraintAudit {
    int rbs_allocated = 0;
    int rb_conflicts = 0;
    double compute_share_sum = 0.0;
    double cycles_used = 0.0;
    double cycles_budget = 0.0;
};

struct RunOptions {
    TransferMode transfer_mode = TransferMode::Additive;
    // Re-derive every completed packet's delay from its timestamps and abort
    // on any constraint or conservation violation.
    bool audit = true;
};

using ExpertTables = std::vector<QTable>;  // one per cell

// One simulation of one case. Strictly sequential; distinct runs share
// nothing mutable (expert tables are read-only).
class SimRun {
public:
    SimRun(const Scenario& s, Case c, std::shared_ptr<const ExpertTables> expert = nullptr, RunOptions opt = {});
    ~SimRun();
    SimRun(SimRun&&) noexcept;
    SimRun& operator=(SimRun&&) noexcept;

    // Advances every cell by one TTI in ascending cell order and returns one
    // report per cell.
    std::vector<TtiReport> step_tti();

    std::int64_t tti() const noexcept;
    const Scenario& scenario() const noexcept;
    Case run_case() const noexcept;

    SliceState observe(int bs) const;
    const PacketLedger& ledger(int bs) const;
    const ConstraintAudit& last_audit(int bs) const;
    const QTable& table(int bs) const;
    std::vector<QTable> tables() const;
    // Packets that reached Done in the last TTI (all cells), for inspection.
    const std::vector<Packet>& last_completed() const;
    const RbUsage& rb_usage() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct RunArtifacts {
    std::vector<TtiReport> reports;  // TTI-major, cell-minor
    std::vector<QTable> tables;
};

using ReportSink = std::function<void(const std::vector<TtiReport>&)>;

// Runs `ttis` TTIs of a case. KTRA needs one expert table per cell and
// throws ConfigError without them. When `sink` is set, reports are streamed
// to it instead of being collected.
RunArtifacts run_case(const Scenario& s, Case c, std::int64_t ttis,
                      std::shared_ptr<const ExpertTables> expert = nullptr, RunOptions opt = {},
                      const ReportSink& sink = {});

}  // namespace ranslice
