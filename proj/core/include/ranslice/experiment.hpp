#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ranslice/engine.hpp"

namespace ranslice {

// Reads RANSLICE_LOG (error|info|debug) and applies it to the default logger.
void configure_logging_from_env();

struct SweepAxis {
    enum class Kind { None, UrllcLoad, MecCapacity };
    Kind kind = Kind::None;
    std::vector<double> values;

    // "urllc_load=1e6,2e6" or "mec_capacity=1e9,2e9"; empty text means none.
    static SweepAxis parse(std::string_view text);
    std::string_view name() const noexcept;
    // Points to iterate; a single point (the scenario as given) for None.
    std::size_t points() const noexcept { return kind == Kind::None ? 1 : values.size(); }
    Scenario apply(Scenario s, std::size_t point) const;
    double value(const Scenario& base, std::size_t point) const;
};

struct ExperimentSpec {
    Scenario scenario;
    std::vector<Case> cases;
    std::vector<std::uint64_t> seeds;
    std::int64_t ttis = 50000;
    SweepAxis sweep;
    std::string out_dir;
    std::optional<std::string> expert_dir;
    TransferMode transfer_mode = TransferMode::Additive;
    bool verify = false;
    unsigned jobs = 0;              // 0: hardware concurrency
    int curve_window_ttis = 500;    // moving-average window of reward curves
    int curve_stride_ttis = 50;     // reward_curve.csv row spacing

    void validate() const;
};

// Steady-state metrics of one run, measured over TTIs [measure_from, ttis).
struct RunSummary {
    std::int64_t ttis = 0;
    std::int64_t measure_from = 0;
    double urllc_delay_ms = 0.0;
    double embb_throughput_mbps = 0.0;  // per cell
    double drop_rate = 0.0;
    double embb_drop_rate = 0.0;
    double urllc_drop_rate = 0.0;
    double harq_drop_rate = 0.0;  // share of arrivals lost to HARQ exhaustion
    std::uint64_t urllc_completed = 0;
    double urllc_mec_fraction = 0.0;  // share of URLLC completions served at the edge
    double mean_reward = 0.0;
    std::int64_t convergence_tti = -1;
};

// Streams per-TTI reports into a RunSummary, the cell-averaged reward
// trace and the URLLC delay samples of the measurement window.
class MetricsAccumulator {
public:
    MetricsAccumulator(const Scenario& s, std::int64_t ttis, int curve_window_ttis = 500);
    void add(const std::vector<TtiReport>& reports);
    RunSummary finish() const;

    const std::vector<double>& reward_trace() const noexcept { return reward_; }
    std::vector<double> reward_moving_average() const;
    const std::vector<double>& urllc_delay_samples_s() const noexcept { return samples_; }

private:
    Scenario s_;
    std::int64_t ttis_;
    std::int64_t from_;
    int window_;
    double embb_bits_ = 0.0;
    double urllc_delay_sum_ = 0.0;
    std::uint64_t urllc_done_ = 0;
    std::uint64_t urllc_mec_ = 0;
    std::array<std::uint64_t, kNumSlices> arrivals_{};
    std::array<std::uint64_t, kNumSlices> drops_{};
    std::uint64_t harq_drops_ = 0;
    std::int64_t measured_ttis_ = 0;
    double reward_sum_ = 0.0;
    std::vector<double> reward_;
    std::vector<double> samples_;
};

// Batch recomputation of the summary from a raw report stream; used by
// --verify to cross-check the streaming accumulator.
RunSummary summarize_reports(std::span<const TtiReport> reports, const Scenario& s, std::int64_t ttis,
                             int curve_window_ttis = 500);

// Trailing moving average (shorter windows at the start).
std::vector<double> moving_average(std::span<const double> x, int window);

// First index >= window-1 at which the moving average reaches 90% of its
// final value (final - 0.1 |final|); -1 if never.
std::int64_t convergence_tti(std::span<const double> moving_avg, int window);

struct RunKey {
    Case run_case = Case::Qlra;
    std::uint64_t seed = 1;
    std::size_t sweep_point = 0;
};

struct RunOutput {
    RunKey key;
    double sweep_value = 0.0;
    RunSummary summary;
    std::vector<double> reward_ma;
    std::vector<double> urllc_delays_s;
    std::vector<QTable> tables;
};

// One simulation of a (case, seed, sweep point), fully summarized.
RunOutput execute_run(const ExperimentSpec& spec, const RunKey& key, std::shared_ptr<const ExpertTables> expert);

// Every (sweep point, case, seed) of the spec, on `spec.jobs` workers.
// Output order is deterministic: sweep point, then case, then seed.
std::vector<RunOutput> run_compare(const ExperimentSpec& spec, std::shared_ptr<const ExpertTables> expert);

void write_compare_outputs(const ExperimentSpec& spec, const std::vector<RunOutput>& runs);

struct ExpertTraining {
    std::vector<QTable> tables;
    double final_reward_ma = 0.0;
    std::uint64_t seed = 0;
    std::int64_t ttis = 0;
};

ExpertTraining train_expert(const Scenario& s, std::int64_t ttis, int curve_window_ttis = 500);
void write_expert_dir(const std::string& dir, const ExpertTraining& t, const Scenario& s);
std::shared_ptr<const ExpertTables> load_expert_dir(const std::string& dir, const Scenario& s);

struct EcdfPoint {
    double value = 0.0;
    double fraction = 0.0;
};

// Reduces samples to n_points (value, P[X <= value]) pairs at evenly spaced
// ranks; the last point is the maximum with fraction exactly 1. Throws
// ConfigError on empty input.
std::vector<EcdfPoint> ecdf(std::vector<double> samples, std::size_t n_points);

// Reads a samples CSV (delay column "delay_ms", or the last column), groups
// rows by the "case" column when present, and writes case,delay_ms,ecdf.
void write_ecdf(const std::string& samples_csv, std::size_t n_points, const std::string& out_csv);

// Per-TTI report export for the `run` subcommand.
void write_tti_reports(std::ostream& out, std::span<const TtiReport> reports);

}  // namespace ranslice
