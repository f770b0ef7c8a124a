#include "ranslice/experiment.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "ranslice/csv.hpp"
#include "ranslice/errors.hpp"

namespace ranslice {

namespace fs = std::filesystem;

void configure_logging_from_env() {
    const char* env = std::getenv("RANSLICE_LOG");
    const std::string level = env ? env : "info";
    if (level == "error")
        spdlog::set_level(spdlog::level::err);
    else if (level == "debug")
        spdlog::set_level(spdlog::level::debug);
    else
        spdlog::set_level(spdlog::level::info);
}

SweepAxis SweepAxis::parse(std::string_view text) {
    SweepAxis ax;
    if (text.empty() || text == "none") return ax;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError("--sweep expects AXIS=V1,V2,...");
    const auto axis = text.substr(0, eq);
    if (axis == "urllc_load")
        ax.kind = Kind::UrllcLoad;
    else if (axis == "mec_capacity")
        ax.kind = Kind::MecCapacity;
    else
        throw ConfigError("unknown sweep axis '" + std::string(axis) + "' (urllc_load or mec_capacity)");
    std::string rest(text.substr(eq + 1));
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || *end != '\0' || !std::isfinite(v)) throw ConfigError("bad sweep value '" + item + "'");
        if (!(v > 0)) throw ConfigError("sweep values must be positive");
        ax.values.push_back(v);
    }
    if (ax.values.empty()) throw ConfigError("sweep needs at least one value");
    return ax;
}

std::string_view SweepAxis::name() const noexcept {
    switch (kind) {
        case Kind::None: return "none";
        case Kind::UrllcLoad: return "urllc_load";
        case Kind::MecCapacity: return "mec_capacity";
    }
    return "none";
}

Scenario SweepAxis::apply(Scenario s, std::size_t point) const {
    if (kind == Kind::UrllcLoad) s.urllc_load_bps = values.at(point);
    if (kind == Kind::MecCapacity) s.mec_capacity_hz = values.at(point);
    return s;
}

double SweepAxis::value(const Scenario& base, std::size_t point) const {
    switch (kind) {
        case Kind::None: return 0.0;
        case Kind::UrllcLoad: return values.at(point);
        case Kind::MecCapacity: return values.at(point);
    }
    (void)base;
    return 0.0;
}

void ExperimentSpec::validate() const {
    scenario.validate();
    if (cases.empty()) throw ConfigError("case set is empty");
    if (seeds.empty()) throw ConfigError("seed list is empty");
    if (ttis < 0) throw ConfigError("--ttis must be non-negative");
    if (curve_window_ttis <= 0 || curve_stride_ttis <= 0) throw ConfigError("curve window and stride must be positive");
    for (double v : sweep.values)
        if (!(v > 0)) throw ConfigError("sweep values must be positive");
}

MetricsAccumulator::MetricsAccumulator(const Scenario& s, std::int64_t ttis, int curve_window_ttis)
    : s_(s), ttis_(ttis), from_(ttis / 2), window_(curve_window_ttis) {
    reward_.reserve(static_cast<std::size_t>(std::max<std::int64_t>(ttis, 0)));
}

void MetricsAccumulator::add(const std::vector<TtiReport>& reports) {
    if (reports.empty()) return;
    const std::int64_t t = reports.front().tti;
    double r = 0.0;
    for (const auto& rep : reports) r += rep.reward;
    r /= static_cast<double>(reports.size());
    reward_.push_back(r);
    if (t < from_) return;

    ++measured_ttis_;
    reward_sum_ += r;
    for (const auto& rep : reports) {
        embb_bits_ += rep.slice(SliceId::Embb).served_bits;
        const auto& u = rep.slice(SliceId::Urllc);
        for (double d : u.completed_delays_s) {
            urllc_delay_sum_ += d;
            samples_.push_back(d);
        }
        urllc_done_ += u.completed_delays_s.size();
        urllc_mec_ += u.completed_mec;
        for (int i = 0; i < kNumSlices; ++i) {
            arrivals_[i] += rep.slices[i].arrivals;
            drops_[i] += rep.slices[i].drops;
            harq_drops_ += rep.slices[i].harq_drops;
        }
    }
}

namespace {

double ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

}  // namespace

std::vector<double> MetricsAccumulator::reward_moving_average() const { return moving_average(reward_, window_); }

RunSummary MetricsAccumulator::finish() const {
    RunSummary out;
    out.ttis = ttis_;
    out.measure_from = from_;
    out.urllc_delay_ms = ratio(urllc_delay_sum_, static_cast<double>(urllc_done_)) * 1e3;
    out.embb_throughput_mbps =
        ratio(embb_bits_, static_cast<double>(measured_ttis_) * s_.n_bs * s_.tti_s) / 1e6;
    const auto arrivals = static_cast<double>(arrivals_[0] + arrivals_[1]);
    out.drop_rate = ratio(static_cast<double>(drops_[0] + drops_[1]), arrivals);
    out.embb_drop_rate = ratio(static_cast<double>(drops_[0]), static_cast<double>(arrivals_[0]));
    out.urllc_drop_rate = ratio(static_cast<double>(drops_[1]), static_cast<double>(arrivals_[1]));
    out.harq_drop_rate = ratio(static_cast<double>(harq_drops_), arrivals);
    out.urllc_completed = urllc_done_;
    out.urllc_mec_fraction = ratio(static_cast<double>(urllc_mec_), static_cast<double>(urllc_done_));
    out.mean_reward = ratio(reward_sum_, static_cast<double>(measured_ttis_));
    out.convergence_tti = convergence_tti(moving_average(reward_, window_), window_);
    return out;
}

RunSummary summarize_reports(std::span<const TtiReport> reports, const Scenario& s, std::int64_t ttis,
                             int curve_window_ttis) {
    // Group by TTI first so per-TTI cell averages match the streaming path.
    std::map<std::int64_t, std::vector<const TtiReport*>> by_tti;
    for (const auto& r : reports) by_tti[r.tti].push_back(&r);

    const std::int64_t from = ttis / 2;
    std::vector<double> rewards;
    double embb_bits = 0, delay_sum = 0, reward_sum = 0;
    std::uint64_t done = 0, mec = 0, measured = 0;
    std::array<std::uint64_t, kNumSlices> arrivals{}, drops{};
    std::uint64_t harq_drops = 0;
    for (const auto& [t, reps] : by_tti) {
        double r = 0;
        for (const auto* rep : reps) r += rep->reward;
        r /= static_cast<double>(reps.size());
        rewards.push_back(r);
        if (t < from) continue;
        ++measured;
        reward_sum += r;
        for (const auto* rep : reps) {
            embb_bits += rep->slice(SliceId::Embb).served_bits;
            for (double d : rep->slice(SliceId::Urllc).completed_delays_s) delay_sum += d;
            done += rep->slice(SliceId::Urllc).completed_delays_s.size();
            mec += rep->slice(SliceId::Urllc).completed_mec;
            for (int i = 0; i < kNumSlices; ++i) {
                arrivals[i] += rep->slices[i].arrivals;
                drops[i] += rep->slices[i].drops;
                harq_drops += rep->slices[i].harq_drops;
            }
        }
    }
    RunSummary out;
    out.ttis = ttis;
    out.measure_from = from;
    out.urllc_delay_ms = ratio(delay_sum, static_cast<double>(done)) * 1e3;
    out.embb_throughput_mbps = ratio(embb_bits, static_cast<double>(measured) * s.n_bs * s.tti_s) / 1e6;
    out.drop_rate = ratio(static_cast<double>(drops[0] + drops[1]), static_cast<double>(arrivals[0] + arrivals[1]));
    out.embb_drop_rate = ratio(static_cast<double>(drops[0]), static_cast<double>(arrivals[0]));
    out.urllc_drop_rate = ratio(static_cast<double>(drops[1]), static_cast<double>(arrivals[1]));
    out.harq_drop_rate = ratio(static_cast<double>(harq_drops), static_cast<double>(arrivals[0] + arrivals[1]));
    out.urllc_completed = done;
    out.urllc_mec_fraction = ratio(static_cast<double>(mec), static_cast<double>(done));
    out.mean_reward = ratio(reward_sum, static_cast<double>(measured));
    out.convergence_tti = convergence_tti(moving_average(rewards, curve_window_ttis), curve_window_ttis);
    return out;
}

std::vector<double> moving_average(std::span<const double> x, int window) {
    std::vector<double> out(x.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += x[i];
        if (i >= static_cast<std::size_t>(window)) sum -= x[i - window];
        const auto n = std::min<std::size_t>(i + 1, static_cast<std::size_t>(window));
        out[i] = sum / static_cast<double>(n);
    }
    return out;
}

std::int64_t convergence_tti(std::span<const double> ma, int window) {
    if (ma.empty() || ma.size() < static_cast<std::size_t>(window)) return -1;
    const double final_value = ma.back();
    const double threshold = final_value - 0.1 * std::abs(final_value);
    for (std::size_t i = static_cast<std::size_t>(window) - 1; i < ma.size(); ++i)
        if (ma[i] >= threshold) return static_cast<std::int64_t>(i);
    return -1;
}

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

void verify_summary(const RunSummary& a, const RunSummary& b, const RunKey& key) {
    const bool ok = close(a.urllc_delay_ms, b.urllc_delay_ms) && close(a.embb_throughput_mbps, b.embb_throughput_mbps) &&
                    close(a.drop_rate, b.drop_rate) && close(a.embb_drop_rate, b.embb_drop_rate) &&
                    close(a.urllc_drop_rate, b.urllc_drop_rate) && close(a.harq_drop_rate, b.harq_drop_rate) && a.urllc_completed == b.urllc_completed &&
                    close(a.urllc_mec_fraction, b.urllc_mec_fraction) && close(a.mean_reward, b.mean_reward) &&
                    a.convergence_tti == b.convergence_tti;
    if (!ok)
        throw std::runtime_error("--verify: summary of " + std::string(to_string(key.run_case)) + " seed " +
                                 std::to_string(key.seed) + " disagrees with recomputation from raw reports");
}

Scenario run_scenario(const ExperimentSpec& spec, const RunKey& key) {
    Scenario s = spec.sweep.apply(spec.scenario, key.sweep_point);
    s.master_seed = key.seed;
    return s;
}

}  // namespace

RunOutput execute_run(const ExperimentSpec& spec, const RunKey& key, std::shared_ptr<const ExpertTables> expert) {
    const Scenario s = run_scenario(spec, key);
    RunOptions opt;
    opt.transfer_mode = spec.transfer_mode;
    MetricsAccumulator acc(effective_scenario(s, key.run_case), spec.ttis, spec.curve_window_ttis);
    std::vector<TtiReport> raw;
    auto arts = run_case(s, key.run_case, spec.ttis, key.run_case == Case::Ktra ? expert : nullptr, opt,
                         [&](const std::vector<TtiReport>& reps) {
                             acc.add(reps);
                             if (spec.verify) raw.insert(raw.end(), reps.begin(), reps.end());
                         });
    RunOutput out;
    out.key = key;
    out.sweep_value = spec.sweep.value(spec.scenario, key.sweep_point);
    out.summary = acc.finish();
    if (spec.verify)
        verify_summary(out.summary, summarize_reports(raw, effective_scenario(s, key.run_case), spec.ttis,
                                                      spec.curve_window_ttis),
                       key);
    out.reward_ma = acc.reward_moving_average();
    out.urllc_delays_s = acc.urllc_delay_samples_s();
    out.tables = std::move(arts.tables);
    spdlog::info("{} seed={} {}={} urllc_delay={:.4f} ms embb={:.4f} Mbps drops={:.5f}", to_string(key.run_case),
                 key.seed, spec.sweep.name(), out.sweep_value, out.summary.urllc_delay_ms,
                 out.summary.embb_throughput_mbps, out.summary.drop_rate);
    return out;
}

std::vector<RunOutput> run_compare(const ExperimentSpec& spec, std::shared_ptr<const ExpertTables> expert) {
    spec.validate();
    const bool needs_expert = std::find(spec.cases.begin(), spec.cases.end(), Case::Ktra) != spec.cases.end();
    if (needs_expert && !expert) throw ConfigError("KTRA requires expert tables (--expert-dir)");

    std::vector<RunKey> keys;
    for (std::size_t p = 0; p < spec.sweep.points(); ++p)
        for (Case c : spec.cases)
            for (auto seed : spec.seeds) keys.push_back({c, seed, p});

    std::vector<RunOutput> out(keys.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>(spec.jobs ? spec.jobs : hw, static_cast<unsigned>(keys.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto work = [&] {
        for (std::size_t i = next++; i < keys.size(); i = next++) {
            try {
                out[i] = execute_run(spec, keys[i], expert);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!error) error = std::current_exception();
                next = keys.size();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
    return out;
}

namespace {

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
    return f;
}

}  // namespace

void write_compare_outputs(const ExperimentSpec& spec, const std::vector<RunOutput>& runs) {
    const fs::path dir(spec.out_dir);
    fs::create_directories(dir);
    const std::string axis(spec.sweep.name());

    auto summary = open_out(dir / "summary.csv");
    csv::Writer(summary).header({"case", "seed", "sweep_axis", "sweep_value", "ttis", "measure_from_tti",
                                 "urllc_delay_ms", "embb_throughput_mbps", "drop_rate", "embb_drop_rate",
                                 "urllc_drop_rate", "harq_drop_rate", "urllc_completed", "urllc_mec_fraction", "mean_reward",
                                 "convergence_tti"});
    for (const auto& r : runs) {
        const auto& m = r.summary;
        csv::Writer(summary).row({std::string(to_string(r.key.run_case)), std::to_string(r.key.seed), axis,
                                  csv::num(r.sweep_value), std::to_string(m.ttis), std::to_string(m.measure_from),
                                  csv::num(m.urllc_delay_ms), csv::num(m.embb_throughput_mbps), csv::num(m.drop_rate),
                                  csv::num(m.embb_drop_rate), csv::num(m.urllc_drop_rate), csv::num(m.harq_drop_rate),
                                  std::to_string(m.urllc_completed), csv::num(m.urllc_mec_fraction),
                                  csv::num(m.mean_reward), std::to_string(m.convergence_tti)});
    }

    auto curve = open_out(dir / "reward_curve.csv");
    csv::Writer cw(curve);
    cw.header({"case", "seed", "sweep_axis", "sweep_value", "tti", "reward_ma"});
    for (const auto& r : runs) {
        const auto stride = static_cast<std::size_t>(spec.curve_stride_ttis);
        for (std::size_t t = 0; t < r.reward_ma.size(); ++t) {
            if ((t + 1) % stride != 0 && t + 1 != r.reward_ma.size()) continue;
            cw.row({std::string(to_string(r.key.run_case)), std::to_string(r.key.seed), axis, csv::num(r.sweep_value),
                    std::to_string(t), csv::num(r.reward_ma[t])});
        }
    }

    auto samples = open_out(dir / "urllc_delay_samples.csv");
    csv::Writer sw(samples);
    sw.header({"case", "seed", "sweep_axis", "sweep_value", "delay_ms"});
    for (const auto& r : runs)
        for (double d : r.urllc_delays_s)
            sw.row({std::string(to_string(r.key.run_case)), std::to_string(r.key.seed), axis, csv::num(r.sweep_value),
                    csv::num(d * 1e3)});
}

ExpertTraining train_expert(const Scenario& s, std::int64_t ttis, int curve_window_ttis) {
    MetricsAccumulator acc(effective_scenario(s, Case::Expert), ttis, curve_window_ttis);
    auto arts = run_case(s, Case::Expert, ttis, nullptr, {}, [&](const std::vector<TtiReport>& r) { acc.add(r); });
    ExpertTraining t;
    t.tables = std::move(arts.tables);
    const auto ma = acc.reward_moving_average();
    t.final_reward_ma = ma.empty() ? 0.0 : ma.back();
    t.seed = s.master_seed;
    t.ttis = ttis;
    return t;
}

namespace {

std::string expert_file_name(int bs) { return "expert_bs" + std::to_string(bs) + ".qtable"; }

}  // namespace

void write_expert_dir(const std::string& dir, const ExpertTraining& t, const Scenario& s) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create '" + dir + "': " + ec.message());
    for (std::size_t j = 0; j < t.tables.size(); ++j)
        save_qtable_file(t.tables[j], (fs::path(dir) / expert_file_name(static_cast<int>(j))).string());
    auto m = open_out(fs::path(dir) / "manifest.txt");
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(scenario_hash(effective_scenario(s, Case::Expert))));
    m << "seed=" << t.seed << '\n'
      << "ttis=" << t.ttis << '\n'
      << "n_bs=" << t.tables.size() << '\n'
      << "scenario=" << hash << '\n'
      << "final_reward_ma=" << csv::num(t.final_reward_ma) << '\n';
    for (std::size_t j = 0; j < t.tables.size(); ++j) m << "file=" << expert_file_name(static_cast<int>(j)) << '\n';
}

std::shared_ptr<const ExpertTables> load_expert_dir(const std::string& dir, const Scenario& s) {
    std::ifstream m(fs::path(dir) / "manifest.txt");
    if (!m) throw ConfigError("no expert manifest in '" + dir + "'");
    std::vector<std::string> files;
    std::string line;
    while (std::getline(m, line))
        if (line.rfind("file=", 0) == 0) files.push_back(line.substr(5));
    if (files.size() != static_cast<std::size_t>(s.n_bs))
        throw ConfigError("expert manifest lists " + std::to_string(files.size()) + " tables, scenario has " +
                          std::to_string(s.n_bs) + " cells");
    QTableExpectation expect{QTableKind::Expert, action_space_descriptor(s, false)};
    auto tables = std::make_shared<ExpertTables>();
    for (const auto& f : files) tables->push_back(load_qtable_file((fs::path(dir) / f).string(), expect));
    return tables;
}

std::vector<EcdfPoint> ecdf(std::vector<double> samples, std::size_t n_points) {
    if (samples.empty()) throw ConfigError("ecdf: no samples");
    if (n_points == 0) throw ConfigError("ecdf: n_points must be positive");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    const std::size_t k = std::min(n_points, n);
    std::vector<EcdfPoint> out;
    out.reserve(k);
    for (std::size_t i = 1; i <= k; ++i) {
        const std::size_t rank = (i * n + k - 1) / k;  // ceil(i n / k), 1-based
        const double v = samples[rank - 1];
        const auto le = static_cast<std::size_t>(std::upper_bound(samples.begin(), samples.end(), v) - samples.begin());
        const double frac = le == n ? 1.0 : static_cast<double>(le) / static_cast<double>(n);
        if (!out.empty() && out.back().value == v) continue;
        out.push_back({v, frac});
    }
    return out;
}

void write_ecdf(const std::string& samples_csv, std::size_t n_points, const std::string& out_csv) {
    const auto t = csv::read_file(samples_csv);
    if (t.columns.empty()) throw ConfigError("ecdf: '" + samples_csv + "' has no header");
    int col = t.column("delay_ms");
    if (col < 0) col = static_cast<int>(t.columns.size()) - 1;
    const int case_col = t.column("case");

    std::map<std::string, std::vector<double>> groups;
    std::vector<std::string> order;
    for (const auto& row : t.rows) {
        const std::string g = case_col >= 0 ? row[case_col] : "all";
        if (!groups.count(g)) order.push_back(g);
        char* end = nullptr;
        const double v = std::strtod(row[col].c_str(), &end);
        if (*end != '\0') throw ConfigError("ecdf: non-numeric sample '" + row[col] + "'");
        groups[g].push_back(v);
    }
    if (order.empty()) throw ConfigError("ecdf: '" + samples_csv + "' contains no samples");

    auto out = open_out(out_csv);
    csv::Writer w(out);
    w.header({"case", t.columns[col], "ecdf"});
    for (const auto& g : order)
        for (const auto& p : ecdf(groups[g], n_points)) w.row({g, csv::num(p.value), csv::num(p.fraction)});
}

void write_tti_reports(std::ostream& out, std::span<const TtiReport> reports) {
    csv::Writer w(out);
    w.header({"tti", "bs", "r_embb", "r_urllc", "c_embb", "c_urllc", "embb_arrivals", "embb_served_bits",
              "embb_completed", "embb_drops", "embb_queue", "urllc_arrivals", "urllc_served_bits", "urllc_completed",
              "urllc_delay_sum_s", "urllc_mec", "urllc_cloud", "urllc_drops", "urllc_queue", "reward"});
    for (const auto& r : reports) {
        const auto& e = r.slice(SliceId::Embb);
        const auto& u = r.slice(SliceId::Urllc);
        double dsum = 0.0;
        for (double d : u.completed_delays_s) dsum += d;
        w.row({std::to_string(r.tti), std::to_string(r.bs), std::to_string(r.action.r_embb),
               std::to_string(r.action.r_urllc), r.action.compute ? std::to_string(r.action.compute->embb) : "",
               r.action.compute ? std::to_string(r.action.compute->urllc) : "", std::to_string(e.arrivals),
               csv::num(e.served_bits), std::to_string(e.completed_delays_s.size()), std::to_string(e.drops),
               std::to_string(e.queue_len), std::to_string(u.arrivals), csv::num(u.served_bits),
               std::to_string(u.completed_delays_s.size()), csv::num(dsum), std::to_string(u.completed_mec),
               std::to_string(u.completed_cloud), std::to_string(u.drops), std::to_string(u.queue_len),
               csv::num(r.reward)});
    }
}

}  // namespace ranslice
