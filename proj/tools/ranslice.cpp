#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ranslice/csv.hpp"
#include "ranslice/errors.hpp"
#include "ranslice/experiment.hpp"

namespace fs = std::filesystem;
using namespace ranslice;

namespace {

struct Flags {
    std::string scenario;
    std::string seeds = "1";
    std::int64_t ttis = -1;
    std::string cases = "expert,ktra,qlra";
    std::string sweep;
    std::string expert_dir;
    std::string out = "out";
    std::string transfer_mode = "additive";
    bool verify = false;
    unsigned jobs = 0;
    std::string samples;
    std::size_t points = 100;
};

std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> out;
    for (const auto& s : split(text)) {
        const auto dash = s.find('-');
        try {
            if (dash != std::string::npos && dash > 0) {
                const auto lo = std::stoull(s.substr(0, dash)), hi = std::stoull(s.substr(dash + 1));
                if (hi < lo) throw ConfigError("bad seed range '" + s + "'");
                for (auto v = lo; v <= hi; ++v) out.push_back(v);
            } else {
                std::size_t used = 0;
                out.push_back(std::stoull(s, &used));
                if (used != s.size()) throw std::invalid_argument(s);
            }
        } catch (const std::logic_error&) {
            throw ConfigError("bad seed '" + s + "'");
        }
    }
    if (out.empty()) throw ConfigError("--seeds is empty");
    return out;
}

TransferMode parse_transfer_mode(const std::string& s) {
    if (s == "additive") return TransferMode::Additive;
    if (s == "init-only") return TransferMode::InitOnly;
    throw ConfigError("--transfer-mode must be additive or init-only");
}

Scenario load(const Flags& f) { return f.scenario.empty() ? Scenario{} : load_scenario_file(f.scenario); }

ExperimentSpec make_spec(const Flags& f) {
    ExperimentSpec spec;
    spec.scenario = load(f);
    for (const auto& c : split(f.cases)) spec.cases.push_back(parse_case(c));
    spec.seeds = parse_seeds(f.seeds);
    spec.ttis = f.ttis >= 0 ? f.ttis : 50000;
    spec.sweep = SweepAxis::parse(f.sweep);
    spec.out_dir = f.out;
    if (!f.expert_dir.empty()) spec.expert_dir = f.expert_dir;
    spec.transfer_mode = parse_transfer_mode(f.transfer_mode);
    spec.verify = f.verify;
    spec.jobs = f.jobs;
    spec.validate();
    return spec;
}

int cmd_train_expert(const Flags& f) {
    Scenario s = load(f);
    const auto seeds = parse_seeds(f.seeds);
    s.master_seed = seeds.front();
    s.validate();
    const std::int64_t ttis = f.ttis >= 0 ? f.ttis : 50000;
    const std::string dir = f.expert_dir.empty() ? f.out : f.expert_dir;
    const auto t = train_expert(s, ttis);
    write_expert_dir(dir, t, s);
    std::cout << "final_reward_ma=" << csv::num(t.final_reward_ma) << '\n';
    spdlog::info("wrote {} expert tables to {}", t.tables.size(), dir);
    return 0;
}

int cmd_run(const Flags& f) {
    const auto spec = make_spec(f);
    if (spec.cases.size() != 1 || spec.seeds.size() != 1 || spec.sweep.points() != 1)
        throw ConfigError("run takes exactly one case and one seed and no sweep");
    Scenario s = spec.scenario;
    s.master_seed = spec.seeds.front();
    const Case c = spec.cases.front();
    std::shared_ptr<const ExpertTables> expert;
    if (c == Case::Ktra) {
        if (!spec.expert_dir) throw ConfigError("KTRA requires --expert-dir");
        expert = load_expert_dir(*spec.expert_dir, s);
    }
    fs::create_directories(spec.out_dir);
    std::ofstream out(fs::path(spec.out_dir) / "tti_reports.csv", std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write into '" + spec.out_dir + "'");
    RunOptions opt;
    opt.transfer_mode = spec.transfer_mode;
    bool first = true;
    run_case(s, c, spec.ttis, expert, opt, [&](const std::vector<TtiReport>& reps) {
        std::ostringstream chunk;
        write_tti_reports(chunk, reps);
        auto text = chunk.str();
        if (!first) text.erase(0, text.find('\n') + 1);
        first = false;
        out << text;
    });
    return 0;
}

int cmd_compare(const Flags& f) {
    const auto spec = make_spec(f);
    std::shared_ptr<const ExpertTables> expert;
    if (std::find(spec.cases.begin(), spec.cases.end(), Case::Ktra) != spec.cases.end()) {
        if (!spec.expert_dir) throw ConfigError("KTRA requires --expert-dir");
        expert = load_expert_dir(*spec.expert_dir, spec.scenario);
    }
    const auto runs = run_compare(spec, expert);
    write_compare_outputs(spec, runs);
    return 0;
}

int cmd_ecdf(const Flags& f) {
    if (f.samples.empty()) throw ConfigError("ecdf needs --samples");
    fs::create_directories(f.out);
    write_ecdf(f.samples, f.points, (fs::path(f.out) / "ecdf.csv").string());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging_from_env();
    CLI::App app{"RAN slicing simulator with knowledge-transfer Q-learning"};
    app.require_subcommand(1);
    Flags f;

    auto common = [&f](CLI::App* sub) {
        sub->add_option("--scenario", f.scenario, "Scenario file")->check(CLI::ExistingFile);
        sub->add_option("--seeds", f.seeds, "Seeds, e.g. 1,2,3 or 1-5");
        sub->add_option("--ttis", f.ttis, "TTIs per run (default 50000)");
        sub->add_option("--out", f.out, "Output directory");
    };
    auto* train = app.add_subcommand("train-expert", "Train radio-only expert tables");
    common(train);
    train->add_option("--expert-dir", f.expert_dir, "Where to write expert tables (default: --out)");

    auto* run = app.add_subcommand("run", "Single run, per-TTI report CSV");
    auto* compare = app.add_subcommand("compare", "Compare cases over seeds and sweep points");
    for (auto* sub : {run, compare}) {
        common(sub);
        sub->add_option("--cases", f.cases, "Cases: expert,ktra,qlra");
        sub->add_option("--expert-dir", f.expert_dir, "Directory written by train-expert");
        sub->add_option("--transfer-mode", f.transfer_mode, "additive or init-only");
    }
    compare->add_option("--sweep", f.sweep, "urllc_load=V1,.. or mec_capacity=V1,..");
    compare->add_flag("--verify", f.verify, "Recompute summaries from raw reports and compare");
    compare->add_option("--jobs", f.jobs, "Worker threads (default: hardware concurrency)");

    auto* ecdf_cmd = app.add_subcommand("ecdf", "Reduce delay samples to an ECDF");
    ecdf_cmd->add_option("--samples", f.samples, "Samples CSV")->required();
    ecdf_cmd->add_option("--points", f.points, "Number of ECDF points");
    ecdf_cmd->add_option("--out", f.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*train) return cmd_train_expert(f);
        if (*run) return cmd_run(f);
        if (*compare) return cmd_compare(f);
        return cmd_ecdf(f);
    } catch (const ParseError& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const ValidationError& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const ConfigError& e) {
        spdlog::error("{}", e.what());
        return 1;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 2;
    }
}
