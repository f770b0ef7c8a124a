#include "ranslice/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include "ranslice/errors.hpp"

namespace ranslice {

std::string_view to_string(SliceId s) noexcept {
    return s == SliceId::Embb ? "embb" : "urllc";
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

double parse_double(std::string_view v, int line, std::string_view key) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
        throw ParseError(line, "expected a number for '" + std::string(key) + "', got '" + std::string(v) + "'");
    return out;
}

template <typename Int>
Int parse_int(std::string_view v, int line, std::string_view key) {
    Int out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw ParseError(line, "expected an integer for '" + std::string(key) + "', got '" + std::string(v) + "'");
    return out;
}

bool parse_bool(std::string_view v, int line, std::string_view key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParseError(line, "expected true/false for '" + std::string(key) + "'");
}

std::vector<int> parse_int_list(std::string_view v, int line, std::string_view key) {
    std::vector<int> out;
    v = trim(v);
    if (v.empty()) return out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        const auto comma = v.find(',', pos);
        const auto item = trim(v.substr(pos, comma == std::string_view::npos ? v.npos : comma - pos));
        out.push_back(parse_int<int>(item, line, key));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

struct Key {
    std::string_view section;
    std::string_view name;
    std::function<void(Scenario&, std::string_view, int)> set;
    std::function<std::string(const Scenario&)> get;
};

#define RS_DOUBLE(sec, field)                                                                      \
    Key{sec, #field, [](Scenario& s, std::string_view v, int l) { s.field = parse_double(v, l, #field); }, \
        [](const Scenario& s) { return format_double(s.field); }}
#define RS_INT(sec, field)                                                                           \
    Key{sec, #field, [](Scenario& s, std::string_view v, int l) { s.field = parse_int<int>(v, l, #field); }, \
        [](const Scenario& s) { return std::to_string(s.field); }}

const std::vector<Key>& keys() {
    static const std::vector<Key> table = {
        RS_INT("network", n_bs),
        RS_DOUBLE("network", inter_site_distance_m),
        RS_DOUBLE("network", ue_radius_m),
        RS_INT("network", n_embb_ue),
        RS_INT("network", n_urllc_ue),
        RS_INT("network", bandwidth_rbs),
        Key{"network", "rbg_sizes",
            [](Scenario& s, std::string_view v, int l) { s.rbg_sizes = parse_int_list(v, l, "rbg_sizes"); },
            [](const Scenario& s) {
                std::string out;
                for (std::size_t i = 0; i < s.rbg_sizes.size(); ++i) {
                    if (i) out += ',';
                    out += std::to_string(s.rbg_sizes[i]);
                }
                return out;
            }},
        RS_INT("network", subcarriers_per_rb),
        RS_DOUBLE("network", subcarrier_hz),
        RS_DOUBLE("network", tti_s),
        RS_DOUBLE("network", tx_power_dbm),
        RS_DOUBLE("network", antenna_gain_db),
        RS_DOUBLE("network", noise_density_dbm_hz),
        RS_DOUBLE("network", shadowing_sigma_db),
        Key{"network", "pathloss", [](Scenario& s, std::string_view v, int) { s.pathloss = std::string(v); },
            [](const Scenario& s) { return s.pathloss; }},
        Key{"network", "fast_fading",
            [](Scenario& s, std::string_view v, int l) { s.fast_fading = parse_bool(v, l, "fast_fading"); },
            [](const Scenario& s) { return std::string(s.fast_fading ? "true" : "false"); }},
        RS_DOUBLE("network", mec_capacity_hz),
        RS_DOUBLE("network", cycles_per_bit),
        RS_DOUBLE("network", backhaul_bps),
        RS_DOUBLE("network", cloud_queue_s),
        RS_DOUBLE("network", offload_wait_s),
        RS_INT("network", harq_max_retx),
        RS_INT("network", harq_rtt_ttis),
        RS_DOUBLE("network", harq_err_prob),
        RS_DOUBLE("traffic", embb_load_bps),
        RS_DOUBLE("traffic", urllc_load_bps),
        RS_INT("traffic", embb_packet_bytes),
        RS_INT("traffic", urllc_packet_bytes),
        RS_DOUBLE("traffic", drop_deadline_embb_s),
        RS_DOUBLE("traffic", drop_deadline_urllc_s),
        RS_DOUBLE("learning", lr_alpha),
        RS_DOUBLE("learning", gamma),
        RS_DOUBLE("learning", epsilon),
        RS_INT("learning", state_queue_cap),
        RS_INT("learning", compute_fraction_steps),
        Key{"learning", "master_seed",
            [](Scenario& s, std::string_view v, int l) { s.master_seed = parse_int<std::uint64_t>(v, l, "master_seed"); },
            [](const Scenario& s) { return std::to_string(s.master_seed); }},
        RS_DOUBLE("reward", w_embb),
        RS_DOUBLE("reward", w_urllc),
        RS_DOUBLE("reward", d_target_s),
        RS_DOUBLE("reward", drop_penalty),
        RS_INT("reward", reward_window_ttis),
    };
    return table;
}

#undef RS_DOUBLE
#undef RS_INT

constexpr std::string_view kSections[] = {"network", "traffic", "learning", "reward"};

void require(bool ok, const char* field, const char* what) {
    if (!ok) throw ValidationError(field, what);
}

}  // namespace

void Scenario::validate() const {
    require(n_bs > 0, "n_bs", "must be positive");
    require(inter_site_distance_m > 0, "inter_site_distance_m", "must be positive");
    require(ue_radius_m > 0, "ue_radius_m", "must be positive");
    require(n_embb_ue > 0, "n_embb_ue", "must be positive");
    require(n_urllc_ue > 0, "n_urllc_ue", "must be positive");
    require(bandwidth_rbs > 0, "bandwidth_rbs", "must be positive");
    require(!rbg_sizes.empty(), "rbg_sizes", "must list at least one RBG");
    require(std::all_of(rbg_sizes.begin(), rbg_sizes.end(), [](int n) { return n > 0; }), "rbg_sizes",
            "every RBG must hold at least one RB");
    require(std::accumulate(rbg_sizes.begin(), rbg_sizes.end(), 0) == bandwidth_rbs, "rbg_sizes",
            "RBG sizes must sum to bandwidth_rbs");
    require(subcarriers_per_rb > 0, "subcarriers_per_rb", "must be positive");
    require(subcarrier_hz > 0, "subcarrier_hz", "must be positive");
    require(tti_s > 0, "tti_s", "must be positive");
    require(std::isfinite(tx_power_dbm), "tx_power_dbm", "must be finite");
    require(shadowing_sigma_db >= 0, "shadowing_sigma_db", "must be non-negative");
    require(pathloss == "128.1+37.6log10(d_km)", "pathloss", "only 128.1+37.6log10(d_km) is supported");
    // Zero MEC capacity is the no-MEC (expert) configuration.
    require(mec_capacity_hz >= 0, "mec_capacity_hz", "must be non-negative");
    require(cycles_per_bit > 0, "cycles_per_bit", "must be positive");
    require(backhaul_bps > 0, "backhaul_bps", "must be positive");
    require(cloud_queue_s >= 0, "cloud_queue_s", "must be non-negative");
    require(offload_wait_s > 0, "offload_wait_s", "must be positive");
    require(harq_max_retx >= 0, "harq_max_retx", "must be non-negative");
    require(harq_rtt_ttis > 0, "harq_rtt_ttis", "must be positive");
    require(harq_err_prob >= 0 && harq_err_prob <= 1, "harq_err_prob", "must lie in [0,1]");
    require(embb_load_bps >= 0, "embb_load_bps", "must be non-negative");
    require(urllc_load_bps >= 0, "urllc_load_bps", "must be non-negative");
    require(embb_packet_bytes > 0, "embb_packet_bytes", "must be positive");
    require(urllc_packet_bytes > 0, "urllc_packet_bytes", "must be positive");
    require(drop_deadline_embb_s > 0, "drop_deadline_embb_s", "must be positive");
    require(drop_deadline_urllc_s > 0, "drop_deadline_urllc_s", "must be positive");
    require(lr_alpha > 0 && lr_alpha < 1, "lr_alpha", "must lie in (0,1)");
    require(gamma > 0 && gamma < 1, "gamma", "must lie in (0,1)");
    require(epsilon >= 0 && epsilon <= 1, "epsilon", "must lie in [0,1]");
    require(state_queue_cap > 0, "state_queue_cap", "must be positive");
    require(compute_fraction_steps > 0, "compute_fraction_steps", "must be positive");
    require(w_embb >= 0, "w_embb", "must be non-negative");
    require(w_urllc >= 0, "w_urllc", "must be non-negative");
    require(d_target_s > 0, "d_target_s", "must be positive");
    require(drop_penalty >= 0, "drop_penalty", "must be non-negative");
    require(reward_window_ttis > 0, "reward_window_ttis", "must be positive");
}

Scenario parse_scenario(std::string_view text) {
    Scenario s;
    bool offload_set = false;
    std::string_view section;
    std::vector<std::string_view> seen;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            auto name = trim(line.substr(1, line.size() - 2));
            if (std::find(std::begin(kSections), std::end(kSections), name) == std::end(kSections))
                throw ParseError(line_no, "unknown section [" + std::string(name) + "]");
            section = *std::find(std::begin(kSections), std::end(kSections), name);
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "missing key");

        auto it = std::find_if(keys().begin(), keys().end(), [&](const Key& k) {
            return k.name == key && (section.empty() || k.section == section);
        });
        if (it == keys().end()) {
            std::string where = section.empty() ? "" : " in [" + std::string(section) + "]";
            throw ParseError(line_no, "unknown key '" + std::string(key) + "'" + where);
        }
        if (std::find(seen.begin(), seen.end(), it->name) != seen.end())
            throw ParseError(line_no, "duplicate key '" + std::string(key) + "'");
        seen.push_back(it->name);
        it->set(s, value, line_no);
        if (it->name == "offload_wait_s") offload_set = true;
    }

    // The offload threshold follows the URLLC target delay unless given.
    if (!offload_set) s.offload_wait_s = s.d_target_s;
    s.validate();
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string render_scenario(const Scenario& s) {
    std::string out;
    for (auto sec : kSections) {
        if (!out.empty()) out += '\n';
        out += '[';
        out += sec;
        out += "]\n";
        for (const auto& k : keys()) {
            if (k.section != sec) continue;
            out += k.name;
            out += " = ";
            out += k.get(s);
            out += '\n';
        }
    }
    return out;
}

std::uint64_t scenario_hash(const Scenario& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : render_scenario(s)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_string(const AllocationAction& a) {
    std::string out = "(" + std::to_string(a.r_embb) + "," + std::to_string(a.r_urllc);
    if (a.compute) out += "," + std::to_string(a.compute->embb) + "," + std::to_string(a.compute->urllc);
    return out + ")";
}

ActionSpace::ActionSpace(ActionSpaceDescriptor d) : desc_(d) {
    const int n = std::max(desc_.n_rbgs, 0);
    for (int r = 0; r <= n; ++r) {
        if (!desc_.compute_steps) {
            actions_.push_back({r, n - r, std::nullopt});
            continue;
        }
        const int k = *desc_.compute_steps;
        for (int c = 0; c <= k; ++c) actions_.push_back({r, n - r, ComputeSplit{c, k - c}});
    }
}

bool ActionSpace::contains(const AllocationAction& a) const noexcept {
    if (a.r_embb < 0 || a.r_urllc < 0 || a.r_embb + a.r_urllc != desc_.n_rbgs) return false;
    if (a.joint() != desc_.joint()) return false;
    if (a.compute) {
        const int k = *desc_.compute_steps;
        return a.compute->embb >= 0 && a.compute->urllc >= 0 && a.compute->embb + a.compute->urllc == k;
    }
    return true;
}

std::size_t ActionSpace::index_of(const AllocationAction& a) const {
    if (!contains(a)) throw ContractViolation("action " + to_string(a) + " is not in the action space");
    if (!a.compute) return static_cast<std::size_t>(a.r_embb);
    return static_cast<std::size_t>(a.r_embb * (*desc_.compute_steps + 1) + a.compute->embb);
}

ActionSpaceDescriptor action_space_descriptor(const Scenario& s, bool joint) {
    ActionSpaceDescriptor d{s.n_rbgs(), std::nullopt};
    if (joint) d.compute_steps = s.compute_fraction_steps;
    return d;
}

std::vector<AllocationAction> action_space(const Scenario& s, bool joint) {
    return ActionSpace(action_space_descriptor(s, joint)).actions();
}

}  // namespace ranslice
