#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ranslice {

enum class SliceId : int { Embb = 0, Urllc = 1 };
inline constexpr int kNumSlices = 2;

constexpr int index_of(SliceId s) noexcept { return static_cast<int>(s); }
std::string_view to_string(SliceId s) noexcept;

// Complete, immutable experiment configuration. Defaults reproduce the
// reference network: 5 cells, 100 RBs in 13 RBGs, 3 GHz MEC per cell,
// 2 Mbps eMBB + 2 Mbps URLLC offered load.
struct Scenario {
    // [network]
    int n_bs = 5;
    double inter_site_distance_m = 500.0;
    double ue_radius_m = 250.0;
    int n_embb_ue = 5;
    int n_urllc_ue = 10;
    int bandwidth_rbs = 100;
    std::vector<int> rbg_sizes = {8, 8, 8, 8, 8, 8, 8, 8, 8, 8, 8, 8, 4};
    int subcarriers_per_rb = 12;
    double subcarrier_hz = 15000.0;
    double tti_s = 1.0 / 7000.0;  // 2 OFDM symbols of a 1 ms, 14-symbol slot
    double tx_power_dbm = 40.0;   // total per BS, split evenly over RBs
    double antenna_gain_db = 15.0;
    double noise_density_dbm_hz = -174.0;
    double shadowing_sigma_db = 8.0;
    std::string pathloss = "128.1+37.6log10(d_km)";
    bool fast_fading = true;
    double mec_capacity_hz = 3e9;
    double cycles_per_bit = 200.0;
    double backhaul_bps = 1e7;
    double cloud_queue_s = 1e-3;
    double offload_wait_s = 2e-3;
    int harq_max_retx = 1;
    int harq_rtt_ttis = 4;
    double harq_err_prob = 0.1;

    // [traffic]
    double embb_load_bps = 2e6;
    double urllc_load_bps = 2e6;
    int embb_packet_bytes = 100;
    int urllc_packet_bytes = 50;
    double drop_deadline_embb_s = 5e-2;
    double drop_deadline_urllc_s = 1e-2;

    // [learning]
    double lr_alpha = 0.9;
    double gamma = 0.5;
    double epsilon = 0.05;
    int state_queue_cap = 10;
    int compute_fraction_steps = 10;
    std::uint64_t master_seed = 1;

    // [reward]
    double w_embb = 1.0;
    double w_urllc = 1.0;
    double d_target_s = 2e-3;
    double drop_penalty = 5.0;
    int reward_window_ttis = 10;

    int n_rbgs() const noexcept { return static_cast<int>(rbg_sizes.size()); }
    int n_ue(SliceId s) const noexcept { return s == SliceId::Embb ? n_embb_ue : n_urllc_ue; }
    double packet_bits(SliceId s) const noexcept {
        return 8.0 * (s == SliceId::Embb ? embb_packet_bytes : urllc_packet_bytes);
    }
    double load_bps(SliceId s) const noexcept { return s == SliceId::Embb ? embb_load_bps : urllc_load_bps; }
    double drop_deadline_s(SliceId s) const noexcept {
        return s == SliceId::Embb ? drop_deadline_embb_s : drop_deadline_urllc_s;
    }
    double rb_bandwidth_hz() const noexcept { return subcarriers_per_rb * subcarrier_hz; }

    // Throws ValidationError naming the first offending field.
    void validate() const;

    bool operator==(const Scenario&) const = default;
};

// Sectioned "key = value" document. Keys before the first section header
// are resolved by name; keys inside a section must belong to it.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);

// Canonical text form; parse_scenario(render_scenario(s)) == s.
std::string render_scenario(const Scenario& s);

// FNV-1a over the canonical rendering.
std::uint64_t scenario_hash(const Scenario& s);

// Inter-slice split. Compute shares are in units of 1/compute_steps.
struct ComputeSplit {
    int embb = 0;
    int urllc = 0;
    auto operator<=>(const ComputeSplit&) const = default;
};

struct AllocationAction {
    int r_embb = 0;
    int r_urllc = 0;
    std::optional<ComputeSplit> compute;

    bool joint() const noexcept { return compute.has_value(); }
    auto operator<=>(const AllocationAction&) const = default;
};

std::string to_string(const AllocationAction& a);

// Shape of an action space: RBG count and compute granularity (absent for
// the radio-only expert).
struct ActionSpaceDescriptor {
    int n_rbgs = 0;
    std::optional<int> compute_steps;

    bool joint() const noexcept { return compute_steps.has_value(); }
    auto operator<=>(const ActionSpaceDescriptor&) const = default;
};

// Ordered list of actions with O(1) index<->action mapping. Ordering is
// lexicographic by (r_embb, c_embb).
class ActionSpace {
public:
    explicit ActionSpace(ActionSpaceDescriptor d);

    const ActionSpaceDescriptor& descriptor() const noexcept { return desc_; }
    std::size_t size() const noexcept { return actions_.size(); }
    const AllocationAction& operator[](std::size_t i) const { return actions_[i]; }
    const std::vector<AllocationAction>& actions() const noexcept { return actions_; }

    // Throws ContractViolation when the action is not a member.
    std::size_t index_of(const AllocationAction& a) const;
    bool contains(const AllocationAction& a) const noexcept;

private:
    ActionSpaceDescriptor desc_;
    std::vector<AllocationAction> actions_;
};

ActionSpaceDescriptor action_space_descriptor(const Scenario& s, bool joint);
std::vector<AllocationAction> action_space(const Scenario& s, bool joint);

}  // namespace ranslice
