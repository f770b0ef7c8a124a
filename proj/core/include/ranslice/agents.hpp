#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "ranslice/rng.hpp"
#include "ranslice/scenario.hpp"

namespace ranslice {

// Queue lengths of the two slices, clipped to the state cap.
struct SliceState {
    int q_embb = 0;
    int q_urllc = 0;
    auto operator<=>(const SliceState&) const = default;
};

SliceState clip_state(std::size_t embb_len, std::size_t urllc_len, int cap) noexcept;

enum class QTableKind { Expert, Learner };
enum class TransferMode { None, Additive, InitOnly };

std::string_view to_string(QTableKind k) noexcept;
std::string_view to_string(TransferMode m) noexcept;

struct AgentConfig {
    double alpha = 0.9;
    double gamma = 0.5;
    double epsilon = 0.05;
    TransferMode transfer = TransferMode::None;

    static AgentConfig from(const Scenario& s, TransferMode transfer = TransferMode::None);
};

// State-action values. Entries that were never written read as 0 and are
// not stored. Expert tables have a radio-only action space, learner tables
// a joint one.
class QTable {
public:
    QTable(QTableKind kind, ActionSpaceDescriptor desc, std::uint64_t scenario_hash = 0);

    QTableKind kind() const noexcept { return kind_; }
    const ActionSpace& space() const noexcept { return space_; }
    const ActionSpaceDescriptor& descriptor() const noexcept { return space_.descriptor(); }
    std::uint64_t scenario_hash() const noexcept { return scenario_hash_; }

    double value(const SliceState& s, std::size_t action) const;
    double value(const SliceState& s, const AllocationAction& a) const { return value(s, space_.index_of(a)); }
    bool contains(const SliceState& s, std::size_t action) const;
    void set(const SliceState& s, std::size_t action, double v);
    void set(const SliceState& s, const AllocationAction& a, double v) { set(s, space_.index_of(a), v); }

    double max_value(const SliceState& s) const;
    // First action (in action-space order) attaining the maximum.
    std::size_t argmax(const SliceState& s) const;

    // Number of stored entries.
    std::size_t size() const noexcept { return stored_; }

    struct Entry {
        SliceState state;
        std::size_t action;
        double value;
    };
    // Stored entries ordered by (state, action index).
    std::vector<Entry> entries() const;

    bool operator==(const QTable& o) const;

private:
    struct Row {
        std::vector<double> values;
        std::vector<std::uint8_t> stored;
    };

    QTableKind kind_;
    ActionSpace space_;
    std::uint64_t scenario_hash_;
    std::map<SliceState, Row> rows_;
    std::size_t stored_ = 0;
};

// Epsilon-greedy. Draws one uniform to decide exploration and, when
// exploring, one more to pick the action, so RNG consumption depends only
// on the outcome of the first draw.
std::size_t select_action(const QTable& q, const SliceState& s, const AgentConfig& cfg, Rng& rng);

// Q <- Q + alpha (r + gamma max_a' Q(s', a') - Q); returns the new value.
double q_update(QTable& q, const SliceState& s, std::size_t action, double r, const SliceState& s_next,
                const AgentConfig& cfg);

// The expert and learner share the state definition.
constexpr SliceState map_state(const SliceState& s) noexcept { return s; }

// Drops the compute split. Throws ContractViolation for radio-only input.
AllocationAction map_action(const AllocationAction& learner_action);

// Expert value of the mapped state-action pair, 0 if the expert never
// stored it.
double transferred_value(const QTable& expert, const SliceState& s, const AllocationAction& learner_action);

// Additive: Q <- Q_T + Q + alpha (r + gamma max Q(s') - Q).
// InitOnly: Q is seeded with Q_T on first visit, then the plain update.
// Throws ConfigError if `expert` is not an expert table or its RBG count
// differs; ContractViolation if cfg.transfer is None.
double transfer_update(QTable& q, const QTable& expert, const SliceState& s, std::size_t action, double r,
                       const SliceState& s_next, const AgentConfig& cfg);

// Text persistence, see README for the format.
void save_qtable(const QTable& q, std::ostream& sink);

struct QTableExpectation {
    std::optional<QTableKind> kind;
    std::optional<ActionSpaceDescriptor> descriptor;
};
QTable load_qtable(std::istream& source, const QTableExpectation& expect = {});

void save_qtable_file(const QTable& q, const std::string& path);
QTable load_qtable_file(const std::string& path, const QTableExpectation& expect = {});

}  // namespace ranslice
