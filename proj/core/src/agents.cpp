#include "ranslice/agents.hpp"

#include <algorithm>

#include "ranslice/errors.hpp"

namespace ranslice {

SliceState clip_state(std::size_t embb_len, std::size_t urllc_len, int cap) noexcept {
    const auto c = static_cast<std::size_t>(cap);
    return {static_cast<int>(std::min(embb_len, c)), static_cast<int>(std::min(urllc_len, c))};
}

std::string_view to_string(QTableKind k) noexcept { return k == QTableKind::Expert ? "expert" : "learner"; }

std::string_view to_string(TransferMode m) noexcept {
    switch (m) {
        case TransferMode::None: return "none";
        case TransferMode::Additive: return "additive";
        case TransferMode::InitOnly: return "init-only";
    }
    return "?";
}

AgentConfig AgentConfig::from(const Scenario& s, TransferMode transfer) {
    return {s.lr_alpha, s.gamma, s.epsilon, transfer};
}

QTable::QTable(QTableKind kind, ActionSpaceDescriptor desc, std::uint64_t scenario_hash)
    : kind_(kind), space_(desc), scenario_hash_(scenario_hash) {
    if ((kind == QTableKind::Expert) == desc.joint())
        throw ContractViolation("QTable: expert tables are radio-only, learner tables are joint");
}

double QTable::value(const SliceState& s, std::size_t action) const {
    auto it = rows_.find(s);
    return it == rows_.end() ? 0.0 : it->second.values[action];
}

bool QTable::contains(const SliceState& s, std::size_t action) const {
    auto it = rows_.find(s);
    return it != rows_.end() && it->second.stored[action];
}

void QTable::set(const SliceState& s, std::size_t action, double v) {
    if (action >= space_.size()) throw ContractViolation("QTable::set: action index out of range");
    if (s.q_embb < 0 || s.q_urllc < 0) throw ContractViolation("QTable::set: negative state component");
    auto [it, inserted] = rows_.try_emplace(s);
    auto& row = it->second;
    if (inserted) {
        row.values.assign(space_.size(), 0.0);
        row.stored.assign(space_.size(), 0);
    }
    row.values[action] = v;
    if (!row.stored[action]) {
        row.stored[action] = 1;
        ++stored_;
    }
}

double QTable::max_value(const SliceState& s) const {
    auto it = rows_.find(s);
    if (it == rows_.end()) return 0.0;
    return *std::max_element(it->second.values.begin(), it->second.values.end());
}

std::size_t QTable::argmax(const SliceState& s) const {
    auto it = rows_.find(s);
    if (it == rows_.end()) return 0;
    const auto& v = it->second.values;
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::vector<QTable::Entry> QTable::entries() const {
    std::vector<Entry> out;
    out.reserve(stored_);
    for (const auto& [state, row] : rows_)
        for (std::size_t a = 0; a < row.values.size(); ++a)
            if (row.stored[a]) out.push_back({state, a, row.values[a]});
    return out;
}

bool QTable::operator==(const QTable& o) const {
    if (kind_ != o.kind_ || descriptor() != o.descriptor() || scenario_hash_ != o.scenario_hash_) return false;
    const auto a = entries();
    const auto b = o.entries();
    return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](const Entry& x, const Entry& y) {
        return x.state == y.state && x.action == y.action && x.value == y.value;
    });
}

std::size_t select_action(const QTable& q, const SliceState& s, const AgentConfig& cfg, Rng& rng) {
    const auto n = q.space().size();
    if (n == 0) throw ContractViolation("select_action: empty action space");
    if (uniform01(rng) < cfg.epsilon) {
        const auto pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
        return std::min(pick, n - 1);
    }
    return q.argmax(s);
}

namespace {

double td_step(double q_old, double r, double max_next, const AgentConfig& cfg) {
    return q_old + cfg.alpha * (r + cfg.gamma * max_next - q_old);
}

}  // namespace

double q_update(QTable& q, const SliceState& s, std::size_t action, double r, const SliceState& s_next,
                const AgentConfig& cfg) {
    const double q_new = td_step(q.value(s, action), r, q.max_value(s_next), cfg);
    q.set(s, action, q_new);
    return q_new;
}

AllocationAction map_action(const AllocationAction& a) {
    if (!a.joint()) throw ContractViolation("map_action: expects a joint radio+compute action");
    return {a.r_embb, a.r_urllc, std::nullopt};
}

double transferred_value(const QTable& expert, const SliceState& s, const AllocationAction& learner_action) {
    return expert.value(map_state(s), map_action(learner_action));
}

double transfer_update(QTable& q, const QTable& expert, const SliceState& s, std::size_t action, double r,
                       const SliceState& s_next, const AgentConfig& cfg) {
    if (expert.kind() != QTableKind::Expert) throw ConfigError("transfer_update: knowledge source is not an expert table");
    if (expert.descriptor().n_rbgs != q.descriptor().n_rbgs)
        throw ConfigError("transfer_update: expert and learner disagree on the RBG count");
    const double q_t = transferred_value(expert, s, q.space()[action]);
    switch (cfg.transfer) {
        case TransferMode::None:
            throw ContractViolation("transfer_update: transfer mode is None");
        case TransferMode::InitOnly:
            if (!q.contains(s, action)) q.set(s, action, q_t);
            return q_update(q, s, action, r, s_next, cfg);
        case TransferMode::Additive:
            break;
    }
    const double q_new = q_t + td_step(q.value(s, action), r, q.max_value(s_next), cfg);
    q.set(s, action, q_new);
    return q_new;
}

}  // namespace ranslice
