#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "ranslice/agents.hpp"
#include "ranslice/errors.hpp"

namespace ranslice {

namespace {

constexpr std::string_view kMagic = "QTABLE v1";

std::string shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(s.substr(pos, next == std::string_view::npos ? s.npos : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

std::string_view field_value(std::string_view token, std::string_view key, int line) {
    if (token.substr(0, key.size()) != key || token.size() <= key.size() || token[key.size()] != '=')
        throw LoadError(LoadError::Kind::Malformed, "line " + std::to_string(line) + ": expected '" +
                                                        std::string(key) + "=...'");
    return token.substr(key.size() + 1);
}

}  // namespace

void save_qtable(const QTable& q, std::ostream& sink) {
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(q.scenario_hash()));
    sink << kMagic << " kind=" << to_string(q.kind()) << " scenario=" << hash << '\n';
    const auto& d = q.descriptor();
    sink << "rbgs=" << d.n_rbgs << " csteps=";
    if (d.compute_steps)
        sink << *d.compute_steps;
    else
        sink << "none";
    sink << '\n';
    for (const auto& e : q.entries()) {
        const auto& a = q.space()[e.action];
        sink << e.state.q_embb << ',' << e.state.q_urllc << ';' << a.r_embb << ',' << a.r_urllc;
        if (a.compute) sink << ',' << a.compute->embb << ',' << a.compute->urllc;
        sink << ';' << shortest(e.value) << '\n';
    }
}

QTable load_qtable(std::istream& source, const QTableExpectation& expect) {
    std::string line;
    if (!std::getline(source, line)) throw LoadError(LoadError::Kind::Malformed, "empty Q-table stream");
    if (line.rfind("QTABLE ", 0) != 0) throw LoadError(LoadError::Kind::Malformed, "missing QTABLE header");
    const auto head = split(line, ' ');
    if (head.size() != 4) throw LoadError(LoadError::Kind::Malformed, "line 1: malformed header");
    if (head[1] != "v1") throw LoadError(LoadError::Kind::Version, "unsupported Q-table version '" + std::string(head[1]) + "'");

    QTableKind kind;
    const auto kind_s = field_value(head[2], "kind", 1);
    if (kind_s == "expert")
        kind = QTableKind::Expert;
    else if (kind_s == "learner")
        kind = QTableKind::Learner;
    else
        throw LoadError(LoadError::Kind::Malformed, "line 1: unknown kind '" + std::string(kind_s) + "'");

    const auto hash_s = field_value(head[3], "scenario", 1);
    std::uint64_t hash = 0;
    {
        auto [ptr, ec] = std::from_chars(hash_s.data(), hash_s.data() + hash_s.size(), hash, 16);
        if (ec != std::errc{} || ptr != hash_s.data() + hash_s.size() || hash_s.size() != 16)
            throw LoadError(LoadError::Kind::Malformed, "line 1: scenario hash must be 16 hex digits");
    }

    if (!std::getline(source, line)) throw LoadError(LoadError::Kind::Malformed, "missing action-space line");
    const auto desc_tokens = split(line, ' ');
    if (desc_tokens.size() != 2) throw LoadError(LoadError::Kind::Malformed, "line 2: malformed action-space line");
    ActionSpaceDescriptor desc;
    if (!parse_number(field_value(desc_tokens[0], "rbgs", 2), desc.n_rbgs) || desc.n_rbgs < 0)
        throw LoadError(LoadError::Kind::Malformed, "line 2: bad rbgs");
    const auto csteps = field_value(desc_tokens[1], "csteps", 2);
    if (csteps != "none") {
        int k = 0;
        if (!parse_number(csteps, k) || k <= 0) throw LoadError(LoadError::Kind::Malformed, "line 2: bad csteps");
        desc.compute_steps = k;
    }
    if ((kind == QTableKind::Expert) == desc.joint())
        throw LoadError(LoadError::Kind::Metadata, "kind does not match the action-space arity");

    if (expect.kind && *expect.kind != kind)
        throw LoadError(LoadError::Kind::Arity, "expected a " + std::string(to_string(*expect.kind)) +
                                                    " table, found a " + std::string(to_string(kind)) + " table");
    if (expect.descriptor && *expect.descriptor != desc)
        throw LoadError(LoadError::Kind::Metadata, "action-space descriptor does not match");

    QTable q(kind, desc, hash);
    const std::size_t arity = desc.joint() ? 4 : 2;
    int line_no = 2;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto where = "line " + std::to_string(line_no) + ": ";
        const auto parts = split(line, ';');
        if (parts.size() != 3) throw LoadError(LoadError::Kind::Malformed, where + "expected state;action;value");
        const auto st = split(parts[0], ',');
        const auto ac = split(parts[1], ',');
        SliceState s;
        if (st.size() != 2 || !parse_number(st[0], s.q_embb) || !parse_number(st[1], s.q_urllc) || s.q_embb < 0 ||
            s.q_urllc < 0)
            throw LoadError(LoadError::Kind::Malformed, where + "bad state");
        if (ac.size() != arity)
            throw LoadError(LoadError::Kind::Arity, where + "action has " + std::to_string(ac.size()) +
                                                        " components, expected " + std::to_string(arity));
        std::vector<int> comp(ac.size());
        for (std::size_t i = 0; i < ac.size(); ++i)
            if (!parse_number(ac[i], comp[i])) throw LoadError(LoadError::Kind::Malformed, where + "bad action");
        AllocationAction a{comp[0], comp[1], std::nullopt};
        if (arity == 4) a.compute = ComputeSplit{comp[2], comp[3]};
        if (!q.space().contains(a)) throw LoadError(LoadError::Kind::Malformed, where + "action outside the action space");
        double v = 0.0;
        if (!parse_number(parts[2], v)) throw LoadError(LoadError::Kind::Malformed, where + "bad value");
        const auto idx = q.space().index_of(a);
        if (q.contains(s, idx)) throw LoadError(LoadError::Kind::Malformed, where + "duplicate entry");
        q.set(s, idx, v);
    }
    return q;
}

void save_qtable_file(const QTable& q, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write Q-table '" + path + "'");
    save_qtable(q, out);
    if (!out) throw std::runtime_error("error writing Q-table '" + path + "'");
}

QTable load_qtable_file(const std::string& path, const QTableExpectation& expect) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open Q-table '" + path + "'");
    return load_qtable(in, expect);
}

}  // namespace ranslice
