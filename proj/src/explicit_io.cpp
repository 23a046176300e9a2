#include "sairod/explicit_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sairod {

using nlohmann::json;

namespace {

json params_to_json(const Parameters& p) {
    return json{{"population", p.population},
                {"capacity", p.hospital_capacity},
                {"omega", p.omega},
                {"beta", p.beta},
                {"delta", p.delta},
                {"mu", p.mu},
                {"alpha", p.alpha},
                {"sigma", p.sigma},
                {"xi", p.xi},
                {"gamma", p.gamma},
                {"psi", p.psi},
                {"iota", p.iota},
                {"upsilon", p.upsilon}};
}

Parameters params_from_json(const json& j) {
    Parameters p;
    p.population = j.at("population").get<int>();
    p.hospital_capacity = j.at("capacity").get<int>();
    p.omega = j.at("omega").get<double>();
    p.beta = j.at("beta").get<double>();
    p.delta = j.at("delta").get<double>();
    p.mu = j.at("mu").get<double>();
    p.alpha = j.at("alpha").get<double>();
    p.sigma = j.at("sigma").get<double>();
    p.xi = j.at("xi").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.psi = j.at("psi").get<double>();
    p.iota = j.at("iota").get<double>();
    p.upsilon = j.at("upsilon").get<double>();
    return p;
}

std::string states_text(const StateSpace& space, bool prism) {
    std::ostringstream os;
    const bool full = space.kind == ModelKind::full;
    if (prism) {
        os << (full ? "(S,A,I,R,O,D,Q,Ra)" : "(S,A,I,R,O,D)") << '\n';
        for (std::size_t i = 0; i < space.size(); ++i) {
            const StateVector& v = space.states[i];
            os << i << ":(" << v.S << ',' << v.A << ',' << v.I << ',' << v.R << ',' << v.O
               << ',' << v.D;
            if (full) os << ',' << v.Q << ',' << v.Ra;
            os << ")\n";
        }
    } else {
        for (const StateVector& v : space.states) {
            os << v.S << ' ' << v.A << ' ' << v.I << ' ' << v.R << ' ' << v.O << ' ' << v.D;
            if (full) os << ' ' << v.Q << ' ' << v.Ra;
            os << '\n';
        }
    }
    return os.str();
}

std::string labels_text(const LabelSet& labels, std::size_t num_states) {
    std::ostringstream os;
    for (std::size_t i = 0; i < labels.names.size(); ++i) {
        if (i) os << ' ';
        os << i << "=\"" << labels.names[i] << '"';
    }
    os << '\n';
    // per-state label lists, in state order
    std::vector<std::vector<std::size_t>> per_state(num_states);
    for (std::size_t l = 0; l < labels.members.size(); ++l)
        for (StateIndex s : labels.members[l]) per_state[s].push_back(l);
    for (std::size_t s = 0; s < num_states; ++s) {
        if (per_state[s].empty()) continue;
        os << s << ':';
        for (std::size_t l : per_state[s]) os << ' ' << l;
        os << '\n';
    }
    return os.str();
}

LabelSet labels_from_text(const std::filesystem::path& file, std::istream& in,
                          std::size_t num_states) {
    LabelSet labels;
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw ParseError(file, 1, "missing label declaration line");
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && line[pos] == ' ') ++pos;
        if (pos >= line.size()) break;
        std::size_t eq = line.find('=', pos);
        if (eq == std::string::npos) throw ParseError(file, 1, "malformed label declaration");
        std::size_t open = line.find('"', eq);
        std::size_t close = line.find('"', open + 1);
        if (open == std::string::npos || close == std::string::npos)
            throw ParseError(file, 1, "malformed label name");
        labels.names.push_back(line.substr(open + 1, close - open - 1));
        pos = close + 1;
    }
    labels.members.resize(labels.names.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head.empty() || head.back() != ':')
            throw ParseError(file, line_no, "expected 'state:' prefix");
        const std::size_t state = std::stoull(head.substr(0, head.size() - 1));
        if (state >= num_states) throw ParseError(file, line_no, "state index out of range");
        std::size_t label;
        while (ls >> label) {
            if (label >= labels.names.size())
                throw ParseError(file, line_no, "label index out of range");
            labels.members[label].push_back(static_cast<StateIndex>(state));
        }
    }
    for (auto& m : labels.members) std::sort(m.begin(), m.end());
    return labels;
}

StateSpace states_from_text(const std::filesystem::path& file, std::istream& in,
                            const Parameters& params, ModelKind kind) {
    StateSpace space;
    space.kind = kind;
    space.params = params;
    std::string line;
    std::size_t line_no = 0;
    const int width = kind == ModelKind::full ? 8 : 6;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        int c[8] = {0, 0, 0, 0, 0, 0, 0, 0};
        for (int i = 0; i < width; ++i)
            if (!(ls >> c[i])) throw ParseError(file, line_no, "expected integer tuple");
        StateVector v{c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]};
        try {
            validate_state(v, params, kind);
        } catch (const std::domain_error& e) {
            throw ParseError(file, line_no, e.what());
        }
        space.states.push_back(v);
    }
    return space;
}

void check_row_masses(const std::filesystem::path& file,
                      const std::vector<std::vector<std::pair<StateIndex, double>>>& rows,
                      bool allow_empty) {
    for (std::size_t s = 0; s < rows.size(); ++s) {
        if (rows[s].empty()) {
            if (allow_empty) continue;
            std::ostringstream os;
            os << "state " << s << " has no outgoing transitions in " << file.string();
            throw NumericError(os.str());
        }
        double mass = 0.0;
        for (const auto& [dst, p] : rows[s]) mass += p;
        if (std::abs(mass - 1.0) > kRowMassTolerance) {
            std::ostringstream os;
            os << "row " << s << " of " << file.string() << " sums to " << mass
               << "; normalization failure";
            throw NumericError(os.str());
        }
    }
}

}  // namespace

ParseError::ParseError(const std::filesystem::path& file, std::size_t line,
                       const std::string& what)
    : IoError(file.string() + ":" + std::to_string(line) + ": " + what) {}

void LabelSet::add(std::string name, std::vector<StateIndex> indices) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    names.push_back(std::move(name));
    members.push_back(std::move(indices));
}

LabelSet default_labels(const StateSpace& space, std::span<const StateIndex> initial,
                        double deaths_fraction) {
    LabelSet labels;
    labels.add("init", {initial.begin(), initial.end()});

    std::vector<StateIndex> full, deaths, absorbed;
    const double threshold = deaths_fraction * space.params.population;
    for (StateIndex i = 0; i < space.size(); ++i) {
        const StateVector& v = space.states[i];
        if (v.O == space.params.hospital_capacity) full.push_back(i);
        if (v.D >= threshold) deaths.push_back(i);
        if (v.A == 0 && v.I == 0 && v.O == 0 && v.Q == 0) absorbed.push_back(i);
    }
    labels.add("hospital_full", std::move(full));
    char buf[32];
    std::snprintf(buf, sizeof buf, "deaths_ge_%g", deaths_fraction);
    labels.add(buf, std::move(deaths));
    labels.add("all_absorbed", std::move(absorbed));
    return labels;
}

std::string format_probability(double p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", p);
    return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename to " + path.string() + " failed: " + ec.message());
}

void export_dtmc(const Dtmc& dtmc, const LabelSet& labels,
                 const std::filesystem::path& base, const ExportOptions& options) {
    if (!dtmc.space || dtmc.size() == 0) throw IoError("cannot export an empty model");
    const StateSpace& space = *dtmc.space;

    std::ostringstream tra;
    if (options.prism_headers)
        tra << space.size() << ' ' << dtmc.targets.size() << '\n';
    for (std::size_t s = 0; s < space.size(); ++s)
        for (std::uint64_t e = dtmc.offsets[s]; e < dtmc.offsets[s + 1]; ++e)
            tra << s << ' ' << dtmc.targets[e] << ' ' << format_probability(dtmc.probs[e])
                << '\n';

    json header{{"format_version", 1},
                {"type", "dtmc"},
                {"model", to_string(space.kind)},
                {"parameters", params_to_json(space.params)},
                {"actions", json::array()}};
    for (const Action& a : space.actions)
        header["actions"].push_back({a.meetings, a.tests});

    write_file_atomic(base.string() + ".sta", states_text(space, options.prism_headers));
    write_file_atomic(base.string() + ".tra", tra.str());
    write_file_atomic(base.string() + ".lab", labels_text(labels, space.size()));
    write_file_atomic(base.string() + ".json", header.dump(2) + "\n");
}

void export_mdp(const BuiltModel& model, const LabelSet& labels,
                const std::filesystem::path& base, const ExportOptions& options) {
    if (model.space.size() == 0) throw IoError("cannot export an empty model");
    const StateSpace& space = model.space;

    std::ostringstream tra;
    if (options.prism_headers)
        tra << space.size() << ' ' << space.size() * model.table.num_actions << ' '
            << model.table.entries() << '\n';
    for (std::size_t s = 0; s < space.size(); ++s)
        for (std::size_t a = 0; a < model.table.num_actions; ++a) {
            auto targets = model.table.row_targets(s, a);
            auto probs = model.table.row_probs(s, a);
            for (std::size_t e = 0; e < targets.size(); ++e)
                tra << s << ' ' << a << ' ' << targets[e] << ' '
                    << format_probability(probs[e]) << '\n';
        }

    json header{{"format_version", 1},
                {"type", "mdp"},
                {"model", to_string(space.kind)},
                {"parameters", params_to_json(space.params)},
                {"actions", json::array()}};
    for (const Action& a : space.actions)
        header["actions"].push_back({a.meetings, a.tests});

    write_file_atomic(base.string() + ".sta", states_text(space, options.prism_headers));
    write_file_atomic(base.string() + ".tra", tra.str());
    write_file_atomic(base.string() + ".lab", labels_text(labels, space.size()));
    write_file_atomic(base.string() + ".json", header.dump(2) + "\n");
}

namespace {

json read_header(const std::filesystem::path& base, std::string expected_type,
                 Parameters& params, ModelKind& kind, std::vector<Action>& actions) {
    std::ifstream in(base.string() + ".json");
    if (!in) throw IoError("cannot open " + base.string() + ".json");
    json header = json::parse(in, nullptr, true);
    if (header.at("type").get<std::string>() != expected_type)
        throw IoError(base.string() + ".json does not describe a " + expected_type);
    params = params_from_json(header.at("parameters"));
    kind = model_kind_from_string(header.at("model").get<std::string>());
    actions.clear();
    for (const auto& a : header.at("actions"))
        actions.push_back(Action{a.at(0).get<int>(), a.at(1).get<int>()});
    return header;
}

StateSpace read_states(const std::filesystem::path& base, const Parameters& params,
                       ModelKind kind) {
    const std::filesystem::path file = base.string() + ".sta";
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    return states_from_text(file, in, params, kind);
}

LabelSet read_labels(const std::filesystem::path& base, std::size_t num_states) {
    const std::filesystem::path file = base.string() + ".lab";
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    return labels_from_text(file, in, num_states);
}

}  // namespace

ImportedDtmc import_dtmc(const std::filesystem::path& base) {
    Parameters params;
    ModelKind kind{};
    std::vector<Action> actions;
    read_header(base, "dtmc", params, kind, actions);

    ImportedDtmc result;
    auto space = std::make_shared<StateSpace>(read_states(base, params, kind));
    space->actions = actions;

    const std::filesystem::path file = base.string() + ".tra";
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    std::vector<std::vector<std::pair<StateIndex, double>>> rows(space->size());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::size_t src, dst;
        double p;
        if (!(ls >> src >> dst >> p)) throw ParseError(file, line_no, "expected 'src dst prob'");
        if (src >= space->size() || dst >= space->size())
            throw ParseError(file, line_no, "state index out of range");
        rows[src].emplace_back(static_cast<StateIndex>(dst), p);
    }
    check_row_masses(file, rows, false);

    Dtmc& dtmc = result.dtmc;
    dtmc.space = space;
    dtmc.offsets.assign(space->size() + 1, 0);
    for (std::size_t s = 0; s < rows.size(); ++s) {
        std::sort(rows[s].begin(), rows[s].end());
        dtmc.offsets[s + 1] = dtmc.offsets[s] + rows[s].size();
    }
    for (auto& row : rows)
        for (const auto& [dst, p] : row) {
            dtmc.targets.push_back(dst);
            dtmc.probs.push_back(p);
        }
    dtmc.build_transpose();
    result.labels = read_labels(base, space->size());
    return result;
}

ImportedMdp import_mdp(const std::filesystem::path& base) {
    Parameters params;
    ModelKind kind{};
    std::vector<Action> actions;
    read_header(base, "mdp", params, kind, actions);

    ImportedMdp result;
    result.model.space = read_states(base, params, kind);
    result.model.space.actions = actions;
    StateSpace& space = result.model.space;

    const std::filesystem::path file = base.string() + ".tra";
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file.string());
    const std::size_t na = actions.size();
    std::vector<std::vector<std::pair<StateIndex, double>>> rows(space.size() * na);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::size_t src, action, dst;
        double p;
        if (!(ls >> src >> action >> dst >> p))
            throw ParseError(file, line_no, "expected 'src action dst prob'");
        if (src >= space.size() || dst >= space.size() || action >= na)
            throw ParseError(file, line_no, "index out of range");
        rows[src * na + action].emplace_back(static_cast<StateIndex>(dst), p);
    }
    check_row_masses(file, rows, false);

    TransitionTable& table = result.model.table;
    table.num_states = space.size();
    table.num_actions = na;
    table.offsets.assign(space.size() * na + 1, 0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::sort(rows[r].begin(), rows[r].end());
        table.offsets[r + 1] = table.offsets[r] + rows[r].size();
    }
    for (auto& row : rows)
        for (const auto& [dst, p] : row) {
            table.targets.push_back(dst);
            table.probs.push_back(p);
        }
    result.labels = read_labels(base, space.size());
    return result;
}

}  // namespace sairod
