#include "qcsim/circuit.hpp"

#include <algorithm>
#include <array>
#include <set>

#include <json.hpp>

namespace qcsim {

namespace {

constexpr std::array<const char*, 10> kKindNames = {
    "H", "T", "SqrtX", "SqrtY", "X", "Z", "CZ", "CNOT", "Dense1", "Dense2",
};

} // namespace

const char* to_string(GateKind kind) { return kKindNames[static_cast<int>(kind)]; }

bool gate_kind_from_string(const std::string& name, GateKind& out) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (name == kKindNames[i]) {
            out = static_cast<GateKind>(i);
            return true;
        }
    }
    return false;
}

int gate_arity(GateKind kind) {
    switch (kind) {
    case GateKind::CZ:
    case GateKind::CNOT:
    case GateKind::Dense2:
        return 2;
    default:
        return 1;
    }
}

bool is_diagonal(GateKind kind) {
    return kind == GateKind::T || kind == GateKind::Z || kind == GateKind::CZ;
}

// The eight two-qubit layouts. Layouts alternate vertical/horizontal bonds;
// the shift sequence below makes every nearest-neighbor bond appear exactly
// once per eight cycles and pins the alignment that reproduces the reference
// schedules (swap and gate counts) for depth-25 instances.
std::vector<std::pair<std::uint32_t, std::uint32_t>>
cz_pattern(std::uint32_t rows, std::uint32_t cols, std::uint32_t pattern) {
    pattern %= 8;
    const bool vertical = (pattern % 2) == 0;
    static constexpr std::array<std::uint32_t, 4> kVerticalShift = {2, 3, 0, 1};
    static constexpr std::array<std::uint32_t, 4> kHorizontalShift = {3, 0, 1, 2};
    const std::uint32_t shift =
        vertical ? kVerticalShift[pattern / 2] : kHorizontalShift[pattern / 2];

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c) {
            const std::uint32_t r2 = r + (vertical ? 1 : 0);
            const std::uint32_t c2 = c + (vertical ? 0 : 1);
            if (r2 >= rows || c2 >= cols)
                continue;
            const std::uint32_t key = vertical ? (r + 2 * c) % 4 : (2 * r + c) % 4;
            if (key == shift)
                edges.emplace_back(r * cols + c, r2 * cols + c2);
        }
    }
    return edges;
}

Circuit generate_supremacy(std::uint32_t rows, std::uint32_t cols, std::uint32_t depth,
                           std::uint64_t seed, const GenerateOptions& options) {
    if (rows < 1 || cols < 1)
        throw invalid_argument("generate_supremacy: grid dimensions must be positive");

    const std::uint32_t n = rows * cols;
    Circuit circuit;
    circuit.rows = rows;
    circuit.cols = cols;
    circuit.depth = depth;
    circuit.seed = seed;

    if (options.include_initial_h) {
        for (std::uint32_t q = 0; q < n; ++q)
            circuit.gates.push_back(Gate{GateKind::H, {q}, 0, {}});
    }

    // Qubits touched by a CZ in each cycle; cycle 0 has none.
    std::vector<std::set<std::uint32_t>> in_cz(depth + 1);
    for (std::uint32_t c = 1; c <= depth; ++c) {
        for (const auto& [a, b] : cz_pattern(rows, cols, (c - 1) % 8)) {
            in_cz[c].insert(a);
            in_cz[c].insert(b);
        }
    }

    SplitMix64 rng(seed);
    // previous single-qubit gate per qubit; H does not count
    std::vector<GateKind> prev(n, GateKind::H);
    std::vector<bool> had_single(n, false);
    static constexpr std::array<GateKind, 3> kChoices = {GateKind::T, GateKind::SqrtX,
                                                         GateKind::SqrtY};

    for (std::uint32_t c = 1; c <= depth; ++c) {
        if (c >= 2) {
            for (std::uint32_t q = 0; q < n; ++q) {
                if (!in_cz[c - 1].count(q) || in_cz[c].count(q))
                    continue;
                GateKind kind;
                if (!had_single[q]) {
                    kind = GateKind::T; // second single-qubit gate after the H is always T
                } else {
                    std::vector<GateKind> allowed;
                    for (GateKind cand : kChoices)
                        if (cand != prev[q])
                            allowed.push_back(cand);
                    kind = allowed[rng.next() % allowed.size()];
                }
                had_single[q] = true;
                prev[q] = kind;
                circuit.gates.push_back(Gate{kind, {q}, c, {}});
            }
        }
        if (c == depth && !options.include_final_cz)
            continue;
        for (const auto& [a, b] : cz_pattern(rows, cols, (c - 1) % 8))
            circuit.gates.push_back(Gate{GateKind::CZ, {std::min(a, b), std::max(a, b)}, c, {}});
    }
    return circuit;
}

std::uint64_t supremacy_full_gate_count(std::uint32_t rows, std::uint32_t cols,
                                        std::uint32_t depth) {
    GenerateOptions full;
    full.include_initial_h = true;
    full.include_final_cz = true;
    return generate_supremacy(rows, cols, depth, 0, full).gates.size();
}

namespace {

using nlohmann::json;

json gate_to_json(const Gate& gate) {
    json j;
    j["kind"] = to_string(gate.kind);
    j["qubits"] = gate.qubits;
    j["cycle"] = gate.cycle;
    if (!gate.matrix.empty()) {
        json m = json::array();
        for (const cplx& entry : gate.matrix)
            m.push_back({entry.real(), entry.imag()});
        j["matrix"] = m;
    }
    return j;
}

} // namespace

std::string serialize(const Circuit& circuit) {
    json j;
    j["rows"] = circuit.rows;
    j["cols"] = circuit.cols;
    j["depth"] = circuit.depth;
    j["seed"] = circuit.seed;
    json gates = json::array();
    for (const Gate& gate : circuit.gates)
        gates.push_back(gate_to_json(gate));
    j["gates"] = std::move(gates);
    return j.dump(2) + "\n";
}

Circuit parse(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("circuit document: ") + e.what());
    }
    if (!j.is_object())
        throw parse_error("circuit document: top level must be an object");

    static const std::set<std::string> kTopKeys = {"rows", "cols", "depth", "seed", "gates"};
    for (const auto& [key, value] : j.items()) {
        if (!kTopKeys.count(key))
            throw parse_error("circuit document: unknown field \"" + key + "\"");
    }
    for (const std::string& key : kTopKeys) {
        if (!j.contains(key))
            throw parse_error("circuit document: missing field \"" + key + "\"");
    }

    Circuit circuit;
    try {
        circuit.rows = j.at("rows").get<std::uint32_t>();
        circuit.cols = j.at("cols").get<std::uint32_t>();
        circuit.depth = j.at("depth").get<std::uint32_t>();
        circuit.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw parse_error(std::string("circuit header: ") + e.what());
    }
    if (circuit.rows < 1 || circuit.cols < 1)
        throw parse_error("circuit header: rows/cols must be positive");

    const json& gates = j.at("gates");
    if (!gates.is_array())
        throw parse_error("circuit document: \"gates\" must be an array");

    const std::uint32_t n = circuit.qubit_count();
    std::uint32_t prev_cycle = 0;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const json& g = gates[i];
        const std::string at = "gate " + std::to_string(i);
        if (!g.is_object())
            throw parse_error(at + ": must be an object");
        static const std::set<std::string> kGateKeys = {"kind", "qubits", "cycle", "matrix"};
        for (const auto& [key, value] : g.items()) {
            if (!kGateKeys.count(key))
                throw parse_error(at + ": unknown field \"" + key + "\"");
        }

        Gate gate;
        std::string kind_name;
        try {
            kind_name = g.at("kind").get<std::string>();
            gate.qubits = g.at("qubits").get<std::vector<std::uint32_t>>();
            gate.cycle = g.at("cycle").get<std::uint32_t>();
        } catch (const json::exception& e) {
            throw parse_error(at + ": " + e.what());
        }
        if (!gate_kind_from_string(kind_name, gate.kind))
            throw parse_error(at + ": unknown gate kind \"" + kind_name + "\"");

        const std::size_t arity = static_cast<std::size_t>(gate_arity(gate.kind));
        if (gate.qubits.size() != arity)
            throw parse_error(at + ": field \"qubits\" must list " + std::to_string(arity) +
                              " qubit(s) for kind " + kind_name);
        for (std::uint32_t q : gate.qubits) {
            if (q >= n)
                throw parse_error(at + ": field \"qubits\": id " + std::to_string(q) +
                                  " out of range (n=" + std::to_string(n) + ")");
        }
        if (arity == 2 && gate.qubits[0] == gate.qubits[1])
            throw parse_error(at + ": field \"qubits\": ids must be distinct");
        if (gate.kind == GateKind::CZ && gate.qubits[0] > gate.qubits[1])
            throw parse_error(at + ": CZ qubits must be sorted ascending");
        if (gate.cycle < prev_cycle)
            throw parse_error(at + ": field \"cycle\": must be non-decreasing");
        prev_cycle = gate.cycle;

        const bool dense = gate.kind == GateKind::Dense1 || gate.kind == GateKind::Dense2;
        if (dense) {
            if (!g.contains("matrix"))
                throw parse_error(at + ": dense kind requires field \"matrix\"");
            const std::size_t dim = gate.kind == GateKind::Dense1 ? 2 : 4;
            const json& m = g.at("matrix");
            if (!m.is_array() || m.size() != dim * dim)
                throw parse_error(at + ": field \"matrix\" must hold " +
                                  std::to_string(dim * dim) + " [re,im] pairs");
            for (const json& entry : m) {
                if (!entry.is_array() || entry.size() != 2)
                    throw parse_error(at + ": field \"matrix\": entries must be [re,im] pairs");
                gate.matrix.emplace_back(entry[0].get<double>(), entry[1].get<double>());
            }
        } else if (g.contains("matrix")) {
            throw parse_error(at + ": field \"matrix\" only allowed for dense kinds");
        }
        circuit.gates.push_back(std::move(gate));
    }
    return circuit;
}

CircuitStats stats(const Circuit& circuit) {
    CircuitStats out;
    out.qubit_count = circuit.qubit_count();
    out.depth = circuit.depth;
    out.total = circuit.gates.size();
    for (const Gate& gate : circuit.gates) {
        ++out.count_by_kind[gate.kind];
        if (gate.cycle >= out.count_per_cycle.size())
            out.count_per_cycle.resize(gate.cycle + 1, 0);
        ++out.count_per_cycle[gate.cycle];
    }
    return out;
}

} // namespace qcsim
