#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qcsim/types.hpp"

namespace qcsim {

enum class GateKind {
    H,
    T,
    SqrtX,
    SqrtY,
    X,
    Z,
    CZ,
    CNOT,
    Dense1, // arbitrary 2x2 payload
    Dense2, // arbitrary 4x4 payload
};

const char* to_string(GateKind kind);
bool gate_kind_from_string(const std::string& name, GateKind& out);

/// Number of qubits a gate of this kind acts on (1 or 2).
int gate_arity(GateKind kind);

/// Diagonal in the computational basis (T, Z, CZ).
bool is_diagonal(GateKind kind);

struct Gate {
    GateKind kind;
    std::vector<std::uint32_t> qubits; // length 1 or 2; CZ stored sorted ascending
    std::uint32_t cycle = 0;
    std::vector<cplx> matrix; // dense payload, only for Dense1/Dense2 (row-major)

    bool operator==(const Gate& other) const = default;
};

struct Circuit {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::uint32_t depth = 0;
    std::uint64_t seed = 0;
    std::vector<Gate> gates;

    std::uint32_t qubit_count() const { return rows * cols; }

    bool operator==(const Circuit& other) const = default;
};

struct GenerateOptions {
    bool include_initial_h = false;
    bool include_final_cz = false;
};

/// One of the eight repeating two-qubit layouts, as (a, b) qubit-id pairs.
/// `pattern` is the index in 0..7; cycle c >= 1 uses pattern (c-1) mod 8.
std::vector<std::pair<std::uint32_t, std::uint32_t>>
cz_pattern(std::uint32_t rows, std::uint32_t cols, std::uint32_t pattern);

/// Random low-depth grid circuit: an H layer at cycle 0, eight alternating
/// CZ layouts at cycles 1..depth, and constrained random single-qubit gates
/// (the first on each qubit is always T, later ones drawn from
/// {T, SqrtX, SqrtY} minus the previous choice).
Circuit generate_supremacy(std::uint32_t rows, std::uint32_t cols, std::uint32_t depth,
                           std::uint64_t seed, const GenerateOptions& options = {});

std::string serialize(const Circuit& circuit);
Circuit parse(const std::string& text);

struct CircuitStats {
    std::map<GateKind, std::uint64_t> count_by_kind;
    std::vector<std::uint64_t> count_per_cycle;
    std::uint32_t qubit_count = 0;
    std::uint32_t depth = 0;
    std::uint64_t total = 0;
};

CircuitStats stats(const Circuit& circuit);

/// Gate count of the full instance (H layer, every CZ cycle, all single-qubit
/// gates), independent of the emission options. This is the convention the
/// reference tables use; the scheduled workload omits the cycle-0 H layer and
/// the final CZ cycle and is therefore smaller by a documented offset.
std::uint64_t supremacy_full_gate_count(std::uint32_t rows, std::uint32_t cols,
                                        std::uint32_t depth);

} // namespace qcsim
