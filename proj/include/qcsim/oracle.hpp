#pragma once

#include <cstdint>
#include <vector>

#include "qcsim/circuit.hpp"
#include "qcsim/fusion.hpp"
#include "qcsim/types.hpp"

namespace qcsim {
namespace oracle {

/// Full 2^n amplitude vector; reference-only, n <= 12.
struct DenseState {
    int n = 0;
    std::vector<cplx> amps;

    static DenseState basis0(int n);
    static DenseState uniform(int n);
};

enum class DenseInit { basis0, uniform };

/// Identity-padded embedding of g acting on the listed qubits, as a full
/// 2^n x 2^n row-major matrix. qubits[j] carries matrix index bit j.
std::vector<cplx> full_operator(const GateMatrix& g, const std::vector<std::uint32_t>& qubits,
                                int n);

/// Dense matrix-vector product; the deliberately naive reference path.
void apply_full_operator(const std::vector<cplx>& op, DenseState& state);

void apply_gate_dense(DenseState& state, const Gate& gate);

/// Sequential full-operator simulation of the whole circuit.
DenseState simulate_dense(const Circuit& circuit, DenseInit init = DenseInit::basis0);

double norm_sq(const DenseState& state);
double entropy(const DenseState& state);

} // namespace oracle
} // namespace qcsim
