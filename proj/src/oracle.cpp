#include "qcsim/oracle.hpp"

#include <cmath>

namespace qcsim {
namespace oracle {

DenseState DenseState::basis0(int n) {
    DenseState s;
    s.n = n;
    s.amps.assign(std::size_t(1) << n, 0.0);
    s.amps[0] = 1.0;
    return s;
}

DenseState DenseState::uniform(int n) {
    DenseState s;
    s.n = n;
    const double a = std::pow(2.0, -0.5 * n);
    s.amps.assign(std::size_t(1) << n, cplx(a, 0.0));
    return s;
}

std::vector<cplx> full_operator(const GateMatrix& g, const std::vector<std::uint32_t>& qubits,
                                int n) {
    if (n < 1 || n > 12)
        throw invalid_argument("full_operator: n must be in 1..12");
    if (qubits.size() != static_cast<std::size_t>(g.k))
        throw invalid_argument("full_operator: need one qubit per gate bit");
    for (std::uint32_t q : qubits)
        if (q >= static_cast<std::uint32_t>(n))
            throw invalid_argument("full_operator: qubit id out of range");

    const std::size_t dim = std::size_t(1) << n;
    std::vector<cplx> op(dim * dim, 0.0);
    std::size_t gate_mask = 0;
    for (std::uint32_t q : qubits)
        gate_mask |= std::size_t(1) << q;

    for (std::size_t row = 0; row < dim; ++row) {
        std::size_t grow = 0;
        for (std::size_t j = 0; j < qubits.size(); ++j)
            grow |= ((row >> qubits[j]) & 1u) << j;
        const std::size_t rest = row & ~gate_mask;
        for (std::size_t gcol = 0; gcol < g.dim(); ++gcol) {
            std::size_t col = rest;
            for (std::size_t j = 0; j < qubits.size(); ++j)
                col |= ((gcol >> j) & 1u) << qubits[j];
            op[row * dim + col] = g.at(grow, gcol);
        }
    }
    return op;
}

void apply_full_operator(const std::vector<cplx>& op, DenseState& state) {
    const std::size_t dim = state.amps.size();
    if (op.size() != dim * dim)
        throw invalid_argument("apply_full_operator: operator/state size mismatch");
    std::vector<cplx> out(dim, 0.0);
    for (std::size_t r = 0; r < dim; ++r) {
        cplx acc = 0.0;
        const cplx* row = &op[r * dim];
        for (std::size_t c = 0; c < dim; ++c)
            acc += row[c] * state.amps[c];
        out[r] = acc;
    }
    state.amps = std::move(out);
}

void apply_gate_dense(DenseState& state, const Gate& gate) {
    GateMatrix m;
    if (gate.kind == GateKind::Dense1 || gate.kind == GateKind::Dense2) {
        m.k = gate.kind == GateKind::Dense1 ? 1 : 2;
        m.entries = gate.matrix;
    } else {
        m = named_matrix(gate.kind);
    }
    apply_full_operator(full_operator(m, gate.qubits, state.n), state);
}

DenseState simulate_dense(const Circuit& circuit, DenseInit init) {
    const int n = static_cast<int>(circuit.qubit_count());
    if (n > 10)
        throw invalid_argument("simulate_dense: limited to 10 qubits");
    DenseState state = init == DenseInit::basis0 ? DenseState::basis0(n) : DenseState::uniform(n);
    for (const Gate& gate : circuit.gates)
        apply_gate_dense(state, gate);
    return state;
}

double norm_sq(const DenseState& state) {
    double acc = 0.0;
    for (const cplx& a : state.amps)
        acc += std::norm(a);
    return acc;
}

double entropy(const DenseState& state) {
    double acc = 0.0;
    for (const cplx& a : state.amps) {
        const double p = std::norm(a);
        if (p > 0.0)
            acc -= p * std::log(p);
    }
    return acc;
}

} // namespace oracle
} // namespace qcsim
