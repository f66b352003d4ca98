#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qcsim/circuit.hpp"
#include "qcsim/types.hpp"

namespace qcsim {

/// Dense complex unitary on k qubits, row-major, dimension 2^k.
/// Matrix index bit j corresponds to qubit_order[j]; qubit_order is kept
/// strictly ascending, permuting the entries on construction if needed.
struct GateMatrix {
    int k = 0;
    std::vector<cplx> entries;              // 2^k * 2^k
    std::vector<std::uint32_t> qubit_order; // ascending logical qubit ids

    std::size_t dim() const { return std::size_t(1) << k; }
    cplx at(std::size_t row, std::size_t col) const { return entries[row * dim() + col]; }
    cplx& at(std::size_t row, std::size_t col) { return entries[row * dim() + col]; }
};

/// Max-norm of M†M - I; < 1e-12 for anything we accept as a gate.
double unitarity_defect(const GateMatrix& m);
bool is_unitary(const GateMatrix& m, double tol = 1e-12);

/// The fixed matrices of the named kinds. For two-qubit kinds the first
/// listed qubit is matrix index bit 0 (for CNOT: the control).
GateMatrix named_matrix(GateKind kind);

/// Matrix of a circuit gate, normalized to ascending qubit order.
GateMatrix gate_matrix(const Gate& gate);

/// Reorder matrix bits: bit j of the result corresponds to qubit
/// new_order[j]. new_order must be a permutation of m.qubit_order.
GateMatrix permute_qubits(const GateMatrix& m, const std::vector<std::uint32_t>& new_order);

/// Grow g to a 2^k x 2^k matrix acting as g on the given bit positions
/// (position 0 = least-significant index bit) and as identity elsewhere.
GateMatrix embed(const GateMatrix& g, const std::vector<int>& positions, int k);

struct Cluster; // scheduler.hpp

/// Product of the gates' embeddings in application order (a later gate is a
/// left factor). support must be sorted ascending and cover every gate.
GateMatrix fuse(const std::vector<Gate>& gates, const std::vector<std::uint32_t>& support);

/// Real-pair tables for the two-FMA complex update: per entry m = (mR, mI),
/// m_rr holds (mR, mR) and m_negimag_imag holds (-mI, mI).
struct SplitGateMatrix {
    int k = 0;
    std::vector<std::array<double, 2>> m_rr;
    std::vector<std::array<double, 2>> m_negimag_imag;
};

SplitGateMatrix split_real_imag(const GateMatrix& g);
GateMatrix recombine(const SplitGateMatrix& s);

/// Default fused-gate width; configurable 1..6.
inline constexpr int kDefaultKMax = 5;
inline constexpr int kMaxFusedQubits = 6;

} // namespace qcsim
