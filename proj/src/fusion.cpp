#include "qcsim/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qcsim {

double unitarity_defect(const GateMatrix& m) {
    const std::size_t dim = m.dim();
    double worst = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) {
            cplx acc = 0.0;
            for (std::size_t i = 0; i < dim; ++i)
                acc += std::conj(m.at(i, r)) * m.at(i, c);
            if (r == c)
                acc -= 1.0;
            worst = std::max(worst, std::abs(acc));
        }
    }
    return worst;
}

bool is_unitary(const GateMatrix& m, double tol) { return unitarity_defect(m) < tol; }

GateMatrix named_matrix(GateKind kind) {
    const double s = 1.0 / std::numbers::sqrt2;
    const cplx i(0.0, 1.0);
    GateMatrix m;
    switch (kind) {
    case GateKind::H:
        m.k = 1;
        m.entries = {s, s, s, -s};
        break;
    case GateKind::T:
        m.k = 1;
        m.entries = {1.0, 0.0, 0.0, std::exp(i * (std::numbers::pi / 4.0))};
        break;
    case GateKind::SqrtX:
        m.k = 1;
        m.entries = {0.5 * (1.0 + i), 0.5 * (1.0 - i), 0.5 * (1.0 - i), 0.5 * (1.0 + i)};
        break;
    case GateKind::SqrtY:
        m.k = 1;
        m.entries = {0.5 * (1.0 + i), 0.5 * (-1.0 - i), 0.5 * (1.0 + i), 0.5 * (1.0 + i)};
        break;
    case GateKind::X:
        m.k = 1;
        m.entries = {0.0, 1.0, 1.0, 0.0};
        break;
    case GateKind::Z:
        m.k = 1;
        m.entries = {1.0, 0.0, 0.0, -1.0};
        break;
    case GateKind::CZ:
        m.k = 2;
        m.entries.assign(16, 0.0);
        m.at(0, 0) = 1.0;
        m.at(1, 1) = 1.0;
        m.at(2, 2) = 1.0;
        m.at(3, 3) = -1.0;
        break;
    case GateKind::CNOT:
        // control = bit 0, target = bit 1
        m.k = 2;
        m.entries.assign(16, 0.0);
        m.at(0, 0) = 1.0;
        m.at(2, 2) = 1.0;
        m.at(1, 3) = 1.0;
        m.at(3, 1) = 1.0;
        break;
    default:
        throw invalid_argument("named_matrix: dense kinds carry their own payload");
    }
    m.qubit_order.resize(m.k);
    for (int j = 0; j < m.k; ++j)
        m.qubit_order[j] = static_cast<std::uint32_t>(j);
    return m;
}

GateMatrix permute_qubits(const GateMatrix& m, const std::vector<std::uint32_t>& new_order) {
    if (new_order.size() != m.qubit_order.size())
        throw invalid_argument("permute_qubits: order size mismatch");
    // bit j (qubit_order[j]) moves to position of that qubit in new_order
    std::vector<int> dest(m.k);
    for (int j = 0; j < m.k; ++j) {
        auto it = std::find(new_order.begin(), new_order.end(), m.qubit_order[j]);
        if (it == new_order.end())
            throw invalid_argument("permute_qubits: new_order is not a permutation");
        dest[j] = static_cast<int>(it - new_order.begin());
    }
    const std::size_t dim = m.dim();
    auto remap = [&](std::size_t x) {
        std::size_t y = 0;
        for (int j = 0; j < m.k; ++j)
            y |= ((x >> j) & 1u) << dest[j];
        return y;
    };
    GateMatrix out;
    out.k = m.k;
    out.qubit_order = new_order;
    out.entries.assign(dim * dim, 0.0);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            out.at(remap(r), remap(c)) = m.at(r, c);
    return out;
}

GateMatrix gate_matrix(const Gate& gate) {
    GateMatrix m;
    if (gate.kind == GateKind::Dense1 || gate.kind == GateKind::Dense2) {
        m.k = gate.kind == GateKind::Dense1 ? 1 : 2;
        if (gate.matrix.size() != m.dim() * m.dim())
            throw invalid_argument("gate_matrix: dense payload has wrong size");
        m.entries = gate.matrix;
    } else {
        m = named_matrix(gate.kind);
    }
    if (gate.qubits.size() != static_cast<std::size_t>(m.k))
        throw invalid_argument("gate_matrix: qubit list does not match gate arity");
    if (!is_unitary(m))
        throw invalid_argument("gate_matrix: matrix is not unitary to 1e-12");
    m.qubit_order = gate.qubits;
    std::vector<std::uint32_t> sorted = gate.qubits;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != m.qubit_order)
        m = permute_qubits(m, sorted);
    return m;
}

GateMatrix embed(const GateMatrix& g, const std::vector<int>& positions, int k) {
    if (k < 1 || k > 16)
        throw invalid_argument("embed: target width out of range");
    if (positions.size() != static_cast<std::size_t>(g.k))
        throw invalid_argument("embed: need one position per gate qubit");
    std::uint32_t seen = 0;
    for (int p : positions) {
        if (p < 0 || p >= k)
            throw invalid_argument("embed: position out of range");
        if (seen & (1u << p))
            throw invalid_argument("embed: position collision");
        seen |= 1u << p;
    }

    const std::size_t dim = std::size_t(1) << k;
    std::size_t gate_mask = 0;
    for (int p : positions)
        gate_mask |= std::size_t(1) << p;
    auto gather = [&](std::size_t x) {
        std::size_t y = 0;
        for (std::size_t j = 0; j < positions.size(); ++j)
            y |= ((x >> positions[j]) & 1u) << j;
        return y;
    };

    GateMatrix out;
    out.k = k;
    out.entries.assign(dim * dim, 0.0);
    out.qubit_order.resize(k);
    for (int j = 0; j < k; ++j)
        out.qubit_order[j] = static_cast<std::uint32_t>(j);
    for (std::size_t r = 0; r < dim; ++r) {
        const std::size_t rest = r & ~gate_mask;
        for (std::size_t gc = 0; gc < g.dim(); ++gc) {
            std::size_t c = rest;
            for (std::size_t j = 0; j < positions.size(); ++j)
                c |= ((gc >> j) & 1u) << positions[j];
            out.at(r, c) = g.at(gather(r), gc);
        }
    }
    return out;
}

namespace {

GateMatrix multiply(const GateMatrix& a, const GateMatrix& b) {
    const std::size_t dim = a.dim();
    GateMatrix out;
    out.k = a.k;
    out.qubit_order = b.qubit_order;
    out.entries.assign(dim * dim, 0.0);
    for (std::size_t r = 0; r < dim; ++r)
        for (std::size_t i = 0; i < dim; ++i) {
            const cplx av = a.at(r, i);
            if (av == cplx(0.0))
                continue;
            for (std::size_t c = 0; c < dim; ++c)
                out.at(r, c) += av * b.at(i, c);
        }
    return out;
}

} // namespace

GateMatrix fuse(const std::vector<Gate>& gates, const std::vector<std::uint32_t>& support) {
    const int k = static_cast<int>(support.size());
    if (k < 1 || k > kMaxFusedQubits)
        throw invalid_argument("fuse: support must hold 1..6 qubits");
    if (!std::is_sorted(support.begin(), support.end()))
        throw invalid_argument("fuse: support must be sorted ascending");

    GateMatrix acc;
    acc.k = k;
    acc.qubit_order = support;
    const std::size_t dim = std::size_t(1) << k;
    acc.entries.assign(dim * dim, 0.0);
    for (std::size_t d = 0; d < dim; ++d)
        acc.at(d, d) = 1.0;

    for (const Gate& gate : gates) {
        GateMatrix g = gate_matrix(gate);
        std::vector<int> positions;
        for (std::uint32_t q : g.qubit_order) {
            auto it = std::lower_bound(support.begin(), support.end(), q);
            if (it == support.end() || *it != q)
                throw invalid_argument("fuse: gate qubit outside the cluster support");
            positions.push_back(static_cast<int>(it - support.begin()));
        }
        acc = multiply(embed(g, positions, k), acc);
    }
    return acc;
}

SplitGateMatrix split_real_imag(const GateMatrix& g) {
    SplitGateMatrix s;
    s.k = g.k;
    s.m_rr.reserve(g.entries.size());
    s.m_negimag_imag.reserve(g.entries.size());
    for (const cplx& m : g.entries) {
        s.m_rr.push_back({m.real(), m.real()});
        s.m_negimag_imag.push_back({-m.imag(), m.imag()});
    }
    return s;
}

GateMatrix recombine(const SplitGateMatrix& s) {
    GateMatrix g;
    g.k = s.k;
    g.qubit_order.resize(s.k);
    for (int j = 0; j < s.k; ++j)
        g.qubit_order[j] = static_cast<std::uint32_t>(j);
    g.entries.reserve(s.m_rr.size());
    for (std::size_t i = 0; i < s.m_rr.size(); ++i)
        g.entries.emplace_back(s.m_rr[i][0], s.m_negimag_imag[i][1]);
    return g;
}

} // namespace qcsim
