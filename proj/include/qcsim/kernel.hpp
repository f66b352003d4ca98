#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qcsim/fusion.hpp"
#include "qcsim/types.hpp"

namespace qcsim {

/// One rank's contiguous block of 2^l amplitudes.
template <typename Real> struct StateSlice {
    int local_qubits = 0;
    std::vector<std::complex<Real>> amps;

    static StateSlice zeros(int l) {
        StateSlice s;
        s.local_qubits = l;
        s.amps.assign(std::size_t(1) << l, std::complex<Real>(0));
        return s;
    }
    std::size_t size() const { return amps.size(); }
};

struct KernelConfig {
    int block_size = 8; // effective block = min(block_size, 2^k); power of two
    int threads = 0;    // 0: library default
    int k_max = kDefaultKMax;
    bool split_fma = false; // use the (mR,mR)/(-mI,mI) update layout

    void validate() const {
        if (block_size < 1 || (block_size & (block_size - 1)) != 0)
            throw invalid_argument("KernelConfig: block_size must be a power of two >= 1");
        if (k_max < 1 || k_max > kMaxFusedQubits)
            throw invalid_argument("KernelConfig: k_max must be in 1..6");
    }
};

/// FLOP estimate for one k-qubit gate on an n-qubit state: every output
/// amplitude costs 2^k complex multiply-adds minus the first add,
/// i.e. 8*2^k - 2 real operations (14 at k = 1).
inline std::uint64_t estimate_flops(int k, int n_or_l) {
    if (k < 1)
        throw invalid_argument("estimate_flops: k must be >= 1");
    return (std::uint64_t(1) << n_or_l) * ((std::uint64_t(8) << k) - 2);
}

namespace detail {

/// Spread the bits of `c` over the index positions NOT in sorted_locs.
inline std::uint64_t insert_zero_bits(std::uint64_t c, const std::vector<int>& sorted_locs) {
    std::uint64_t idx = c;
    for (int loc : sorted_locs) {
        const std::uint64_t low = idx & ((std::uint64_t(1) << loc) - 1);
        idx = ((idx >> loc) << (loc + 1)) | low;
    }
    return idx;
}

} // namespace detail

/// In-place k-qubit gate application. locs[j] is the bit-location matched to
/// matrix index bit j; unsorted locations are handled by permuting the matrix
/// up front so the gather always walks ascending locations.
template <typename Real>
void apply_gate(StateSlice<Real>& state, const GateMatrix& g, std::vector<int> locs,
                const KernelConfig& cfg = {}) {
    cfg.validate();
    const int l = state.local_qubits;
    const int k = g.k;
    if (static_cast<std::size_t>(k) != locs.size())
        throw invalid_argument("apply_gate: need one location per gate qubit");
    if (k > cfg.k_max)
        throw invalid_argument("apply_gate: gate wider than k_max");
    std::uint32_t seen = 0;
    for (int loc : locs) {
        if (loc < 0 || loc >= l)
            throw invalid_argument("apply_gate: bit-location out of range");
        if (seen & (1u << loc))
            throw invalid_argument("apply_gate: duplicate bit-location");
        seen |= 1u << loc;
    }

    const GateMatrix* mat = &g;
    GateMatrix permuted;
    if (!std::is_sorted(locs.begin(), locs.end())) {
        // sort locations and permute the matrix to match (done once; the same
        // matrix is reused for all 2^(l-k) gathers)
        std::vector<std::size_t> order(k);
        for (int j = 0; j < k; ++j)
            order[j] = j;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return locs[a] < locs[b];
        });
        std::vector<std::uint32_t> new_qubits(k);
        std::vector<int> new_locs(k);
        for (int j = 0; j < k; ++j) {
            new_qubits[j] = g.qubit_order[order[j]];
            new_locs[j] = locs[order[j]];
        }
        permuted = permute_qubits(g, new_qubits);
        permuted.qubit_order = new_qubits;
        locs = std::move(new_locs);
        mat = &permuted;
    }

    const std::size_t dim = std::size_t(1) << k;
    const std::size_t block = std::min<std::size_t>(cfg.block_size, dim);
    const std::uint64_t groups = std::uint64_t(1) << (l - k);

    // matrix converted once; reused for every gather
    std::vector<std::complex<Real>> m(dim * dim);
    for (std::size_t i = 0; i < dim * dim; ++i)
        m[i] = std::complex<Real>(static_cast<Real>(mat->entries[i].real()),
                                  static_cast<Real>(mat->entries[i].imag()));
    SplitGateMatrix split;
    if (cfg.split_fma)
        split = split_real_imag(*mat);

    std::array<std::uint64_t, kMaxFusedQubits> stride{};
    for (int j = 0; j < k; ++j)
        stride[j] = std::uint64_t(1) << locs[j];

    auto body = [&](std::uint64_t c) {
        std::uint64_t base = detail::insert_zero_bits(c, locs);
        std::array<std::uint64_t, std::size_t(1) << kMaxFusedQubits> idx;
        std::array<std::complex<Real>, std::size_t(1) << kMaxFusedQubits> v, vt;
        for (std::size_t x = 0; x < dim; ++x) {
            std::uint64_t i = base;
            for (int j = 0; j < k; ++j)
                if ((x >> j) & 1u)
                    i |= stride[j];
            idx[x] = i;
            v[x] = state.amps[i];
            vt[x] = std::complex<Real>(0);
        }
        if (!cfg.split_fma) {
            for (std::size_t b = 0; b < dim / block; ++b)
                for (std::size_t row = 0; row < dim; ++row) {
                    const std::complex<Real>* mrow = &m[row * dim];
                    for (std::size_t j = 0; j < block; ++j) {
                        const std::size_t col = b * block + j;
                        vt[row] += mrow[col] * v[col];
                    }
                }
        } else {
            for (std::size_t b = 0; b < dim / block; ++b)
                for (std::size_t row = 0; row < dim; ++row) {
                    Real re = vt[row].real(), im = vt[row].imag();
                    for (std::size_t j = 0; j < block; ++j) {
                        const std::size_t col = b * block + j;
                        const std::size_t e = row * dim + col;
                        const Real vr = v[col].real(), vi = v[col].imag();
                        re += vr * static_cast<Real>(split.m_rr[e][0]);
                        im += vi * static_cast<Real>(split.m_rr[e][1]);
                        re += vi * static_cast<Real>(split.m_negimag_imag[e][0]);
                        im += vr * static_cast<Real>(split.m_negimag_imag[e][1]);
                    }
                    vt[row] = std::complex<Real>(re, im);
                }
        }
        for (std::size_t x = 0; x < dim; ++x)
            state.amps[idx[x]] = vt[x];
    };

    if (cfg.threads > 0) {
#pragma omp parallel for schedule(static) num_threads(cfg.threads)
        for (std::int64_t c = 0; c < static_cast<std::int64_t>(groups); ++c)
            body(static_cast<std::uint64_t>(c));
    } else {
#pragma omp parallel for schedule(static)
        for (std::int64_t c = 0; c < static_cast<std::int64_t>(groups); ++c)
            body(static_cast<std::uint64_t>(c));
    }
}

/// Exchange bit-locations a and b of every index; self-inverse.
template <typename Real>
void local_swap(StateSlice<Real>& state, int a, int b, const KernelConfig& cfg = {}) {
    const int l = state.local_qubits;
    if (a < 0 || a >= l || b < 0 || b >= l)
        throw invalid_argument("local_swap: bit-location out of range");
    if (a == b)
        return;
    const std::vector<int> locs = {std::min(a, b), std::max(a, b)};
    const std::uint64_t lo = std::uint64_t(1) << locs[0];
    const std::uint64_t hi = std::uint64_t(1) << locs[1];
    const std::int64_t groups = std::int64_t(1) << (l - 2);

    auto body = [&](std::int64_t c) {
        const std::uint64_t base = detail::insert_zero_bits(static_cast<std::uint64_t>(c), locs);
        std::swap(state.amps[base | lo], state.amps[base | hi]);
    };
    if (cfg.threads > 0) {
#pragma omp parallel for schedule(static) num_threads(cfg.threads)
        for (std::int64_t c = 0; c < groups; ++c)
            body(c);
    } else {
#pragma omp parallel for schedule(static)
        for (std::int64_t c = 0; c < groups; ++c)
            body(c);
    }
}

/// Multiply every amplitude by a unit-modulus scalar.
template <typename Real>
void apply_phase(StateSlice<Real>& state, cplx scalar) {
    if (std::abs(std::abs(scalar) - 1.0) > 1e-12)
        throw invalid_argument("apply_phase: scalar must have unit modulus");
    const std::complex<Real> s(static_cast<Real>(scalar.real()), static_cast<Real>(scalar.imag()));
    const std::int64_t n = static_cast<std::int64_t>(state.amps.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        state.amps[i] *= s;
}

/// Negate amplitudes whose bit at `loc` is one (a local Z).
template <typename Real>
void apply_diagonal_z(StateSlice<Real>& state, int loc) {
    if (loc < 0 || loc >= state.local_qubits)
        throw invalid_argument("apply_diagonal_z: bit-location out of range");
    const std::uint64_t mask = std::uint64_t(1) << loc;
    const std::int64_t n = static_cast<std::int64_t>(state.amps.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        if (static_cast<std::uint64_t>(i) & mask)
            state.amps[i] = -state.amps[i];
}

namespace detail {

/// Deterministic chunked reduction: the chunk layout is fixed, so the result
/// does not depend on the thread count.
template <typename Real, typename Term>
double reduce_slice(const StateSlice<Real>& state, Term term) {
    const std::size_t n = state.amps.size();
    constexpr std::size_t kChunks = 256;
    const std::size_t chunk = std::max<std::size_t>(1, (n + kChunks - 1) / kChunks);
    const std::size_t used = (n + chunk - 1) / chunk;
    std::vector<double> partial(used, 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < static_cast<std::int64_t>(used); ++p) {
        const std::size_t begin = p * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i)
            acc += term(state.amps[i]);
        partial[p] = acc;
    }
    double total = 0.0;
    for (double p : partial)
        total += p;
    return total;
}

} // namespace detail

template <typename Real> double local_norm_sq(const StateSlice<Real>& state) {
    return detail::reduce_slice(state, [](const std::complex<Real>& a) {
        const double re = a.real(), im = a.imag();
        return re * re + im * im;
    });
}

/// Partial sum of -p ln p over the slice, with 0 ln 0 := 0.
template <typename Real> double local_entropy_terms(const StateSlice<Real>& state) {
    return detail::reduce_slice(state, [](const std::complex<Real>& a) {
        const double re = a.real(), im = a.imag();
        const double p = re * re + im * im;
        return p > 0.0 ? -p * std::log(p) : 0.0;
    });
}

template <typename Real> cplx amplitude_at(const StateSlice<Real>& state, std::uint64_t index) {
    const std::complex<Real>& a = state.amps.at(index);
    return cplx(a.real(), a.imag());
}

} // namespace qcsim
