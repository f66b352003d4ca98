#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <thread>
#include <vector>

#include "qcsim/communicator.hpp"
#include "qcsim/kernel.hpp"
#include "qcsim/scheduler.hpp"
#include "qcsim/types.hpp"

namespace qcsim {

/// 2^g rank slices of 2^l amplitudes; global index = rank_bits * 2^l + local.
/// log_of_phys carries the rank re-numbering left behind by specialized CNOTs
/// (identity otherwise); slices stay with their physical owner.
template <typename Real> struct DistributedState {
    int n = 0;
    int l = 0;
    int g = 0;
    std::vector<StateSlice<Real>> slices; // by physical rank
    std::vector<int> log_of_phys;

    int ranks() const { return 1 << g; }

    int phys_of_log(int logical) const {
        for (int r = 0; r < ranks(); ++r)
            if (log_of_phys[r] == logical)
                return r;
        throw invalid_argument("phys_of_log: bad logical rank");
    }

    static DistributedState zeros(int n, int g) {
        if (g < 0 || g > n)
            throw invalid_argument("DistributedState: need 0 <= g <= n");
        DistributedState ds;
        ds.n = n;
        ds.l = n - g;
        ds.g = g;
        ds.slices.reserve(std::size_t(1) << g);
        for (int r = 0; r < (1 << g); ++r)
            ds.slices.push_back(StateSlice<Real>::zeros(n - g));
        ds.log_of_phys.resize(std::size_t(1) << g);
        for (int r = 0; r < (1 << g); ++r)
            ds.log_of_phys[r] = r;
        return ds;
    }

    static DistributedState basis0(int n, int g) {
        DistributedState ds = zeros(n, g);
        ds.slices[ds.phys_of_log(0)].amps[0] = std::complex<Real>(1);
        return ds;
    }

    static DistributedState uniform(int n, int g) {
        DistributedState ds = zeros(n, g);
        const Real a = static_cast<Real>(std::pow(2.0, -0.5 * n));
        for (auto& slice : ds.slices)
            std::fill(slice.amps.begin(), slice.amps.end(), std::complex<Real>(a));
        return ds;
    }
};

enum class InitKind { basis0, uniform };

struct RunStats {
    double wall_seconds = 0.0;
    double compute_seconds = 0.0;  // max over ranks
    double exchange_seconds = 0.0; // max over ranks, barrier wait included
    std::uint64_t bytes_exchanged = 0;
    int exchange_count = 0;
    std::uint64_t collectives_per_rank = 0;
};

namespace detail {

/// Swap sequence that moves the pairs' local bits onto the q highest local
/// locations (pair i, sorted by global location, goes to slot l-q+i).
inline std::vector<std::pair<int, int>>
pre_transpositions(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs, int l) {
    const int q = static_cast<int>(pairs.size());
    std::vector<int> pos(l), tag_at(l);
    for (int i = 0; i < l; ++i)
        pos[i] = tag_at[i] = i;
    std::vector<std::pair<int, int>> swaps;
    for (int i = 0; i < q; ++i) {
        const int tag = static_cast<int>(pairs[i].second);
        const int target = l - q + i;
        const int cur = pos[tag];
        if (cur == target)
            continue;
        swaps.emplace_back(cur, target);
        const int other = tag_at[target];
        std::swap(tag_at[cur], tag_at[target]);
        pos[tag] = target;
        pos[other] = cur;
    }
    return swaps;
}

template <typename Real>
void exchange_rank(DistributedState<Real>& ds, const SwapDirective& dir, Communicator& comm,
                   int phys, std::vector<std::complex<Real>>& scratch, const KernelConfig& cfg) {
    StateSlice<Real>& slice = ds.slices[phys];
    const int l = ds.l;
    const int q = static_cast<int>(dir.pairs.size());
    const auto pre = pre_transpositions(dir.pairs, l);
    for (const auto& [a, b] : pre)
        local_swap(slice, a, b, cfg);

    if (q > 0) {
        const int logical = ds.log_of_phys[phys];
        std::vector<int> ebits;
        for (const auto& [gl, lo] : dir.pairs)
            ebits.push_back(static_cast<int>(gl) - l);
        int base = logical;
        for (int e : ebits)
            base &= ~(1 << e);
        std::vector<int> group(std::size_t(1) << q);
        for (int v = 0; v < (1 << q); ++v) {
            int r = base;
            for (int i = 0; i < q; ++i)
                if ((v >> i) & 1)
                    r |= 1 << ebits[i];
            group[v] = r;
        }
        const std::size_t block = slice.size() >> q;
        const std::size_t block_bytes = block * sizeof(std::complex<Real>);
        std::vector<Communicator::ConstBlock> send(std::size_t(1) << q);
        std::vector<Communicator::Block> recv(std::size_t(1) << q);
        for (int j = 0; j < (1 << q); ++j) {
            send[j] = {reinterpret_cast<const std::byte*>(slice.amps.data() + j * block),
                       block_bytes};
            recv[j] = {reinterpret_cast<std::byte*>(scratch.data() + j * block), block_bytes};
        }
        comm.all_to_all(logical, group, send, recv);
        slice.amps.swap(scratch);
    }

    for (auto it = pre.rbegin(); it != pre.rend(); ++it)
        local_swap(slice, it->first, it->second, cfg);
    for (const auto& [a, b] : dir.post_transpositions)
        local_swap(slice, a, b, cfg);
}

} // namespace detail

/// Exchange the paired (global, local) bits of the whole distributed state:
/// the amplitude at global index i moves to the index with those bits
/// exchanged. Runs one thread per rank over an internal communicator.
template <typename Real>
void global_to_local_swap(DistributedState<Real>& ds,
                          std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs,
                          const KernelConfig& cfg = {}) {
    std::uint64_t seen = 0;
    for (const auto& [gl, lo] : pairs) {
        if (gl < static_cast<std::uint32_t>(ds.l) || gl >= static_cast<std::uint32_t>(ds.n) ||
            lo >= static_cast<std::uint32_t>(ds.l))
            throw invalid_argument("global_to_local_swap: pair out of range");
        if ((seen >> gl) & 1 || (seen >> lo) & 1)
            throw invalid_argument("global_to_local_swap: overlapping pairs");
        seen |= (std::uint64_t(1) << gl) | (std::uint64_t(1) << lo);
    }
    std::sort(pairs.begin(), pairs.end());
    if (pairs.empty())
        return;
    SwapDirective dir{pairs, {}};
    Communicator comm(ds.ranks());
    std::vector<std::thread> threads;
    for (int r = 0; r < ds.ranks(); ++r) {
        threads.emplace_back([&, r] {
            std::vector<std::complex<Real>> scratch(ds.slices[r].size());
            detail::exchange_rank(ds, dir, comm, r, scratch, cfg);
        });
    }
    for (auto& t : threads)
        t.join();
}

struct SpecializedGlobalAction {
    GateKind kind;         // CZ, T, Z, or CNOT
    std::vector<int> locs; // bit locations; all >= l except the local leg of a mixed CZ
};

/// Rank-conditional execution of a diagonal gate on global bit-locations
/// (CNOT on globals renumbers the ranks). Never moves amplitudes between
/// ranks.
template <typename Real>
void apply_specialized_global(DistributedState<Real>& ds, const SpecializedGlobalAction& action,
                              const KernelConfig& cfg = {}) {
    const int l = ds.l;
    auto is_global = [&](int loc) { return loc >= l && loc < ds.n; };
    const cplx t_phase = std::exp(cplx(0.0, std::numbers::pi / 4.0));

    switch (action.kind) {
    case GateKind::CZ: {
        if (action.locs.size() != 2)
            throw invalid_argument("specialized CZ: need two locations");
        const int a = std::max(action.locs[0], action.locs[1]);
        const int b = std::min(action.locs[0], action.locs[1]);
        if (!is_global(a))
            throw invalid_argument("specialized CZ: needs a global location");
        for (int r = 0; r < ds.ranks(); ++r) {
            const int logical = ds.log_of_phys[r];
            if (!((logical >> (a - l)) & 1))
                continue;
            if (is_global(b)) {
                if ((logical >> (b - l)) & 1)
                    apply_phase(ds.slices[r], cplx(-1.0, 0.0));
            } else {
                apply_diagonal_z(ds.slices[r], b);
            }
        }
        break;
    }
    case GateKind::T:
    case GateKind::Z: {
        if (action.locs.size() != 1 || !is_global(action.locs[0]))
            throw invalid_argument("specialized T/Z: needs one global location");
        const int bit = action.locs[0] - l;
        for (int r = 0; r < ds.ranks(); ++r)
            if ((ds.log_of_phys[r] >> bit) & 1)
                apply_phase(ds.slices[r],
                            action.kind == GateKind::T ? t_phase : cplx(-1.0, 0.0));
        break;
    }
    case GateKind::CNOT: {
        if (action.locs.size() != 2 || !is_global(action.locs[0]) || !is_global(action.locs[1]))
            throw invalid_argument("specialized CNOT: needs two global locations");
        const int control = action.locs[0] - l;
        const int target = action.locs[1] - l;
        for (int r = 0; r < ds.ranks(); ++r) {
            const int logical = ds.log_of_phys[r];
            if ((logical >> control) & 1)
                ds.log_of_phys[r] = logical ^ (1 << target);
        }
        break;
    }
    default:
        throw invalid_argument("apply_specialized_global: kind is not specializable");
    }
    (void)cfg;
}

template <typename Real> double reduce_norm(const DistributedState<Real>& ds) {
    double total = 0.0;
    for (int logical = 0; logical < ds.ranks(); ++logical)
        total += local_norm_sq(ds.slices[ds.phys_of_log(logical)]);
    return total;
}

template <typename Real> double reduce_entropy(const DistributedState<Real>& ds) {
    double total = 0.0;
    for (int logical = 0; logical < ds.ranks(); ++logical)
        total += local_entropy_terms(ds.slices[ds.phys_of_log(logical)]);
    return total;
}

/// Amplitude of the qubit-basis state described by `canonical_index`
/// (bit q of the index = value of qubit q), resolved through `map`.
template <typename Real>
cplx query_amplitude(const DistributedState<Real>& ds, const QubitMap& map,
                     std::uint64_t canonical_index) {
    std::uint64_t storage = 0;
    for (int q = 0; q < ds.n; ++q)
        if ((canonical_index >> q) & 1)
            storage |= std::uint64_t(1) << map.loc_of[q];
    const int logical = static_cast<int>(storage >> ds.l);
    const std::uint64_t local = storage & ((std::uint64_t(1) << ds.l) - 1);
    return amplitude_at(ds.slices[ds.phys_of_log(logical)], local);
}

/// Full canonical amplitude vector (test/CLI support; needs 2^n memory).
template <typename Real>
std::vector<cplx> gather_canonical(const DistributedState<Real>& ds, const QubitMap& map) {
    std::vector<cplx> out(std::size_t(1) << ds.n);
    const std::uint64_t lmask = (std::uint64_t(1) << ds.l) - 1;
    for (int logical = 0; logical < ds.ranks(); ++logical) {
        const StateSlice<Real>& slice = ds.slices[ds.phys_of_log(logical)];
        for (std::uint64_t local = 0; local < slice.size(); ++local) {
            const std::uint64_t storage = (std::uint64_t(logical) << ds.l) | (local & lmask);
            std::uint64_t canonical = 0;
            for (int q = 0; q < ds.n; ++q)
                if ((storage >> map.loc_of[q]) & 1)
                    canonical |= std::uint64_t(1) << q;
            out[canonical] = amplitude_at(slice, local);
        }
    }
    return out;
}

/// Inverse of gather_canonical.
template <typename Real>
DistributedState<Real> scatter_canonical(const std::vector<cplx>& amps, const QubitMap& map,
                                         int n, int g) {
    if (amps.size() != (std::size_t(1) << n))
        throw invalid_argument("scatter_canonical: amplitude count mismatch");
    DistributedState<Real> ds = DistributedState<Real>::zeros(n, g);
    for (std::uint64_t canonical = 0; canonical < amps.size(); ++canonical) {
        std::uint64_t storage = 0;
        for (int q = 0; q < n; ++q)
            if ((canonical >> q) & 1)
                storage |= std::uint64_t(1) << map.loc_of[q];
        const int logical = static_cast<int>(storage >> ds.l);
        ds.slices[ds.phys_of_log(logical)].amps[storage & ((std::uint64_t(1) << ds.l) - 1)] =
            std::complex<Real>(static_cast<Real>(amps[canonical].real()),
                               static_cast<Real>(amps[canonical].imag()));
    }
    return ds;
}

void validate_for_run(const SchedulePlan& plan);

/// Execute a compiled plan on 2^g emulated ranks (one thread each, collective
/// synchronization through `comm`).
template <typename Real>
DistributedState<Real> run(const SchedulePlan& plan, Communicator& comm, InitKind init,
                           const KernelConfig& cfg = {}, RunStats* stats = nullptr) {
    validate_for_run(plan);
    if (comm.size() != (1 << plan.g))
        throw invalid_argument("run: communicator size does not match the plan");
    cfg.validate();

    DistributedState<Real> ds = init == InitKind::basis0
                                    ? DistributedState<Real>::basis0(plan.n, plan.g)
                                    : DistributedState<Real>::uniform(plan.n, plan.g);

    const int ranks = ds.ranks();
    std::vector<double> compute_s(ranks, 0.0), exchange_s(ranks, 0.0);
    const auto t0 = std::chrono::steady_clock::now();

    auto rank_body = [&](int phys) {
        using clock = std::chrono::steady_clock;
        std::vector<std::complex<Real>> scratch(ds.slices[phys].size());
        StateSlice<Real>& slice = ds.slices[phys];

        for (std::size_t si = 0; si < plan.stages.size(); ++si) {
            const Stage& stage = plan.stages[si];
            const auto tc = clock::now();
            for (const StageItem& item : stage.items) {
                if (item.is_cluster) {
                    const Cluster& cluster = stage.clusters[item.index];
                    apply_gate(slice, cluster.exec, cluster.exec_locs, cfg);
                } else {
                    const Gate& gate = plan.workload[item.index];
                    const int logical = ds.log_of_phys[phys];
                    const cplx t_phase = std::exp(cplx(0.0, std::numbers::pi / 4.0));
                    if (gate.kind == GateKind::CZ) {
                        const int a = static_cast<int>(stage.entry_map.loc_of[gate.qubits[0]]);
                        const int b = static_cast<int>(stage.entry_map.loc_of[gate.qubits[1]]);
                        const int hi = std::max(a, b), lo = std::min(a, b);
                        if ((logical >> (hi - plan.l)) & 1) {
                            if (lo >= plan.l) {
                                if ((logical >> (lo - plan.l)) & 1)
                                    apply_phase(slice, cplx(-1.0, 0.0));
                            } else {
                                apply_diagonal_z(slice, lo);
                            }
                        }
                    } else { // T or Z on a global location
                        const int loc = static_cast<int>(stage.entry_map.loc_of[gate.qubits[0]]);
                        if ((logical >> (loc - plan.l)) & 1)
                            apply_phase(slice, gate.kind == GateKind::T ? t_phase
                                                                        : cplx(-1.0, 0.0));
                    }
                }
            }
            compute_s[phys] += std::chrono::duration<double>(clock::now() - tc).count();

            if (si + 1 < plan.stages.size()) {
                const auto tx = clock::now();
                detail::exchange_rank(ds, plan.swaps[si], comm, phys, scratch, cfg);
                exchange_s[phys] += std::chrono::duration<double>(clock::now() - tx).count();
            }
        }
    };

    if (ranks == 1) {
        rank_body(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(ranks);
        for (int r = 0; r < ranks; ++r)
            threads.emplace_back(rank_body, r);
        for (auto& t : threads)
            t.join();
    }

    if (stats) {
        stats->wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                  .count();
        stats->compute_seconds = *std::max_element(compute_s.begin(), compute_s.end());
        stats->exchange_seconds = *std::max_element(exchange_s.begin(), exchange_s.end());
        stats->bytes_exchanged = comm.bytes_exchanged();
        stats->exchange_count = static_cast<int>(plan.swaps.size());
        stats->collectives_per_rank = comm.collective_count(0);
    }
    return ds;
}

} // namespace qcsim
