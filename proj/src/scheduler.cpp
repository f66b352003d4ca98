#include "qcsim/scheduler.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <set>

namespace qcsim {

QubitMap QubitMap::identity(int n) {
    QubitMap m;
    m.loc_of.resize(n);
    m.qubit_at.resize(n);
    for (int i = 0; i < n; ++i) {
        m.loc_of[i] = static_cast<std::uint32_t>(i);
        m.qubit_at[i] = static_cast<std::uint32_t>(i);
    }
    return m;
}

void QubitMap::check_bijection() const {
    if (loc_of.size() != qubit_at.size())
        throw invalid_argument("QubitMap: size mismatch");
    for (std::size_t q = 0; q < loc_of.size(); ++q) {
        if (loc_of[q] >= loc_of.size() || qubit_at[loc_of[q]] != q)
            throw invalid_argument("QubitMap: not a bijection");
    }
}

namespace {

/// True if the gate can execute while `as_global` legs sit on rank bits:
/// diagonal kinds only, and under the worst-case assumption a T counts only
/// when it is the structurally forced first single-qubit gate of its qubit.
bool runs_on_globals(const Gate& gate, bool forced_first_t, const PartitionOptions& opts) {
    if (!opts.specialize)
        return false;
    switch (gate.kind) {
    case GateKind::CZ:
    case GateKind::Z:
        return true;
    case GateKind::T:
        return !opts.worst_case_dense || forced_first_t;
    default:
        return false;
    }
}

/// Per-gate flag: a T that is the first single-qubit gate on its qubit
/// (cycle-0 Hadamards excepted). Its identity does not depend on the seed.
std::vector<bool> forced_first_t_flags(const std::vector<Gate>& workload) {
    std::uint32_t n = 0;
    for (const Gate& g : workload)
        for (std::uint32_t q : g.qubits)
            n = std::max(n, q + 1);
    std::vector<bool> seen_single(n, false);
    std::vector<bool> flags(workload.size(), false);
    for (std::size_t i = 0; i < workload.size(); ++i) {
        const Gate& g = workload[i];
        if (g.qubits.size() != 1)
            continue;
        if (g.kind == GateKind::H && g.cycle == 0)
            continue;
        const std::uint32_t q = g.qubits[0];
        if (!seen_single[q] && g.kind == GateKind::T)
            flags[i] = true;
        seen_single[q] = true;
    }
    return flags;
}

struct PassResult {
    std::vector<std::size_t> scheduled;
    std::vector<std::size_t> specialized;
    std::vector<std::size_t> deferred;
};

/// One greedy maximal stage: a single in-order sweep; a deferred gate blocks
/// its qubits for the rest of the sweep.
PassResult stage_pass(const std::vector<Gate>& workload, const std::vector<std::size_t>& ids,
                      const QubitMap& map, int l, const PartitionOptions& opts,
                      const std::vector<bool>& forced) {
    PassResult out;
    std::vector<bool> blocked(map.n(), false);
    for (std::size_t id : ids) {
        const Gate& gate = workload[id];
        bool is_blocked = false;
        bool all_local = true;
        for (std::uint32_t q : gate.qubits) {
            is_blocked |= blocked[q];
            all_local &= map.is_local(q, l);
        }
        if (!is_blocked && all_local) {
            out.scheduled.push_back(id);
        } else if (!is_blocked && runs_on_globals(gate, forced[id], opts)) {
            out.specialized.push_back(id);
        } else {
            out.deferred.push_back(id);
            for (std::uint32_t q : gate.qubits)
                blocked[q] = true;
        }
    }
    return out;
}

std::size_t admitted_count(const std::vector<Gate>& workload, const std::vector<std::size_t>& ids,
                           const QubitMap& map, int l, const PartitionOptions& opts,
                           const std::vector<bool>& forced) {
    PassResult r = stage_pass(workload, ids, map, l, opts, forced);
    return r.scheduled.size() + r.specialized.size();
}

QubitMap apply_exchange(const QubitMap& map,
                        const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs) {
    QubitMap out = map;
    for (const auto& [ga, pa] : pairs) {
        const std::uint32_t qg = out.qubit_at[ga];
        const std::uint32_t ql = out.qubit_at[pa];
        std::swap(out.qubit_at[ga], out.qubit_at[pa]);
        out.loc_of[qg] = pa;
        out.loc_of[ql] = ga;
    }
    return out;
}

/// Index in `upcoming` of the first gate that requires this qubit local.
std::vector<std::size_t> next_locality_need(const std::vector<Gate>& workload,
                                            const std::vector<std::size_t>& upcoming, int n,
                                            const PartitionOptions& opts,
                                            const std::vector<bool>& forced) {
    std::vector<std::size_t> need(n, upcoming.size());
    for (std::size_t pos = upcoming.size(); pos-- > 0;) {
        const std::size_t id = upcoming[pos];
        const Gate& gate = workload[id];
        if (runs_on_globals(gate, forced[id], opts))
            continue;
        for (std::uint32_t q : gate.qubits)
            need[q] = pos;
    }
    return need;
}

} // namespace

std::vector<std::pair<std::uint32_t, std::uint32_t>>
select_swap_qubits(const QubitMap& map, int l, const std::vector<Gate>& workload,
                   const std::vector<std::size_t>& upcoming, const PartitionOptions& opts) {
    const int n = map.n();
    const int g = n - l;
    if (g <= 0 || upcoming.empty())
        return {};
    const std::vector<bool> forced = forced_first_t_flags(workload);

    // the head of the deferred stream must become schedulable: keep its local
    // legs local and bring its global legs in
    std::set<std::uint32_t> protected_locals;
    std::set<std::uint32_t> required_globals;
    for (std::uint32_t q : workload[upcoming.front()].qubits) {
        if (map.is_local(q, l))
            protected_locals.insert(q);
        else
            required_globals.insert(q);
    }

    std::vector<std::uint32_t> locals, globals;
    for (int loc = 0; loc < l; ++loc)
        locals.push_back(map.qubit_at[loc]);
    for (int loc = l; loc < n; ++loc)
        globals.push_back(map.qubit_at[loc]);

    const int q_swap =
        std::min<int>(g, l - static_cast<int>(protected_locals.size()));
    if (q_swap < static_cast<int>(required_globals.size()))
        throw invalid_argument("select_swap_qubits: too few local qubits to make progress");

    const std::vector<std::size_t> need =
        next_locality_need(workload, upcoming, n, opts, forced);

    // incoming globals: all of them for a full exchange, else earliest-needed
    std::vector<std::uint32_t> incoming = globals;
    if (q_swap < g) {
        std::stable_sort(incoming.begin(), incoming.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (need[a] != need[b])
                return need[a] < need[b];
            return map.loc_of[a] < map.loc_of[b];
        });
        incoming.resize(q_swap);
    }

    std::vector<std::uint32_t> evict;
    std::vector<std::uint32_t> eligible;
    for (std::uint32_t q : locals)
        if (!protected_locals.count(q))
            eligible.push_back(q);

    if (opts.policy == SwapPolicy::Baseline) {
        // lowest-order locals; the protected ones are skipped to guarantee progress
        std::sort(eligible.begin(), eligible.end(),
                  [&](std::uint32_t a, std::uint32_t b) { return map.loc_of[a] < map.loc_of[b]; });
        evict.assign(eligible.begin(), eligible.begin() + q_swap);
    } else {
        // furthest-next-need seed, then greedy one-stage-lookahead improvement
        std::sort(eligible.begin(), eligible.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (need[a] != need[b])
                return need[a] > need[b];
            return map.loc_of[a] < map.loc_of[b];
        });
        evict.assign(eligible.begin(), eligible.begin() + q_swap);

        auto trial_pairs = [&](const std::vector<std::uint32_t>& ev) {
            std::vector<std::uint32_t> ev_locs;
            for (std::uint32_t q : ev)
                ev_locs.push_back(map.loc_of[q]);
            std::sort(ev_locs.begin(), ev_locs.end());
            std::vector<std::uint32_t> in_locs;
            for (std::uint32_t q : incoming)
                in_locs.push_back(map.loc_of[q]);
            std::sort(in_locs.begin(), in_locs.end());
            std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
            for (std::size_t i = 0; i < ev_locs.size(); ++i)
                pairs.emplace_back(in_locs[i], ev_locs[i]);
            return pairs;
        };
        auto score = [&](const std::vector<std::uint32_t>& ev) {
            return admitted_count(workload, upcoming, apply_exchange(map, trial_pairs(ev)), l,
                                  opts, forced);
        };

        std::size_t best = score(evict);
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t slot = 0; slot < evict.size(); ++slot) {
                for (std::uint32_t cand : eligible) {
                    if (std::find(evict.begin(), evict.end(), cand) != evict.end())
                        continue;
                    std::vector<std::uint32_t> trial = evict;
                    trial[slot] = cand;
                    const std::size_t s = score(trial);
                    if (s > best) {
                        best = s;
                        evict = std::move(trial);
                        improved = true;
                    }
                }
            }
        }
    }

    std::vector<std::uint32_t> ev_locs;
    for (std::uint32_t q : evict)
        ev_locs.push_back(map.loc_of[q]);
    std::sort(ev_locs.begin(), ev_locs.end());
    std::vector<std::uint32_t> in_locs;
    for (std::uint32_t q : incoming)
        in_locs.push_back(map.loc_of[q]);
    std::sort(in_locs.begin(), in_locs.end());

    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::size_t i = 0; i < ev_locs.size(); ++i)
        pairs.emplace_back(in_locs[i], ev_locs[i]);
    return pairs;
}

namespace {

Partition run_partition(const std::vector<Gate>& workload, int n, int l,
                        const PartitionOptions& opts) {
    Partition part;
    const std::vector<bool> forced = forced_first_t_flags(workload);
    QubitMap map = QubitMap::identity(n);
    std::vector<std::size_t> ids(workload.size());
    std::iota(ids.begin(), ids.end(), 0);

    for (;;) {
        PassResult r = stage_pass(workload, ids, map, l, opts, forced);
        part.stages.push_back(RawStage{map, std::move(r.scheduled), std::move(r.specialized)});
        if (r.deferred.empty())
            break;
        if (part.stages.size() > workload.size() + 2)
            throw std::logic_error("partition_stages: no progress");
        auto pairs = select_swap_qubits(map, l, workload, r.deferred, opts);
        map = apply_exchange(map, pairs);
        part.swap_pairs.push_back(std::move(pairs));
        ids = std::move(r.deferred);
    }
    return part;
}

} // namespace

Partition partition_stages(const std::vector<Gate>& workload, int n, int l,
                           const PartitionOptions& opts) {
    if (l > n)
        throw invalid_argument("partition_stages: more local qubits than qubits");
    if (l < n && l < 2)
        throw invalid_argument("partition_stages: need at least 2 local qubits");
    if (opts.policy == SwapPolicy::Baseline)
        return run_partition(workload, n, l, opts);
    // the search never reports more swaps than the baseline bound
    Partition search = run_partition(workload, n, l, opts);
    PartitionOptions base_opts = opts;
    base_opts.policy = SwapPolicy::Baseline;
    Partition baseline = run_partition(workload, n, l, base_opts);
    return baseline.swap_count() < search.swap_count() ? baseline : search;
}

void cluster_stage(const std::vector<Gate>& workload,
                   const std::vector<std::size_t>& local_gates,
                   const std::vector<std::size_t>& specialized, int k_max, Stage& out) {
    struct Item {
        std::size_t id;
        bool spec;
    };
    std::vector<Item> stream;
    {
        std::size_t a = 0, b = 0;
        while (a < local_gates.size() || b < specialized.size()) {
            if (b == specialized.size() ||
                (a < local_gates.size() && local_gates[a] < specialized[b]))
                stream.push_back({local_gates[a++], false});
            else
                stream.push_back({specialized[b++], true});
        }
    }

    std::uint32_t n = 0;
    for (const Item& it : stream)
        for (std::uint32_t q : workload[it.id].qubits)
            n = std::max(n, q + 1);

    std::vector<bool> done(stream.size(), false);
    std::size_t remaining = stream.size();
    out.clusters.clear();
    out.items.clear();
    out.specialized = specialized;

    std::vector<bool> blocked(n, false);

    auto emit_ready_specialized = [&]() {
        std::fill(blocked.begin(), blocked.end(), false);
        for (std::size_t i = 0; i < stream.size(); ++i) {
            if (done[i])
                continue;
            const Gate& gate = workload[stream[i].id];
            bool clear = true;
            for (std::uint32_t q : gate.qubits)
                clear &= !blocked[q];
            if (stream[i].spec && clear) {
                done[i] = true;
                --remaining;
                out.items.push_back(StageItem{false, stream[i].id});
                continue;
            }
            for (std::uint32_t q : gate.qubits)
                blocked[q] = true;
        }
    };

    // scan for gates that fit the support; an unexecuted item blocks its
    // qubits for everything behind it
    auto absorb = [&](const std::set<std::uint32_t>& support, bool commit,
                      std::vector<std::size_t>* members) {
        std::fill(blocked.begin(), blocked.end(), false);
        std::size_t gained = 0;
        for (std::size_t i = 0; i < stream.size(); ++i) {
            if (done[i])
                continue;
            const Gate& gate = workload[stream[i].id];
            bool clear = true;
            for (std::uint32_t q : gate.qubits)
                clear &= !blocked[q];
            bool fits = !stream[i].spec && clear;
            if (fits)
                for (std::uint32_t q : gate.qubits)
                    fits &= support.count(q) != 0;
            if (fits) {
                ++gained;
                if (commit) {
                    done[i] = true;
                    --remaining;
                    members->push_back(stream[i].id);
                }
                continue; // admitted (or virtually admitted): does not block
            }
            for (std::uint32_t q : gate.qubits)
                blocked[q] = true;
        }
        return gained;
    };

    while (remaining > 0) {
        emit_ready_specialized();
        if (remaining == 0)
            break;

        std::size_t first = 0;
        while (done[first])
            ++first;
        assert(!stream[first].spec);

        std::set<std::uint32_t> support(workload[stream[first].id].qubits.begin(),
                                        workload[stream[first].id].qubits.end());
        std::vector<std::size_t> members;
        members.push_back(stream[first].id);
        done[first] = true;
        --remaining;

        for (;;) {
            absorb(support, true, &members);
            if (static_cast<int>(support.size()) >= k_max)
                break;
            // small local search: grow the support by the qubit that pulls in
            // the most not-yet-assigned gates
            std::set<std::uint32_t> candidates;
            for (std::size_t i = 0; i < stream.size(); ++i)
                if (!done[i] && !stream[i].spec)
                    for (std::uint32_t q : workload[stream[i].id].qubits)
                        if (!support.count(q))
                            candidates.insert(q);
            std::uint32_t best_q = 0;
            std::size_t best_gain = 0;
            for (std::uint32_t q : candidates) {
                std::set<std::uint32_t> trial = support;
                trial.insert(q);
                const std::size_t gain = absorb(trial, false, nullptr);
                if (gain > best_gain) {
                    best_gain = gain;
                    best_q = q;
                }
            }
            if (best_gain == 0)
                break;
            support.insert(best_q);
        }

        Cluster cluster;
        std::sort(members.begin(), members.end());
        cluster.gate_ids = std::move(members);
        cluster.support.assign(support.begin(), support.end());
        out.items.push_back(StageItem{true, out.clusters.size()});
        out.clusters.push_back(std::move(cluster));
    }
}

std::size_t SchedulePlan::cluster_count() const {
    std::size_t total = 0;
    for (const Stage& s : stages)
        total += s.clusters.size();
    return total;
}

std::size_t SchedulePlan::clustered_gate_count() const {
    std::size_t total = 0;
    for (const Stage& s : stages)
        for (const Cluster& c : s.clusters)
            total += c.gate_ids.size();
    return total;
}

void adjust_swap_points(SchedulePlan& plan) {
    if (plan.stages.size() < 2)
        return;
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t i = 0; i + 1 < plan.stages.size(); ++i) {
            Stage& cur = plan.stages[i];
            Stage& next = plan.stages[i + 1];
            if (cur.clusters.empty() || cur.items.size() < 2)
                continue;
            if (!cur.items.back().is_cluster)
                continue; // trailing specialized actions depend on the cluster
            const Cluster& last = cur.clusters.back();

            // moved gates must be the per-qubit tail of this stage
            bool legal = true;
            std::vector<std::size_t> min_id_on_qubit(plan.n, SIZE_MAX);
            for (std::size_t id : last.gate_ids)
                for (std::uint32_t q : plan.workload[id].qubits)
                    min_id_on_qubit[q] = std::min(min_id_on_qubit[q], id);
            auto check_item = [&](std::size_t id) {
                for (std::uint32_t q : plan.workload[id].qubits)
                    if (min_id_on_qubit[q] != SIZE_MAX && id > min_id_on_qubit[q])
                        legal = false;
            };
            for (const Cluster& c : cur.clusters)
                if (&c != &last)
                    for (std::size_t id : c.gate_ids)
                        check_item(id);
            for (std::size_t id : cur.specialized)
                check_item(id);
            if (!legal)
                continue;

            // every moved gate must be local in the next stage
            for (std::size_t id : last.gate_ids)
                for (std::uint32_t q : plan.workload[id].qubits)
                    if (!next.entry_map.is_local(q, plan.l))
                        legal = false;
            if (!legal)
                continue;

            std::vector<std::size_t> merged;
            for (const Cluster& c : next.clusters)
                merged.insert(merged.end(), c.gate_ids.begin(), c.gate_ids.end());
            merged.insert(merged.end(), last.gate_ids.begin(), last.gate_ids.end());
            std::sort(merged.begin(), merged.end());

            Stage trial;
            trial.entry_map = next.entry_map;
            cluster_stage(plan.workload, merged, next.specialized, plan.k_max, trial);

            const std::size_t before = cur.clusters.size() + next.clusters.size();
            const std::size_t after = (cur.clusters.size() - 1) + trial.clusters.size();
            if (after < before) {
                cur.items.pop_back();
                cur.clusters.pop_back();
                next = std::move(trial);
                improved = true;
            }
        }
    }
}

QubitMap map_qubits(const std::vector<const Cluster*>& clusters, int l, const QubitMap& entry) {
    const int n = entry.n();
    const int l_eff = std::min(l, n);

    // which clusters touch each local qubit
    std::vector<std::vector<std::size_t>> touching(n);
    for (std::size_t ci = 0; ci < clusters.size(); ++ci)
        for (std::uint32_t q : clusters[ci]->support)
            touching[q].push_back(ci);

    std::vector<std::uint32_t> local_qubits;
    for (int loc = 0; loc < l_eff; ++loc)
        local_qubits.push_back(entry.qubit_at[loc]);

    std::vector<bool> alive(clusters.size(), true);
    std::vector<bool> assigned(n, false);
    std::vector<std::uint32_t> order; // qubit receiving location 0, 1, ...

    auto alive_count = [&](std::uint32_t q) {
        std::size_t c = 0;
        for (std::size_t ci : touching[q])
            if (alive[ci])
                ++c;
        return c;
    };
    auto pick_max = [&]() {
        std::int64_t best = -1;
        std::uint32_t best_q = 0;
        for (std::uint32_t q : local_qubits) {
            if (assigned[q])
                continue;
            const std::int64_t c = static_cast<std::int64_t>(alive_count(q));
            if (c > best || (c == best && q < best_q)) {
                best = c;
                best_q = q;
            }
        }
        return best_q;
    };

    // locations 0..3: ignore every cluster touched by an assigned qubit
    for (int loc = 0; loc < std::min(4, l_eff) && loc < static_cast<int>(local_qubits.size());
         ++loc) {
        const std::uint32_t q = pick_max();
        assigned[q] = true;
        order.push_back(q);
        for (std::size_t ci : touching[q])
            alive[ci] = false;
    }
    // locations 4..7: a cluster is ignored once it touches two of these qubits
    std::vector<std::uint32_t> mid;
    for (int loc = 4; loc < std::min(8, l_eff) && order.size() < local_qubits.size(); ++loc) {
        const std::uint32_t q = pick_max();
        assigned[q] = true;
        order.push_back(q);
        mid.push_back(q);
        for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
            if (!alive[ci])
                continue;
            int hits = 0;
            for (std::uint32_t mq : mid)
                for (std::uint32_t sq : clusters[ci]->support)
                    if (sq == mq)
                        ++hits;
            if (hits >= 2)
                alive[ci] = false;
        }
    }
    // remaining locations: descending total participation, ties by qubit id
    std::vector<std::uint32_t> rest;
    for (std::uint32_t q : local_qubits)
        if (!assigned[q])
            rest.push_back(q);
    std::stable_sort(rest.begin(), rest.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (touching[a].size() != touching[b].size())
            return touching[a].size() > touching[b].size();
        return a < b;
    });
    order.insert(order.end(), rest.begin(), rest.end());

    QubitMap out = entry;
    for (std::size_t loc = 0; loc < order.size(); ++loc) {
        out.qubit_at[loc] = order[loc];
        out.loc_of[order[loc]] = static_cast<std::uint32_t>(loc);
    }
    out.check_bijection();
    return out;
}

std::vector<Gate> scheduled_workload(const Circuit& circuit, bool skip_initial_h,
                                     bool skip_final_cz) {
    // drop the cycle-0 H layer only when it is complete; then the uniform
    // initialization is exactly equivalent
    bool drop_h = false;
    if (skip_initial_h) {
        std::set<std::uint32_t> h0;
        for (const Gate& g : circuit.gates)
            if (g.kind == GateKind::H && g.cycle == 0)
                h0.insert(g.qubits[0]);
        drop_h = h0.size() == circuit.qubit_count();
    }
    std::vector<Gate> workload;
    for (const Gate& g : circuit.gates) {
        if (drop_h && g.kind == GateKind::H && g.cycle == 0)
            continue;
        if (skip_final_cz && g.kind == GateKind::CZ && g.cycle == circuit.depth)
            continue;
        workload.push_back(g);
    }
    return workload;
}

namespace {

/// Transpositions that turn map `from` into map `to` (local locations only).
std::vector<std::pair<int, int>> relabel_transpositions(const QubitMap& from, const QubitMap& to,
                                                        int l) {
    std::vector<int> at(l);  // at[loc] = qubit currently there
    std::vector<int> pos(from.n(), -1);
    for (int loc = 0; loc < l; ++loc) {
        at[loc] = static_cast<int>(from.qubit_at[loc]);
        pos[at[loc]] = loc;
    }
    std::vector<std::pair<int, int>> swaps;
    for (int loc = 0; loc < l; ++loc) {
        const int wanted = static_cast<int>(to.qubit_at[loc]);
        const int cur = pos[wanted];
        if (cur == loc)
            continue;
        swaps.emplace_back(loc, cur);
        const int other = at[loc];
        std::swap(at[loc], at[cur]);
        pos[wanted] = loc;
        pos[other] = cur;
    }
    return swaps;
}

void attach_matrices(SchedulePlan& plan) {
    for (Stage& stage : plan.stages) {
        for (Cluster& cluster : stage.clusters) {
            std::vector<Gate> gates;
            for (std::size_t id : cluster.gate_ids)
                gates.push_back(plan.workload[id]);
            cluster.fused = fuse(gates, cluster.support);

            // execution form: matrix bits ordered by ascending bit-location
            std::vector<std::uint32_t> by_loc = cluster.support;
            std::sort(by_loc.begin(), by_loc.end(), [&](std::uint32_t a, std::uint32_t b) {
                return stage.entry_map.loc_of[a] < stage.entry_map.loc_of[b];
            });
            cluster.exec = permute_qubits(cluster.fused, by_loc);
            cluster.exec_locs.clear();
            for (std::uint32_t q : by_loc)
                cluster.exec_locs.push_back(static_cast<int>(stage.entry_map.loc_of[q]));
        }
    }
}

} // namespace

SchedulePlan compile(const Circuit& circuit, const SchedulerConfig& config) {
    const int n = static_cast<int>(circuit.qubit_count());
    if (n < 1)
        throw invalid_argument("compile: empty circuit grid");
    const int l = std::min(config.local_qubits, n);
    if (config.k_max < 1 || config.k_max > kMaxFusedQubits)
        throw invalid_argument("compile: k_max must be in 1..6");

    for (const Gate& gate : circuit.gates)
        for (std::uint32_t q : gate.qubits)
            if (q >= static_cast<std::uint32_t>(n))
                throw invalid_argument("compile: gate qubit out of range");

    SchedulePlan plan;
    plan.n = n;
    plan.l = l;
    plan.g = n - l;
    plan.k_max = std::min(config.k_max, l > 0 ? l : 1);
    plan.specialize = config.specialize;
    plan.worst_case_dense = config.worst_case_dense;
    plan.workload = scheduled_workload(circuit, config.skip_initial_h, config.skip_final_cz);
    plan.uniform_init_equivalent =
        config.skip_initial_h && plan.workload.size() < circuit.gates.size() &&
        [&] {
            std::set<std::uint32_t> h0;
            for (const Gate& g : circuit.gates)
                if (g.kind == GateKind::H && g.cycle == 0)
                    h0.insert(g.qubits[0]);
            return h0.size() == circuit.qubit_count();
        }();

    PartitionOptions popts;
    popts.specialize = config.specialize;
    popts.worst_case_dense = config.worst_case_dense;
    popts.policy = config.swap_policy;
    Partition part = partition_stages(plan.workload, n, l, popts);

    for (std::size_t i = 0; i < part.stages.size(); ++i) {
        Stage stage;
        stage.entry_map = part.stages[i].entry_map;
        cluster_stage(plan.workload, part.stages[i].local_gates, part.stages[i].specialized,
                      plan.k_max, stage);
        plan.stages.push_back(std::move(stage));
    }
    for (const auto& pairs : part.swap_pairs)
        plan.swaps.push_back(SwapDirective{pairs, {}});

    adjust_swap_points(plan);

    // per-stage bit-location optimization; stage 0 is free (initial states are
    // permutation invariant), later stages pay local swaps after the exchange
    QubitMap prev_final = plan.stages[0].entry_map;
    for (std::size_t i = 0; i < plan.stages.size(); ++i) {
        Stage& stage = plan.stages[i];
        QubitMap raw = stage.entry_map;
        if (i > 0) {
            // The exchange pairs were chosen against the raw predecessor map.
            // Global locations survive the relabeling; the evicted qubits'
            // local locations move with it, so rebuild the pairs to exchange
            // the same qubits out of the relabeled map.
            std::vector<std::pair<std::uint32_t, std::uint32_t>> new_pairs;
            for (const auto& [gl, lo] : plan.swaps[i - 1].pairs) {
                const std::uint32_t incoming_qubit = raw.qubit_at[lo]; // was global, lands at lo
                const std::uint32_t evicted_qubit = raw.qubit_at[gl];  // was local, moves to gl
                if (prev_final.loc_of[incoming_qubit] != gl)
                    throw std::logic_error("compile: inconsistent swap pair");
                new_pairs.emplace_back(gl, prev_final.loc_of[evicted_qubit]);
            }
            plan.swaps[i - 1].pairs = std::move(new_pairs);
            raw = apply_exchange(prev_final, plan.swaps[i - 1].pairs);
        }
        std::vector<const Cluster*> cluster_ptrs;
        for (const Cluster& c : stage.clusters)
            cluster_ptrs.push_back(&c);
        QubitMap relabeled = map_qubits(cluster_ptrs, l, raw);
        if (i > 0)
            plan.swaps[i - 1].post_transpositions = relabel_transpositions(raw, relabeled, l);
        stage.entry_map = relabeled;
        prev_final = relabeled;
    }

    attach_matrices(plan);
    return plan;
}

} // namespace qcsim
