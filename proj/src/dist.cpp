#include "qcsim/dist.hpp"

namespace qcsim {

void validate_for_run(const SchedulePlan& plan) {
    if (plan.stages.empty())
        throw invalid_argument("plan: no stages");
    if (plan.swaps.size() + 1 != plan.stages.size())
        throw invalid_argument("plan: directive count must be stage count - 1");
    if (plan.l + plan.g != plan.n || plan.l < 0 || plan.g < 0)
        throw invalid_argument("plan: l + g must equal n");

    for (const Stage& stage : plan.stages) {
        stage.entry_map.check_bijection();
        if (stage.entry_map.n() != plan.n)
            throw invalid_argument("plan: stage map size mismatch");
        for (const Cluster& cluster : stage.clusters) {
            if (cluster.exec.k != static_cast<int>(cluster.exec_locs.size()) ||
                cluster.exec.k > plan.k_max)
                throw invalid_argument("plan: cluster width out of range");
            for (std::size_t i = 0; i < cluster.exec_locs.size(); ++i) {
                const int loc = cluster.exec_locs[i];
                if (loc < 0 || loc >= plan.l)
                    throw invalid_argument("plan: cluster bit-location not local");
                if (i > 0 && cluster.exec_locs[i - 1] >= loc)
                    throw invalid_argument("plan: cluster bit-locations must ascend");
            }
        }
        for (const StageItem& item : stage.items) {
            if (item.is_cluster) {
                if (item.index >= stage.clusters.size())
                    throw invalid_argument("plan: dangling cluster item");
                continue;
            }
            if (item.index >= plan.workload.size())
                throw invalid_argument("plan: dangling specialized item");
            const Gate& gate = plan.workload[item.index];
            if (gate.kind != GateKind::CZ && gate.kind != GateKind::T &&
                gate.kind != GateKind::Z)
                throw invalid_argument("plan: specialized items must be diagonal kinds");
            int globals = 0;
            for (std::uint32_t q : gate.qubits)
                if (!stage.entry_map.is_local(q, plan.l))
                    ++globals;
            if (globals == 0)
                throw invalid_argument("plan: specialized item acts on locals only");
            if (gate.kind != GateKind::CZ && globals != 1)
                throw invalid_argument("plan: specialized T/Z must sit on a global location");
        }
    }

    for (const SwapDirective& dir : plan.swaps) {
        std::uint64_t seen = 0;
        std::uint32_t prev_global = 0;
        bool first = true;
        for (const auto& [gl, lo] : dir.pairs) {
            if (gl < static_cast<std::uint32_t>(plan.l) ||
                gl >= static_cast<std::uint32_t>(plan.n) ||
                lo >= static_cast<std::uint32_t>(plan.l))
                throw invalid_argument("plan: swap pair out of range");
            if (!first && gl <= prev_global)
                throw invalid_argument("plan: swap pairs must ascend by global location");
            first = false;
            prev_global = gl;
            if ((seen >> gl) & 1 || (seen >> lo) & 1)
                throw invalid_argument("plan: overlapping swap pairs");
            seen |= (std::uint64_t(1) << gl) | (std::uint64_t(1) << lo);
        }
        for (const auto& [a, b] : dir.post_transpositions)
            if (a < 0 || a >= plan.l || b < 0 || b >= plan.l)
                throw invalid_argument("plan: post transposition out of range");
    }
}

} // namespace qcsim
