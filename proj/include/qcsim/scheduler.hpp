#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qcsim/circuit.hpp"
#include "qcsim/fusion.hpp"
#include "qcsim/types.hpp"

namespace qcsim {

/// Bijection logical qubit id <-> bit-location. Locations >= l are global
/// (rank bits); locations < l index within one rank's slice.
struct QubitMap {
    std::vector<std::uint32_t> loc_of;   // qubit -> location
    std::vector<std::uint32_t> qubit_at; // location -> qubit

    static QubitMap identity(int n);
    int n() const { return static_cast<int>(loc_of.size()); }
    bool is_local(std::uint32_t qubit, int l) const {
        return loc_of[qubit] < static_cast<std::uint32_t>(l);
    }
    void check_bijection() const;
};

enum class SwapPolicy { Baseline, Search };

struct PartitionOptions {
    bool specialize = true;        // run diagonal gates on global qubits in place
    bool worst_case_dense = false; // treat randomly picked single-qubit gates as dense
    SwapPolicy policy = SwapPolicy::Search;
};

struct RawStage {
    QubitMap entry_map;
    std::vector<std::size_t> local_gates;  // workload ids, ascending
    std::vector<std::size_t> specialized;  // workload ids, ascending
};

struct Partition {
    std::vector<RawStage> stages;
    // swap_pairs[i] moves stage i's map to stage i+1's: (global loc, local loc)
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> swap_pairs;

    int swap_count() const { return static_cast<int>(swap_pairs.size()); }
};

/// Greedy maximal stages over the workload: a gate joins the current stage if
/// its support is local under the stage map (or it is a diagonal global gate
/// and specialization is on); otherwise it blocks its qubits and defers.
Partition partition_stages(const std::vector<Gate>& workload, int n, int l,
                           const PartitionOptions& opts);

/// Pick the (global loc, local loc) exchange pairs at one stage boundary.
std::vector<std::pair<std::uint32_t, std::uint32_t>>
select_swap_qubits(const QubitMap& map, int l, const std::vector<Gate>& workload,
                   const std::vector<std::size_t>& upcoming, const PartitionOptions& opts);

struct Cluster {
    std::vector<std::size_t> gate_ids;      // workload ids, ascending
    std::vector<std::uint32_t> support;     // qubit ids, sorted
    GateMatrix fused;                       // qubit_order == support
    std::vector<int> exec_locs;             // sorted bit-locations under the stage map
    GateMatrix exec;                        // fused, permuted to exec_locs order
};

struct StageItem {
    bool is_cluster = true;
    std::size_t index = 0; // cluster index, or workload id of a specialized gate
};

struct Stage {
    QubitMap entry_map;
    std::vector<Cluster> clusters;
    std::vector<std::size_t> specialized; // workload ids, ascending
    std::vector<StageItem> items;         // execution order
};

struct SwapDirective {
    // bit exchanges realized by the group all-to-all, in the pre-swap map
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs; // (global loc, local loc)
    // local location transpositions applied after the exchange (qubit remap)
    std::vector<std::pair<int, int>> post_transpositions;
};

struct SchedulePlan {
    int n = 0;
    int l = 0;
    int g = 0;
    int k_max = kDefaultKMax;
    bool specialize = true;
    bool worst_case_dense = false;
    bool uniform_init_equivalent = false; // a complete cycle-0 H layer was skipped
    std::vector<Gate> workload;           // gate list after skip options
    std::vector<Stage> stages;
    std::vector<SwapDirective> swaps; // stages.size() - 1 entries

    const QubitMap& final_map() const { return stages.back().entry_map; }
    std::size_t cluster_count() const;
    std::size_t clustered_gate_count() const;
};

/// Greedy clustering of one stage's gate stream into <= k_max qubit fused
/// clusters; specialized gates stay in place and act as per-qubit barriers.
void cluster_stage(const std::vector<Gate>& workload,
                   const std::vector<std::size_t>& local_gates,
                   const std::vector<std::size_t>& specialized, int k_max, Stage& out);

/// Move the trailing cluster of a stage past the following swap when legal
/// and when it lowers the total cluster count; swap count never changes.
void adjust_swap_points(SchedulePlan& plan);

/// Bit-location assignment by descending cluster participation (locations
/// 0..3 one-qubit-covered rule, 4..7 two-of-four rule, rest by count).
QubitMap map_qubits(const std::vector<const Cluster*>& clusters, int l, const QubitMap& entry);

struct SchedulerConfig {
    int local_qubits = 0; // l; clamped to n when larger
    int k_max = kDefaultKMax;
    bool specialize = true;
    bool worst_case_dense = false;
    bool skip_initial_h = true;
    bool skip_final_cz = true;
    SwapPolicy swap_policy = SwapPolicy::Search;
};

/// partition -> select swaps -> cluster -> adjust -> map -> fuse.
SchedulePlan compile(const Circuit& circuit, const SchedulerConfig& config);

/// Workload after the skip options (what the plan will execute).
std::vector<Gate> scheduled_workload(const Circuit& circuit, bool skip_initial_h,
                                     bool skip_final_cz);

} // namespace qcsim
