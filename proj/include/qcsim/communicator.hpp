#pragma once

#include <barrier>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "qcsim/types.hpp"

namespace qcsim {

/// In-process stand-in for a 2^g-rank communicator. Every rank is a thread;
/// collectives are fully synchronizing (double barrier around the copy phase).
/// Block placement follows the usual all-to-all contract: within a group,
/// member j receives block j from every member, ordered by sender.
class Communicator {
  public:
    struct ConstBlock {
        const std::byte* data = nullptr;
        std::size_t bytes = 0;
    };
    struct Block {
        std::byte* data = nullptr;
        std::size_t bytes = 0;
    };

    explicit Communicator(int ranks);

    int size() const { return ranks_; }

    /// `group` lists the participating logical ranks ascending and must
    /// contain `rank`; all ranks of the communicator must call collectives
    /// the same number of times (groups partition the ranks per call).
    void all_to_all(int rank, std::span<const int> group, std::span<const ConstBlock> send,
                    std::span<const Block> recv);

    /// Rank-ordered deterministic sum, identical on every rank.
    double all_reduce_sum(int rank, double value);

    void barrier();

    /// Bytes copied between distinct ranks so far.
    std::uint64_t bytes_exchanged() const;
    /// Collective entries per rank (for the completeness invariant).
    std::uint64_t collective_count(int rank) const;

  private:
    int ranks_;
    std::barrier<> barrier_;
    std::vector<std::vector<ConstBlock>> posted_;
    std::vector<double> reduce_slots_;
    struct alignas(64) Counter {
        std::uint64_t value = 0;
    };
    std::vector<Counter> bytes_by_rank_;
    std::vector<Counter> collectives_by_rank_;
};

} // namespace qcsim
