#include "qcsim/communicator.hpp"

#include <algorithm>
#include <cstring>

namespace qcsim {

Communicator::Communicator(int ranks)
    : ranks_(ranks), barrier_(ranks), posted_(ranks), reduce_slots_(ranks),
      bytes_by_rank_(ranks), collectives_by_rank_(ranks) {
    if (ranks < 1 || (ranks & (ranks - 1)) != 0)
        throw invalid_argument("Communicator: rank count must be a power of two");
}

void Communicator::barrier() { barrier_.arrive_and_wait(); }

void Communicator::all_to_all(int rank, std::span<const int> group,
                              std::span<const ConstBlock> send, std::span<const Block> recv) {
    if (group.size() != send.size() || group.size() != recv.size())
        throw protocol_error("all_to_all: one send and one recv block per group member");
    std::size_t my_index = group.size();
    for (std::size_t j = 0; j < group.size(); ++j) {
        if (j > 0 && group[j] <= group[j - 1])
            throw protocol_error("all_to_all: group must be sorted ascending");
        if (group[j] == rank)
            my_index = j;
    }
    if (my_index == group.size())
        throw protocol_error("all_to_all: calling rank not in its group");
    for (std::size_t j = 1; j < send.size(); ++j)
        if (send[j].bytes != send[0].bytes || recv[j].bytes != send[0].bytes)
            throw protocol_error("all_to_all: mismatched block sizes");

    collectives_by_rank_[rank].value++;
    posted_[rank].assign(send.begin(), send.end());
    barrier_.arrive_and_wait();

    for (std::size_t j = 0; j < group.size(); ++j) {
        const ConstBlock& src = posted_[group[j]][my_index];
        if (src.bytes != recv[j].bytes)
            throw protocol_error("all_to_all: mismatched block sizes across ranks");
        std::memcpy(recv[j].data, src.data, src.bytes);
        if (group[j] != rank)
            bytes_by_rank_[rank].value += src.bytes;
    }
    barrier_.arrive_and_wait();
}

double Communicator::all_reduce_sum(int rank, double value) {
    collectives_by_rank_[rank].value++;
    reduce_slots_[rank] = value;
    barrier_.arrive_and_wait();
    double total = 0.0;
    for (int r = 0; r < ranks_; ++r)
        total += reduce_slots_[r];
    barrier_.arrive_and_wait();
    return total;
}

std::uint64_t Communicator::bytes_exchanged() const {
    std::uint64_t total = 0;
    for (const Counter& c : bytes_by_rank_)
        total += c.value;
    return total;
}

std::uint64_t Communicator::collective_count(int rank) const {
    return collectives_by_rank_[rank].value;
}

} // namespace qcsim
