#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qcsim {

using cplx = std::complex<double>;

/// Thrown on contract violations (bad qubit ids, malformed matrices, ...).
class invalid_argument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a document cannot be parsed into a Circuit.
class parse_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Thrown on communicator protocol violations (mismatched block sizes etc.).
class protocol_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// splitmix64: tiny, reproducible PRNG used for circuit instance generation.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

} // namespace qcsim
