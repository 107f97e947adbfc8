#pragma once

#include <cstdint>

#include "jbac/linalg.hpp"

namespace jbac {

// Named sub-streams. Seeds for independent random streams are derived by
// hashing (root seed, stream tag, index) so adding a stream never shifts
// the draws of another.
enum class Stream : std::uint64_t {
    channels = 1,
    csi_error = 2,
    symbols = 3,
    rx_noise = 4,
    det_noise = 5,
    init_beamformer = 6,
    init_patterns = 7,
    seed_table = 8,
    mpsk_base = 9,
    opt_symbols = 10,
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t root, Stream stream, std::uint64_t index = 0);

/// xoshiro256++ engine; cheap to construct per derived stream.
struct Xoshiro256pp {
    std::uint64_t s[4];

    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }

    explicit Xoshiro256pp(std::uint64_t seed);
    result_type operator()();
};

/// Engine plus Gaussian/uniform helpers with pinned algorithms.
struct RandomSource {
    Xoshiro256pp eng;
    bool have_spare = false;
    double spare = 0.0;

    explicit RandomSource(std::uint64_t seed) : eng(seed) {}

    double uniform();  // [0, 1)
    std::uint64_t uniform_index(std::uint64_t n);
    double normal();   // N(0,1), Marsaglia polar
    Complex cn01();    // circularly symmetric CN(0,1): (g1 + j g2)/sqrt(2)
};

}  // namespace jbac
