#pragma once

#include <cstdint>
#include <span>

#include "jbac/types.hpp"

namespace jbac {

/// Outcome of a Monte Carlo BER run.
struct BerResult {
    std::uint64_t trials = 0;      // trials actually run (early exit may stop short)
    std::uint64_t bit_errors = 0;
    double empirical_ber = 0.0;
    double empirical_goodput_bps = 0.0;
    double std_error = 0.0;        // binomial standard error on the bit level
};

// argmin_k || y - H_b Phi_k H_1 w s ||^2, ties to the lowest index.
std::size_t ml_detect(std::span<const Complex> y, const ChannelSet& ch, const Beamformer& w,
                      const ReflectingCandidateSet& set, Complex s);

// Per trial: uniform pattern index, s ~ CN(0,1), noise ~ CN(0, N0 I); ML
// detection against the true s; bit errors counted under the set's labels.
// Early exit once early_exit_bit_errors have accumulated (block granularity).
BerResult simulate_ber(const ChannelSet& ch, const Beamformer& w,
                       const ReflectingCandidateSet& set, const SystemConfig& cfg, double n0,
                       std::uint64_t trials, std::uint64_t seed,
                       std::uint64_t early_exit_bit_errors = 1000);

}  // namespace jbac
