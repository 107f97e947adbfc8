#pragma once

#include "jbac/detection.hpp"
#include "jbac/metrics.hpp"

// Serial reference implementations of the parallel kernels, kept for tests
// and the serial-vs-OpenMP benchmark. simulate_ber and mutual_information_mc
// use the same derived per-trial streams and accumulation order as the
// parallel paths and match them bit for bit; ber_union_bound_closed takes the
// unfactored distance route and agrees to rounding.
namespace jbac::ref {

double ber_union_bound_closed(const ChannelSet& ch, const Beamformer& w,
                              const ReflectingCandidateSet& set, double n0);

BerResult simulate_ber(const ChannelSet& ch, const Beamformer& w,
                       const ReflectingCandidateSet& set, const SystemConfig& cfg, double n0,
                       std::uint64_t trials, std::uint64_t seed,
                       std::uint64_t early_exit_bit_errors = 1000);

double mutual_information_mc(const ChannelSet& ch, const Beamformer& w,
                             const ReflectingCandidateSet& set, double n0,
                             std::size_t noise_samples, std::uint64_t seed);

}  // namespace jbac::ref
