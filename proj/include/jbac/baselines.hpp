#pragma once

#include <cstdint>

#include "jbac/metrics.hpp"
#include "jbac/optimizer.hpp"
#include "jbac/types.hpp"

namespace jbac {

/// Discrete feasible sets for exhaustive search and phase quantization.
struct DiscreteGrid {
    int bits = 2;                         // b quantization bits, phases 2*pi*m/2^b
    std::size_t beamformer_phase_count = 4;  // per-antenna phase choices
    double beamformer_magnitude = 0.0;    // per-entry magnitude; 0 = sqrt(p_max/n_tx)
};

// Snap each entry phase to the nearest of {2 pi m / 2^b}, ties to smaller m.
ReflectingCandidateSet quantize_patterns(const ReflectingCandidateSet& set, int bits);
// Phase-snap entries onto the grid, equal per-entry magnitudes, total power p_max.
Beamformer quantize_beamformer(const Beamformer& w, const SystemConfig& cfg, int bits);

// Number of candidate-set subsets C((2^b)^N, K); total evaluations multiply
// by beamformer_phase_count^N_t.
double es_evaluation_count(const SystemConfig& cfg, const DiscreteGrid& grid);

struct EsResult {
    Beamformer w;
    ReflectingCandidateSet set;  // labels assigned by BSA
    double objective = 0.0;      // weighted objective at the maximizer
};

// Enumerates all K-subsets of the discrete pattern vectors and all grid
// beamformers; deterministic tie-break by (objective, subset rank, w rank).
EsResult exhaustive_search(const ChannelSet& ch, const SystemConfig& cfg,
                           const DiscreteGrid& grid, double eval_budget = 2e7);

// K tied candidates c_m * phi, c_m = exp(j 2 pi m / K), m = 1..K.
ReflectingCandidateSet mpsk_candidate_set(const CVec& base, std::size_t n_patterns);

// Gradient of the design objective w.r.t. the shared base pattern (chain rule
// through the tied copies), same 2 d/d(phi*) convention as grad_psi.
CVec mpsk_base_gradient(const ChannelSet& ch, const Beamformer& w, const CVec& base,
                        const SystemConfig& cfg, std::span<const Complex> s_samples = {});

struct MpskResult {
    Beamformer w;
    ReflectingCandidateSet set;
    MetricReport report;
};

// Multiplicative M-PSK RIS-information baseline: one base pattern rotated by
// the K-PSK constellation, base and beamformer optimized alternately for the
// same weighted objective.
MpskResult mpsk_scheme(const ChannelSet& ch, const SystemConfig& cfg,
                       const OptimizerSettings& st, std::uint64_t seed);

}  // namespace jbac
