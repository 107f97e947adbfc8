#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jbac/types.hpp"

namespace jbac {

/// Knobs of the alternating design.
struct OptimizerSettings {
    double step_w = 1.0;
    double step_psi = 1.0;
    double backtrack_factor = 0.5;
    double armijo_c = 1e-4;
    std::size_t max_inner_iters = 200;
    std::size_t max_outer_iters = 20;
    double rel_tol_inner = 1e-4;
    double rel_tol_outer = 1e-3;
    double min_step = 1e-10;
    std::vector<double> p_schedule = {2, 4, 8, 16, 32, 64};
    std::vector<double> q_schedule = {1e0, 1e1, 1e2, 1e3, 1e4, 1e5};
    // Symbol expectation inside objective/gradients: closed form by default,
    // or a frozen sample set of s_sample_count draws (common random numbers).
    bool use_sampled_expectation = false;
    std::size_t s_sample_count = 256;
};

void validate_settings(const OptimizerSettings& st);

enum class Phase { active, passive };

struct TracePoint {
    std::size_t outer = 0;
    Phase phase = Phase::active;
    double objective = 0.0;
    double avg_rate = 0.0;
    double goodput = 0.0;
    double ber_ub = 0.0;
    double grad_norm = 0.0;
    bool accepted = true;
    std::size_t inner = 0;
};

struct OptimizationTrace {
    std::vector<TracePoint> points;
};

// Smooth design objective lambda0 * log2(K)(1 - E_s[Pe_bar])/T_s + (1-lambda0) R_u.
// Unlike the reported goodput it is not floored at zero, so it stays
// differentiable where the union bound exceeds one. Empty s_samples selects
// the closed-form symbol expectation.
double design_objective(const ChannelSet& ch, const Beamformer& w,
                        const ReflectingCandidateSet& set, const SystemConfig& cfg,
                        std::span<const Complex> s_samples = {});

// Gradient of the design objective w.r.t. w (convention: 2 d/dw*, so real and
// imaginary parts equal the partials along the real coordinates).
CVec grad_w(const ChannelSet& ch, const Beamformer& w, const ReflectingCandidateSet& set,
            const SystemConfig& cfg, std::span<const Complex> s_samples = {});

// Gradient w.r.t. the stacked pattern vector psi (length N*K), same convention.
CVec grad_psi(const ChannelSet& ch, const Beamformer& w, const ReflectingCandidateSet& set,
              const SystemConfig& cfg, std::span<const Complex> s_samples = {});

struct BeamformerResult {
    Beamformer w;
    OptimizationTrace trace;
};

// Projected gradient ascent with backtracking; every accepted step keeps
// ||w||^2 <= p_max and does not decrease the objective.
BeamformerResult optimize_w(const ChannelSet& ch, const Beamformer& w0,
                            const ReflectingCandidateSet& set, const SystemConfig& cfg,
                            const OptimizerSettings& st,
                            std::span<const Complex> s_samples = {});

struct PatternResult {
    ReflectingCandidateSet set;
    OptimizationTrace trace;
};

// Barrier-continuation ascent on the fixed-trace sphere with tangent-plane
// projection; entries are retracted to exact unit modulus at the end and the
// input set is returned unchanged if the retracted objective regressed.
PatternResult optimize_patterns(const ChannelSet& ch, const Beamformer& w,
                                const ReflectingCandidateSet& set0, const SystemConfig& cfg,
                                const OptimizerSettings& st,
                                std::span<const Complex> s_samples = {});

struct AlternateResult {
    Beamformer w;
    ReflectingCandidateSet set;
    OptimizationTrace trace;
};

Beamformer init_beamformer(const SystemConfig& cfg, std::uint64_t seed);
ReflectingCandidateSet init_patterns(const SystemConfig& cfg, std::uint64_t seed);

// Random feasible start, alternate active/passive phases until the weighted
// objective stalls, then one BSA relabeling pass.
AlternateResult alternate(const ChannelSet& ch, const SystemConfig& cfg,
                          const OptimizerSettings& st, std::uint64_t seed,
                          bool run_bsa = true);

}  // namespace jbac
