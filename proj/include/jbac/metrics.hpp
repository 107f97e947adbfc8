#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jbac/types.hpp"

namespace jbac {

/// Headline system metrics at one operating point.
struct MetricReport {
    double avg_user_rate_bps = 0.0;   // R_u
    double goodput_lb_bps = 0.0;      // lower-bound goodput, floored at 0
    double ber_ub = 0.0;              // union bound averaged over the symbol
    double weighted_objective = 0.0;  // lambda0*G + (1-lambda0)*R_u
};

// Received SNR of user m under one reflecting pattern.
double user_snr(const ChannelSet& ch, const Beamformer& w, std::span<const Complex> pattern,
                std::size_t m, double sigma_sq);

// Per-user achievable rate in bits/s, patterns uniformly activated.
double user_rate(const ChannelSet& ch, const Beamformer& w, const ReflectingCandidateSet& set,
                 std::size_t m, const SystemConfig& cfg);
double avg_user_rate(const ChannelSet& ch, const Beamformer& w, const ReflectingCandidateSet& set,
                     const SystemConfig& cfg);

// || H_b (Phi_k - Phi_khat) H_1 w s ||, via the diagonal form.
double euclidean_distance(const ChannelSet& ch, const Beamformer& w,
                          const ReflectingCandidateSet& set, std::size_t k, std::size_t khat,
                          Complex s);

double gaussian_q(double x);
// Q(sqrt(d^2 / (2 N0)))
double pairwise_error_prob(double d, double n0);

// E_s[Q(sqrt(d1^2 |s|^2 / (2 N0)))] for s ~ CN(0,1), i.e. |s|^2 ~ Exp(1):
// with c = d1^2/(2 N0) the average is (1 - sqrt(c/(2+c)))/2.
double expected_pep_cn_symbol(double d1_sq, double n0);
// d/d(d1_sq) of the above; caller guards d1_sq ~ 0.
double expected_pep_cn_symbol_dd2(double d1_sq, double n0);

// K*K matrix (row-major, zero diagonal) of E_s[PEP(k -> khat)].
std::vector<double> pair_expected_pep(const ChannelSet& ch, const Beamformer& w,
                                      const ReflectingCandidateSet& set, double n0);
// Squared pair distances at s = 1.
std::vector<double> pair_distance_sq(const ChannelSet& ch, const Beamformer& w,
                                     const ReflectingCandidateSet& set);

// (1/(K log2 K)) sum_k sum_{khat != k} hamming * pep, from a cached PEP matrix.
double union_bound_given_pep(const std::vector<double>& pep,
                             const std::vector<std::uint32_t>& labels);

// Sample-average union bound over explicit symbol draws.
double ber_union_bound(const ChannelSet& ch, const Beamformer& w,
                       const ReflectingCandidateSet& set, double n0,
                       std::span<const Complex> s_samples);
// Closed-form symbol expectation (exponential-magnitude identity).
double ber_union_bound_closed(const ChannelSet& ch, const Beamformer& w,
                              const ReflectingCandidateSet& set, double n0);

// max(0, log2(K) (1 - ber_ub) / T_s); requires K >= 2.
double goodput_lb(std::size_t n_patterns, double ber_ub, double symbol_duration_s);

MetricReport weighted_objective(const ChannelSet& ch, const Beamformer& w,
                                const ReflectingCandidateSet& set, const SystemConfig& cfg);

// Monte Carlo mutual information of the backscatter link, bits per channel use.
double mutual_information_mc(const ChannelSet& ch, const Beamformer& w,
                             const ReflectingCandidateSet& set, double n0,
                             std::size_t noise_samples, std::uint64_t seed);

}  // namespace jbac
