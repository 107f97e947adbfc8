#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jbac/linalg.hpp"

namespace jbac {

/// Scalar system parameters shared by every module.
struct SystemConfig {
    std::size_t n_tx = 2;           // BS transmit antennas
    std::size_t n_rx = 4;           // BS receive antennas
    std::size_t n_elements = 10;    // reflecting elements N
    std::size_t n_users = 4;        // users M
    std::size_t n_patterns = 4;     // candidate set size K, power of two
    double symbol_duration_s = 50e-6;
    double p_max = 1.0;             // transmit power budget, linear watts
    double noise_power = 1.0;       // N0, linear; per-user sigma_m^2 = N0
    double lambda0 = 0.5;           // weighted-sum weight in [0,1]
    std::size_t block_symbols = 100;     // L, metadata only
    double block_duration_s = 5.1e-3;    // T_c, metadata only, T_c >= L*T_s
};

// Bits carried per backscatter symbol: log2(K).
int bits_per_pattern_symbol(std::size_t n_patterns);

// Empty on success, otherwise a description of every violated invariant.
std::optional<std::string> config_error(const SystemConfig& cfg);
// Throws std::invalid_argument with the violation report.
void validate_config(const SystemConfig& cfg);

/// The four channel matrices of one fading block.
struct ChannelSet {
    ComplexMatrix h1;  // N x N_t, BS -> RIS
    ComplexMatrix h2;  // N x M, RIS -> users, column m is h_{2,m}
    ComplexMatrix hd;  // N_t x M, BS -> users, column m is h_{d,m}
    ComplexMatrix hb;  // N_r x N, RIS -> BS
};

bool channel_dims_ok(const ChannelSet& ch, const SystemConfig& cfg);

/// Active beamforming vector, squared norm at most p_max.
struct Beamformer {
    CVec w;
};

bool beamformer_feasible(const Beamformer& w, double p_max, double tol = 1e-9);

/// K reflecting patterns (diagonals of Phi_k) plus their bit labels.
struct ReflectingCandidateSet {
    std::vector<CVec> patterns;          // K vectors of length N
    std::vector<std::uint32_t> bit_labels;  // permutation of {0..K-1}
};

bool is_unit_modulus(const ReflectingCandidateSet& set, double tol = 1e-9);
bool labels_bijective(const std::vector<std::uint32_t>& labels);
std::vector<std::uint32_t> natural_labels(std::size_t k);

// psi = [diag(Phi_1); ...; diag(Phi_K)], length N*K.
CVec stack_candidate_vector(const ReflectingCandidateSet& set);
ReflectingCandidateSet unstack_candidate_vector(const CVec& psi, std::size_t n_patterns,
                                                std::vector<std::uint32_t> labels = {});

}  // namespace jbac
