#pragma once

#include <span>
#include <vector>

#include "jbac/types.hpp"

namespace jbac::detail {

// H_1 w, length N.
CVec h1_times_w(const ChannelSet& ch, const Beamformer& w);

// B = H_b (h1w o phi): noise-free receive signal of one pattern at s = 1.
CVec pattern_signal(const ChannelSet& ch, const CVec& h1w, std::span<const Complex> phi);
std::vector<CVec> pattern_signals(const ChannelSet& ch, const Beamformer& w,
                                  const ReflectingCandidateSet& set);

// Row h_tilde_m(Phi) = h2m^H Phi H1 + hdm^H, stored as its n_tx entries.
CVec user_effective_row(const ChannelSet& ch, std::span<const Complex> phi, std::size_t m);

// Row hbar_m = h2m^H diag(h1w), length N.
CVec hbar_row(const ChannelSet& ch, const CVec& h1w, std::size_t m);

// c_{d,m} = hdm^H w.
Complex direct_gain(const ChannelSet& ch, const Beamformer& w, std::size_t m);

// Overflow-safe lp norm.
double lp_norm(std::span<const Complex> v, double p);

// -q (||psi||_p - n^{1/p}): penalty on the lp excess over its minimum on the
// sphere tr(psi psi^H) = n (zero exactly at unit modulus), and its gradient
// (2 d/dpsi*). The q schedule tightens the pull across continuation stages.
double barrier_penalty(std::span<const Complex> psi, double p, double q);
CVec barrier_gradient(std::span<const Complex> psi, double p, double q);

}  // namespace jbac::detail
