#pragma once

#include <cstdint>

#include "jbac/types.hpp"

namespace jbac {

/// Channel estimation error model: H_e = H + H_m, H_m ~ CN(0, delta^2 N0).
struct CsiErrorModel {
    double delta = 0.0;       // error scale, >= 0; 0 means perfect CSI
    double noise_power = 1.0; // N0
};

// Rayleigh fading: every entry i.i.d. CN(0,1). Pure in (cfg, seed).
ChannelSet generate_channels(const SystemConfig& cfg, std::uint64_t seed);

// Adds CN(0, delta^2 N0) noise per entry, independent per matrix. The unit
// perturbation for a given seed is fixed and scaled by delta*sqrt(N0), so
// runs at different delta share the same error directions.
ChannelSet perturb_csi(const ChannelSet& truth, const CsiErrorModel& model, std::uint64_t seed);

}  // namespace jbac
