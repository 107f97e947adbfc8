#include "jbac/types.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace jbac {

int bits_per_pattern_symbol(std::size_t n_patterns) {
    if (n_patterns == 0 || !std::has_single_bit(n_patterns))
        throw std::invalid_argument("n_patterns must be a power of two");
    return std::countr_zero(n_patterns);
}

std::optional<std::string> config_error(const SystemConfig& cfg) {
    std::ostringstream out;
    auto fail = [&](const char* field, const std::string& why) {
        if (out.tellp() > 0) out << "; ";
        out << field << ": " << why;
    };
    if (cfg.n_tx == 0) fail("n_tx", "must be positive");
    if (cfg.n_rx == 0) fail("n_rx", "must be positive");
    if (cfg.n_elements == 0) fail("n_elements", "must be positive");
    if (cfg.n_users == 0) fail("n_users", "must be positive");
    if (cfg.n_patterns == 0 || !std::has_single_bit(cfg.n_patterns))
        fail("n_patterns", "must be a positive power of two, got " + std::to_string(cfg.n_patterns));
    if (!(cfg.symbol_duration_s > 0.0)) fail("symbol_duration_s", "must be strictly positive");
    if (!(cfg.p_max > 0.0)) fail("p_max", "must be strictly positive");
    if (!(cfg.noise_power > 0.0)) fail("noise_power", "must be strictly positive");
    if (!(cfg.lambda0 >= 0.0 && cfg.lambda0 <= 1.0)) fail("lambda0", "must lie in [0, 1]");
    if (cfg.block_symbols == 0) fail("block_symbols", "must be positive");
    if (!(cfg.block_duration_s > 0.0)) fail("block_duration_s", "must be strictly positive");
    const double min_block = static_cast<double>(cfg.block_symbols) * cfg.symbol_duration_s;
    if (cfg.block_duration_s + 1e-12 * std::max(1.0, min_block) < min_block)
        fail("block_duration_s", "must cover block_symbols * symbol_duration_s");
    if (out.tellp() > 0) return out.str();
    return std::nullopt;
}

void validate_config(const SystemConfig& cfg) {
    if (auto err = config_error(cfg)) throw std::invalid_argument("invalid config: " + *err);
}

bool channel_dims_ok(const ChannelSet& ch, const SystemConfig& cfg) {
    return ch.h1.rows == cfg.n_elements && ch.h1.cols == cfg.n_tx &&
           ch.h2.rows == cfg.n_elements && ch.h2.cols == cfg.n_users &&
           ch.hd.rows == cfg.n_tx && ch.hd.cols == cfg.n_users &&
           ch.hb.rows == cfg.n_rx && ch.hb.cols == cfg.n_elements;
}

bool beamformer_feasible(const Beamformer& w, double p_max, double tol) {
    return norm_sq(w.w) <= p_max + tol;
}

bool is_unit_modulus(const ReflectingCandidateSet& set, double tol) {
    for (const CVec& phi : set.patterns)
        for (const Complex& e : phi)
            if (std::abs(std::abs(e) - 1.0) > tol) return false;
    return true;
}

bool labels_bijective(const std::vector<std::uint32_t>& labels) {
    std::vector<bool> seen(labels.size(), false);
    for (std::uint32_t l : labels) {
        if (l >= labels.size() || seen[l]) return false;
        seen[l] = true;
    }
    return true;
}

std::vector<std::uint32_t> natural_labels(std::size_t k) {
    std::vector<std::uint32_t> labels(k);
    for (std::size_t i = 0; i < k; ++i) labels[i] = static_cast<std::uint32_t>(i);
    return labels;
}

CVec stack_candidate_vector(const ReflectingCandidateSet& set) {
    CVec psi;
    for (const CVec& phi : set.patterns) psi.insert(psi.end(), phi.begin(), phi.end());
    return psi;
}

ReflectingCandidateSet unstack_candidate_vector(const CVec& psi, std::size_t n_patterns,
                                                std::vector<std::uint32_t> labels) {
    if (n_patterns == 0 || psi.size() % n_patterns != 0)
        throw std::invalid_argument("unstack: vector length not divisible by K");
    const std::size_t n = psi.size() / n_patterns;
    ReflectingCandidateSet set;
    set.patterns.resize(n_patterns);
    for (std::size_t k = 0; k < n_patterns; ++k)
        set.patterns[k].assign(psi.begin() + k * n, psi.begin() + (k + 1) * n);
    set.bit_labels = labels.empty() ? natural_labels(n_patterns) : std::move(labels);
    if (!labels_bijective(set.bit_labels) || set.bit_labels.size() != n_patterns)
        throw std::invalid_argument("unstack: labels are not a bijection on {0..K-1}");
    return set;
}

}  // namespace jbac
