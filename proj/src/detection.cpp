#include "jbac/detection.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "detail.hpp"
#include "jbac/rng.hpp"

namespace jbac {

namespace {

std::size_t detect_against_signals(std::span<const Complex> y, const std::vector<CVec>& b,
                                   Complex s) {
    std::size_t best = 0;
    double best_d2 = 1e300;
    for (std::size_t k = 0; k < b.size(); ++k) {
        double d2 = 0.0;
        for (std::size_t r = 0; r < y.size(); ++r) d2 += std::norm(y[r] - s * b[k][r]);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = k;
        }
    }
    return best;
}

}  // namespace

std::size_t ml_detect(std::span<const Complex> y, const ChannelSet& ch, const Beamformer& w,
                      const ReflectingCandidateSet& set, Complex s) {
    if (y.size() != ch.hb.rows) throw std::invalid_argument("ml_detect: y has wrong length");
    return detect_against_signals(y, detail::pattern_signals(ch, w, set), s);
}

BerResult simulate_ber(const ChannelSet& ch, const Beamformer& w,
                       const ReflectingCandidateSet& set, const SystemConfig& cfg, double n0,
                       std::uint64_t trials, std::uint64_t seed,
                       std::uint64_t early_exit_bit_errors) {
    if (trials == 0) throw std::invalid_argument("simulate_ber: trials must be >= 1");
    const std::size_t k_count = set.patterns.size();
    const int bits = bits_per_pattern_symbol(k_count);
    if (bits == 0) throw std::invalid_argument("simulate_ber: needs K >= 2");
    const std::vector<CVec> b = detail::pattern_signals(ch, w, set);
    const std::size_t n_rx = ch.hb.rows;
    const double noise_scale = std::sqrt(n0);

    constexpr std::uint64_t kBlock = 8192;
    std::uint64_t done = 0;
    std::uint64_t errors = 0;
    while (done < trials) {
        const std::uint64_t n = std::min(kBlock, trials - done);
        long long block_errors = 0;
#pragma omp parallel for schedule(static) reduction(+ : block_errors) if (n >= 1024)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            const std::uint64_t t = done + static_cast<std::uint64_t>(i);
            RandomSource sym(derive_seed(seed, Stream::symbols, t));
            RandomSource noi(derive_seed(seed, Stream::rx_noise, t));
            const std::size_t k = sym.uniform_index(k_count);
            const Complex s = sym.cn01();
            CVec y(n_rx);
            for (std::size_t r = 0; r < n_rx; ++r) y[r] = s * b[k][r] + noise_scale * noi.cn01();
            const std::size_t khat = detect_against_signals(y, b, s);
            block_errors += std::popcount(set.bit_labels[k] ^ set.bit_labels[khat]);
        }
        errors += static_cast<std::uint64_t>(block_errors);
        done += n;
        if (errors >= early_exit_bit_errors) break;
    }

    BerResult res;
    res.trials = done;
    res.bit_errors = errors;
    const double total_bits = static_cast<double>(done) * bits;
    res.empirical_ber = static_cast<double>(errors) / total_bits;
    res.std_error = std::sqrt(res.empirical_ber * (1.0 - res.empirical_ber) / total_bits);
    res.empirical_goodput_bps = bits * (1.0 - res.empirical_ber) / cfg.symbol_duration_s;
    return res;
}

}  // namespace jbac
