#include "jbac/reference.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "detail.hpp"
#include "jbac/rng.hpp"

namespace jbac::ref {

double ber_union_bound_closed(const ChannelSet& ch, const Beamformer& w,
                              const ReflectingCandidateSet& set, double n0) {
    const std::size_t k_count = set.patterns.size();
    if (k_count < 2) return 0.0;
    const CVec h1w = detail::h1_times_w(ch, w);
    const int bits = bits_per_pattern_symbol(k_count);
    double acc = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
        for (std::size_t j = 0; j < k_count; ++j) {
            if (j == k) continue;
            CVec delta(h1w.size());
            for (std::size_t n = 0; n < h1w.size(); ++n)
                delta[n] = set.patterns[k][n] - set.patterns[j][n];
            const double d2 = norm_sq(detail::pattern_signal(ch, h1w, delta));
            acc += std::popcount(set.bit_labels[k] ^ set.bit_labels[j]) *
                   expected_pep_cn_symbol(d2, n0);
        }
    }
    return acc / (static_cast<double>(k_count) * bits);
}

BerResult simulate_ber(const ChannelSet& ch, const Beamformer& w,
                       const ReflectingCandidateSet& set, const SystemConfig& cfg, double n0,
                       std::uint64_t trials, std::uint64_t seed,
                       std::uint64_t early_exit_bit_errors) {
    const std::size_t k_count = set.patterns.size();
    const int bits = bits_per_pattern_symbol(k_count);
    const std::vector<CVec> b = detail::pattern_signals(ch, w, set);
    const std::size_t n_rx = ch.hb.rows;
    const double noise_scale = std::sqrt(n0);

    constexpr std::uint64_t kBlock = 8192;  // same early-exit granularity as the parallel path
    std::uint64_t done = 0;
    std::uint64_t errors = 0;
    while (done < trials) {
        const std::uint64_t n = std::min(kBlock, trials - done);
        for (std::uint64_t i = 0; i < n; ++i) {
            const std::uint64_t t = done + i;
            RandomSource sym(derive_seed(seed, Stream::symbols, t));
            RandomSource noi(derive_seed(seed, Stream::rx_noise, t));
            const std::size_t k = sym.uniform_index(k_count);
            const Complex s = sym.cn01();
            CVec y(n_rx);
            for (std::size_t r = 0; r < n_rx; ++r) y[r] = s * b[k][r] + noise_scale * noi.cn01();
            std::size_t khat = 0;
            double best = 1e300;
            for (std::size_t c = 0; c < k_count; ++c) {
                double d2 = 0.0;
                for (std::size_t r = 0; r < n_rx; ++r) d2 += std::norm(y[r] - s * b[c][r]);
                if (d2 < best) {
                    best = d2;
                    khat = c;
                }
            }
            errors += std::popcount(set.bit_labels[k] ^ set.bit_labels[khat]);
        }
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

double mutual_information_mc(const ChannelSet& ch, const Beamformer& w,
                             const ReflectingCandidateSet& set, double n0,
                             std::size_t noise_samples, std::uint64_t seed) {
    const std::size_t k_count = set.patterns.size();
    const std::size_t n_rx = ch.hb.rows;
    const std::vector<CVec> b = detail::pattern_signals(ch, w, set);

    double mean_inner = 0.0;
    std::vector<double> expo(k_count);
    for (std::size_t i = 0; i < noise_samples; ++i) {
        RandomSource sym(derive_seed(seed, Stream::symbols, i));
        RandomSource noi(derive_seed(seed, Stream::det_noise, i));
        const Complex s = sym.cn01();
        CVec noise(n_rx);
        for (Complex& e : noise) e = std::sqrt(n0) * noi.cn01();
        double outer = 0.0;
        for (std::size_t k1 = 0; k1 < k_count; ++k1) {
            double emax = -1e300;
            for (std::size_t k2 = 0; k2 < k_count; ++k2) {
                double quad = 0.0;
                for (std::size_t r = 0; r < n_rx; ++r) {
                    const Complex d = s * (b[k1][r] - b[k2][r]);
                    quad += std::norm(d) + 2.0 * (d * std::conj(noise[r])).real();
                }
                expo[k2] = -quad / n0;
                emax = std::max(emax, expo[k2]);
            }
            double sum = 0.0;
            for (std::size_t k2 = 0; k2 < k_count; ++k2) sum += std::exp(expo[k2] - emax);
            outer += (emax + std::log(sum)) / std::numbers::ln2;
        }
        mean_inner += outer / static_cast<double>(k_count);
    }
    mean_inner /= static_cast<double>(noise_samples);
    return std::log2(static_cast<double>(k_count)) - mean_inner;
}

}  // namespace jbac::ref
