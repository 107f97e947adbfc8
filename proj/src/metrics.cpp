#include "jbac/metrics.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "detail.hpp"
#include "jbac/rng.hpp"

namespace jbac {

double user_snr(const ChannelSet& ch, const Beamformer& w, std::span<const Complex> pattern,
                std::size_t m, double sigma_sq) {
    if (!(sigma_sq > 0.0)) throw std::invalid_argument("user_snr: sigma_sq must be positive");
    const CVec row = detail::user_effective_row(ch, pattern, m);
    Complex u{};
    for (std::size_t t = 0; t < row.size(); ++t) u += row[t] * w.w[t];
    return std::norm(u) / sigma_sq;
}

double user_rate(const ChannelSet& ch, const Beamformer& w, const ReflectingCandidateSet& set,
                 std::size_t m, const SystemConfig& cfg) {
    const std::size_t k_count = set.patterns.size();
    double acc = 0.0;
    for (std::size_t k = 0; k < k_count; ++k)
        acc += std::log2(1.0 + user_snr(ch, w, set.patterns[k], m, cfg.noise_power));
    return acc / (cfg.symbol_duration_s * static_cast<double>(k_count));
}

double avg_user_rate(const ChannelSet& ch, const Beamformer& w, const ReflectingCandidateSet& set,
                     const SystemConfig& cfg) {
    double acc = 0.0;
    for (std::size_t m = 0; m < cfg.n_users; ++m) acc += user_rate(ch, w, set, m, cfg);
    return acc / static_cast<double>(cfg.n_users);
}

double euclidean_distance(const ChannelSet& ch, const Beamformer& w,
                          const ReflectingCandidateSet& set, std::size_t k, std::size_t khat,
                          Complex s) {
    if (k >= set.patterns.size() || khat >= set.patterns.size())
        throw std::invalid_argument("euclidean_distance: pattern index out of range");
    const CVec h1w = detail::h1_times_w(ch, w);
    CVec delta(h1w.size());
    for (std::size_t n = 0; n < h1w.size(); ++n)
        delta[n] = set.patterns[k][n] - set.patterns[khat][n];
    const CVec v = detail::pattern_signal(ch, h1w, delta);
    return std::abs(s) * norm2(v);
}

double gaussian_q(double x) { return 0.5 * std::erfc(x * M_SQRT1_2); }

double pairwise_error_prob(double d, double n0) {
    if (d < 0.0) throw std::invalid_argument("pairwise_error_prob: d must be >= 0");
    if (!(n0 > 0.0)) throw std::invalid_argument("pairwise_error_prob: n0 must be positive");
    return gaussian_q(std::sqrt(d * d / (2.0 * n0)));
}

double expected_pep_cn_symbol(double d1_sq, double n0) {
    const double c = d1_sq / (2.0 * n0);
    return 0.5 * (1.0 - std::sqrt(c / (2.0 + c)));
}

double expected_pep_cn_symbol_dd2(double d1_sq, double n0) {
    const double c = d1_sq / (2.0 * n0);
    return -1.0 / (4.0 * n0 * std::sqrt(c) * std::pow(2.0 + c, 1.5));
}

std::vector<double> pair_distance_sq(const ChannelSet& ch, const Beamformer& w,
                                     const ReflectingCandidateSet& set) {
    const std::vector<CVec> b = detail::pattern_signals(ch, w, set);
    const std::size_t k_count = b.size();
    std::vector<double> d2(k_count * k_count, 0.0);
    for (std::size_t k = 0; k < k_count; ++k) {
        for (std::size_t j = k + 1; j < k_count; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < b[k].size(); ++r) acc += std::norm(b[k][r] - b[j][r]);
            d2[k * k_count + j] = acc;
            d2[j * k_count + k] = acc;
        }
    }
    return d2;
}

std::vector<double> pair_expected_pep(const ChannelSet& ch, const Beamformer& w,
                                      const ReflectingCandidateSet& set, double n0) {
    std::vector<double> pep = pair_distance_sq(ch, w, set);
    const std::size_t k_count = set.patterns.size();
    for (std::size_t k = 0; k < k_count; ++k)
        for (std::size_t j = 0; j < k_count; ++j)
            if (j != k) pep[k * k_count + j] = expected_pep_cn_symbol(pep[k * k_count + j], n0);
    return pep;
}

double union_bound_given_pep(const std::vector<double>& pep,
                             const std::vector<std::uint32_t>& labels) {
    const std::size_t k_count = labels.size();
    if (k_count < 2) return 0.0;
    const int bits = bits_per_pattern_symbol(k_count);
    double acc = 0.0;
    for (std::size_t k = 0; k < k_count; ++k)
        for (std::size_t j = 0; j < k_count; ++j)
            if (j != k)
                acc += std::popcount(labels[k] ^ labels[j]) * pep[k * k_count + j];
    return acc / (static_cast<double>(k_count) * bits);
}

double ber_union_bound(const ChannelSet& ch, const Beamformer& w,
                       const ReflectingCandidateSet& set, double n0,
                       std::span<const Complex> s_samples) {
    if (s_samples.empty()) throw std::invalid_argument("ber_union_bound: s_samples is empty");
    const std::size_t k_count = set.patterns.size();
    if (k_count < 2) return 0.0;
    const std::vector<double> d2 = pair_distance_sq(ch, w, set);
    const int bits = bits_per_pattern_symbol(k_count);
    double acc = 0.0;
    for (const Complex& s : s_samples) {
        const double p = std::norm(s);
        double bound = 0.0;
        for (std::size_t k = 0; k < k_count; ++k)
            for (std::size_t j = 0; j < k_count; ++j)
                if (j != k)
                    bound += std::popcount(set.bit_labels[k] ^ set.bit_labels[j]) *
                             gaussian_q(std::sqrt(p * d2[k * k_count + j] / (2.0 * n0)));
        acc += bound / (static_cast<double>(k_count) * bits);
    }
    return acc / static_cast<double>(s_samples.size());
}

double ber_union_bound_closed(const ChannelSet& ch, const Beamformer& w,
                              const ReflectingCandidateSet& set, double n0) {
    if (set.patterns.size() < 2) return 0.0;
    return union_bound_given_pep(pair_expected_pep(ch, w, set, n0), set.bit_labels);
}

double goodput_lb(std::size_t n_patterns, double ber_ub, double symbol_duration_s) {
    if (n_patterns < 2) throw std::invalid_argument("goodput_lb: requires K >= 2");
    const int bits = bits_per_pattern_symbol(n_patterns);
    return std::max(0.0, bits * (1.0 - ber_ub) / symbol_duration_s);
}

MetricReport weighted_objective(const ChannelSet& ch, const Beamformer& w,
                                const ReflectingCandidateSet& set, const SystemConfig& cfg) {
    MetricReport rep;
    rep.avg_user_rate_bps = avg_user_rate(ch, w, set, cfg);
    rep.ber_ub = ber_union_bound_closed(ch, w, set, cfg.noise_power);
    rep.goodput_lb_bps = set.patterns.size() < 2
                             ? 0.0
                             : goodput_lb(set.patterns.size(), rep.ber_ub, cfg.symbol_duration_s);
    rep.weighted_objective =
        cfg.lambda0 * rep.goodput_lb_bps + (1.0 - cfg.lambda0) * rep.avg_user_rate_bps;
    return rep;
}

double mutual_information_mc(const ChannelSet& ch, const Beamformer& w,
                             const ReflectingCandidateSet& set, double n0,
                             std::size_t noise_samples, std::uint64_t seed) {
    if (noise_samples == 0)
        throw std::invalid_argument("mutual_information_mc: noise_samples must be >= 1");
    const std::size_t k_count = set.patterns.size();
    const std::size_t n_rx = ch.hb.rows;
    const std::vector<CVec> b = detail::pattern_signals(ch, w, set);
    const double log2k = std::log2(static_cast<double>(k_count));

    std::vector<double> values(noise_samples, 0.0);
#pragma omp parallel for schedule(static) if (noise_samples >= 256)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(noise_samples); ++i) {
        RandomSource sym(derive_seed(seed, Stream::symbols, static_cast<std::uint64_t>(i)));
        RandomSource noi(derive_seed(seed, Stream::det_noise, static_cast<std::uint64_t>(i)));
        const Complex s = sym.cn01();
        CVec noise(n_rx);
        for (Complex& e : noise) e = std::sqrt(n0) * noi.cn01();

        double outer = 0.0;
        std::vector<double> expo(k_count);
        for (std::size_t k1 = 0; k1 < k_count; ++k1) {
            double emax = -1e300;
            for (std::size_t k2 = 0; k2 < k_count; ++k2) {
                // -(||s (B_k1 - B_k2) + n||^2 - ||n||^2) / N0, expanded so the
                // ||n||^2 terms cancel exactly.
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
        values[i] = outer / static_cast<double>(k_count);
    }
    double mean_inner = 0.0;
    for (double v : values) mean_inner += v;
    mean_inner /= static_cast<double>(noise_samples);
    return log2k - mean_inner;
}

}  // namespace jbac
