#include "jbac/baselines.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "detail.hpp"
#include "jbac/mapping.hpp"
#include "jbac/rng.hpp"

namespace jbac {

namespace {

// Nearest grid index for one phase, ties to the smaller m.
std::size_t snap_phase(Complex e, int bits) {
    const std::size_t levels = std::size_t{1} << bits;
    const double step = 2.0 * M_PI / static_cast<double>(levels);
    double phase = std::arg(e);
    if (phase < 0.0) phase += 2.0 * M_PI;
    const double x = phase / step;
    std::size_t m0 = static_cast<std::size_t>(std::floor(x));
    if (m0 >= levels) m0 = levels - 1;
    const double d_down = x - static_cast<double>(m0);
    const double d_up = static_cast<double>(m0 + 1) - x;
    const std::size_t m = d_down <= d_up ? m0 : m0 + 1;
    return m % levels;
}

Complex grid_phase(std::size_t m, int bits) {
    const double step = 2.0 * M_PI / static_cast<double>(std::size_t{1} << bits);
    return std::polar(1.0, step * static_cast<double>(m));
}

double binomial(double n, std::size_t k) {
    double acc = 1.0;
    for (std::size_t i = 0; i < k; ++i)
        acc *= (n - static_cast<double>(i)) / static_cast<double>(i + 1);
    return acc;
}

}  // namespace

ReflectingCandidateSet quantize_patterns(const ReflectingCandidateSet& set, int bits) {
    if (bits < 1) throw std::invalid_argument("quantize_patterns: bits must be >= 1");
    ReflectingCandidateSet out = set;
    for (CVec& phi : out.patterns)
        for (Complex& e : phi) e = grid_phase(snap_phase(e, bits), bits);
    return out;
}

Beamformer quantize_beamformer(const Beamformer& w, const SystemConfig& cfg, int bits) {
    if (bits < 1) throw std::invalid_argument("quantize_beamformer: bits must be >= 1");
    const double mag = std::sqrt(cfg.p_max / static_cast<double>(cfg.n_tx));
    Beamformer out;
    out.w.resize(w.w.size());
    for (std::size_t t = 0; t < w.w.size(); ++t)
        out.w[t] = mag * grid_phase(snap_phase(w.w[t], bits), bits);
    return out;
}

double es_evaluation_count(const SystemConfig& cfg, const DiscreteGrid& grid) {
    const double vectors = std::pow(static_cast<double>(std::size_t{1} << grid.bits),
                                    static_cast<double>(cfg.n_elements));
    return binomial(vectors, cfg.n_patterns) *
           std::pow(static_cast<double>(grid.beamformer_phase_count),
                    static_cast<double>(cfg.n_tx));
}

EsResult exhaustive_search(const ChannelSet& ch, const SystemConfig& cfg,
                           const DiscreteGrid& grid, double eval_budget) {
    validate_config(cfg);
    if (grid.bits < 1) throw std::invalid_argument("exhaustive_search: bits must be >= 1");
    const double required = es_evaluation_count(cfg, grid);
    if (!(required <= eval_budget))
        throw std::invalid_argument("exhaustive_search: evaluation budget exceeded, needs " +
                                    std::to_string(required) + " evaluations");

    const std::size_t n = cfg.n_elements;
    const std::size_t k_count = cfg.n_patterns;
    const std::size_t m_count = cfg.n_users;
    const std::size_t levels = std::size_t{1} << grid.bits;
    std::size_t vector_count = 1;
    for (std::size_t i = 0; i < n; ++i) vector_count *= levels;
    if (vector_count < k_count)
        throw std::invalid_argument("exhaustive_search: fewer grid vectors than patterns");

    // all discrete pattern vectors, ranked by their base-2^b digit encoding
    std::vector<CVec> vectors(vector_count, CVec(n));
    for (std::size_t idx = 0; idx < vector_count; ++idx) {
        std::size_t rest = idx;
        for (std::size_t e = 0; e < n; ++e) {
            vectors[idx][e] = grid_phase(rest % levels, grid.bits);
            rest /= levels;
        }
    }

    // grid beamformers: equal per-entry magnitudes, power exactly p_max
    const double mag = grid.beamformer_magnitude > 0.0
                           ? grid.beamformer_magnitude
                           : std::sqrt(cfg.p_max / static_cast<double>(cfg.n_tx));
    std::size_t w_count = 1;
    for (std::size_t t = 0; t < cfg.n_tx; ++t) w_count *= grid.beamformer_phase_count;
    std::vector<CVec> beams(w_count, CVec(cfg.n_tx));
    for (std::size_t idx = 0; idx < w_count; ++idx) {
        std::size_t rest = idx;
        for (std::size_t t = 0; t < cfg.n_tx; ++t) {
            const double phase = 2.0 * M_PI *
                                 static_cast<double>(rest % grid.beamformer_phase_count) /
                                 static_cast<double>(grid.beamformer_phase_count);
            beams[idx][t] = std::polar(mag, phase);
            rest /= grid.beamformer_phase_count;
        }
        const double scale = std::sqrt(cfg.p_max) / norm2(beams[idx]);
        for (Complex& e : beams[idx]) e *= scale;
    }

    struct Best {
        double objective = -1e300;
        std::size_t subset_rank = ~std::size_t{0};
        std::size_t w_rank = ~std::size_t{0};
        std::vector<std::size_t> subset;
        std::vector<std::uint32_t> labels;

        bool beats(const Best& o) const {
            if (objective != o.objective) return objective > o.objective;
            if (subset_rank != o.subset_rank) return subset_rank < o.subset_rank;
            return w_rank < o.w_rank;
        }
    };
    Best best;

    const double inv_rate_norm =
        1.0 / (cfg.symbol_duration_s * static_cast<double>(m_count * k_count));

    // outer loop over the beamformer grid; per-w caches over pattern vectors
    std::vector<Complex> user_gain(vector_count * m_count);  // h_tilde(v) w per user
    std::vector<Complex> signals(vector_count * cfg.n_rx);   // B_v = Hb (h1w o v)
    for (std::size_t wi = 0; wi < w_count; ++wi) {
        const Beamformer w{beams[wi]};
        const CVec h1w = detail::h1_times_w(ch, w);
        for (std::size_t v = 0; v < vector_count; ++v) {
            const CVec b = detail::pattern_signal(ch, h1w, vectors[v]);
            for (std::size_t r = 0; r < cfg.n_rx; ++r) signals[v * cfg.n_rx + r] = b[r];
            for (std::size_t m = 0; m < m_count; ++m) {
                const CVec row = detail::user_effective_row(ch, vectors[v], m);
                Complex u{};
                for (std::size_t t = 0; t < row.size(); ++t) u += row[t] * w.w[t];
                user_gain[v * m_count + m] = u;
            }
        }

        // chunked lexicographic K-subset enumeration
        constexpr std::size_t kChunk = 16384;
        std::vector<std::size_t> chunk;  // kChunk * k_count indices
        chunk.reserve(kChunk * k_count);
        std::vector<std::size_t> subset(k_count);
        for (std::size_t i = 0; i < k_count; ++i) subset[i] = i;
        std::size_t rank = 0;
        bool exhausted = false;
        while (!exhausted) {
            chunk.clear();
            const std::size_t chunk_rank0 = rank;
            while (chunk.size() < kChunk * k_count) {
                chunk.insert(chunk.end(), subset.begin(), subset.end());
                ++rank;
                // advance to the next combination
                std::size_t i = k_count;
                while (i > 0) {
                    --i;
                    if (subset[i] != i + vector_count - k_count) {
                        ++subset[i];
                        for (std::size_t j = i + 1; j < k_count; ++j) subset[j] = subset[j - 1] + 1;
                        i = ~std::size_t{0};
                        break;
                    }
                }
                if (i != ~std::size_t{0}) {
                    exhausted = true;
                    break;
                }
            }
            const std::size_t in_chunk = chunk.size() / k_count;

            std::vector<Best> bests(static_cast<std::size_t>(omp_get_max_threads()));
#pragma omp parallel if (in_chunk >= 64)
            {
                Best local;
                std::vector<double> pep(k_count * k_count, 0.0);
#pragma omp for schedule(static)
                for (std::ptrdiff_t si = 0; si < static_cast<std::ptrdiff_t>(in_chunk); ++si) {
                    const std::size_t* members = chunk.data() + si * k_count;
                    for (std::size_t a = 0; a < k_count; ++a) {
                        for (std::size_t b = a + 1; b < k_count; ++b) {
                            double d2 = 0.0;
                            const Complex* pa = signals.data() + members[a] * cfg.n_rx;
                            const Complex* pb = signals.data() + members[b] * cfg.n_rx;
                            for (std::size_t r = 0; r < cfg.n_rx; ++r)
                                d2 += std::norm(pa[r] - pb[r]);
                            const double e = expected_pep_cn_symbol(d2, cfg.noise_power);
                            pep[a * k_count + b] = e;
                            pep[b * k_count + a] = e;
                        }
                    }
                    const std::vector<std::uint32_t> labels =
                        bsa_labels(pep, natural_labels(k_count));
                    const double bound = union_bound_given_pep(pep, labels);
                    const double goodput = goodput_lb(k_count, bound, cfg.symbol_duration_s);
                    double rate = 0.0;
                    for (std::size_t a = 0; a < k_count; ++a)
                        for (std::size_t m = 0; m < m_count; ++m)
                            rate += std::log2(
                                1.0 + std::norm(user_gain[members[a] * m_count + m]) /
                                          cfg.noise_power);
                    rate *= inv_rate_norm;
                    const double obj = cfg.lambda0 * goodput + (1.0 - cfg.lambda0) * rate;

                    Best cand;
                    cand.objective = obj;
                    cand.subset_rank = chunk_rank0 + static_cast<std::size_t>(si);
                    cand.w_rank = wi;
                    if (cand.beats(local)) {
                        cand.subset.assign(members, members + k_count);
                        cand.labels = labels;
                        local = std::move(cand);
                    }
                }
                bests[static_cast<std::size_t>(omp_get_thread_num())] = std::move(local);
            }
            for (Best& b : bests)
                if (b.subset_rank != ~std::size_t{0} && b.beats(best)) best = std::move(b);
        }
    }

    if (best.subset.empty()) throw std::runtime_error("exhaustive_search: empty search space");

    EsResult res;
    res.objective = best.objective;
    res.w.w = beams[best.w_rank];
    res.set.patterns.resize(k_count);
    for (std::size_t i = 0; i < k_count; ++i) res.set.patterns[i] = vectors[best.subset[i]];
    res.set.bit_labels = best.labels;
    return res;
}

ReflectingCandidateSet mpsk_candidate_set(const CVec& base, std::size_t n_patterns) {
    ReflectingCandidateSet set;
    set.patterns.resize(n_patterns);
    for (std::size_t m = 0; m < n_patterns; ++m) {
        const Complex rot = std::polar(
            1.0, 2.0 * M_PI * static_cast<double>(m + 1) / static_cast<double>(n_patterns));
        set.patterns[m].resize(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) set.patterns[m][i] = rot * base[i];
    }
    set.bit_labels = natural_labels(n_patterns);
    return set;
}

CVec mpsk_base_gradient(const ChannelSet& ch, const Beamformer& w, const CVec& base,
                        const SystemConfig& cfg, std::span<const Complex> s_samples) {
    const ReflectingCandidateSet tied = mpsk_candidate_set(base, cfg.n_patterns);
    const CVec full = grad_psi(ch, w, tied, cfg, s_samples);
    const std::size_t n = base.size();
    CVec grad(n, Complex{});
    for (std::size_t m = 0; m < cfg.n_patterns; ++m) {
        const Complex rot_conj = std::polar(
            1.0, -2.0 * M_PI * static_cast<double>(m + 1) / static_cast<double>(cfg.n_patterns));
        for (std::size_t i = 0; i < n; ++i) grad[i] += rot_conj * full[m * n + i];
    }
    return grad;
}

MpskResult mpsk_scheme(const ChannelSet& ch, const SystemConfig& cfg,
                       const OptimizerSettings& st, std::uint64_t seed) {
    validate_config(cfg);
    validate_settings(st);

    CVec samples;
    if (st.use_sampled_expectation) {
        RandomSource rng(derive_seed(seed, Stream::opt_symbols));
        samples.resize(st.s_sample_count);
        for (Complex& s : samples) s = rng.cn01();
    }

    MpskResult res;
    res.w = init_beamformer(cfg, seed);
    CVec base(cfg.n_elements);
    {
        RandomSource rng(derive_seed(seed, Stream::mpsk_base));
        for (Complex& e : base) e = std::polar(1.0, 2.0 * M_PI * rng.uniform());
    }

    const std::size_t n = cfg.n_elements;
    const double radius = std::sqrt(static_cast<double>(n));
    auto objective_of = [&](const Beamformer& w, const CVec& b) {
        return design_objective(ch, w, mpsk_candidate_set(b, cfg.n_patterns), cfg, samples);
    };

    double f_prev = objective_of(res.w, base);
    for (std::size_t outer = 1; outer <= st.max_outer_iters; ++outer) {
        BeamformerResult wr =
            optimize_w(ch, res.w, mpsk_candidate_set(base, cfg.n_patterns), cfg, st, samples);
        res.w = std::move(wr.w);

        // passive phase on the shared base, same barrier machinery as the
        // per-pattern design but on the N-dimensional sphere
        double best_f = objective_of(res.w, base);
        CVec best_base = base;
        CVec psi = base;
        {
            const double s = radius / norm2(psi);
            for (Complex& e : psi) e *= s;
        }
        const double sf = cfg.symbol_duration_s;  // per-symbol units, as in the main design
        const std::size_t stages = std::max(st.p_schedule.size(), st.q_schedule.size());
        for (std::size_t stage = 0; stage < stages; ++stage) {
            const double p = st.p_schedule[std::min(stage, st.p_schedule.size() - 1)];
            const double q = st.q_schedule[std::min(stage, st.q_schedule.size() - 1)];
            double merit = sf * objective_of(res.w, psi) + detail::barrier_penalty(psi, p, q);
            double alpha = st.step_psi;
            for (std::size_t it = 0; it < st.max_inner_iters; ++it) {
                CVec dir = mpsk_base_gradient(ch, res.w, psi, cfg, samples);
                const CVec bgrad = detail::barrier_gradient(psi, p, q);
                for (std::size_t i = 0; i < n; ++i) dir[i] = sf * dir[i] + bgrad[i];
                double rho = 0.0;
                for (std::size_t i = 0; i < n; ++i) rho += (std::conj(psi[i]) * dir[i]).real();
                rho /= static_cast<double>(n);
                for (std::size_t i = 0; i < n; ++i) dir[i] -= rho * psi[i];
                const double gn2 = norm_sq(dir);
                if (gn2 <= 1e-300) break;

                bool accepted = false;
                double a = alpha;
                CVec cand;
                double merit_new = 0.0;
                while (a >= st.min_step) {
                    cand.resize(n);
                    for (std::size_t i = 0; i < n; ++i) cand[i] = psi[i] + a * dir[i];
                    const double s = radius / norm2(cand);
                    for (Complex& e : cand) e *= s;
                    merit_new =
                        sf * objective_of(res.w, cand) + detail::barrier_penalty(cand, p, q);
                    if (merit_new >= merit + st.armijo_c * a * gn2) {
                        accepted = true;
                        break;
                    }
                    a *= st.backtrack_factor;
                }
                if (!accepted) break;
                const double rel = std::abs(merit_new - merit) / std::max(std::abs(merit), 1e-300);
                psi = std::move(cand);
                merit = merit_new;
                alpha = std::min(st.step_psi, a * 4.0);
                if (rel < st.rel_tol_inner) break;
            }
            for (Complex& e : psi) {
                const double mag = std::abs(e);
                if (mag < 1e-12)
                    throw std::runtime_error(
                        "mpsk_scheme: entry modulus below 1e-12 at retraction");
                e /= mag;
            }
            const double f_snap = objective_of(res.w, psi);
            if (f_snap > best_f) {
                best_f = f_snap;
                best_base = psi;
            }
        }
        base = best_base;

        const double f_now = objective_of(res.w, base);
        const double rel = std::abs(f_now - f_prev) / std::max(std::abs(f_prev), 1e-300);
        f_prev = f_now;
        if (rel < st.rel_tol_outer) break;
    }

    res.set = mpsk_candidate_set(base, cfg.n_patterns);
    res.report = weighted_objective(ch, res.w, res.set, cfg);
    return res;
}

}  // namespace jbac
