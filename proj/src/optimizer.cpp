#include "jbac/optimizer.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "detail.hpp"
#include "jbac/mapping.hpp"
#include "jbac/metrics.hpp"
#include "jbac/rng.hpp"

namespace jbac {

namespace {

constexpr double kTinyDistSq = 1e-30;

constexpr double kRetractFloor = 1e-12;

struct ObjEval {
    double f = 0.0;        // smooth weighted objective
    double avg_rate = 0.0; // R_u, bits/s
    double bound = 0.0;    // E_s[union bound]
};

double goodput_unfloored(int bits, double bound, double ts) {
    return bits * (1.0 - bound) / ts;
}

// d/dx of Q(sqrt(x / (2 n0))).
double q_pep_dd2(double x, double n0) {
    return -std::exp(-x / (4.0 * n0)) / (4.0 * std::sqrt(M_PI * n0 * x));
}

double pair_epep(double d2, double n0, std::span<const Complex> s_samples) {
    if (s_samples.empty()) return expected_pep_cn_symbol(d2, n0);
    double acc = 0.0;
    for (const Complex& s : s_samples)
        acc += gaussian_q(std::sqrt(std::norm(s) * d2 / (2.0 * n0)));
    return acc / static_cast<double>(s_samples.size());
}

double pair_epep_dd2(double d2, double n0, std::span<const Complex> s_samples) {
    if (s_samples.empty()) return expected_pep_cn_symbol_dd2(d2, n0);
    double acc = 0.0;
    for (const Complex& s : s_samples) {
        const double p = std::norm(s);
        const double x = p * d2;
        if (x < kTinyDistSq) continue;
        acc += p * q_pep_dd2(x, n0);
    }
    return acc / static_cast<double>(s_samples.size());
}

ObjEval eval_design(const ChannelSet& ch, const Beamformer& w, const ReflectingCandidateSet& set,
                    const SystemConfig& cfg, std::span<const Complex> s_samples) {
    const std::size_t k_count = set.patterns.size();
    const double ts = cfg.symbol_duration_s;
    const CVec h1w = detail::h1_times_w(ch, w);

    ObjEval ev;
    // primary-link rates
    double rate_acc = 0.0;
    for (std::size_t m = 0; m < cfg.n_users; ++m) {
        const CVec hbar = detail::hbar_row(ch, h1w, m);
        const Complex cd = detail::direct_gain(ch, w, m);
        for (std::size_t k = 0; k < k_count; ++k) {
            Complex u = cd;
            for (std::size_t n = 0; n < hbar.size(); ++n) u += hbar[n] * set.patterns[k][n];
            rate_acc += std::log2(1.0 + std::norm(u) / cfg.noise_power);
        }
    }
    ev.avg_rate = rate_acc / (ts * static_cast<double>(cfg.n_users * k_count));

    // backscatter union bound
    int bits = 0;
    if (k_count >= 2) {
        bits = bits_per_pattern_symbol(k_count);
        std::vector<CVec> b(k_count);
        for (std::size_t k = 0; k < k_count; ++k)
            b[k] = detail::pattern_signal(ch, h1w, set.patterns[k]);
        double acc = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
            for (std::size_t j = k + 1; j < k_count; ++j) {
                double d2 = 0.0;
                for (std::size_t r = 0; r < b[k].size(); ++r) d2 += std::norm(b[k][r] - b[j][r]);
                const int hd2 = 2 * hamming(set.bit_labels[k], set.bit_labels[j]);
                acc += hd2 * pair_epep(d2, cfg.noise_power, s_samples);
            }
        }
        ev.bound = acc / (static_cast<double>(k_count) * bits);
    }
    ev.f = cfg.lambda0 * goodput_unfloored(bits, ev.bound, ts) +
           (1.0 - cfg.lambda0) * ev.avg_rate;
    return ev;
}

TracePoint make_point(std::size_t outer, Phase phase, const ObjEval& ev, const SystemConfig& cfg,
                      double grad_norm, bool accepted, std::size_t inner) {
    TracePoint pt;
    pt.outer = outer;
    pt.phase = phase;
    pt.objective = ev.f;
    pt.avg_rate = ev.avg_rate;
    pt.ber_ub = ev.bound;
    const std::size_t k = cfg.n_patterns;
    pt.goodput = k >= 2 ? goodput_lb(k, ev.bound, cfg.symbol_duration_s) : 0.0;
    pt.grad_norm = grad_norm;
    pt.accepted = accepted;
    pt.inner = inner;
    return pt;
}

double real_inner(std::span<const Complex> a, std::span<const Complex> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (std::conj(a[i]) * b[i]).real();
    return acc;
}

}  // namespace

void validate_settings(const OptimizerSettings& st) {
    auto positive = [](double v) { return v > 0.0; };
    if (!positive(st.step_w) || !positive(st.step_psi))
        throw std::invalid_argument("settings: step sizes must be positive");
    if (!(st.backtrack_factor > 0.0 && st.backtrack_factor < 1.0))
        throw std::invalid_argument("settings: backtrack_factor must lie in (0,1)");
    if (!(st.armijo_c > 0.0 && st.armijo_c < 1.0))
        throw std::invalid_argument("settings: armijo_c must lie in (0,1)");
    if (st.max_inner_iters == 0 || st.max_outer_iters == 0)
        throw std::invalid_argument("settings: iteration limits must be positive");
    if (!positive(st.rel_tol_inner) || !positive(st.rel_tol_outer) || !positive(st.min_step))
        throw std::invalid_argument("settings: tolerances must be positive");
    if (st.p_schedule.empty() || st.q_schedule.empty())
        throw std::invalid_argument("settings: schedules must be non-empty");
    for (std::size_t i = 1; i < st.p_schedule.size(); ++i)
        if (st.p_schedule[i] <= st.p_schedule[i - 1])
            throw std::invalid_argument("settings: p_schedule must be strictly increasing");
    for (std::size_t i = 1; i < st.q_schedule.size(); ++i)
        if (st.q_schedule[i] <= st.q_schedule[i - 1])
            throw std::invalid_argument("settings: q_schedule must be strictly increasing");
    if (st.p_schedule.front() < 2.0)
        throw std::invalid_argument("settings: p_schedule entries must be >= 2");
    if (st.q_schedule.front() <= 0.0)
        throw std::invalid_argument("settings: q_schedule entries must be positive");
    if (st.use_sampled_expectation && st.s_sample_count == 0)
        throw std::invalid_argument("settings: s_sample_count must be >= 1");
}

double design_objective(const ChannelSet& ch, const Beamformer& w,
                        const ReflectingCandidateSet& set, const SystemConfig& cfg,
                        std::span<const Complex> s_samples) {
    return eval_design(ch, w, set, cfg, s_samples).f;
}

CVec grad_w(const ChannelSet& ch, const Beamformer& w, const ReflectingCandidateSet& set,
            const SystemConfig& cfg, std::span<const Complex> s_samples) {
    const std::size_t k_count = set.patterns.size();
    const double ts = cfg.symbol_duration_s;
    const double lam = cfg.lambda0;
    CVec grad(cfg.n_tx, Complex{});

    if (lam < 1.0) {
        const double base =
            (1.0 - lam) / static_cast<double>(cfg.n_users) / (ts * static_cast<double>(k_count));
        for (std::size_t m = 0; m < cfg.n_users; ++m) {
            for (std::size_t k = 0; k < k_count; ++k) {
                const CVec row = detail::user_effective_row(ch, set.patterns[k], m);
                Complex u{};
                for (std::size_t t = 0; t < row.size(); ++t) u += row[t] * w.w[t];
                const double gamma = std::norm(u) / cfg.noise_power;
                const double coef =
                    base * 2.0 / (std::numbers::ln2 * cfg.noise_power * (1.0 + gamma));
                for (std::size_t t = 0; t < row.size(); ++t)
                    grad[t] += coef * std::conj(row[t]) * u;
            }
        }
    }

    if (lam > 0.0 && k_count >= 2) {
        const CVec h1w = detail::h1_times_w(ch, w);
        std::vector<CVec> b(k_count);
        for (std::size_t k = 0; k < k_count; ++k)
            b[k] = detail::pattern_signal(ch, h1w, set.patterns[k]);
        // dG/dw = -(log2 K / Ts) E_s[dPe_bar/dw]; the bound carries the
        // 1/(K log2 K) normalizer, so each pair term scales by -1/(Ts K).
        const double pair_base = -lam / (ts * static_cast<double>(k_count));
        for (std::size_t k = 0; k < k_count; ++k) {
            for (std::size_t j = 0; j < k_count; ++j) {
                if (j == k) continue;
                CVec v(b[k].size());
                double d2 = 0.0;
                for (std::size_t r = 0; r < v.size(); ++r) {
                    v[r] = b[k][r] - b[j][r];
                    d2 += std::norm(v[r]);
                }
                if (d2 < kTinyDistSq) continue;
                const double dd2 = pair_epep_dd2(d2, cfg.noise_power, s_samples);
                const double coef =
                    pair_base * hamming(set.bit_labels[k], set.bit_labels[j]) * dd2 * 2.0;
                const CVec hbv = matvec_herm(ch.hb, v);
                CVec t2(hbv.size());
                for (std::size_t n = 0; n < hbv.size(); ++n)
                    t2[n] = std::conj(set.patterns[k][n] - set.patterns[j][n]) * hbv[n];
                const CVec g = matvec_herm(ch.h1, t2);
                for (std::size_t t = 0; t < grad.size(); ++t) grad[t] += coef * g[t];
            }
        }
    }
    return grad;
}

CVec grad_psi(const ChannelSet& ch, const Beamformer& w, const ReflectingCandidateSet& set,
              const SystemConfig& cfg, std::span<const Complex> s_samples) {
    const std::size_t k_count = set.patterns.size();
    const std::size_t n = cfg.n_elements;
    const double ts = cfg.symbol_duration_s;
    const double lam = cfg.lambda0;
    const CVec h1w = detail::h1_times_w(ch, w);
    CVec grad(n * k_count, Complex{});

    if (lam < 1.0) {
        const double base =
            (1.0 - lam) / static_cast<double>(cfg.n_users) / (ts * static_cast<double>(k_count));
        for (std::size_t m = 0; m < cfg.n_users; ++m) {
            const CVec hbar = detail::hbar_row(ch, h1w, m);
            const Complex cd = detail::direct_gain(ch, w, m);
            for (std::size_t k = 0; k < k_count; ++k) {
                Complex u = cd;
                for (std::size_t i = 0; i < n; ++i) u += hbar[i] * set.patterns[k][i];
                const double gamma = std::norm(u) / cfg.noise_power;
                const double coef =
                    base * 2.0 / (std::numbers::ln2 * cfg.noise_power * (1.0 + gamma));
                for (std::size_t i = 0; i < n; ++i)
                    grad[k * n + i] += coef * std::conj(hbar[i]) * u;
            }
        }
    }

    if (lam > 0.0 && k_count >= 2) {
        std::vector<CVec> b(k_count);
        for (std::size_t k = 0; k < k_count; ++k)
            b[k] = detail::pattern_signal(ch, h1w, set.patterns[k]);
        const double pair_base = -lam / (ts * static_cast<double>(k_count));
        for (std::size_t k = 0; k < k_count; ++k) {
            for (std::size_t j = 0; j < k_count; ++j) {
                if (j == k) continue;
                CVec v(b[k].size());
                double d2 = 0.0;
                for (std::size_t r = 0; r < v.size(); ++r) {
                    v[r] = b[k][r] - b[j][r];
                    d2 += std::norm(v[r]);
                }
                if (d2 < kTinyDistSq) continue;
                const double dd2 = pair_epep_dd2(d2, cfg.noise_power, s_samples);
                // both PEP directions of the pair land on block k
                const double coef =
                    pair_base * 2.0 * hamming(set.bit_labels[k], set.bit_labels[j]) * dd2 * 2.0;
                const CVec hbv = matvec_herm(ch.hb, v);
                for (std::size_t i = 0; i < n; ++i)
                    grad[k * n + i] += coef * std::conj(h1w[i]) * hbv[i];
            }
        }
    }
    return grad;
}

BeamformerResult optimize_w(const ChannelSet& ch, const Beamformer& w0,
                            const ReflectingCandidateSet& set, const SystemConfig& cfg,
                            const OptimizerSettings& st, std::span<const Complex> s_samples) {
    validate_settings(st);
    if (!beamformer_feasible(w0, cfg.p_max))
        throw std::invalid_argument("optimize_w: w0 violates the power budget");

    const double sqrt_p = std::sqrt(cfg.p_max);
    auto project = [&](CVec v) {
        const double nrm = norm2(v);
        if (nrm > sqrt_p)
            for (Complex& e : v) e *= sqrt_p / nrm;
        return v;
    };

    BeamformerResult res;
    res.w = w0;
    ObjEval ev = eval_design(ch, res.w, set, cfg, s_samples);
    if (!std::isfinite(ev.f)) throw std::runtime_error("optimize_w: non-finite objective");
    res.trace.points.push_back(make_point(0, Phase::active, ev, cfg, 0.0, true, 0));

    // steps taken against the per-symbol objective so unit step sizes are sane
    const double sf = cfg.symbol_duration_s;
    double alpha = st.step_w;
    for (std::size_t it = 1; it <= st.max_inner_iters; ++it) {
        const CVec g = grad_w(ch, res.w, set, cfg, s_samples);
        const double gn2 = norm_sq(g);
        if (gn2 == 0.0) break;

        bool accepted = false;
        double a = alpha;
        CVec cand;
        ObjEval ev_new;
        while (a >= st.min_step) {
            CVec step(res.w.w.size());
            for (std::size_t t = 0; t < step.size(); ++t)
                step[t] = res.w.w[t] + (a * sf) * g[t];
            cand = project(std::move(step));
            ev_new = eval_design(ch, Beamformer{cand}, set, cfg, s_samples);
            if (!std::isfinite(ev_new.f))
                throw std::runtime_error("optimize_w: non-finite objective");
            CVec delta(cand.size());
            for (std::size_t t = 0; t < cand.size(); ++t) delta[t] = cand[t] - res.w.w[t];
            const double dir = real_inner(g, delta);
            if (ev_new.f >= ev.f + st.armijo_c * std::max(dir, 0.0)) {
                accepted = true;
                break;
            }
            a *= st.backtrack_factor;
        }
        if (!accepted) break;

        const double rel = std::abs(ev_new.f - ev.f) / std::max(std::abs(ev.f), 1e-300);
        res.w.w = std::move(cand);
        ev = ev_new;
        res.trace.points.push_back(make_point(0, Phase::active, ev, cfg, std::sqrt(gn2), true, it));
        alpha = std::min(st.step_w, a * 4.0);
        if (rel < st.rel_tol_inner) break;
    }
    return res;
}

PatternResult optimize_patterns(const ChannelSet& ch, const Beamformer& w,
                                const ReflectingCandidateSet& set0, const SystemConfig& cfg,
                                const OptimizerSettings& st, std::span<const Complex> s_samples) {
    validate_settings(st);
    if (!is_unit_modulus(set0, 1e-9))
        throw std::invalid_argument("optimize_patterns: set0 entries must be unit modulus");

    const std::size_t k_count = set0.patterns.size();
    const std::vector<std::uint32_t> labels = set0.bit_labels;
    CVec psi = stack_candidate_vector(set0);
    const std::size_t nk = psi.size();
    const double radius = std::sqrt(static_cast<double>(nk));

    auto rescale = [&](CVec v) {
        const double s = radius / norm2(v);
        for (Complex& e : v) e *= s;
        return v;
    };
    auto retract = [&](const CVec& v) {
        CVec out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double mag = std::abs(v[i]);
            if (mag < kRetractFloor)
                throw std::runtime_error(
                    "optimize_patterns: entry modulus below 1e-12 at retraction");
            out[i] = v[i] / mag;
        }
        return out;
    };
    auto as_set = [&](const CVec& v) { return unstack_candidate_vector(v, k_count, labels); };

    PatternResult res;
    const ObjEval ev0 = eval_design(ch, w, set0, cfg, s_samples);
    if (!std::isfinite(ev0.f))
        throw std::runtime_error("optimize_patterns: non-finite objective");
    res.trace.points.push_back(make_point(0, Phase::passive, ev0, cfg, 0.0, true, 0));

    double best_f = ev0.f;
    ReflectingCandidateSet best_set = set0;
    psi = rescale(std::move(psi));

    // the merit pairs the per-symbol objective with the barrier so the
    // q-schedule weights are meaningful
    const double sf = cfg.symbol_duration_s;
    const std::size_t stages = std::max(st.p_schedule.size(), st.q_schedule.size());
    std::size_t inner_counter = 0;
    for (std::size_t stage = 0; stage < stages; ++stage) {
        const double p = st.p_schedule[std::min(stage, st.p_schedule.size() - 1)];
        const double q = st.q_schedule[std::min(stage, st.q_schedule.size() - 1)];

        ObjEval ev = eval_design(ch, w, as_set(psi), cfg, s_samples);
        double merit = sf * ev.f + detail::barrier_penalty(psi, p, q);
        double alpha = st.step_psi;

        for (std::size_t it = 0; it < st.max_inner_iters; ++it) {
            CVec dir = grad_psi(ch, w, as_set(psi), cfg, s_samples);
            const CVec bgrad = detail::barrier_gradient(psi, p, q);
            for (std::size_t i = 0; i < nk; ++i) dir[i] = sf * dir[i] + bgrad[i];
            // tangent plane of tr(psi psi^H) = NK
            const double rho = real_inner(psi, dir) / static_cast<double>(nk);
            for (std::size_t i = 0; i < nk; ++i) dir[i] -= rho * psi[i];
            const double gn2 = norm_sq(dir);
            if (gn2 <= 1e-300) break;

            bool accepted = false;
            double a = alpha;
            CVec cand;
            ObjEval ev_new;
            double merit_new = 0.0;
            while (a >= st.min_step) {
                CVec step(nk);
                for (std::size_t i = 0; i < nk; ++i) step[i] = psi[i] + a * dir[i];
                cand = rescale(std::move(step));
                ev_new = eval_design(ch, w, as_set(cand), cfg, s_samples);
                if (!std::isfinite(ev_new.f))
                    throw std::runtime_error("optimize_patterns: non-finite objective");
                merit_new = sf * ev_new.f + detail::barrier_penalty(cand, p, q);
                if (merit_new >= merit + st.armijo_c * a * gn2) {
                    accepted = true;
                    break;
                }
                a *= st.backtrack_factor;
            }
            if (!accepted) break;

            const double rel = std::abs(merit_new - merit) / std::max(std::abs(merit), 1e-300);
            psi = std::move(cand);
            ev = ev_new;
            merit = merit_new;
            res.trace.points.push_back(
                make_point(0, Phase::passive, ev, cfg, std::sqrt(gn2), true, ++inner_counter));
            alpha = std::min(st.step_psi, a * 4.0);
            if (rel < st.rel_tol_inner) break;
        }

        // snap back onto the constraint set between stages; keep the best
        // retracted iterate seen so far
        psi = retract(psi);
        const ReflectingCandidateSet snapped = as_set(psi);
        const double f_snapped = eval_design(ch, w, snapped, cfg, s_samples).f;
        if (f_snapped > best_f) {
            best_f = f_snapped;
            best_set = snapped;
        }
    }

    // guarded return: never hand back something worse than set0
    if (best_f < ev0.f - 1e-9) {
        res.set = set0;
        return res;
    }
    res.set = std::move(best_set);
    const ObjEval ev_out = eval_design(ch, w, res.set, cfg, s_samples);
    res.trace.points.push_back(
        make_point(0, Phase::passive, ev_out, cfg, 0.0, true, ++inner_counter));
    return res;
}

Beamformer init_beamformer(const SystemConfig& cfg, std::uint64_t seed) {
    RandomSource rng(derive_seed(seed, Stream::init_beamformer));
    const double mag = std::sqrt(cfg.p_max / static_cast<double>(cfg.n_tx));
    Beamformer w;
    w.w.resize(cfg.n_tx);
    for (Complex& e : w.w) e = std::polar(mag, 2.0 * M_PI * rng.uniform());
    return w;
}

ReflectingCandidateSet init_patterns(const SystemConfig& cfg, std::uint64_t seed) {
    RandomSource rng(derive_seed(seed, Stream::init_patterns));
    ReflectingCandidateSet set;
    set.patterns.resize(cfg.n_patterns);
    for (CVec& phi : set.patterns) {
        phi.resize(cfg.n_elements);
        for (Complex& e : phi) e = std::polar(1.0, 2.0 * M_PI * rng.uniform());
    }
    set.bit_labels = natural_labels(cfg.n_patterns);
    return set;
}

AlternateResult alternate(const ChannelSet& ch, const SystemConfig& cfg,
                          const OptimizerSettings& st, std::uint64_t seed, bool run_bsa) {
    validate_config(cfg);
    validate_settings(st);

    CVec samples;
    if (st.use_sampled_expectation) {
        RandomSource rng(derive_seed(seed, Stream::opt_symbols));
        samples.resize(st.s_sample_count);
        for (Complex& s : samples) s = rng.cn01();
    }

    AlternateResult res;
    res.w = init_beamformer(cfg, seed);
    res.set = init_patterns(cfg, seed);

    ObjEval ev = eval_design(ch, res.w, res.set, cfg, samples);
    res.trace.points.push_back(make_point(0, Phase::active, ev, cfg, 0.0, true, 0));
    double f_prev = ev.f;

    for (std::size_t outer = 1; outer <= st.max_outer_iters; ++outer) {
        BeamformerResult wr = optimize_w(ch, res.w, res.set, cfg, st, samples);
        res.w = std::move(wr.w);
        for (std::size_t i = 1; i < wr.trace.points.size(); ++i) {
            wr.trace.points[i].outer = outer;
            res.trace.points.push_back(wr.trace.points[i]);
        }

        PatternResult pr = optimize_patterns(ch, res.w, res.set, cfg, st, samples);
        res.set = std::move(pr.set);
        for (std::size_t i = 1; i < pr.trace.points.size(); ++i) {
            pr.trace.points[i].outer = outer;
            res.trace.points.push_back(pr.trace.points[i]);
        }

        const double f_now = eval_design(ch, res.w, res.set, cfg, samples).f;
        const double rel = std::abs(f_now - f_prev) / std::max(std::abs(f_prev), 1e-300);
        f_prev = f_now;
        if (rel < st.rel_tol_outer) break;
    }

    if (run_bsa && cfg.n_patterns >= 2) res.set = bsa(ch, res.w, res.set, cfg.noise_power);
    return res;
}

}  // namespace jbac
