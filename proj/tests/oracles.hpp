#pragma once

// Test-only oracles, independent of the library implementation paths.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "jbac/channel.hpp"
#include "jbac/metrics.hpp"
#include "jbac/types.hpp"

namespace oracles {

// Box-Muller CN(0,1) generator over std::mt19937_64; independent of the
// library's xoshiro + polar-method path.
struct BoxMullerCn {
    std::mt19937_64 eng;
    explicit BoxMullerCn(std::uint64_t seed) : eng(seed) {}

    jbac::Complex next() {
        const double u1 = 1.0 - static_cast<double>(eng() >> 11) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(eng() >> 11) * 0x1.0p-53;        // [0, 1)
        const double r = std::sqrt(-std::log(u1));  // |z| for unit total variance
        return std::polar(r, 2.0 * M_PI * u2);
    }
};

// Direct re-expansion of the per-user SNR/rate with the reflecting matrix
// materialized as a full N x N diagonal and generic triple-loop products.
inline double scalar_rate_oracle(const jbac::ChannelSet& ch, const jbac::Beamformer& w,
                                 const jbac::ReflectingCandidateSet& set, std::size_t m,
                                 const jbac::SystemConfig& cfg) {
    const std::size_t n = cfg.n_elements;
    const std::size_t n_tx = cfg.n_tx;
    double acc = 0.0;
    for (const jbac::CVec& phi : set.patterns) {
        jbac::ComplexMatrix big_phi(n, n);
        for (std::size_t i = 0; i < n; ++i) big_phi(i, i) = phi[i];
        // row = h2m^H * Phi * H1 + hdm^H
        jbac::CVec h2m_phi(n);
        for (std::size_t j = 0; j < n; ++j) {
            jbac::Complex s{};
            for (std::size_t i = 0; i < n; ++i) s += std::conj(ch.h2(i, m)) * big_phi(i, j);
            h2m_phi[j] = s;
        }
        jbac::CVec row(n_tx);
        for (std::size_t t = 0; t < n_tx; ++t) {
            jbac::Complex s = std::conj(ch.hd(t, m));
            for (std::size_t j = 0; j < n; ++j) s += h2m_phi[j] * ch.h1(j, t);
            row[t] = s;
        }
        jbac::Complex u{};
        for (std::size_t t = 0; t < n_tx; ++t) u += row[t] * w.w[t];
        acc += std::log2(1.0 + std::norm(u) / cfg.noise_power);
    }
    return acc / (cfg.symbol_duration_s * static_cast<double>(set.patterns.size()));
}

namespace internal {
// `force` levels always subdivide; guards against premature acceptance when
// the integrand mass hides between the coarse sample points.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double fa, double fm, double fb, double whole,
                        double eps, int depth, int force) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || (force <= 0 && std::abs(left + right - whole) < 15.0 * eps))
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, eps * 0.5, depth - 1, force - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, eps * 0.5, depth - 1, force - 1);
}
}  // namespace internal

template <typename F>
double integrate(F&& f, double a, double b, double eps = 1e-12) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return internal::adaptive_simpson(f, a, b, fa, fm, fb, whole, eps, 48, 11);
}

// E[Q(sqrt(c X))] for X ~ Exp(1) by quadrature, substituting x = t^2.
inline double quad_expected_pep(double c) {
    auto f = [c](double t) {
        return 2.0 * t * std::exp(-t * t) * 0.5 * std::erfc(std::sqrt(c) * t * M_SQRT1_2);
    };
    return integrate(f, 0.0, std::sqrt(60.0), 1e-13);
}

// Central-difference gradient of a real function of a complex vector, packed
// as (d/dRe + j d/dIm) to match the library's 2 d/dz* convention.
template <typename F>
jbac::CVec fd_gradient(F&& f, jbac::CVec x, double h = 1e-6) {
    jbac::CVec g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const jbac::Complex orig = x[i];
        x[i] = orig + h;
        const double fpr = f(x);
        x[i] = orig - h;
        const double fmr = f(x);
        x[i] = orig + jbac::Complex(0.0, h);
        const double fpi = f(x);
        x[i] = orig - jbac::Complex(0.0, h);
        const double fmi = f(x);
        x[i] = orig;
        g[i] = jbac::Complex((fpr - fmr) / (2.0 * h), (fpi - fmi) / (2.0 * h));
    }
    return g;
}

inline double rel_vec_error(const jbac::CVec& got, const jbac::CVec& want) {
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        diff += std::norm(got[i] - want[i]);
        ref += std::norm(want[i]);
    }
    return std::sqrt(diff) / std::max(std::sqrt(ref), 1e-300);
}

// Exhaustive minimum of the union bound over every label permutation.
inline double brute_force_best_bound(const std::vector<double>& pep, std::size_t k) {
    std::vector<std::uint32_t> labels(k);
    for (std::size_t i = 0; i < k; ++i) labels[i] = static_cast<std::uint32_t>(i);
    double best = 1e300;
    do {
        best = std::min(best, jbac::union_bound_given_pep(pep, labels));
    } while (std::next_permutation(labels.begin(), labels.end()));
    return best;
}

// Random feasible test instance.
struct Instance {
    jbac::SystemConfig cfg;
    jbac::ChannelSet ch;
    jbac::Beamformer w;
    jbac::ReflectingCandidateSet set;
};

inline Instance make_instance(std::uint64_t seed, std::size_t n, std::size_t k, std::size_t n_tx,
                              std::size_t n_rx, std::size_t m, double n0, double lambda0) {
    Instance inst;
    inst.cfg.n_tx = n_tx;
    inst.cfg.n_rx = n_rx;
    inst.cfg.n_elements = n;
    inst.cfg.n_users = m;
    inst.cfg.n_patterns = k;
    inst.cfg.noise_power = n0;
    inst.cfg.lambda0 = lambda0;
    inst.ch = jbac::generate_channels(inst.cfg, seed);

    std::mt19937_64 eng(seed ^ 0xabcdef12345ull);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    inst.w.w.resize(n_tx);
    for (jbac::Complex& e : inst.w.w)
        e = std::polar(unit(eng) + 0.1, 2.0 * M_PI * unit(eng));
    const double nrm = jbac::norm2(inst.w.w);
    const double target = std::sqrt(inst.cfg.p_max) * (0.5 + 0.5 * unit(eng));
    for (jbac::Complex& e : inst.w.w) e *= target / nrm;

    inst.set.patterns.resize(k);
    for (jbac::CVec& phi : inst.set.patterns) {
        phi.resize(n);
        for (jbac::Complex& e : phi) e = std::polar(1.0, 2.0 * M_PI * unit(eng));
    }
    std::vector<std::uint32_t> labels(k);
    for (std::size_t i = 0; i < k; ++i) labels[i] = static_cast<std::uint32_t>(i);
    std::shuffle(labels.begin(), labels.end(), eng);
    inst.set.bit_labels = labels;
    return inst;
}

}  // namespace oracles
