#include "detail.hpp"

#include <cmath>
#include <stdexcept>

namespace jbac::detail {


CVec h1_times_w(const ChannelSet& ch, const Beamformer& w) { return matvec(ch.h1, w.w); }

CVec pattern_signal(const ChannelSet& ch, const CVec& h1w, std::span<const Complex> phi) {
    if (phi.size() != h1w.size()) throw std::invalid_argument("pattern_signal: size mismatch");
    CVec scaled(h1w.size());
    for (std::size_t n = 0; n < h1w.size(); ++n) scaled[n] = h1w[n] * phi[n];
    return matvec(ch.hb, scaled);
}

std::vector<CVec> pattern_signals(const ChannelSet& ch, const Beamformer& w,
                                  const ReflectingCandidateSet& set) {
    const CVec h1w = h1_times_w(ch, w);
    std::vector<CVec> signals(set.patterns.size());
    for (std::size_t k = 0; k < set.patterns.size(); ++k)
        signals[k] = pattern_signal(ch, h1w, set.patterns[k]);
    return signals;
}

CVec user_effective_row(const ChannelSet& ch, std::span<const Complex> phi, std::size_t m) {
    if (m >= ch.h2.cols) throw std::invalid_argument("user index out of range");
    const std::size_t n = ch.h1.rows;
    const std::size_t n_tx = ch.h1.cols;
    CVec row(n_tx);
    for (std::size_t t = 0; t < n_tx; ++t) row[t] = std::conj(ch.hd(t, m));
    for (std::size_t i = 0; i < n; ++i) {
        const Complex c = std::conj(ch.h2(i, m)) * phi[i];
        for (std::size_t t = 0; t < n_tx; ++t) row[t] += c * ch.h1(i, t);
    }
    return row;
}

CVec hbar_row(const ChannelSet& ch, const CVec& h1w, std::size_t m) {
    if (m >= ch.h2.cols) throw std::invalid_argument("user index out of range");
    CVec row(h1w.size());
    for (std::size_t n = 0; n < h1w.size(); ++n) row[n] = std::conj(ch.h2(n, m)) * h1w[n];
    return row;
}

Complex direct_gain(const ChannelSet& ch, const Beamformer& w, std::size_t m) {
    Complex acc{};
    for (std::size_t t = 0; t < ch.hd.rows; ++t) acc += std::conj(ch.hd(t, m)) * w.w[t];
    return acc;
}

double lp_norm(std::span<const Complex> v, double p) {
    double m = 0.0;
    for (const Complex& e : v) m = std::max(m, std::abs(e));
    if (m == 0.0) return 0.0;
    double acc = 0.0;
    for (const Complex& e : v) acc += std::pow(std::abs(e) / m, p);
    return m * std::pow(acc, 1.0 / p);
}

double barrier_penalty(std::span<const Complex> psi, double p, double q) {
    const double face = std::pow(static_cast<double>(psi.size()), 1.0 / p);
    return -q * (lp_norm(psi, p) - face);
}

CVec barrier_gradient(std::span<const Complex> psi, double p, double q) {
    const double lp = lp_norm(psi, p);
    CVec grad(psi.size());
    if (lp == 0.0) return grad;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double r = std::abs(psi[i]) / lp;
        grad[i] = -q * std::pow(r, p - 2.0) / lp * psi[i];
    }
    return grad;
}

}  // namespace jbac::detail
