#include <doctest.h>

#include <cmath>

#include "detail.hpp"
#include "jbac/optimizer.hpp"
#include "jbac/metrics.hpp"
#include "oracles.hpp"

using namespace jbac;

namespace {

OptimizerSettings tight_settings() {
    OptimizerSettings st;
    st.rel_tol_inner = 1e-10;
    st.max_inner_iters = 500;
    return st;
}

CVec frozen_samples(std::uint64_t seed, std::size_t count) {
    oracles::BoxMullerCn gen(seed);
    CVec samples(count);
    for (Complex& s : samples) s = gen.next();
    return samples;
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("beamformer gradient matches finite differences, closed form") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto inst = oracles::make_instance(seed, 3 + seed % 4, seed % 2 ? 4 : 2, 2, 3, 2,
                                                 0.5 + 0.2 * seed, 0.3 + 0.05 * seed);
        auto f = [&](const CVec& w) {
            return design_objective(inst.ch, Beamformer{w}, inst.set, inst.cfg);
        };
        const CVec analytic = grad_w(inst.ch, inst.w, inst.set, inst.cfg);
        const CVec fd = oracles::fd_gradient(f, inst.w.w);
        CHECK(oracles::rel_vec_error(analytic, fd) < 1e-5);
    }
}

TEST_CASE("beamformer gradient matches finite differences, frozen samples") {
    const CVec samples = frozen_samples(77, 32);
    for (std::uint64_t seed = 8; seed < 12; ++seed) {
        const auto inst = oracles::make_instance(seed, 4, 4, 2, 3, 2, 1.0, 0.6);
        auto f = [&](const CVec& w) {
            return design_objective(inst.ch, Beamformer{w}, inst.set, inst.cfg, samples);
        };
        const CVec analytic = grad_w(inst.ch, inst.w, inst.set, inst.cfg, samples);
        const CVec fd = oracles::fd_gradient(f, inst.w.w);
        CHECK(oracles::rel_vec_error(analytic, fd) < 1e-5);
    }
}

TEST_CASE("pattern gradient matches finite differences, closed form") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto inst = oracles::make_instance(seed + 20, 3 + seed % 3, seed % 2 ? 4 : 2, 2, 3,
                                                 2, 0.4 + 0.2 * seed, 0.4);
        auto f = [&](const CVec& psi) {
            return design_objective(
                inst.ch, inst.w,
                unstack_candidate_vector(psi, inst.cfg.n_patterns, inst.set.bit_labels), inst.cfg);
        };
        const CVec analytic = grad_psi(inst.ch, inst.w, inst.set, inst.cfg);
        const CVec fd = oracles::fd_gradient(f, stack_candidate_vector(inst.set));
        CHECK(oracles::rel_vec_error(analytic, fd) < 1e-5);
    }
}

TEST_CASE("pattern gradient matches finite differences, frozen samples") {
    const CVec samples = frozen_samples(78, 32);
    for (std::uint64_t seed = 12; seed < 16; ++seed) {
        const auto inst = oracles::make_instance(seed + 40, 4, 4, 2, 3, 2, 1.5, 0.7);
        auto f = [&](const CVec& psi) {
            return design_objective(
                inst.ch, inst.w,
                unstack_candidate_vector(psi, inst.cfg.n_patterns, inst.set.bit_labels), inst.cfg,
                samples);
        };
        const CVec analytic = grad_psi(inst.ch, inst.w, inst.set, inst.cfg, samples);
        const CVec fd = oracles::fd_gradient(f, stack_candidate_vector(inst.set));
        CHECK(oracles::rel_vec_error(analytic, fd) < 1e-5);
    }
}

TEST_CASE("gradients are affine in the weight, isolating the two terms") {
    auto inst = oracles::make_instance(99, 5, 4, 2, 4, 3, 0.9, 0.0);
    const CVec rate_part = grad_w(inst.ch, inst.w, inst.set, inst.cfg);
    inst.cfg.lambda0 = 1.0;
    const CVec goodput_part = grad_w(inst.ch, inst.w, inst.set, inst.cfg);
    inst.cfg.lambda0 = 0.3;
    const CVec mixed = grad_w(inst.ch, inst.w, inst.set, inst.cfg);
    for (std::size_t t = 0; t < mixed.size(); ++t)
        CHECK(std::abs(mixed[t] - (0.3 * goodput_part[t] + 0.7 * rate_part[t])) <=
              1e-12 * (1.0 + std::abs(mixed[t])));

    // doubling the user noise variance moves the rate term only
    auto doubled = inst;
    doubled.cfg.noise_power = 2.0 * inst.cfg.noise_power;
    doubled.cfg.lambda0 = 0.0;
    inst.cfg.lambda0 = 0.0;
    const CVec rate_doubled = grad_w(doubled.ch, doubled.w, doubled.set, doubled.cfg);
    CHECK(oracles::rel_vec_error(rate_doubled, rate_part) > 1e-3);
}

TEST_CASE("barrier direction matches finite differences of the merit") {
    const auto inst = oracles::make_instance(101, 3, 2, 2, 3, 2, 1.0, 0.5);
    CVec psi = stack_candidate_vector(inst.set);
    // perturb off the unit-modulus face so the barrier is active and smooth
    for (std::size_t i = 0; i < psi.size(); ++i)
        psi[i] *= 1.0 + 0.2 * std::sin(static_cast<double>(i) + 1.0);
    const double p = 4.0, q = 10.0;
    auto merit = [&](const CVec& v) {
        return design_objective(inst.ch, inst.w,
                                unstack_candidate_vector(v, 2, inst.set.bit_labels), inst.cfg) +
               detail::barrier_penalty(v, p, q);
    };
    CVec analytic = grad_psi(
        inst.ch, inst.w, unstack_candidate_vector(psi, 2, inst.set.bit_labels), inst.cfg);
    const CVec bg = detail::barrier_gradient(psi, p, q);
    for (std::size_t i = 0; i < analytic.size(); ++i) analytic[i] += bg[i];
    const CVec fd = oracles::fd_gradient(merit, psi);
    CHECK(oracles::rel_vec_error(analytic, fd) < 1e-5);
}

TEST_CASE("zero gradient leaves the beamformer exactly in place") {
    auto inst = oracles::make_instance(102, 4, 4, 2, 4, 2, 1.0, 0.0);
    for (ComplexMatrix* m : {&inst.ch.h1, &inst.ch.h2, &inst.ch.hd, &inst.ch.hb})
        for (Complex& e : m->entries) e = Complex{};
    const BeamformerResult res = optimize_w(inst.ch, inst.w, inst.set, inst.cfg, tight_settings());
    for (std::size_t t = 0; t < inst.w.w.size(); ++t) CHECK(res.w.w[t] == inst.w.w[t]);
}

TEST_CASE("beamformer ascent is monotone and feasible across seeds") {
    OptimizerSettings st;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto inst = oracles::make_instance(seed + 300, 5, 4, 2, 4, 3, 1.0, 0.5);
        const BeamformerResult res = optimize_w(inst.ch, inst.w, inst.set, inst.cfg, st);
        for (std::size_t i = 1; i < res.trace.points.size(); ++i)
            CHECK(res.trace.points[i].objective >= res.trace.points[i - 1].objective);
        CHECK(norm_sq(res.w.w) <= inst.cfg.p_max + 1e-9);
        CHECK(res.trace.points.back().objective >= res.trace.points.front().objective);
    }
}

TEST_CASE("infeasible start is rejected") {
    const auto inst = oracles::make_instance(103, 4, 4, 2, 4, 2, 1.0, 0.5);
    Beamformer w = inst.w;
    for (Complex& e : w.w) e *= 10.0;
    CHECK_THROWS_AS(optimize_w(inst.ch, w, inst.set, inst.cfg, tight_settings()),
                    std::invalid_argument);
}

TEST_CASE("pattern phase never regresses and outputs unit modulus") {
    OptimizerSettings st;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto inst = oracles::make_instance(seed + 400, 4, 4, 2, 4, 2, 0.7, 0.5);
        const double before = design_objective(inst.ch, inst.w, inst.set, inst.cfg);
        const PatternResult res = optimize_patterns(inst.ch, inst.w, inst.set, inst.cfg, st);
        const double after = design_objective(inst.ch, inst.w, res.set, inst.cfg);
        CHECK(after >= before - 1e-9);
        for (const CVec& phi : res.set.patterns)
            for (const Complex& e : phi) CHECK(std::abs(std::abs(e) - 1.0) <= 1e-9);
        CHECK(res.set.bit_labels == inst.set.bit_labels);
    }
}

TEST_CASE("non-unit-modulus start is rejected") {
    auto inst = oracles::make_instance(104, 4, 4, 2, 4, 2, 1.0, 0.5);
    inst.set.patterns[0][0] *= 1.5;
    CHECK_THROWS_AS(optimize_patterns(inst.ch, inst.w, inst.set, inst.cfg, tight_settings()),
                    std::invalid_argument);
}

TEST_CASE("single-element toy recovers the analytic phase alignment") {
    // one element, one pattern, one user: the optimum aligns the reflected
    // path with the direct path
    oracles::Instance inst;
    inst.cfg.n_tx = 1;
    inst.cfg.n_rx = 1;
    inst.cfg.n_elements = 1;
    inst.cfg.n_users = 1;
    inst.cfg.n_patterns = 1;
    inst.cfg.noise_power = 1.0;
    inst.cfg.lambda0 = 0.0;
    inst.ch = generate_channels(inst.cfg, 5);
    inst.w.w = {std::polar(1.0, 0.3)};
    inst.set.patterns = {{std::polar(1.0, 2.2)}};
    inst.set.bit_labels = {0};

    auto objective_at = [&](double theta) {
        ReflectingCandidateSet set;
        set.patterns = {{std::polar(1.0, theta)}};
        set.bit_labels = {0};
        return design_objective(inst.ch, inst.w, set, inst.cfg);
    };
    double best_theta = 0.0, best_val = -1e300;
    for (int i = 0; i < 20000; ++i) {
        const double theta = 2.0 * M_PI * i / 20000.0;
        const double v = objective_at(theta);
        if (v > best_val) {
            best_val = v;
            best_theta = theta;
        }
    }

    OptimizerSettings st = tight_settings();
    const PatternResult res = optimize_patterns(inst.ch, inst.w, inst.set, inst.cfg, st);
    const double got_theta = std::arg(res.set.patterns[0][0]);
    double diff = std::abs(got_theta - best_theta);
    diff = std::min(diff, 2.0 * M_PI - diff);
    CHECK(diff < 1e-3);
}

TEST_CASE("pattern gradient has no goodput part for a single pattern") {
    auto inst = oracles::make_instance(105, 4, 1, 2, 4, 2, 1.0, 1.0);
    const CVec g = grad_psi(inst.ch, inst.w, inst.set, inst.cfg);
    for (const Complex& e : g) CHECK(e == Complex{});
}

TEST_CASE("permuting patterns permutes the gradient blocks") {
    const auto inst = oracles::make_instance(106, 4, 4, 2, 4, 2, 1.0, 0.5);
    const std::size_t n = inst.cfg.n_elements;
    const CVec base = grad_psi(inst.ch, inst.w, inst.set, inst.cfg);

    auto permuted = inst;
    const std::size_t perm[4] = {2, 0, 3, 1};
    for (std::size_t k = 0; k < 4; ++k) {
        permuted.set.patterns[k] = inst.set.patterns[perm[k]];
        permuted.set.bit_labels[k] = inst.set.bit_labels[perm[k]];
    }
    const CVec shuffled = grad_psi(permuted.ch, permuted.w, permuted.set, permuted.cfg);
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(shuffled[k * n + i] - base[perm[k] * n + i]) <=
                  1e-12 * (1.0 + std::abs(base[perm[k] * n + i])));
}

TEST_CASE("alternating design never loses rate at lambda zero") {
    OptimizerSettings st;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SystemConfig cfg;
        cfg.lambda0 = 0.0;
        const ChannelSet ch = generate_channels(cfg, seed + 600);
        const Beamformer w0 = init_beamformer(cfg, seed + 600);
        const ReflectingCandidateSet set0 = init_patterns(cfg, seed + 600);
        const double before = avg_user_rate(ch, w0, set0, cfg);
        const AlternateResult res = alternate(ch, cfg, st, seed + 600);
        CHECK(avg_user_rate(ch, res.w, res.set, cfg) >= before);
    }
}

TEST_CASE("alternating design is deterministic") {
    SystemConfig cfg;
    OptimizerSettings st;
    const ChannelSet ch = generate_channels(cfg, 77);
    const AlternateResult a = alternate(ch, cfg, st, 77);
    const AlternateResult b = alternate(ch, cfg, st, 77);
    REQUIRE(a.trace.points.size() == b.trace.points.size());
    for (std::size_t i = 0; i < a.trace.points.size(); ++i)
        CHECK(a.trace.points[i].objective == b.trace.points[i].objective);
    for (std::size_t t = 0; t < a.w.w.size(); ++t) CHECK(a.w.w[t] == b.w.w[t]);
    CHECK(a.set.bit_labels == b.set.bit_labels);
}

TEST_CASE("objective converges within the outer budget on the desk-scale setup") {
    SystemConfig cfg;  // N = 10, K = 4
    cfg.noise_power = 10.0;  // -10 dB
    OptimizerSettings st;
    const ChannelSet ch = generate_channels(cfg, 42);
    const AlternateResult res = alternate(ch, cfg, st, 42);
    // flattening: the last outer improves little over the mid-run value
    std::vector<double> per_outer;
    for (std::size_t i = 0; i < res.trace.points.size(); ++i) {
        const bool last_of_outer = i + 1 == res.trace.points.size() ||
                                   res.trace.points[i + 1].outer != res.trace.points[i].outer;
        if (last_of_outer) per_outer.push_back(res.trace.points[i].objective);
    }
    REQUIRE(per_outer.size() >= 2);
    const double final = per_outer.back();
    const std::size_t mid = std::min<std::size_t>(10, per_outer.size() - 1);
    CHECK(final - per_outer[mid] <= 0.05 * std::abs(final));
    CHECK(final >= per_outer.front());
}

TEST_CASE("unit-preserving rescaling of channels and noise replays the identical run") {
    SystemConfig cfg;
    cfg.n_elements = 4;
    cfg.noise_power = 0.5;
    OptimizerSettings st;
    st.max_outer_iters = 4;
    const ChannelSet ch = generate_channels(cfg, 9);

    // x2 on both user paths and the backscatter path, x4 on every noise power:
    // all SNR ratios are unchanged and the scale factors are exact in binary
    SystemConfig cfg2 = cfg;
    cfg2.noise_power = 4.0 * cfg.noise_power;
    ChannelSet ch2 = ch;
    for (Complex& e : ch2.h2.entries) e *= 2.0;
    for (Complex& e : ch2.hd.entries) e *= 2.0;
    for (Complex& e : ch2.hb.entries) e *= 2.0;

    const AlternateResult a = alternate(ch, cfg, st, 9);
    const AlternateResult b = alternate(ch2, cfg2, st, 9);
    REQUIRE(a.trace.points.size() == b.trace.points.size());
    for (std::size_t i = 0; i < a.trace.points.size(); ++i) {
        CHECK(a.trace.points[i].objective == b.trace.points[i].objective);
        CHECK(a.trace.points[i].accepted == b.trace.points[i].accepted);
    }
    for (std::size_t t = 0; t < a.w.w.size(); ++t) CHECK(a.w.w[t] == b.w.w[t]);
    for (std::size_t k = 0; k < a.set.patterns.size(); ++k)
        for (std::size_t i = 0; i < a.set.patterns[k].size(); ++i)
            CHECK(a.set.patterns[k][i] == b.set.patterns[k][i]);
}

TEST_CASE("settings validation flags bad schedules") {
    OptimizerSettings st;
    st.p_schedule = {4.0, 2.0};
    CHECK_THROWS_AS(validate_settings(st), std::invalid_argument);
    st = OptimizerSettings{};
    st.q_schedule.clear();
    CHECK_THROWS_AS(validate_settings(st), std::invalid_argument);
    st = OptimizerSettings{};
    st.armijo_c = 1.5;
    CHECK_THROWS_AS(validate_settings(st), std::invalid_argument);
}

}  // TEST_SUITE
