#include <doctest.h>

#include <cmath>

#include "jbac/mapping.hpp"
#include "jbac/metrics.hpp"
#include "oracles.hpp"

using namespace jbac;

namespace {

// 1x1 system with every channel coefficient equal to one.
oracles::Instance unit_instance() {
    oracles::Instance inst;
    inst.cfg.n_tx = 1;
    inst.cfg.n_rx = 1;
    inst.cfg.n_elements = 1;
    inst.cfg.n_users = 1;
    inst.cfg.n_patterns = 1;
    inst.cfg.noise_power = 1.0;
    inst.ch.h1 = ComplexMatrix(1, 1);
    inst.ch.h2 = ComplexMatrix(1, 1);
    inst.ch.hd = ComplexMatrix(1, 1);
    inst.ch.hb = ComplexMatrix(1, 1);
    inst.ch.h1(0, 0) = inst.ch.h2(0, 0) = inst.ch.hd(0, 0) = inst.ch.hb(0, 0) = Complex(1, 0);
    inst.w.w = {Complex(1, 0)};
    inst.set.patterns = {{Complex(1, 0)}};
    inst.set.bit_labels = {0};
    return inst;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("zero beamformer gives zero snr") {
    auto inst = oracles::make_instance(3, 4, 4, 2, 4, 4, 1.0, 0.5);
    inst.w.w.assign(inst.cfg.n_tx, Complex{});
    CHECK(user_snr(inst.ch, inst.w, inst.set.patterns[0], 0, 1.0) == 0.0);
}

TEST_CASE("hand-expanded 1x1 snr equals four") {
    const auto inst = unit_instance();
    CHECK(user_snr(inst.ch, inst.w, inst.set.patterns[0], 0, 1.0) == doctest::Approx(4.0));
}

TEST_CASE("snr scales quadratically with the beamformer") {
    auto inst = oracles::make_instance(5, 6, 4, 3, 4, 2, 0.7, 0.5);
    const double base = user_snr(inst.ch, inst.w, inst.set.patterns[1], 1, 0.7);
    for (double c : {0.5, 2.0, 3.5}) {
        Beamformer scaled = inst.w;
        for (Complex& e : scaled.w) e *= c;
        CHECK(user_snr(inst.ch, scaled, inst.set.patterns[1], 1, 0.7) ==
              doctest::Approx(c * c * base).epsilon(1e-12));
    }
}

TEST_CASE("all-zero channels give zero rate") {
    auto inst = oracles::make_instance(7, 4, 4, 2, 4, 3, 1.0, 0.5);
    for (ComplexMatrix* m : {&inst.ch.h1, &inst.ch.h2, &inst.ch.hd, &inst.ch.hb})
        for (Complex& e : m->entries) e = Complex{};
    CHECK(user_rate(inst.ch, inst.w, inst.set, 0, inst.cfg) == 0.0);
}

TEST_CASE("identical patterns average to the single-pattern rate") {
    auto inst = oracles::make_instance(9, 6, 4, 2, 4, 2, 1.0, 0.5);
    for (std::size_t k = 1; k < inst.set.patterns.size(); ++k)
        inst.set.patterns[k] = inst.set.patterns[0];
    ReflectingCandidateSet single;
    single.patterns = {inst.set.patterns[0]};
    single.bit_labels = {0};
    CHECK(user_rate(inst.ch, inst.w, inst.set, 1, inst.cfg) ==
          doctest::Approx(user_rate(inst.ch, inst.w, single, 1, inst.cfg)).epsilon(1e-12));
}

TEST_CASE("rate matches the scalar re-implementation on random instances") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto inst = oracles::make_instance(seed, 4 + seed % 5, 4, 2, 4, 3, 0.3, 0.5);
        for (std::size_t m = 0; m < inst.cfg.n_users; ++m) {
            CHECK(user_rate(inst.ch, inst.w, inst.set, m, inst.cfg) ==
                  doctest::Approx(oracles::scalar_rate_oracle(inst.ch, inst.w, inst.set, m,
                                                              inst.cfg))
                      .epsilon(1e-12));
        }
    }
}

TEST_CASE("average rate reduces to the user rate for one user") {
    const auto inst = oracles::make_instance(1, 5, 4, 2, 4, 1, 1.0, 0.5);
    CHECK(avg_user_rate(inst.ch, inst.w, inst.set, inst.cfg) ==
          doctest::Approx(user_rate(inst.ch, inst.w, inst.set, 0, inst.cfg)));
}

TEST_CASE("identical users give the average of equal terms") {
    auto inst = oracles::make_instance(2, 5, 4, 2, 4, 3, 1.0, 0.5);
    for (std::size_t m = 1; m < inst.cfg.n_users; ++m) {
        for (std::size_t i = 0; i < inst.cfg.n_elements; ++i) inst.ch.h2(i, m) = inst.ch.h2(i, 0);
        for (std::size_t t = 0; t < inst.cfg.n_tx; ++t) inst.ch.hd(t, m) = inst.ch.hd(t, 0);
    }
    CHECK(avg_user_rate(inst.ch, inst.w, inst.set, inst.cfg) ==
          doctest::Approx(user_rate(inst.ch, inst.w, inst.set, 0, inst.cfg)).epsilon(1e-12));
}

TEST_CASE("average rate is invariant under user and pattern relabeling") {
    const auto inst = oracles::make_instance(4, 6, 4, 2, 4, 4, 1.0, 0.5);
    const double base = avg_user_rate(inst.ch, inst.w, inst.set, inst.cfg);

    auto permuted = inst;
    // rotate users
    for (std::size_t m = 0; m < inst.cfg.n_users; ++m) {
        const std::size_t src = (m + 1) % inst.cfg.n_users;
        for (std::size_t i = 0; i < inst.cfg.n_elements; ++i)
            permuted.ch.h2(i, m) = inst.ch.h2(i, src);
        for (std::size_t t = 0; t < inst.cfg.n_tx; ++t) permuted.ch.hd(t, m) = inst.ch.hd(t, src);
    }
    // rotate patterns
    for (std::size_t k = 0; k < inst.set.patterns.size(); ++k)
        permuted.set.patterns[k] = inst.set.patterns[(k + 1) % inst.set.patterns.size()];
    CHECK(avg_user_rate(permuted.ch, permuted.w, permuted.set, permuted.cfg) ==
          doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("distance of a pattern to itself is zero") {
    const auto inst = oracles::make_instance(5, 4, 4, 2, 4, 2, 1.0, 0.5);
    CHECK(euclidean_distance(inst.ch, inst.w, inst.set, 2, 2, Complex(0.7, 0.1)) == 0.0);
}

TEST_CASE("distance vanishes with the symbol") {
    const auto inst = oracles::make_instance(6, 4, 4, 2, 4, 2, 1.0, 0.5);
    CHECK(euclidean_distance(inst.ch, inst.w, inst.set, 0, 1, Complex{}) == 0.0);
}

TEST_CASE("the symbol magnitude factors out of the distance") {
    for (std::uint64_t seed = 10; seed < 20; ++seed) {
        const auto inst = oracles::make_instance(seed, 3 + seed % 4, 4, 2, 3, 2, 1.0, 0.5);
        const Complex s(0.3 * seed, -0.2);
        const double at_unit = euclidean_distance(inst.ch, inst.w, inst.set, 0, 3, Complex(1, 0));
        CHECK(euclidean_distance(inst.ch, inst.w, inst.set, 0, 3, s) ==
              doctest::Approx(std::abs(s) * at_unit).epsilon(1e-12));
    }
}

TEST_CASE("pairwise error probability endpoints") {
    CHECK(pairwise_error_prob(0.0, 1.0) == 0.5);
    // d^2 = 2 N0 puts the argument at exactly one
    CHECK(pairwise_error_prob(1.0, 0.5) == doctest::Approx(0.15865525393145705).epsilon(1e-12));
    CHECK(pairwise_error_prob(1.0, 0.25) < pairwise_error_prob(1.0, 0.5));
    double prev = 0.5;
    for (double d : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        const double p = pairwise_error_prob(d, 1.0);
        CHECK(p < prev);
        prev = p;
    }
}

TEST_CASE("sampled union bound reduces to the single-pair form for two patterns") {
    const auto inst = oracles::make_instance(21, 5, 2, 2, 4, 2, 0.8, 0.5);
    CVec samples;
    oracles::BoxMullerCn gen(5);
    for (int i = 0; i < 64; ++i) samples.push_back(gen.next());
    double expected = 0.0;
    for (const Complex& s : samples) {
        const double d = euclidean_distance(inst.ch, inst.w, inst.set, 0, 1, s);
        expected += pairwise_error_prob(d, 0.8);
    }
    expected /= static_cast<double>(samples.size());
    CHECK(ber_union_bound(inst.ch, inst.w, inst.set, 0.8, samples) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("identical patterns pin every pairwise error at one half") {
    auto inst = oracles::make_instance(22, 4, 4, 2, 4, 2, 1.0, 0.5);
    for (std::size_t k = 1; k < 4; ++k) inst.set.patterns[k] = inst.set.patterns[0];
    double hd_sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t j = 0; j < 4; ++j)
            if (j != k) hd_sum += hamming(k, j, inst.set.bit_labels);
    const double expected = 0.5 * hd_sum / (4.0 * 2.0);
    const CVec samples = {Complex(1, 0), Complex(0, -2)};
    CHECK(ber_union_bound(inst.ch, inst.w, inst.set, 1.0, samples) == doctest::Approx(expected));
    CHECK(ber_union_bound_closed(inst.ch, inst.w, inst.set, 1.0) == doctest::Approx(expected));
}

TEST_CASE("closed-form symbol expectation endpoints") {
    CHECK(expected_pep_cn_symbol(0.0, 1.0) == 0.5);
    CHECK(expected_pep_cn_symbol(1e12, 1.0) < 2e-6);
}

TEST_CASE("exponential-magnitude identity agrees with quadrature") {
    for (double c : {1e-3, 1e-2, 1e-1, 1.0, 3.0, 1e1, 1e2, 1e3}) {
        // identity argument: c = d1^2/(2 N0); evaluate with N0 = 0.5, d1^2 = c
        const double closed = expected_pep_cn_symbol(c, 0.5);
        const double quad = oracles::quad_expected_pep(c);
        CHECK(std::abs(closed - quad) < 1e-8);
    }
}

TEST_CASE("closed form matches the sampled bound within monte carlo error") {
    for (std::uint64_t seed = 30; seed < 34; ++seed) {
        const auto inst = oracles::make_instance(seed, 4, 4, 2, 4, 2, 2.0, 0.5);
        oracles::BoxMullerCn gen(seed);
        CVec samples(10000);
        for (Complex& s : samples) s = gen.next();
        const double sampled = ber_union_bound(inst.ch, inst.w, inst.set, 2.0, samples);
        const double closed = ber_union_bound_closed(inst.ch, inst.w, inst.set, 2.0);
        // per-sample spread of the bound for the standard error
        double var = 0.0;
        for (const Complex& s : samples) {
            const CVec one = {s};
            const double v = ber_union_bound(inst.ch, inst.w, inst.set, 2.0, one);
            var += (v - sampled) * (v - sampled);
        }
        const double se = std::sqrt(var / (samples.size() - 1.0) / samples.size());
        CHECK(std::abs(sampled - closed) <= 3.0 * se);
    }
}

TEST_CASE("goodput examples") {
    CHECK(goodput_lb(8, 0.0, 50e-6) == doctest::Approx(60000.0));
    CHECK(goodput_lb(4, 0.0, 50e-6) == doctest::Approx(40000.0));
    CHECK(goodput_lb(4, 1.0, 50e-6) == 0.0);
    CHECK(goodput_lb(4, 1.7, 50e-6) == 0.0);  // bound above one floors at zero
    CHECK_THROWS_AS(goodput_lb(1, 0.0, 50e-6), std::invalid_argument);
}

TEST_CASE("weighted objective selects the pure terms at the endpoints") {
    auto inst = oracles::make_instance(40, 6, 4, 2, 4, 4, 1.0, 0.0);
    const MetricReport at0 = weighted_objective(inst.ch, inst.w, inst.set, inst.cfg);
    CHECK(at0.weighted_objective == at0.avg_user_rate_bps);
    inst.cfg.lambda0 = 1.0;
    const MetricReport at1 = weighted_objective(inst.ch, inst.w, inst.set, inst.cfg);
    CHECK(at1.weighted_objective == at1.goodput_lb_bps);
    inst.cfg.lambda0 = 0.5;
    const MetricReport mid = weighted_objective(inst.ch, inst.w, inst.set, inst.cfg);
    CHECK(mid.weighted_objective ==
          doctest::Approx(0.5 * (at0.weighted_objective + at1.weighted_objective))
              .epsilon(1e-10));
    CHECK(mid.goodput_lb_bps ==
          doctest::Approx(goodput_lb(4, mid.ber_ub, inst.cfg.symbol_duration_s)));
}

TEST_CASE("named error paths reject bad arguments") {
    const auto inst = oracles::make_instance(55, 4, 4, 2, 4, 2, 1.0, 0.5);
    CHECK_THROWS_AS(user_snr(inst.ch, inst.w, inst.set.patterns[0], 99, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(euclidean_distance(inst.ch, inst.w, inst.set, 0, 9, Complex(1, 0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(ber_union_bound(inst.ch, inst.w, inst.set, 1.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(mutual_information_mc(inst.ch, inst.w, inst.set, 1.0, 0, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(pairwise_error_prob(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(pairwise_error_prob(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("mutual information collapses under heavy noise") {
    const auto inst = oracles::make_instance(50, 6, 4, 2, 4, 2, 1.0, 0.5);
    const double mi = mutual_information_mc(inst.ch, inst.w, inst.set, 1e7, 4000, 11);
    CHECK(std::abs(mi) < 0.05);
}

TEST_CASE("mutual information saturates at log2 K under vanishing noise") {
    const auto inst = oracles::make_instance(51, 6, 4, 2, 4, 2, 1.0, 0.5);
    const double mi = mutual_information_mc(inst.ch, inst.w, inst.set, 1e-7, 4000, 12);
    CHECK(mi == doctest::Approx(2.0).epsilon(0.025));
}

TEST_CASE("two identical patterns carry exactly zero information") {
    auto inst = oracles::make_instance(52, 4, 2, 2, 4, 2, 1.0, 0.5);
    inst.set.patterns[1] = inst.set.patterns[0];
    const double mi = mutual_information_mc(inst.ch, inst.w, inst.set, 0.3, 256, 13);
    CHECK(std::abs(mi) < 1e-12);
}

TEST_CASE("mutual information stays inside its information-theoretic range") {
    for (std::uint64_t seed = 60; seed < 64; ++seed) {
        const auto inst = oracles::make_instance(seed, 5, 4, 2, 4, 2, 0.5 + 0.3 * seed, 0.5);
        const double mi =
            mutual_information_mc(inst.ch, inst.w, inst.set, inst.cfg.noise_power, 2000, seed);
        CHECK(mi >= -0.05);
        CHECK(mi <= 2.0 + 0.05);
    }
}

}  // TEST_SUITE
