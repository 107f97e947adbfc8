#include "jbac/channel.hpp"

#include <stdexcept>

#include "jbac/rng.hpp"

namespace jbac {

namespace {

void fill_cn01(ComplexMatrix& m, std::uint64_t seed) {
    RandomSource rng(seed);
    for (Complex& e : m.entries) e = rng.cn01();
}

}  // namespace

ChannelSet generate_channels(const SystemConfig& cfg, std::uint64_t seed) {
    validate_config(cfg);
    ChannelSet ch;
    ch.h1 = ComplexMatrix(cfg.n_elements, cfg.n_tx);
    ch.h2 = ComplexMatrix(cfg.n_elements, cfg.n_users);
    ch.hd = ComplexMatrix(cfg.n_tx, cfg.n_users);
    ch.hb = ComplexMatrix(cfg.n_rx, cfg.n_elements);
    fill_cn01(ch.h1, derive_seed(seed, Stream::channels, 0));
    fill_cn01(ch.h2, derive_seed(seed, Stream::channels, 1));
    fill_cn01(ch.hd, derive_seed(seed, Stream::channels, 2));
    fill_cn01(ch.hb, derive_seed(seed, Stream::channels, 3));
    return ch;
}

ChannelSet perturb_csi(const ChannelSet& truth, const CsiErrorModel& model, std::uint64_t seed) {
    if (model.delta < 0.0) throw std::invalid_argument("csi error model: delta must be >= 0");
    if (!(model.noise_power > 0.0))
        throw std::invalid_argument("csi error model: noise_power must be positive");
    if (model.delta == 0.0) return truth;

    const double scale = model.delta * std::sqrt(model.noise_power);
    ChannelSet est = truth;
    ComplexMatrix* mats[4] = {&est.h1, &est.h2, &est.hd, &est.hb};
    for (std::size_t i = 0; i < 4; ++i) {
        RandomSource rng(derive_seed(seed, Stream::csi_error, i));
        for (Complex& e : mats[i]->entries) e += scale * rng.cn01();
    }
    return est;
}

}  // namespace jbac
