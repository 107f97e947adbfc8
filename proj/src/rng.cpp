#include "jbac/rng.hpp"

#include <cmath>

namespace jbac {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, Stream stream, std::uint64_t index) {
    std::uint64_t z = splitmix64(root ^ 0x6a09e667f3bcc909ull);
    z = splitmix64(z ^ static_cast<std::uint64_t>(stream) * 0x9e3779b97f4a7c15ull);
    z = splitmix64(z ^ index * 0xbb67ae8584caa73bull);
    return z;
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t z = seed;
    for (auto& word : s) {
        z = splitmix64(z);
        word = z;
    }
}

static inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t Xoshiro256pp::operator()() {
    const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
}

double RandomSource::uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

std::uint64_t RandomSource::uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(eng()) * n) >> 64);
}

double RandomSource::normal() {
    if (have_spare) {
        have_spare = false;
        return spare;
    }
    double u, v, q;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        q = u * u + v * v;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    spare = v * f;
    have_spare = true;
    return u * f;
}

Complex RandomSource::cn01() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im) * M_SQRT1_2;
}

}  // namespace jbac
