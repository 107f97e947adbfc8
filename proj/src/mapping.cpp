#include "jbac/mapping.hpp"

#include <bit>
#include <stdexcept>
#include <utility>

#include "jbac/metrics.hpp"

namespace jbac {

int hamming(std::uint32_t a, std::uint32_t b) { return std::popcount(a ^ b); }

int hamming(std::size_t k, std::size_t khat, const std::vector<std::uint32_t>& labels) {
    if (k >= labels.size() || khat >= labels.size())
        throw std::invalid_argument("hamming: pattern index out of range");
    return hamming(labels[k], labels[khat]);
}

std::vector<std::uint32_t> bsa_labels(const std::vector<double>& pep,
                                      std::vector<std::uint32_t> labels) {
    const std::size_t k_count = labels.size();
    if (k_count < 2) return labels;
    double bound = union_bound_given_pep(pep, labels);
    for (;;) {
        double best_bound = bound;
        std::size_t best_i = 0, best_j = 0;
        bool improved = false;
        for (std::size_t i = 0; i + 1 < k_count; ++i) {
            for (std::size_t j = i + 1; j < k_count; ++j) {
                std::swap(labels[i], labels[j]);
                const double candidate = union_bound_given_pep(pep, labels);
                std::swap(labels[i], labels[j]);
                if (candidate < best_bound) {
                    best_bound = candidate;
                    best_i = i;
                    best_j = j;
                    improved = true;
                }
            }
        }
        if (!improved) return labels;
        std::swap(labels[best_i], labels[best_j]);
        bound = best_bound;
    }
}

ReflectingCandidateSet bsa(const ChannelSet& ch, const Beamformer& w,
                           const ReflectingCandidateSet& set, double n0) {
    if (!labels_bijective(set.bit_labels) || set.bit_labels.size() != set.patterns.size())
        throw std::invalid_argument("bsa: labels are not a bijection");
    ReflectingCandidateSet out = set;
    if (set.patterns.size() < 2) return out;
    out.bit_labels = bsa_labels(pair_expected_pep(ch, w, set, n0), out.bit_labels);
    return out;
}

}  // namespace jbac
