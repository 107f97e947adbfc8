#pragma once

#include <cstdint>
#include <vector>

#include "jbac/types.hpp"

namespace jbac {

int hamming(std::uint32_t a, std::uint32_t b);
int hamming(std::size_t k, std::size_t khat, const std::vector<std::uint32_t>& labels);

// Binary switching algorithm on a cached expected-PEP matrix: per pass,
// evaluate all C(K,2) label swaps and apply the best strictly-improving one;
// stop when no swap improves the union bound.
std::vector<std::uint32_t> bsa_labels(const std::vector<double>& pep,
                                      std::vector<std::uint32_t> labels);

// Relabels the set so the closed-form union bound is locally minimal.
ReflectingCandidateSet bsa(const ChannelSet& ch, const Beamformer& w,
                           const ReflectingCandidateSet& set, double n0);

}  // namespace jbac
