#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "vlsc/numeric.hpp"

namespace vlsc {

// A finite source alphabet with its probabilities, together with the size K
// of the code alphabet. All logarithms reported to users are base K.
struct Distribution {
  std::vector<double> probs;
  int base = 2;

  std::size_t alphabet_size() const { return probs.size(); }
  std::size_t support_size() const;
};

// Validates and normalizes. Entries down to -1e-15 are clamped to zero; the
// sum must be within 1e-9 of one; base must be at least 2.
Distribution make_distribution(std::vector<double> probs, int base = 2);

// One empirical type (symbol-count vector) and the number of sequences in it.
struct TypeClass {
  std::vector<std::uint32_t> counts;
  BigInt size;
};

// All sequences of a given block length that share one probability.
struct SpectrumAtom {
  double log_prob = 0.0;  // natural log of the probability of ONE sequence
  BigInt count;           // number of sequences
  double mass = 0.0;      // count * exp(log_prob)
  std::vector<TypeClass> types;
};

// Exact distribution of the per-sequence probability at block length n.
// Atoms are sorted by log_prob, most probable first, and are pairwise
// distinct.
struct Spectrum {
  int n = 0;
  int base = 2;
  std::size_t alphabet_size = 0;
  std::vector<SpectrumAtom> atoms;

  // Self-information rate of atom i in base-K units per symbol.
  double rate(std::size_t i) const;
  double total_mass() const;
  BigInt total_count() const;
};

struct SpectrumLimits {
  std::uint64_t max_type_classes = 5'000'000;
};

// Number of type classes of length-n sequences over `symbols` letters.
BigInt type_class_count(int n, std::size_t symbols);

Spectrum iid_spectrum(const Distribution& d, int n, const SpectrumLimits& limits = {});

// Sequence probability w1 * P1^n(x) + (1 - w1) * P2^n(x).
Spectrum mixed_spectrum(const Distribution& d1, const Distribution& d2, double w1, int n,
                        const SpectrumLimits& limits = {});

// Picks a component as a function of n: the component at index
// `even_component` is used when ceil(log_b n) is even, the other one
// otherwise. With b = 2, n = 1 maps to `even_component` and the grid
// 2, 4, 8, ... alternates.
struct SwitchingRule {
  int log_base = 2;
  std::size_t even_component = 0;

  std::size_t component_for(int n) const;
};

struct SwitchingSchedule {
  std::array<Distribution, 2> components;
  SwitchingRule rule;
};

SwitchingSchedule make_schedule(Distribution first, Distribution second, SwitchingRule rule = {});

Spectrum switching_spectrum(const SwitchingSchedule& s, int n, const SpectrumLimits& limits = {});

using Sequence = std::vector<std::uint32_t>;

// i.i.d. draws by inverse-CDF sampling on a 64-bit Mersenne Twister; the
// output depends only on (d, n, count, seed).
std::vector<Sequence> sample_sequences(const Distribution& d, int n, std::size_t count,
                                       std::uint64_t seed);

// Natural-log probability of one sequence under d^n.
double sequence_log_prob(const Distribution& d, std::span<const std::uint32_t> seq);

}  // namespace vlsc
