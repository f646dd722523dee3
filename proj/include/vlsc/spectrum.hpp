#pragma once

#include <cstddef>
#include <optional>

#include "vlsc/source_models.hpp"

namespace vlsc {

// How a sequence's self-information rate is compared with a threshold R.
enum class Comparator {
  Greater,       // rate > R
  GreaterEqual,  // rate >= R
};

// True when `rate` cmp `threshold`, treating values within kRateTol
// (relative) as equal.
bool rate_compare(double rate, double threshold, Comparator cmp);

// A set made of the first `full_atoms` atoms plus `boundary_taken` sequences
// of the next atom. Sequences inside an atom are interchangeable, so only
// the count is recorded.
struct PrefixSet {
  std::size_t full_atoms = 0;
  BigInt boundary_taken = 0;
  double boundary_mass = 0.0;
  double mass = 0.0;
  BigInt count = 0;

  // Mass and count of atom i that fall inside the set.
  double mass_in(const Spectrum& s, std::size_t i) const;
  BigInt count_in(const Spectrum& s, std::size_t i) const;
};

// Smallest most-probable-first set with mass >= target (within kMassTol).
// A target of 1 or more takes the whole support.
PrefixSet top_set_by_mass(const Spectrum& s, double target);

// The `limit` most probable sequences (all of them if fewer exist).
PrefixSet top_set_by_count(const Spectrum& s, const BigInt& limit);

// Pr{ rate(X^n) cmp R }, R in base-K units per symbol.
double tail_mass(const Spectrum& s, double rate, Comparator cmp);

// log_K of the fewest sequences carrying mass >= 1 - gamma.
double smooth_max_entropy(const Spectrum& s, double gamma);

// Number of sequences in that smallest set, exact.
BigInt smooth_max_count(const Spectrum& s, double gamma);

struct BoundarySplit {
  std::size_t atom = 0;
  BigInt taken = 0;
};

struct RestrictedTailResult {
  double value = 0.0;     // Pr{ rate cmp R, X^n in A }
  double set_mass = 0.0;  // Pr{ X^n in A }
  std::optional<BoundarySplit> boundary_split;
};

// Restricted tail over sets A with Pr{A} >= 1 - eps. A is the most-probable
// prefix reaching 1 - eps: it contains every sequence below the threshold
// before any sequence above it, and within the tail it keeps the heaviest
// sequences, so the discarded eps-budget removes as much tail mass as
// sequence granularity allows. The value exceeds max(0, tail - eps) by less
// than one boundary sequence.
RestrictedTailResult restricted_tail_inf(const Spectrum& s, double eps, double rate,
                                         Comparator cmp = Comparator::GreaterEqual);

// Smallest atom rate R with tail_mass(s, R, Greater) <= eps + delta: the
// (eps + delta) upper quantile of the self-information rate, returned on
// the atom grid. Depends on (eps, delta) only through eps + delta.
double finite_n_first_order(const Spectrum& s, double eps, double delta);

// sqrt(n) * (finite_n_first_order(s, eps, delta) - rate).
double finite_n_second_order(const Spectrum& s, double eps, double delta, double rate);

}  // namespace vlsc
