#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vlsc/spectrum.hpp"

namespace vlsc {

// `count` sequences of atom `atom` are decoded and get codewords of
// `length` letters. Sequences not covered by any assignment share the junk
// codeword and are decoding errors.
struct CodeAssignment {
  std::size_t atom = 0;
  BigInt count = 0;
  std::int64_t length = 1;
  double mass = 0.0;
};

// A variable-length code described at atom granularity.
struct CodeSpec {
  int n = 0;
  int base = 2;
  double decode_set_mass = 0.0;
  double error_mass = 0.0;
  std::vector<CodeAssignment> assignments;
  std::int64_t junk_length = 1;
};

// Decode set = most-probable prefix A with Pr{A} >= 1 - eps. Each x in A
// gets length ceil(-log_K(P(x) / Pr{A})) (at least 1); everything else is
// sent to the junk codeword.
CodeSpec construct_theorem2_code(const Spectrum& s, double eps);

// Pr{ l(phi(X^n)) > eta } for eta >= 1.
double code_overflow(const CodeSpec& c, double eta);

struct CountingCheck {
  std::int64_t threshold = 0;
  BigInt decoded = 0;  // decoded sequences with length <= threshold
  BigInt budget = 0;   // sum_{i=1..threshold} K^i
};

struct CountingReport {
  bool valid = true;
  std::optional<std::int64_t> violated_threshold;
  std::vector<CountingCheck> checks;  // one per distinct codeword length
};

// Checks |{decoded x : l(x) <= t}| <= sum_{i=1..t} K^i at every distinct
// length t, in exact integer arithmetic. With `reserve_junk_string` the
// junk codeword is charged against the length-1 budget whenever the code
// has a nonempty error set.
CountingReport validate_counting_condition(const CodeSpec& c, bool reserve_junk_string = false);

struct TradeoffOptions {
  // Charge the junk codeword against the short-string budget when the error
  // set is nonempty.
  bool reserve_junk_string = false;
  // Node budget for the depth-first error-set search, and the size cap on
  // the reachable-sum set tried after it; past both, the best set found so
  // far is used and `exact` is cleared.
  std::size_t search_node_limit = 2'000'000;
};

struct TradeoffPoint {
  int n = 0;
  double eta = 1.0;
  double eps = 0.0;
  double delta_star = 0.0;
  BigInt budget = 0;         // sum_{i=1..floor(eta)} K^i
  double short_mass = 0.0;   // mass decoded with length <= eta
  double error_mass = 0.0;   // mass sent to the junk codeword
  bool exact = true;         // error set provably maximal (within kMassTol)
  double granularity = 0.0;  // largest single-sequence mass left after the short strings
};

// Minimal overflow probability at threshold eta over deterministic codes
// with error probability <= eps. The `budget` most probable sequences take
// the short strings; the error set is a maximum-mass subset (<= eps) of the
// remainder.
TradeoffPoint optimal_tradeoff(const Spectrum& s, double eta, double eps, const TradeoffOptions& opts = {});

// Smallest integer eta >= 1 with optimal_tradeoff(s, eta, eps).delta_star <= delta.
std::int64_t optimal_threshold(const Spectrum& s, double eps, double delta, const TradeoffOptions& opts = {});

struct RoundtripStats {
  std::size_t samples = 0;
  std::size_t errors = 0;
  std::size_t overflows = 0;
  double error_rate = 0.0;
  double overflow_rate = 0.0;
};

// Encodes each sample with `c` and tallies decoding errors and codewords
// longer than eta. Within an atom, sequences are ranked by type (in spectrum
// order) then lexicographically; an assignment of k sequences covers ranks
// 0..k-1.
RoundtripStats simulate_roundtrip(const Spectrum& s, const CodeSpec& c, std::span<const Sequence> samples,
                                  double eta);

}  // namespace vlsc
