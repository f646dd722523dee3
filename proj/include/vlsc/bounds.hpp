#pragma once

#include <span>
#include <vector>

#include "vlsc/codes.hpp"
#include "vlsc/spectrum.hpp"

namespace vlsc {

// Slack sequence a_n = K^{-n*gamma} (first-order studies) or
// K^{-sqrt(n)*gamma} (second-order studies).
struct SlackRule {
  enum class Scale { Linear, Sqrt };
  Scale scale = Scale::Linear;
  double gamma = 0.02;

  double log_value(int n, int base) const;
  double value(int n, int base) const;
};

// Achievability bound on the overflow probability of the code built from the
// most-probable set A (Pr{A} >= 1 - eps):
//   Pr{ a_n P(X^n)/Pr{A} <= K^{-eta}, X^n in A } + a_n K.
// Not clamped; a_n K >= 1 gives a vacuous value above one.
double theorem2_upper(const Spectrum& s, double eps, double a_n, double eta);

// Converse bound for any code whose decode set is D:
//   Pr{ P(X^n)/Pr{D} <= a_n K^{-eta}, X^n in D } - a_n K Pr{D}.
// D is the most-probable set with mass >= decode_mass_target. May be negative.
double theorem3_lower(const Spectrum& s, double decode_mass_target, double a_n, double eta);
double theorem3_lower(const Spectrum& s, const PrefixSet& decode_set, double a_n, double eta);

struct BoundReport {
  int n = 0;
  double eta = 1.0;
  double eps = 0.0;
  double a_n = 0.0;
  double upper = 0.0;
  double lower = 0.0;
  double exact_code_overflow = 0.0;
  double exact_optimal = 0.0;

  // lower <= exact_code_overflow <= upper, compared with no tolerance.
  bool sandwich_holds() const;
  double upper_clamped() const;
  double lower_clamped() const;
};

// One report per eta: both bounds, the overflow of the code built from A,
// and the exact optimum at the same error budget.
std::vector<BoundReport> sandwich_sweep(const Spectrum& s, double eps, std::span<const double> etas,
                                        const SlackRule& rule);

}  // namespace vlsc
