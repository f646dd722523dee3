#include "vlsc/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "vlsc/errors.hpp"

namespace vlsc {

namespace {

void check_slack(double a_n) {
  if (!(a_n > 0.0) || !std::isfinite(a_n)) throw ValidationError("a_n", "slack must be positive and finite");
}

void check_eta(double eta) {
  if (!(eta >= 1.0) || !std::isfinite(eta)) throw ValidationError("eta", "overflow threshold must be >= 1");
}

// Both conditions are non-strict; a left side within 1e-12 (relative) of the
// right side is an exact tie, which structured inputs (dyadic a_n, uniform
// sources) produce routinely.
double upper_from_log(const Spectrum& s, const PrefixSet& set, double log_a, double eta) {
  const double log_base = std::log(static_cast<double>(s.base));
  const double log_set = std::log(set.mass);
  const double rhs = -eta * log_base;
  const double slack = 1e-12 * std::max(1.0, std::fabs(rhs));
  CompensatedSum term;
  for (std::size_t i = 0; i <= set.full_atoms && i < s.atoms.size(); ++i) {
    const double in_set = set.mass_in(s, i);
    if (in_set <= 0.0) continue;
    if (log_a + s.atoms[i].log_prob - log_set <= rhs + slack) term += in_set;
  }
  return term.value() + std::exp(log_a + log_base);
}

double lower_from_log(const Spectrum& s, const PrefixSet& set, double log_a, double eta) {
  if (set.mass <= 0.0) return 0.0;
  const double log_base = std::log(static_cast<double>(s.base));
  const double log_set = std::log(set.mass);
  const double rhs = log_a - eta * log_base;
  const double slack = 1e-12 * std::max(1.0, std::fabs(rhs));
  CompensatedSum term;
  for (std::size_t i = 0; i <= set.full_atoms && i < s.atoms.size(); ++i) {
    const double in_set = set.mass_in(s, i);
    if (in_set <= 0.0) continue;
    if (s.atoms[i].log_prob - log_set <= rhs + slack) term += in_set;
  }
  return term.value() - std::exp(log_a + log_base) * set.mass;
}

}  // namespace

double SlackRule::log_value(int n, int base) const {
  const double scale_n = scale == Scale::Linear ? static_cast<double>(n) : std::sqrt(static_cast<double>(n));
  return -scale_n * gamma * std::log(static_cast<double>(base));
}

double SlackRule::value(int n, int base) const { return std::exp(log_value(n, base)); }

double theorem2_upper(const Spectrum& s, double eps, double a_n, double eta) {
  check_slack(a_n);
  check_eta(eta);
  if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("eps", "error budget must lie in [0, 1)");
  return upper_from_log(s, top_set_by_mass(s, 1.0 - eps), std::log(a_n), eta);
}

double theorem3_lower(const Spectrum& s, double decode_mass_target, double a_n, double eta) {
  return theorem3_lower(s, top_set_by_mass(s, decode_mass_target), a_n, eta);
}

double theorem3_lower(const Spectrum& s, const PrefixSet& decode_set, double a_n, double eta) {
  check_slack(a_n);
  check_eta(eta);
  return lower_from_log(s, decode_set, std::log(a_n), eta);
}

bool BoundReport::sandwich_holds() const { return lower <= exact_code_overflow && exact_code_overflow <= upper; }

double BoundReport::upper_clamped() const { return std::clamp(upper, 0.0, 1.0); }

double BoundReport::lower_clamped() const { return std::clamp(lower, 0.0, 1.0); }

std::vector<BoundReport> sandwich_sweep(const Spectrum& s, double eps, std::span<const double> etas,
                                        const SlackRule& rule) {
  if (!(rule.gamma > 0.0) || !std::isfinite(rule.gamma)) throw ValidationError("gamma", "gamma must be positive");
  if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("eps", "error budget must lie in [0, 1)");
  const PrefixSet decode = top_set_by_mass(s, 1.0 - eps);
  const CodeSpec code = construct_theorem2_code(s, eps);
  const double log_a = rule.log_value(s.n, s.base);
  std::vector<BoundReport> out;
  out.reserve(etas.size());
  for (double eta : etas) {
    check_eta(eta);
    BoundReport r;
    r.n = s.n;
    r.eta = eta;
    r.eps = eps;
    r.a_n = std::exp(log_a);
    r.upper = upper_from_log(s, decode, log_a, eta);
    r.lower = lower_from_log(s, decode, log_a, eta);
    r.exact_code_overflow = code_overflow(code, eta);
    r.exact_optimal = optimal_tradeoff(s, eta, eps).delta_star;
    out.push_back(r);
  }
  return out;
}

}  // namespace vlsc
