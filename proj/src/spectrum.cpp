#include "vlsc/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vlsc/errors.hpp"

namespace vlsc {

namespace {

// Fewest sequences of probability exp(log_prob) whose total reaches `need`.
BigInt sequences_to_reach(double need, double log_prob) {
  if (need <= 0.0) return BigInt(0);
  if (log_prob > -700.0) {
    const double ratio = need / std::exp(log_prob);
    if (ratio < 0x1.0p52) return BigInt(static_cast<std::uint64_t>(std::ceil(ratio)));
  }
  return ceil_exp(std::log(need) - log_prob);
}

void check_budgets(double eps, double delta) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("eps", "error budget must lie in [0, 1)");
  if (!(delta >= 0.0 && delta < 1.0)) throw ValidationError("delta", "overflow budget must lie in [0, 1)");
  if (!(eps + delta < 1.0)) throw ValidationError("delta", "eps + delta must be below 1");
}

}  // namespace

bool rate_compare(double rate, double threshold, Comparator cmp) {
  const double slack = kRateTol * std::max(1.0, std::fabs(threshold));
  if (std::fabs(rate - threshold) <= slack) return cmp == Comparator::GreaterEqual;
  return rate > threshold;
}

double PrefixSet::mass_in(const Spectrum& s, std::size_t i) const {
  if (i < full_atoms) return s.atoms[i].mass;
  if (i == full_atoms) return boundary_mass;
  return 0.0;
}

BigInt PrefixSet::count_in(const Spectrum& s, std::size_t i) const {
  if (i < full_atoms) return s.atoms[i].count;
  if (i == full_atoms) return boundary_taken;
  return BigInt(0);
}

PrefixSet top_set_by_mass(const Spectrum& s, double target) {
  PrefixSet out;
  if (target <= kMassTol) return out;
  if (target >= 1.0) target = 2.0;  // the whole support, however light its tail
  CompensatedSum cum;
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    const auto& atom = s.atoms[i];
    if (cum.value() + atom.mass >= target - kMassTol) {
      BigInt k = sequences_to_reach(target - kMassTol - cum.value(), atom.log_prob);
      if (k < 1) k = 1;
      if (k >= atom.count) {
        cum += atom.mass;
        out.full_atoms = i + 1;
        out.count += atom.count;
      } else {
        out.full_atoms = i;
        out.boundary_taken = k;
        out.boundary_mass = scale_by_ratio(atom.mass, k, atom.count);
        cum += out.boundary_mass;
        out.count += k;
      }
      out.mass = cum.value();
      return out;
    }
    cum += atom.mass;
    out.count += atom.count;
    out.full_atoms = i + 1;
  }
  out.mass = cum.value();
  return out;
}

PrefixSet top_set_by_count(const Spectrum& s, const BigInt& limit) {
  PrefixSet out;
  CompensatedSum cum;
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    const auto& atom = s.atoms[i];
    if (out.count + atom.count <= limit) {
      out.count += atom.count;
      cum += atom.mass;
      out.full_atoms = i + 1;
      continue;
    }
    const BigInt k = limit - out.count;
    if (k > 0) {
      out.boundary_taken = k;
      out.boundary_mass = scale_by_ratio(atom.mass, k, atom.count);
      cum += out.boundary_mass;
      out.count += k;
    }
    break;
  }
  out.mass = cum.value();
  return out;
}

double tail_mass(const Spectrum& s, double rate, Comparator cmp) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    if (rate_compare(s.rate(i), rate, cmp)) sum += s.atoms[i].mass;
  }
  return std::clamp(sum.value(), 0.0, 1.0);
}

BigInt smooth_max_count(const Spectrum& s, double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ValidationError("gamma", "smoothing must lie in [0, 1)");
  return top_set_by_mass(s, 1.0 - gamma).count;
}

double smooth_max_entropy(const Spectrum& s, double gamma) {
  return log_of(smooth_max_count(s, gamma)) / std::log(static_cast<double>(s.base));
}

RestrictedTailResult restricted_tail_inf(const Spectrum& s, double eps, double rate, Comparator cmp) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("eps", "error budget must lie in [0, 1)");
  const PrefixSet set = top_set_by_mass(s, 1.0 - eps);
  RestrictedTailResult out;
  out.set_mass = set.mass;
  CompensatedSum value;
  for (std::size_t i = 0; i <= set.full_atoms && i < s.atoms.size(); ++i) {
    if (rate_compare(s.rate(i), rate, cmp)) value += set.mass_in(s, i);
  }
  out.value = std::clamp(value.value(), 0.0, 1.0);
  if (set.boundary_taken > 0) out.boundary_split = BoundarySplit{set.full_atoms, set.boundary_taken};
  return out;
}

double finite_n_first_order(const Spectrum& s, double eps, double delta) {
  check_budgets(eps, delta);
  const double budget = eps + delta + kMassTol;
  std::size_t j = s.atoms.size() - 1;
  CompensatedSum above;  // mass strictly above rate(j)
  while (j > 0 && above.value() + s.atoms[j].mass <= budget) {
    above += s.atoms[j].mass;
    --j;
  }
  return s.rate(j);
}

double finite_n_second_order(const Spectrum& s, double eps, double delta, double rate) {
  return std::sqrt(static_cast<double>(s.n)) * (finite_n_first_order(s, eps, delta) - rate);
}

}  // namespace vlsc
