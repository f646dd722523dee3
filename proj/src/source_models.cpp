#include "vlsc/source_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "vlsc/errors.hpp"

namespace vlsc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct TypeEntry {
  double log_prob;
  double log_mass;
  TypeClass type;
};

// Calls emit(counts, multinomial) once per composition of n over the symbols
// listed in `support`; other symbols keep count zero.
template <typename Emit>
void enumerate_types(int n, const std::vector<std::size_t>& support, std::size_t alphabet_size,
                     Emit&& emit) {
  std::vector<std::uint32_t> counts(alphabet_size, 0);
  const std::size_t last = support.size() - 1;
  auto rec = [&](auto&& self, std::size_t j, std::uint32_t remaining,
                 const BigInt& so_far) -> void {
    if (j == last) {
      counts[support[j]] = remaining;
      emit(counts, so_far);
      counts[support[j]] = 0;
      return;
    }
    BigInt binom = 1;  // C(remaining, k)
    for (std::uint32_t k = 0; k <= remaining; ++k) {
      counts[support[j]] = k;
      self(self, j + 1, remaining - k, so_far * binom);
      binom = binom * (remaining - k) / (k + 1);
    }
    counts[support[j]] = 0;
  };
  rec(rec, 0, static_cast<std::uint32_t>(n), BigInt(1));
}

double log_multinomial(int n, const std::vector<std::uint32_t>& counts) {
  double out = std::lgamma(static_cast<double>(n) + 1.0);
  for (auto c : counts) out -= std::lgamma(static_cast<double>(c) + 1.0);
  return out;
}

double type_log_prob(const std::vector<double>& log_probs, const std::vector<std::uint32_t>& counts) {
  double out = 0.0;
  for (std::size_t x = 0; x < counts.size(); ++x) {
    if (counts[x] == 0) continue;
    if (log_probs[x] == kNegInf) return kNegInf;
    out += counts[x] * log_probs[x];
  }
  return out;
}

std::vector<double> log_table(const Distribution& d) {
  std::vector<double> out(d.probs.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = d.probs[i] > 0.0 ? std::log(d.probs[i]) : kNegInf;
  }
  return out;
}

void check_block_length(int n) {
  if (n < 1) throw ValidationError("n", "block length must be at least 1");
}

void check_type_budget(int n, std::size_t symbols, const SpectrumLimits& limits) {
  const BigInt types = type_class_count(n, symbols);
  if (types > limits.max_type_classes) {
    throw ResourceLimitError("spectrum: " + types.str() + " type classes at n=" + std::to_string(n) +
                             " exceed the ceiling of " + std::to_string(limits.max_type_classes));
  }
}

bool same_log_prob(double a, double b) {
  return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(a));
}

Spectrum assemble(int n, int base, std::size_t alphabet_size, std::vector<TypeEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const TypeEntry& a, const TypeEntry& b) {
    if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
    return a.type.counts < b.type.counts;
  });
  Spectrum s;
  s.n = n;
  s.base = base;
  s.alphabet_size = alphabet_size;
  std::vector<CompensatedSum> masses;
  for (auto& e : entries) {
    if (!std::isfinite(e.log_prob) || !std::isfinite(e.log_mass)) {
      throw NumericError("spectrum: non-finite log-probability at n=" + std::to_string(n));
    }
    if (s.atoms.empty() || !same_log_prob(s.atoms.back().log_prob, e.log_prob)) {
      s.atoms.push_back(SpectrumAtom{e.log_prob, 0, 0.0, {}});
      masses.emplace_back();
    }
    auto& atom = s.atoms.back();
    atom.count += e.type.size;
    masses.back() += std::exp(e.log_mass);
    atom.types.push_back(std::move(e.type));
  }
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    s.atoms[i].mass = std::clamp(masses[i].value(), 0.0, 1.0);
  }
  return s;
}

}  // namespace

std::size_t Distribution::support_size() const {
  return static_cast<std::size_t>(std::count_if(probs.begin(), probs.end(), [](double p) { return p > 0.0; }));
}

Distribution make_distribution(std::vector<double> probs, int base) {
  if (base < 2) throw ValidationError("base", "code alphabet size K must be at least 2");
  if (probs.empty()) throw ValidationError("probs", "distribution must have at least one symbol");
  CompensatedSum total;
  for (auto& p : probs) {
    if (!std::isfinite(p)) throw ValidationError("probs", "entries must be finite");
    if (p < -1e-15) throw ValidationError("probs", "negative probability " + std::to_string(p));
    if (p < 0.0) p = 0.0;
    total += p;
  }
  const double sum = total.value();
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw ValidationError("probs", "probabilities sum to " + std::to_string(sum) + ", not 1");
  }
  for (auto& p : probs) p /= sum;
  return Distribution{std::move(probs), base};
}

double Spectrum::rate(std::size_t i) const {
  return -atoms[i].log_prob / (n * std::log(static_cast<double>(base))) + 0.0;
}

double Spectrum::total_mass() const {
  CompensatedSum sum;
  for (const auto& a : atoms) sum += a.mass;
  return sum.value();
}

BigInt Spectrum::total_count() const {
  BigInt sum = 0;
  for (const auto& a : atoms) sum += a.count;
  return sum;
}

BigInt type_class_count(int n, std::size_t symbols) {
  if (symbols == 0) return BigInt(0);
  // C(n + symbols - 1, symbols - 1)
  BigInt out = 1;
  for (std::size_t k = 1; k < symbols; ++k) {
    out = out * (static_cast<std::uint64_t>(n) + k) / k;
  }
  return out;
}

Spectrum iid_spectrum(const Distribution& d, int n, const SpectrumLimits& limits) {
  check_block_length(n);
  std::vector<std::size_t> support;
  for (std::size_t x = 0; x < d.probs.size(); ++x) {
    if (d.probs[x] > 0.0) support.push_back(x);
  }
  check_type_budget(n, support.size(), limits);
  const auto logs = log_table(d);
  std::vector<TypeEntry> entries;
  enumerate_types(n, support, d.probs.size(), [&](const std::vector<std::uint32_t>& counts, const BigInt& size) {
    const double lp = type_log_prob(logs, counts);
    entries.push_back(TypeEntry{lp, log_multinomial(n, counts) + lp, TypeClass{counts, size}});
  });
  return assemble(n, d.base, d.probs.size(), std::move(entries));
}

Spectrum mixed_spectrum(const Distribution& d1, const Distribution& d2, double w1, int n,
                        const SpectrumLimits& limits) {
  check_block_length(n);
  if (d1.probs.size() != d2.probs.size()) {
    throw ValidationError("probs2", "mixture components must share one alphabet");
  }
  if (d1.base != d2.base) throw ValidationError("base", "mixture components must share K");
  if (!(w1 > 0.0 && w1 < 1.0)) throw ValidationError("weight", "mixture weight must lie in (0, 1)");
  std::vector<std::size_t> support;
  for (std::size_t x = 0; x < d1.probs.size(); ++x) {
    if (d1.probs[x] > 0.0 || d2.probs[x] > 0.0) support.push_back(x);
  }
  check_type_budget(n, support.size(), limits);
  const auto logs1 = log_table(d1);
  const auto logs2 = log_table(d2);
  const double lw1 = std::log(w1);
  const double lw2 = std::log1p(-w1);
  std::vector<TypeEntry> entries;
  enumerate_types(n, support, d1.probs.size(), [&](const std::vector<std::uint32_t>& counts, const BigInt& size) {
    const double lp = log_add_exp(lw1 + type_log_prob(logs1, counts), lw2 + type_log_prob(logs2, counts));
    entries.push_back(TypeEntry{lp, log_multinomial(n, counts) + lp, TypeClass{counts, size}});
  });
  return assemble(n, d1.base, d1.probs.size(), std::move(entries));
}

std::size_t SwitchingRule::component_for(int n) const {
  if (n < 1) throw ValidationError("n", "block length must be at least 1");
  // ceil(log_b n) by integer arithmetic: smallest e with b^e >= n.
  int exponent = 0;
  std::int64_t power = 1;
  while (power < n) {
    power *= log_base;
    ++exponent;
  }
  return exponent % 2 == 0 ? even_component : 1 - even_component;
}

SwitchingSchedule make_schedule(Distribution first, Distribution second, SwitchingRule rule) {
  if (first.probs.size() != second.probs.size()) {
    throw ValidationError("probs2", "schedule components must share one alphabet");
  }
  if (first.base != second.base) throw ValidationError("base", "schedule components must share K");
  if (rule.log_base < 2) throw ValidationError("switch_base", "switching log base must be at least 2");
  if (rule.even_component > 1) throw ValidationError("switch_even", "component index must be 0 or 1");
  return SwitchingSchedule{{std::move(first), std::move(second)}, rule};
}

Spectrum switching_spectrum(const SwitchingSchedule& s, int n, const SpectrumLimits& limits) {
  return iid_spectrum(s.components[s.rule.component_for(n)], n, limits);
}

std::vector<Sequence> sample_sequences(const Distribution& d, int n, std::size_t count, std::uint64_t seed) {
  check_block_length(n);
  if (count < 1) throw ValidationError("samples", "sample count must be at least 1");
  std::vector<double> cdf(d.probs.size());
  std::partial_sum(d.probs.begin(), d.probs.end(), cdf.begin());
  std::size_t last_positive = 0;
  for (std::size_t x = 0; x < d.probs.size(); ++x) {
    if (d.probs[x] > 0.0) last_positive = x;
  }
  std::mt19937_64 rng(seed);
  std::vector<Sequence> out(count, Sequence(static_cast<std::size_t>(n)));
  for (auto& seq : out) {
    for (auto& sym : seq) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      const auto x = static_cast<std::size_t>(it - cdf.begin());
      sym = static_cast<std::uint32_t>(std::min(x, last_positive));
    }
  }
  return out;
}

double sequence_log_prob(const Distribution& d, std::span<const std::uint32_t> seq) {
  double out = 0.0;
  for (auto x : seq) {
    if (d.probs.at(x) <= 0.0) return kNegInf;
    out += std::log(d.probs[x]);
  }
  return out;
}

}  // namespace vlsc
