#include "vlsc/codes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <iterator>
#include <map>
#include <optional>

#include "vlsc/errors.hpp"

namespace vlsc {

namespace {

void check_eta(double eta) {
  if (!(eta >= 1.0) || !std::isfinite(eta)) throw ValidationError("eta", "overflow threshold must be >= 1");
}

void check_eps(double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("eps", "error budget must lie in [0, 1)");
}

// Largest k with k sequences of probability exp(log_prob) fitting in `room`.
BigInt sequences_fitting(double room, double log_prob) {
  if (room <= 0.0) return BigInt(0);
  if (log_prob > -700.0) {
    const double ratio = room / std::exp(log_prob);
    if (ratio < 0x1.0p52) return BigInt(static_cast<std::uint64_t>(std::floor(ratio)));
  }
  return floor_exp(std::log(room) - log_prob);
}

struct Item {
  double seq_mass;   // probability of one sequence
  double log_prob;
  BigInt available;  // sequences left after the short strings
  double avail_mass;
};

struct ErrorSet {
  double mass = 0.0;
  bool exact = true;
};

class ErrorSetSearch {
 public:
  ErrorSetSearch(const std::vector<Item>& items, double cap, std::size_t node_limit)
      : items_(items), cap_(cap), node_limit_(node_limit) {
    suffix_.assign(items_.size() + 1, 0.0);
    for (std::size_t i = items_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + items_[i].avail_mass;
    counts_.reserve(items_.size());
    for (const auto& it : items_) counts_.push_back(static_cast<std::uint64_t>(it.available));
  }

  // Returns false when the node budget ran out.
  bool run(double seed_best) {
    best_ = seed_best;
    dfs(0, 0.0);
    return !out_of_nodes_;
  }
  double best() const { return best_; }

 private:
  bool done() const { return out_of_nodes_ || best_ >= cap_ - 2 * kMassTol; }

  void dfs(std::size_t i, double cum) {
    if (++nodes_ > node_limit_) {
      out_of_nodes_ = true;
      return;
    }
    if (cum > best_) best_ = cum;
    if (done() || i == items_.size()) return;
    if (cum + suffix_[i] <= best_) return;
    const double m = items_[i].seq_mass;
    const double room = cap_ - cum;
    std::uint64_t kmax = counts_[i];
    if (m > 0.0) kmax = std::min<std::uint64_t>(kmax, static_cast<std::uint64_t>(std::floor(room / m)));
    for (std::uint64_t k = kmax + 1; k-- > 0;) {
      dfs(i + 1, cum + static_cast<double>(k) * m);
      if (done()) return;
    }
  }

  const std::vector<Item>& items_;
  double cap_;
  std::size_t node_limit_;
  std::vector<double> suffix_;
  std::vector<std::uint64_t> counts_;
  double best_ = 0.0;
  std::size_t nodes_ = 0;
  bool out_of_nodes_ = false;
};

// Breadth-first version of the same search: the sorted set of reachable
// sums, merged within 1e-14 and pruned to those that can still beat `floor`.
// Handles the many-duplicate-sum inputs where the depth-first search stalls.
// Returns nullopt when the set would exceed `state_limit`.
std::optional<double> sum_set_search(const std::vector<Item>& items, double cap, double floor,
                                     std::size_t state_limit) {
  constexpr double kMerge = 1e-14;
  std::vector<double> suffix(items.size() + 1, 0.0);
  for (std::size_t i = items.size(); i-- > 0;) suffix[i] = suffix[i + 1] + items[i].avail_mass;

  std::vector<double> sums{0.0};
  std::vector<double> shifted;
  std::vector<double> merged;
  double best = floor;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double m = items[i].seq_mass;
    auto left = static_cast<std::uint64_t>(items[i].available);
    for (std::uint64_t chunk = 1; left > 0; chunk *= 2) {
      const std::uint64_t take = std::min(chunk, left);
      left -= take;
      const double step = static_cast<double>(take) * m;
      const double rest = suffix[i + 1] + static_cast<double>(left) * m;
      shifted.clear();
      for (double v : sums) {
        if (v + step > cap) break;
        shifted.push_back(v + step);
      }
      merged.clear();
      std::merge(sums.begin(), sums.end(), shifted.begin(), shifted.end(), std::back_inserter(merged));
      sums.clear();
      for (double v : merged) {
        if (v + rest <= cap) best = std::max(best, v + rest);
        if (v + rest <= best) continue;
        if (!sums.empty() && v - sums.back() <= kMerge) continue;
        sums.push_back(v);
      }
      if (sums.size() > state_limit) return std::nullopt;
      if (!sums.empty()) best = std::max(best, sums.back());
      if (sums.empty() || best >= cap - 2 * kMassTol) return best;
    }
  }
  return best;
}

// Maximum-mass subset of the remainder with mass <= eps.
ErrorSet best_error_set(const std::vector<Item>& items, double eps, std::size_t node_limit) {
  ErrorSet out;
  if (eps <= 0.0 || items.empty()) return out;
  const double cap = eps + kMassTol;

  CompensatedSum total;
  for (const auto& it : items) total += it.avail_mass;
  if (total.value() <= cap) {
    out.mass = total.value();
    return out;
  }

  // Heaviest first, skipping sequences that no longer fit.
  CompensatedSum greedy;
  for (const auto& it : items) {
    const double room = cap - greedy.value();
    if (it.avail_mass <= room) {
      greedy += it.avail_mass;
      continue;
    }
    const BigInt k = sequences_fitting(room, it.log_prob);
    if (k > 0) greedy += scale_by_ratio(it.avail_mass, std::min(k, it.available), it.available);
  }
  // Lightest first, the complement of a most-probable prefix.
  CompensatedSum lightest;
  for (auto it = items.rbegin(); it != items.rend(); ++it) {
    const double room = cap - lightest.value();
    if (it->avail_mass <= room) {
      lightest += it->avail_mass;
      continue;
    }
    const BigInt k = sequences_fitting(room, it->log_prob);
    if (k > 0) lightest += scale_by_ratio(it->avail_mass, std::min(k, it->available), it->available);
    break;
  }
  out.mass = std::max(greedy.value(), lightest.value());
  if (out.mass >= eps - kMassTol) return out;

  const bool small_counts = std::all_of(items.begin(), items.end(), [](const Item& it) {
    return it.available <= std::numeric_limits<std::uint32_t>::max() && it.seq_mass > 0.0;
  });
  if (!small_counts) {
    out.exact = false;
    return out;
  }
  ErrorSetSearch search(items, cap, node_limit);
  out.exact = search.run(out.mass);
  out.mass = std::max(out.mass, search.best());
  if (!out.exact) {
    if (const auto found = sum_set_search(items, cap, out.mass, node_limit)) {
      out.mass = std::max(out.mass, *found);
      out.exact = true;
    }
  }
  return out;
}

struct Solved {
  TradeoffPoint point;
  bool error_set_empty = true;
};

Solved solve_tradeoff(const Spectrum& s, const BigInt& budget, double eps, std::size_t node_limit) {
  const PrefixSet shorts = top_set_by_count(s, budget);
  std::vector<Item> items;
  CompensatedSum remainder;
  double granularity = 0.0;
  for (std::size_t i = shorts.full_atoms; i < s.atoms.size(); ++i) {
    const auto& atom = s.atoms[i];
    const BigInt left = atom.count - shorts.count_in(s, i);
    if (left <= 0) continue;
    const double left_mass = atom.mass - shorts.mass_in(s, i);
    remainder += left_mass;
    const double seq_mass = std::exp(atom.log_prob);
    granularity = std::max(granularity, seq_mass);
    items.push_back(Item{seq_mass, atom.log_prob, left, left_mass});
  }
  const ErrorSet errors = best_error_set(items, eps, node_limit);
  Solved out;
  out.point.n = s.n;
  out.point.eps = eps;
  out.point.budget = budget;
  out.point.short_mass = shorts.mass;
  out.point.error_mass = errors.mass;
  out.point.delta_star = std::clamp(remainder.value() - errors.mass, 0.0, 1.0);
  out.point.exact = errors.exact;
  out.point.granularity = granularity;
  out.error_set_empty = errors.mass <= 0.0;
  return out;
}

double length_for(double log_prob, double log_set_mass, double log_base) {
  const double x = (log_set_mass - log_prob) / log_base;
  const double len = std::ceil(x - 1e-11 * std::max(1.0, std::fabs(x)));
  return std::max(1.0, len);
}

// Rank of `seq` among the sequences of its type, in lexicographic order.
BigInt rank_in_type(const Sequence& seq, std::vector<std::uint32_t> counts) {
  BigInt rank = 0;
  BigInt remaining_count = 1;  // multinomial of the remaining counts
  {
    std::uint64_t total = 0;
    for (auto c : counts) {
      for (std::uint32_t j = 1; j <= c; ++j) {
        ++total;
        remaining_count = remaining_count * total / j;
      }
    }
  }
  std::uint64_t left = seq.size();
  for (auto x : seq) {
    for (std::uint32_t y = 0; y < x; ++y) {
      if (counts[y] > 0) rank += remaining_count * counts[y] / left;
    }
    remaining_count = remaining_count * counts[x] / left;
    --counts[x];
    --left;
  }
  return rank;
}

}  // namespace

CodeSpec construct_theorem2_code(const Spectrum& s, double eps) {
  check_eps(eps);
  const PrefixSet decode = top_set_by_mass(s, 1.0 - eps);
  CodeSpec c;
  c.n = s.n;
  c.base = s.base;
  c.decode_set_mass = decode.mass;
  const double log_set = std::log(decode.mass);
  const double log_base = std::log(static_cast<double>(s.base));
  CompensatedSum error;
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    const BigInt taken = decode.count_in(s, i);
    const double taken_mass = decode.mass_in(s, i);
    error += s.atoms[i].mass - taken_mass;
    if (taken <= 0) continue;
    const double len = length_for(s.atoms[i].log_prob, log_set, log_base);
    c.assignments.push_back(CodeAssignment{i, taken, static_cast<std::int64_t>(len), taken_mass});
  }
  c.error_mass = std::max(0.0, error.value());
  return c;
}

double code_overflow(const CodeSpec& c, double eta) {
  check_eta(eta);
  CompensatedSum sum;
  for (const auto& a : c.assignments) {
    if (static_cast<double>(a.length) > eta) sum += a.mass;
  }
  if (static_cast<double>(c.junk_length) > eta) sum += c.error_mass;
  return std::clamp(sum.value(), 0.0, 1.0);
}

CountingReport validate_counting_condition(const CodeSpec& c, bool reserve_junk_string) {
  std::map<std::int64_t, BigInt> by_length;
  for (const auto& a : c.assignments) by_length[a.length] += a.count;
  const bool charge_junk = reserve_junk_string && c.error_mass > 0.0;
  CountingReport report;
  BigInt cum = 0;
  for (const auto& [length, count] : by_length) {
    cum += count;
    CountingCheck check{length, cum, string_budget(c.base, length)};
    if (charge_junk && length >= c.junk_length) check.budget -= 1;
    if (check.decoded > check.budget && report.valid) {
      report.valid = false;
      report.violated_threshold = length;
    }
    report.checks.push_back(std::move(check));
  }
  return report;
}

TradeoffPoint optimal_tradeoff(const Spectrum& s, double eta, double eps, const TradeoffOptions& opts) {
  check_eta(eta);
  check_eps(eps);
  const auto t = static_cast<std::int64_t>(std::floor(eta));
  const BigInt budget = string_budget(s.base, t);
  Solved best = solve_tradeoff(s, budget, eps, opts.search_node_limit);
  if (opts.reserve_junk_string && !best.error_set_empty) {
    // Either give up one short string, or keep them all and decode everything.
    Solved reserved = solve_tradeoff(s, budget - 1, eps, opts.search_node_limit);
    Solved no_errors = solve_tradeoff(s, budget, 0.0, opts.search_node_limit);
    best = reserved.point.delta_star <= no_errors.point.delta_star ? reserved : no_errors;
    best.point.budget = budget;
    best.point.eps = eps;
  }
  best.point.eta = eta;
  return best.point;
}

std::int64_t optimal_threshold(const Spectrum& s, double eps, double delta, const TradeoffOptions& opts) {
  check_eps(eps);
  if (!(delta >= 0.0 && delta < 1.0)) throw ValidationError("delta", "overflow budget must lie in [0, 1)");
  if (!(eps + delta < 1.0)) throw ValidationError("delta", "eps + delta must be below 1");
  const BigInt total = s.total_count();
  std::int64_t hi = 1;
  while (string_budget(s.base, hi) < total) ++hi;
  std::int64_t lo = 1;
  const auto ok = [&](std::int64_t t) {
    return optimal_tradeoff(s, static_cast<double>(t), eps, opts).delta_star <= delta + kMassTol;
  };
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

RoundtripStats simulate_roundtrip(const Spectrum& s, const CodeSpec& c, std::span<const Sequence> samples,
                                  double eta) {
  check_eta(eta);
  // type -> (atom, sequences in earlier types of the same atom)
  std::map<std::vector<std::uint32_t>, std::pair<std::size_t, BigInt>> where;
  for (std::size_t i = 0; i < s.atoms.size(); ++i) {
    BigInt offset = 0;
    for (const auto& type : s.atoms[i].types) {
      where.emplace(type.counts, std::make_pair(i, offset));
      offset += type.size;
    }
  }
  std::map<std::size_t, std::vector<const CodeAssignment*>> by_atom;
  for (const auto& a : c.assignments) by_atom[a.atom].push_back(&a);

  RoundtripStats stats;
  stats.samples = samples.size();
  std::vector<std::uint32_t> counts(s.alphabet_size);
  for (const auto& seq : samples) {
    if (static_cast<int>(seq.size()) != s.n) throw ValidationError("samples", "sample length differs from n");
    std::fill(counts.begin(), counts.end(), 0);
    for (auto x : seq) {
      if (x >= counts.size()) throw ValidationError("samples", "symbol outside the alphabet");
      ++counts[x];
    }
    const auto loc = where.find(counts);
    const CodeAssignment* hit = nullptr;
    if (loc != where.end()) {
      const auto [atom, offset] = loc->second;
      const auto found = by_atom.find(atom);
      if (found != by_atom.end()) {
        BigInt rank = offset + rank_in_type(seq, counts);
        for (const auto* a : found->second) {
          if (rank < a->count) {
            hit = a;
            break;
          }
          rank -= a->count;
        }
      }
    }
    if (hit == nullptr) {
      ++stats.errors;
      if (static_cast<double>(c.junk_length) > eta) ++stats.overflows;
    } else if (static_cast<double>(hit->length) > eta) {
      ++stats.overflows;
    }
  }
  if (stats.samples > 0) {
    stats.error_rate = static_cast<double>(stats.errors) / static_cast<double>(stats.samples);
    stats.overflow_rate = static_cast<double>(stats.overflows) / static_cast<double>(stats.samples);
  }
  return stats;
}

}  // namespace vlsc
