#include <doctest.h>

#include <cmath>
#include <functional>

#include "oracle.hpp"
#include "vlsc/asymptotics.hpp"
#include "vlsc/codes.hpp"
#include "vlsc/errors.hpp"

using namespace vlsc;

namespace {

Distribution bern(double p) { return make_distribution({1.0 - p, p}); }

const Distribution kUniform2 = make_distribution({0.5, 0.5});

CodeSpec hand_code(int base, std::int64_t length, int count) {
  CodeSpec c;
  c.n = 3;
  c.base = base;
  c.decode_set_mass = 1.0;
  c.assignments.push_back(CodeAssignment{0, count, length, 1.0});
  return c;
}

// Minimal overflow over every deterministic code for a tiny block: each
// sequence is sent to the junk codeword or gets an explicit length in 1..L,
// subject to the counting condition at every threshold.
double exhaustive_over_lengths(const std::vector<double>& p, int eta, double eps, int L) {
  const std::size_t m = p.size();
  std::vector<int> len(m, 0);  // 0 = junk
  double best = 2.0;
  std::function<void(std::size_t, double)> rec = [&](std::size_t i, double junk) {
    if (junk > eps + 1e-12) return;
    if (i == m) {
      for (int t = 1; t <= L; ++t) {
        int used = 0;
        for (int l : len) used += (l >= 1 && l <= t);
        if (used > (1 << (t + 1)) - 2) return;
      }
      double over = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        if (len[k] > eta) over += p[k];
      }
      best = std::min(best, over);
      return;
    }
    for (int l = 0; l <= L; ++l) {
      len[i] = l;
      rec(i + 1, junk + (l == 0 ? p[i] : 0.0));
    }
    len[i] = 0;
  };
  rec(0, 0.0);
  return best;
}

// Same search where only "short (<= eta)", "long" or "junk" matters: the
// counting condition for a set of short sequences reduces to |short| <= M,
// and long codewords are unconstrained.
double exhaustive_short_long(const std::vector<double>& p, int eta, double eps) {
  const int M = (1 << (eta + 1)) - 2;
  const std::size_t m = p.size();
  double best = 2.0;
  std::function<void(std::size_t, double, int, double)> rec = [&](std::size_t i, double junk, int shorts,
                                                                  double over) {
    if (junk > eps + 1e-12 || shorts > M || over >= best) return;
    if (i == m) {
      best = over;
      return;
    }
    rec(i + 1, junk, shorts + 1, over);
    rec(i + 1, junk + p[i], shorts, over);
    rec(i + 1, junk, shorts, over + p[i]);
  };
  rec(0, 0.0, 0, 0.0);
  return best;
}

std::vector<double> sequence_probs(const Distribution& d, int n) {
  std::vector<double> out;
  for (const auto& seq : oracle::all_sequences(d.alphabet_size(), n)) out.push_back(std::exp(sequence_log_prob(d, seq)));
  return out;
}

}  // namespace

TEST_SUITE("codes") {
  TEST_CASE("theorem-2 code examples") {
    const auto u = iid_spectrum(kUniform2, 2);
    const auto c0 = construct_theorem2_code(u, 0.0);
    REQUIRE(c0.assignments.size() == 1);
    CHECK(c0.assignments[0].count == 4);
    CHECK(c0.assignments[0].length == 2);
    CHECK(c0.error_mass == 0.0);
    const auto c1 = construct_theorem2_code(u, 0.25);
    REQUIRE(c1.assignments.size() == 1);
    CHECK(c1.assignments[0].count == 3);
    CHECK(c1.assignments[0].length == 2);
    CHECK(c1.decode_set_mass == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(c1.error_mass == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(c1.junk_length == 1);
    CHECK_THROWS_AS(construct_theorem2_code(u, 1.0), ValidationError);
  }

  TEST_CASE("code_overflow examples") {
    const auto c = construct_theorem2_code(iid_spectrum(kUniform2, 2), 0.0);
    CHECK(code_overflow(c, 2.0) == 0.0);
    CHECK(code_overflow(c, 1.5) == doctest::Approx(1.0).epsilon(1e-15));
    const auto b = construct_theorem2_code(iid_spectrum(bern(0.3), 2), 0.0);
    REQUIRE(b.assignments.size() == 3);
    CHECK(b.assignments[0].length == 2);
    CHECK(b.assignments[1].length == 3);
    CHECK(b.assignments[2].length == 4);
    CHECK(std::fabs(code_overflow(b, 2.0) - 0.51) < 1e-15);
    CHECK_THROWS_AS(code_overflow(b, 0.5), ValidationError);
  }

  TEST_CASE("counting condition") {
    CHECK(validate_counting_condition(construct_theorem2_code(iid_spectrum(bern(0.3), 40), 0.1)).valid);
    const auto bad = validate_counting_condition(hand_code(2, 1, 3));
    CHECK_FALSE(bad.valid);
    REQUIRE(bad.violated_threshold.has_value());
    CHECK(*bad.violated_threshold == 1);
    const auto edge = validate_counting_condition(hand_code(2, 2, 6));
    CHECK(edge.valid);
    REQUIRE(edge.checks.size() == 1);
    CHECK(edge.checks[0].budget == 6);
    CHECK_FALSE(validate_counting_condition(hand_code(2, 2, 7)).valid);
    CHECK(validate_counting_condition(hand_code(3, 1, 3)).valid);
    for (const auto& d : {bern(0.1), bern(0.45), make_distribution({0.2, 0.3, 0.5}), make_distribution({0.1, 0.9}, 3)}) {
      for (int n : {1, 7, 60}) {
        for (double eps : {0.0, 0.01, 0.3, 0.9}) {
          const auto c = construct_theorem2_code(iid_spectrum(d, n), eps);
          CHECK(validate_counting_condition(c).valid);
          CHECK(c.error_mass <= eps + 1e-11);
          CHECK(std::fabs(c.error_mass + c.decode_set_mass - 1.0) <= 1e-9);
        }
      }
    }
  }

  TEST_CASE("optimal_tradeoff examples") {
    const auto u = iid_spectrum(kUniform2, 2);
    const auto p = optimal_tradeoff(u, 1.0, 0.0);
    CHECK(p.budget == 2);
    CHECK(p.delta_star == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(optimal_tradeoff(u, 1.0, 0.25).delta_star == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(optimal_tradeoff(u, 1.9, 0.25).delta_star == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(optimal_tradeoff(u, 3.0, 0.0).delta_star == 0.0);
    const auto t = iid_spectrum(make_distribution({0.2, 0.3, 0.5}), 6);
    CHECK(optimal_tradeoff(t, 6 * std::log2(3.0) + 1, 0.0).delta_star == 0.0);
    CHECK_THROWS_AS(optimal_tradeoff(u, 0.9, 0.0), ValidationError);
    CHECK_THROWS_AS(optimal_tradeoff(u, 1.0, -0.1), ValidationError);
  }

  TEST_CASE("error set is a maximum subset, not a greedy one") {
    // Remainder after the 2 short strings holds masses 0.144 x3, 0.096 x3,
    // 0.064; heaviest-first reaches only 0.144 of the 0.2 budget while
    // 0.096 + 0.096 = 0.192 fits.
    const auto s = iid_spectrum(bern(0.6), 3);
    const auto p = optimal_tradeoff(s, 1.0, 0.2);
    CHECK(p.exact);
    CHECK(std::fabs(p.error_mass - 0.192) < 1e-12);
    const auto b = oracle::block_of({{4, 6}, 10}, 3);
    CHECK(std::fabs(p.delta_star - oracle::prob(b, oracle::optimal_overflow_numer(b, 1, 20))) < 1e-12);
  }

  TEST_CASE("optimal_tradeoff equals exhaustive search over codes") {
    for (double q : {0.1, 0.3, 0.5, 0.6, 0.8}) {
      const auto d = bern(q);
      for (int n = 1; n <= 3; ++n) {
        const auto s = iid_spectrum(d, n);
        const auto p = sequence_probs(d, n);
        for (int eta = 1; eta <= 3; ++eta) {
          for (double eps : {0.0, 0.1, 0.25, 0.4}) {
            const double brute = exhaustive_over_lengths(p, eta, eps, std::max(eta, n) + 1);
            CHECK(std::fabs(optimal_tradeoff(s, eta, eps).delta_star - brute) < 1e-12);
          }
        }
      }
      const auto s = iid_spectrum(d, 4);
      const auto p = sequence_probs(d, 4);
      for (int eta = 1; eta <= 3; ++eta) {
        for (double eps : {0.0, 0.15, 0.3}) {
          CHECK(std::fabs(optimal_tradeoff(s, eta, eps).delta_star - exhaustive_short_long(p, eta, eps)) < 1e-12);
        }
      }
    }
  }

  TEST_CASE("optimal_tradeoff equals the subset-sum oracle") {
    for (std::size_t symbols = 2; symbols <= 3; ++symbols) {
      for (const auto& src : oracle::grid_sources(symbols)) {
        const auto d = make_distribution(oracle::probs_of(src));
        for (int n = 1; n <= 5; ++n) {
          const auto b = oracle::block_of(src, n);
          const auto s = iid_spectrum(d, n);
          for (int eta = 1; oracle::ipow(2, eta + 1) - 2 < b.weights.size() + 2; ++eta) {
            for (int g : {0, 5, 10, 20, 35}) {
              const auto p = optimal_tradeoff(s, eta, g / 100.0);
              CHECK(p.exact);
              CHECK(std::fabs(p.delta_star - oracle::prob(b, oracle::optimal_overflow_numer(b, eta, g))) <= 1e-12);
            }
          }
        }
      }
    }
  }

  TEST_CASE("optimal_threshold examples") {
    CHECK(optimal_threshold(iid_spectrum(kUniform2, 10), 0.0, 0.0) == 10);
    CHECK(optimal_threshold(iid_spectrum(kUniform2, 10), 0.6, 0.3) == 6);
    const auto s = iid_spectrum(bern(0.3), 50);
    const auto a = optimal_threshold(s, 0.1, 0.1);
    const auto b = optimal_threshold(s, 0.2, 0.0);
    const auto c = optimal_threshold(s, 0.0, 0.2);
    CHECK(std::abs(a - b) <= 1);
    CHECK(std::abs(a - c) <= 1);
    CHECK(std::abs(b - c) <= 1);
    CHECK_THROWS_AS(optimal_threshold(s, 0.5, 0.5), ValidationError);
    // Minimality against a linear scan.
    for (double eps : {0.0, 0.05, 0.3}) {
      for (double delta : {0.0, 0.1, 0.4}) {
        const auto t = optimal_threshold(s, eps, delta);
        CHECK(optimal_tradeoff(s, t, eps).delta_star <= delta + 1e-12);
        if (t > 1) CHECK(optimal_tradeoff(s, t - 1, eps).delta_star > delta);
      }
    }
  }

  TEST_CASE("tradeoff monotonicity and code optimality") {
    const auto s = iid_spectrum(make_distribution({0.15, 0.25, 0.6}), 12);
    for (double eps : {0.0, 0.02, 0.1, 0.3}) {
      const auto code = construct_theorem2_code(s, eps);
      double prev = 2.0;
      for (int eta = 1; eta <= 25; ++eta) {
        const auto p = optimal_tradeoff(s, eta, eps);
        CHECK(p.delta_star <= prev + 1e-12);
        CHECK(p.delta_star <= optimal_tradeoff(s, eta, 0.0).delta_star + 1e-12);
        CHECK(p.delta_star <= code_overflow(code, eta) + 1e-12);
        prev = p.delta_star;
      }
    }
    for (int eta = 1; eta <= 25; eta += 4) {
      double prev = 2.0;
      for (double eps = 0.0; eps < 1.0; eps += 0.1) {
        const double v = optimal_tradeoff(s, eta, eps).delta_star;
        CHECK(v <= prev + 1e-12);
        prev = v;
      }
      CHECK(optimal_tradeoff(s, eta, 1.0 - 1e-9).delta_star <= 1e-8);
    }
  }

  TEST_CASE("reserving the junk string moves delta* by at most one sequence") {
    TradeoffOptions reserve;
    reserve.reserve_junk_string = true;
    for (const auto& src : oracle::grid_sources(2)) {
      const auto d = make_distribution(oracle::probs_of(src));
      for (int n : {2, 4, 6}) {
        const auto b = oracle::block_of(src, n);
        const auto s = iid_spectrum(d, n);
        for (int eta = 1; oracle::ipow(2, eta + 1) - 2 < b.weights.size(); ++eta) {
          const std::size_t M = oracle::ipow(2, eta + 1) - 2;
          const double last_short = oracle::prob(b, b.weights[M - 1]);
          for (double eps : {0.05, 0.1, 0.3}) {
            const double plain = optimal_tradeoff(s, eta, eps).delta_star;
            const double reserved = optimal_tradeoff(s, eta, eps, reserve).delta_star;
            CHECK(reserved >= plain - 1e-12);
            CHECK(reserved - plain <= last_short + 1e-12);
          }
        }
      }
    }
    // Charging the junk codeword can invalidate a theorem-2 code whose short
    // strings are saturated.
    const auto c = construct_theorem2_code(iid_spectrum(make_distribution({1 / 3.0, 1 / 3.0, 1 / 3.0}), 1), 0.34);
    REQUIRE(c.assignments.size() == 1);
    CHECK(c.assignments[0].count == 2);
    CHECK(c.assignments[0].length == 1);
    CHECK(validate_counting_condition(c).valid);
    CHECK_FALSE(validate_counting_condition(c, true).valid);
  }

  TEST_CASE("simulate_roundtrip") {
    const auto point = make_distribution({0.0, 1.0});
    const auto ps = iid_spectrum(point, 5);
    const auto pc = construct_theorem2_code(ps, 0.0);
    const auto samples = sample_sequences(point, 5, 100, 3);
    const auto st = simulate_roundtrip(ps, pc, samples, 1.0);
    CHECK(st.error_rate == 0.0);

    const auto d = bern(0.3);
    const int n = 10;
    const auto s = iid_spectrum(d, n);
    const auto code = construct_theorem2_code(s, 0.1);
    const std::size_t count = 100000;
    const auto draws = sample_sequences(d, n, count, 11);
    const double eta = n * entropy(d);
    const auto stats = simulate_roundtrip(s, code, draws, eta);
    const auto band = [&](double p) { return 4.0 * std::sqrt(p * (1 - p) / count) + 1e-12; };
    CHECK(std::fabs(stats.error_rate - code.error_mass) <= band(code.error_mass));
    const double over = code_overflow(code, eta);
    CHECK(std::fabs(stats.overflow_rate - over) <= band(over));
    CHECK(code.error_mass > 0.05);

    // Every sequence is decoded exactly when its rank is below the taken count.
    const auto small = iid_spectrum(d, 4);
    const auto sc = construct_theorem2_code(small, 0.2);
    const auto all = oracle::all_sequences(2, 4);
    double err = 0.0;
    std::size_t errors = 0;
    for (const auto& seq : all) {
      const auto one = simulate_roundtrip(small, sc, std::vector<Sequence>{seq}, 1.0);
      if (one.errors) {
        ++errors;
        err += std::exp(sequence_log_prob(d, seq));
      }
    }
    CHECK(errors > 0);
    CHECK(std::fabs(err - sc.error_mass) < 1e-12);
    CHECK_THROWS_AS(simulate_roundtrip(small, sc, std::vector<Sequence>{Sequence(3, 0)}, 1.0), ValidationError);
  }
}
