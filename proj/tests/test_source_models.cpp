#include <doctest.h>

#include <cmath>
#include <map>

#include "oracle.hpp"
#include "vlsc/errors.hpp"
#include "vlsc/source_models.hpp"

using namespace vlsc;

namespace {

Distribution bern(double p) { return make_distribution({1.0 - p, p}); }

}  // namespace

TEST_SUITE("source_models") {
  TEST_CASE("make_distribution validates its input") {
    CHECK(make_distribution({0.5, 0.5}).alphabet_size() == 2);
    CHECK(make_distribution({0.3, 0.7}).base == 2);
    CHECK_THROWS_AS(make_distribution({0.5, 0.6}), ValidationError);
    CHECK_THROWS_AS(make_distribution({1.1, -0.1}), ValidationError);
    CHECK_THROWS_AS(make_distribution({0.5, 0.5}, 1), ValidationError);
    CHECK_THROWS_AS(make_distribution({}), ValidationError);
    try {
      make_distribution({0.5, 0.6});
    } catch (const ValidationError& e) {
      CHECK(e.key() == "probs");
    }
    const auto d = make_distribution({-1e-16, 1.0});
    CHECK(d.probs[0] == 0.0);
    CHECK(d.support_size() == 1);
  }

  TEST_CASE("uniform binary n=2 collapses to one atom") {
    const auto s = iid_spectrum(make_distribution({0.5, 0.5}), 2);
    REQUIRE(s.atoms.size() == 1);
    CHECK(s.atoms[0].log_prob == doctest::Approx(std::log(0.25)).epsilon(1e-15));
    CHECK(s.atoms[0].count == 4);
    CHECK(s.atoms[0].mass == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.rate(0) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("Bernoulli(0.3) n=2 by hand") {
    const auto s = iid_spectrum(bern(0.3), 2);
    REQUIRE(s.atoms.size() == 3);
    const double masses[] = {0.49, 0.42, 0.09};
    const int counts[] = {1, 2, 1};
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::fabs(s.atoms[i].mass - masses[i]) < 1e-15);
      CHECK(s.atoms[i].count == counts[i]);
    }
    CHECK(s.rate(0) == doctest::Approx(-std::log2(0.7)).epsilon(1e-14));
    CHECK(s.rate(1) == doctest::Approx(-std::log2(0.21) / 2).epsilon(1e-14));
    CHECK(s.rate(2) == doctest::Approx(-std::log2(0.3)).epsilon(1e-14));
  }

  TEST_CASE("n=1 mirrors the sorted distinct probabilities") {
    const auto s = iid_spectrum(make_distribution({0.2, 0.5, 0.0, 0.3}), 1);
    REQUIRE(s.atoms.size() == 3);
    CHECK(std::fabs(s.atoms[0].mass - 0.5) < 1e-15);
    CHECK(std::fabs(s.atoms[1].mass - 0.3) < 1e-15);
    CHECK(std::fabs(s.atoms[2].mass - 0.2) < 1e-15);
    const auto t = iid_spectrum(make_distribution({0.25, 0.5, 0.25}), 1);
    REQUIRE(t.atoms.size() == 2);
    CHECK(t.atoms[1].count == 2);
  }

  TEST_CASE("zero-probability symbols never enter the spectrum") {
    const auto s = iid_spectrum(make_distribution({0.6, 0.0, 0.4}), 5);
    CHECK(s.total_count() == 32);
    for (const auto& a : s.atoms) {
      for (const auto& t : a.types) CHECK(t.counts[1] == 0);
    }
    const auto point = iid_spectrum(make_distribution({0.0, 1.0}), 7);
    REQUIRE(point.atoms.size() == 1);
    CHECK(point.atoms[0].count == 1);
    CHECK(point.rate(0) == 0.0);
  }

  TEST_CASE("type-class spectra equal sequence enumeration") {
    for (std::size_t symbols = 1; symbols <= 3; ++symbols) {
      for (const auto& src : oracle::grid_sources(symbols)) {
        const auto d = make_distribution(oracle::probs_of(src));
        for (int n = 1; n <= 6; ++n) {
          const auto b = oracle::block_of(src, n);
          const auto atoms = oracle::atoms_of(b);
          const auto s = iid_spectrum(d, n);
          REQUIRE(s.atoms.size() == atoms.size());
          for (std::size_t i = 0; i < atoms.size(); ++i) {
            CHECK(s.atoms[i].count == atoms[i].count);
            CHECK(std::fabs(s.atoms[i].mass - oracle::prob(b, static_cast<oracle::u128>(atoms[i].count) *
                                                                   atoms[i].weight)) <= 1e-12);
            CHECK(std::fabs(s.atoms[i].log_prob - oracle::log_prob(b, atoms[i].weight)) <= 1e-12);
          }
        }
      }
    }
  }

  TEST_CASE("large-n invariants") {
    const auto s = iid_spectrum(bern(0.3), 10000);
    CHECK(s.total_count() == BigInt(1) << 10000);
    CHECK(std::fabs(s.total_mass() - 1.0) < 1e-9);
    for (std::size_t i = 1; i < s.atoms.size(); ++i) CHECK(s.atoms[i].log_prob < s.atoms[i - 1].log_prob);
    const auto t = iid_spectrum(make_distribution({0.2, 0.3, 0.5}), 1500);
    CHECK(std::fabs(t.total_mass() - 1.0) < 1e-6);
    CHECK(t.total_count() == boost::multiprecision::pow(BigInt(3), 1500));
  }

  TEST_CASE("type-class ceiling is enforced") {
    SpectrumLimits limits;
    limits.max_type_classes = 100;
    CHECK(type_class_count(20, 3) == 231);
    CHECK_THROWS_AS(iid_spectrum(make_distribution({0.2, 0.3, 0.5}), 20, limits), ResourceLimitError);
    CHECK_NOTHROW(iid_spectrum(make_distribution({0.2, 0.3, 0.5}), 12, limits));
    CHECK_THROWS_AS(iid_spectrum(bern(0.3), 0), ValidationError);
  }

  TEST_CASE("mixed spectrum") {
    const auto d = bern(0.3);
    for (int n : {1, 4, 9}) {
      const auto a = mixed_spectrum(d, d, 0.5, n);
      const auto b = iid_spectrum(d, n);
      REQUIRE(a.atoms.size() == b.atoms.size());
      for (std::size_t i = 0; i < a.atoms.size(); ++i) {
        CHECK(a.atoms[i].count == b.atoms[i].count);
        CHECK(std::fabs(a.atoms[i].mass - b.atoms[i].mass) < 1e-12);
        CHECK(std::fabs(a.atoms[i].log_prob - b.atoms[i].log_prob) < 1e-12);
      }
    }
    const auto m = mixed_spectrum(make_distribution({0.5, 0.5}), make_distribution({1.0, 0.0}), 0.5, 1);
    REQUIRE(m.atoms.size() == 2);
    CHECK(m.atoms[0].log_prob == doctest::Approx(std::log(0.75)).epsilon(1e-14));
    CHECK(m.atoms[1].log_prob == doctest::Approx(std::log(0.25)).epsilon(1e-14));
    CHECK(m.atoms[0].count == 1);
    CHECK(m.atoms[1].count == 1);
    CHECK(std::fabs(mixed_spectrum(bern(0.2), bern(0.4), 0.3, 6).total_mass() - 1.0) < 1e-12);
    CHECK_THROWS_AS(mixed_spectrum(bern(0.2), make_distribution({0.2, 0.3, 0.5}), 0.3, 2), ValidationError);
    CHECK_THROWS_AS(mixed_spectrum(bern(0.2), bern(0.4), 1.0, 2), ValidationError);
  }

  TEST_CASE("mixed spectrum equals sequence enumeration") {
    const auto d1 = make_distribution({0.2, 0.5, 0.3});
    const auto d2 = make_distribution({0.6, 0.0, 0.4});
    const int n = 5;
    std::map<double, std::pair<int, double>, std::greater<>> groups;
    for (const auto& seq : oracle::all_sequences(3, n)) {
      long double p1 = 1, p2 = 1;
      for (auto x : seq) {
        p1 *= d1.probs[x];
        p2 *= d2.probs[x];
      }
      const double p = static_cast<double>(0.3L * p1 + 0.7L * p2);
      auto it = groups.begin();
      for (; it != groups.end(); ++it) {
        if (std::fabs(it->first - p) <= 1e-13 * p) break;
      }
      if (it == groups.end()) it = groups.emplace(p, std::pair{0, 0.0}).first;
      it->second.first += 1;
      it->second.second += p;
    }
    const auto s = mixed_spectrum(d1, d2, 0.3, n);
    REQUIRE(s.atoms.size() == groups.size());
    std::size_t i = 0;
    for (const auto& [p, cm] : groups) {
      CHECK(s.atoms[i].count == cm.first);
      CHECK(std::fabs(s.atoms[i].mass - cm.second) < 1e-12);
      CHECK(std::fabs(s.atoms[i].log_prob - std::log(p)) < 1e-12);
      ++i;
    }
  }

  TEST_CASE("switching schedule") {
    const auto sched = make_schedule(bern(0.2), bern(0.4));
    // ceil(log2 n): n=1 -> 0 (even), 2 -> 1, 3,4 -> 2, 5..8 -> 3
    CHECK(sched.rule.component_for(1) == 0);
    CHECK(sched.rule.component_for(2) == 1);
    CHECK(sched.rule.component_for(3) == 0);
    CHECK(sched.rule.component_for(4) == 0);
    CHECK(sched.rule.component_for(5) == 1);
    CHECK(sched.rule.component_for(8) == 1);
    CHECK(sched.rule.component_for(9) == 0);
    for (int n : {2, 4, 8, 16, 32}) {
      CHECK(sched.rule.component_for(n) != sched.rule.component_for(2 * n));
    }
    const auto a = switching_spectrum(sched, 2);
    const auto b = switching_spectrum(sched, 2);
    const auto c = iid_spectrum(bern(0.4), 2);
    REQUIRE(a.atoms.size() == c.atoms.size());
    for (std::size_t i = 0; i < a.atoms.size(); ++i) {
      CHECK(a.atoms[i].mass == b.atoms[i].mass);
      CHECK(a.atoms[i].mass == c.atoms[i].mass);
    }
    SwitchingRule flipped;
    flipped.even_component = 1;
    CHECK(make_schedule(bern(0.2), bern(0.4), flipped).rule.component_for(2) == 0);
    const auto same = make_schedule(bern(0.3), bern(0.3));
    for (int n : {3, 7, 12}) CHECK(switching_spectrum(same, n).atoms.size() == iid_spectrum(bern(0.3), n).atoms.size());
    CHECK_THROWS_AS(make_schedule(bern(0.2), make_distribution({1.0})), ValidationError);
  }

  TEST_CASE("sampling") {
    const auto point = make_distribution({0.0, 1.0, 0.0});
    const auto seqs = sample_sequences(point, 5, 3, 99);
    REQUIRE(seqs.size() == 3);
    for (const auto& s : seqs) CHECK(s == Sequence(5, 1));

    const auto d = bern(0.3);
    CHECK(sample_sequences(d, 10, 50, 7) == sample_sequences(d, 10, 50, 7));
    CHECK(sample_sequences(d, 10, 50, 7) != sample_sequences(d, 10, 50, 8));

    const int n = 10;
    const std::size_t count = 100000;
    double sum = 0.0;
    for (const auto& s : sample_sequences(d, n, count, 2024)) sum += -sequence_log_prob(d, s) / n;
    const double mean = sum / count;
    const double h = -(0.3 * std::log(0.3) + 0.7 * std::log(0.7));
    const double v = 0.3 * std::pow(-std::log(0.3) - h, 2) + 0.7 * std::pow(-std::log(0.7) - h, 2);
    const double sigma = std::sqrt(v / n / count);
    CHECK(std::fabs(mean - h) <= 3 * sigma);
    CHECK_THROWS_AS(sample_sequences(d, 3, 0, 1), ValidationError);
  }
}
