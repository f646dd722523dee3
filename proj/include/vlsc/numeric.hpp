#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <string>

namespace vlsc {

using BigInt = boost::multiprecision::cpp_int;

// Masses within this distance of a target are treated as reaching it. Every
// set-selection rule in the library (top prefixes, error budgets, quantiles)
// uses the same slack so type-level and sequence-level evaluation agree.
inline constexpr double kMassTol = 1e-12;

// Relative tolerance when comparing a per-symbol rate against a threshold.
inline constexpr double kRateTol = 1e-12;

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

// Natural log of a nonnegative big integer; -inf for zero.
double log_of(const BigInt& x);

// Nearest double to x (may be +inf when x exceeds the double range).
double to_double(const BigInt& x);

// floor(exp(log_value)) and ceil(exp(log_value)) as big integers. Exact while
// exp(log_value) < 2^53; beyond that the result carries double precision in
// its leading bits.
BigInt floor_exp(double log_value);
BigInt ceil_exp(double log_value);

// Sum_{i=1..t} base^i, the number of nonempty strings of length <= t over a
// base-letter alphabet. Zero for t < 1.
BigInt string_budget(int base, std::int64_t t);

std::string to_decimal(const BigInt& x);

// x * (part / whole) for big-integer part <= whole, returning x exactly when
// part == whole and 0 when part == 0.
double scale_by_ratio(double x, const BigInt& part, const BigInt& whole);

}  // namespace vlsc
