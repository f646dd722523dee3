#include "vlsc/numeric.hpp"

#include <algorithm>
#include <limits>

namespace vlsc {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
// Below this many bits a cpp_int converts to double directly.
constexpr unsigned kDirectBits = 1000;

}  // namespace

double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double log_of(const BigInt& x) {
  if (x <= 0) return -std::numeric_limits<double>::infinity();
  const unsigned top = boost::multiprecision::msb(x);
  if (top < kDirectBits) return std::log(x.convert_to<double>());
  const unsigned shift = top - 62;
  const auto lead = static_cast<std::uint64_t>(x >> shift);
  return std::log(static_cast<double>(lead)) + shift * kLn2;
}

double to_double(const BigInt& x) {
  if (x == 0) return 0.0;
  const unsigned top = boost::multiprecision::msb(x);
  if (top >= 1024) return std::numeric_limits<double>::infinity();
  return x.convert_to<double>();
}

BigInt floor_exp(double log_value) {
  if (std::isnan(log_value)) return BigInt(0);
  if (log_value < 0.0) return BigInt(0);
  if (log_value < 36.0) {  // exp(36) < 2^53
    return BigInt(static_cast<std::uint64_t>(std::floor(std::exp(log_value))));
  }
  if (std::isinf(log_value)) {
    throw std::overflow_error("floor_exp: infinite argument");
  }
  const auto exponent = static_cast<std::int64_t>(std::floor(log_value / kLn2)) - 62;
  const double lead = std::exp(log_value - static_cast<double>(exponent) * kLn2);
  BigInt out(static_cast<std::uint64_t>(lead));
  if (exponent >= 0) {
    out <<= static_cast<unsigned>(exponent);
  } else {
    out >>= static_cast<unsigned>(-exponent);
  }
  return out;
}

BigInt ceil_exp(double log_value) {
  if (std::isnan(log_value)) return BigInt(0);
  if (log_value == -std::numeric_limits<double>::infinity()) return BigInt(0);
  if (log_value < 36.0) {
    return BigInt(static_cast<std::uint64_t>(std::ceil(std::exp(log_value))));
  }
  return floor_exp(log_value) + 1;
}

BigInt string_budget(int base, std::int64_t t) {
  if (t < 1) return BigInt(0);
  // (K^{t+1} - K) / (K - 1)
  BigInt power = boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(t + 1));
  return (power - base) / (base - 1);
}

std::string to_decimal(const BigInt& x) { return x.str(); }

double scale_by_ratio(double x, const BigInt& part, const BigInt& whole) {
  if (part == whole) return x;
  if (part <= 0) return 0.0;
  if (boost::multiprecision::msb(whole) < 53) {
    return x * (part.convert_to<double>() / whole.convert_to<double>());
  }
  return x * std::exp(log_of(part) - log_of(whole));
}

}  // namespace vlsc
