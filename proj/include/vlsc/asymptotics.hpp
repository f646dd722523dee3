#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vlsc/codes.hpp"
#include "vlsc/source_models.hpp"

namespace vlsc {

// Entropy and varentropy in base-K units (K = d.base).
double entropy(const Distribution& d);
double varentropy(const Distribution& d);

// Upper-tail Gaussian integral (1/sqrt(2 pi)) int_x^inf exp(-t^2/2) dt.
// Decreasing in x; q_upper(0) = 0.5.
double q_upper(double x);

// Inverse of q_upper on (0, 1).
double q_upper_inv(double gamma);

// |rate - H| at or below this counts as rate == H.
inline constexpr double kEntropyMatchTol = 1e-12;

// Second-order optimum threshold of an i.i.d. source at first-order rate R:
// +inf below the entropy, -inf above it, sqrt(V) * q_upper_inv(eps + delta)
// at R = H.
double second_order_threshold(const Distribution& d, double eps, double delta, double rate);

struct MeanLengthConstants {
  double r2 = 0.0;            // (1 - eps) H
  std::optional<double> kpv;  // -sqrt(V / 2 pi) exp(-q_upper_inv(eps)^2 / 2), eps in (0, 1)
};

MeanLengthConstants mean_length_constants(const Distribution& d, double eps);

// Second-order threshold at R = (1 - eps) H: sqrt(V) q_upper_inv(delta) when
// eps == 0, +inf otherwise.
double second_order_at_r2(const Distribution& d, double eps, double delta);

struct Measurement {
  int n = 0;
  std::int64_t eta_star = 0;
  double first_order_gap = 0.0;     // |eta* / n - H|
  double second_order_value = 0.0;  // (eta* - n H) / sqrt(n)
  double second_order_gap = 0.0;    // second_order_value - L_pred
};

struct AsymptoticReport {
  double H = 0.0;
  double V = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  double L_pred = 0.0;
  std::optional<double> kpv;
  std::vector<Measurement> measurements;
};

// Closed-form quantities only (no measurements).
AsymptoticReport asymptotic_report(const Distribution& d, double eps, double delta);

// Closed forms plus the exact optimal threshold at every n in the grid.
AsymptoticReport convergence_study(const Distribution& d, double eps, double delta, std::span<const int> n_grid,
                                   const SpectrumLimits& limits = {});

struct OptimisticPoint {
  int n = 0;
  double value = 0.0;  // finite_n_first_order at this n
  std::size_t component = 0;
};

struct OptimisticReport {
  std::vector<OptimisticPoint> points;
  double limsup_estimate = 0.0;
  double liminf_estimate = 0.0;
  double component_entropy_max = 0.0;
  double component_entropy_min = 0.0;
};

// Evaluates finite_n_first_order along the grid; the estimates are the max
// and min over the last `tail_fraction` of the grid points.
OptimisticReport optimistic_study(const SwitchingSchedule& s, double eps, double delta, std::span<const int> n_grid,
                                  double tail_fraction = 0.5, const SpectrumLimits& limits = {});

}  // namespace vlsc
