#include "vlsc/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vlsc/errors.hpp"
#include "vlsc/spectrum.hpp"

namespace vlsc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double polynomial(std::span<const double> coeffs, double x) {
  double out = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) out = out * x + *it;
  return out;
}

// Lower-tail standard normal quantile, Wichura's AS241 (PPND16).
double normal_quantile(double p) {
  static constexpr double a[] = {3.3871328727963666080e0, 1.3314166789178437745e+2, 1.9715909503065514427e+3,
                                 1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                 3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static constexpr double b[] = {1.0,
                                 4.2313330701600911252e+1,
                                 6.8718700749205790830e+2,
                                 5.3941960214247511077e+3,
                                 2.1213794301586595867e+4,
                                 3.9307895800092710610e+4,
                                 2.8729085735721942674e+4,
                                 5.2264952788528545610e+3};
  static constexpr double c[] = {1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
                                 3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
                                 2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double d[] = {1.0,
                                 2.05319162663775882187e0,
                                 1.67638483018380384940e0,
                                 6.89767334985100004550e-1,
                                 1.48103976427480074590e-1,
                                 1.51986665636164571966e-2,
                                 5.47593808499534494600e-4,
                                 1.05075007164441684324e-9};
  static constexpr double e[] = {6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
                                 2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                 2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[] = {1.0,
                                 5.99832206555887937690e-1,
                                 1.36929880922735805310e-1,
                                 1.48753612908506148525e-2,
                                 7.86869131145613259100e-4,
                                 1.84631831751005468180e-5,
                                 1.42151175831644588870e-7,
                                 2.04426310338993978564e-15};
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * polynomial(a, r) / polynomial(b, r);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  double z;
  if (r <= 5.0) {
    r -= 1.6;
    z = polynomial(c, r) / polynomial(d, r);
  } else {
    r -= 5.0;
    z = polynomial(e, r) / polynomial(f, r);
  }
  return q < 0.0 ? -z : z;
}

double log_base_of(const Distribution& d) { return std::log(static_cast<double>(d.base)); }

void check_pair(double eps, double delta) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("eps", "error budget must lie in [0, 1)");
  if (!(delta >= 0.0 && delta < 1.0)) throw ValidationError("delta", "overflow budget must lie in [0, 1)");
  if (!(eps + delta < 1.0)) throw ValidationError("delta", "eps + delta must be below 1");
}

double predicted_l(double V, double gamma) {
  if (V == 0.0) return 0.0;
  if (gamma <= 0.0) return kInf;
  return std::sqrt(V) * q_upper_inv(gamma);
}

}  // namespace

double entropy(const Distribution& d) {
  CompensatedSum h;
  for (double p : d.probs) {
    if (p > 0.0) h += -p * std::log(p);
  }
  return std::max(0.0, h.value() / log_base_of(d));
}

double varentropy(const Distribution& d) {
  const double h = entropy(d);
  const double lb = log_base_of(d);
  CompensatedSum v;
  for (double p : d.probs) {
    if (p <= 0.0) continue;
    const double dev = -std::log(p) / lb - h;
    v += p * dev * dev;
  }
  // Uniform-on-support sources have every deviation equal to rounding noise.
  const double out = v.value();
  return out < 1e-24 ? 0.0 : out;
}

double q_upper(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double q_upper_inv(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("gamma", "tail probability must lie in (0, 1)");
  double z = -normal_quantile(gamma);
  for (int iter = 0; iter < 2; ++iter) {
    const double density = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    if (density <= 0.0) break;
    z += (q_upper(z) - gamma) / density;
  }
  return z;
}

double second_order_threshold(const Distribution& d, double eps, double delta, double rate) {
  check_pair(eps, delta);
  if (!(eps + delta > 0.0)) throw ValidationError("delta", "eps + delta must be positive");
  const double gap = rate - entropy(d);
  if (std::fabs(gap) <= kEntropyMatchTol) return predicted_l(varentropy(d), eps + delta);
  return gap < 0.0 ? kInf : -kInf;
}

MeanLengthConstants mean_length_constants(const Distribution& d, double eps) {
  if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("eps", "error budget must lie in [0, 1)");
  MeanLengthConstants out;
  out.r2 = (1.0 - eps) * entropy(d);
  if (eps > 0.0) {
    const double q = q_upper_inv(eps);
    out.kpv = -std::sqrt(varentropy(d) / (2.0 * std::numbers::pi)) * std::exp(-0.5 * q * q);
  }
  return out;
}

double second_order_at_r2(const Distribution& d, double eps, double delta) {
  check_pair(eps, delta);
  if (eps != 0.0) return kInf;
  return predicted_l(varentropy(d), delta);
}

AsymptoticReport asymptotic_report(const Distribution& d, double eps, double delta) {
  check_pair(eps, delta);
  AsymptoticReport r;
  r.H = entropy(d);
  r.V = varentropy(d);
  r.R1 = r.H;
  const auto mean = mean_length_constants(d, eps);
  r.R2 = mean.r2;
  r.kpv = mean.kpv;
  r.L_pred = predicted_l(r.V, eps + delta);
  return r;
}

AsymptoticReport convergence_study(const Distribution& d, double eps, double delta, std::span<const int> n_grid,
                                   const SpectrumLimits& limits) {
  if (n_grid.empty()) throw ValidationError("n_grid", "block-length grid is empty");
  AsymptoticReport r = asymptotic_report(d, eps, delta);
  for (int n : n_grid) {
    const Spectrum s = iid_spectrum(d, n, limits);
    Measurement m;
    m.n = n;
    m.eta_star = optimal_threshold(s, eps, delta);
    const double eta = static_cast<double>(m.eta_star);
    m.first_order_gap = std::fabs(eta / n - r.H);
    m.second_order_value = (eta - n * r.H) / std::sqrt(static_cast<double>(n));
    m.second_order_gap = m.second_order_value - r.L_pred;
    r.measurements.push_back(m);
  }
  return r;
}

OptimisticReport optimistic_study(const SwitchingSchedule& s, double eps, double delta, std::span<const int> n_grid,
                                  double tail_fraction, const SpectrumLimits& limits) {
  check_pair(eps, delta);
  if (n_grid.empty()) throw ValidationError("n_grid", "block-length grid is empty");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw ValidationError("tail_fraction", "tail fraction must lie in (0, 1]");
  }
  OptimisticReport r;
  for (int n : n_grid) {
    const std::size_t comp = s.rule.component_for(n);
    const Spectrum spec = iid_spectrum(s.components[comp], n, limits);
    r.points.push_back(OptimisticPoint{n, finite_n_first_order(spec, eps, delta), comp});
  }
  const auto tail = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(r.points.size()))));
  const auto first = r.points.end() - static_cast<std::ptrdiff_t>(tail);
  const auto [lo, hi] = std::minmax_element(first, r.points.end(), [](const auto& a, const auto& b) {
    return a.value < b.value;
  });
  r.liminf_estimate = lo->value;
  r.limsup_estimate = hi->value;
  const double h0 = entropy(s.components[0]);
  const double h1 = entropy(s.components[1]);
  r.component_entropy_max = std::max(h0, h1);
  r.component_entropy_min = std::min(h0, h1);
  return r;
}

}  // namespace vlsc
