#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace likesim::dist {

/// Shape parameters of a Beta(alpha, beta) distribution on [0, 1].
/// The consumption model always uses alpha = 1 and sweeps beta.
struct BetaParams {
  double alpha = 1.0;
  double beta = 1.0;
};

/// Power law p(x) proportional to x^-gamma restricted to [x_min, x_max].
/// Truncation keeps every moment finite and makes inverse-CDF sampling exact;
/// gamma must exceed 1.
struct TruncatedPowerLawParams {
  double gamma = 1.5;
  double x_min = 1.0;
  double x_max = 1e4;
};

/// Inverse-CDF sample of Beta(1, beta): v = 1 - (1 - u)^(1/beta).
///
/// `u` must lie in [0, 1) and the result stays in [0, 1), so a strict
/// threshold comparison against the result can never tie at 1. Only
/// alpha == 1 has a closed-form inverse; other alphas are rejected.
inline double sample_beta(const BetaParams& params, double u) {
  if (!(params.alpha > 0.0) || !(params.beta > 0.0))
    throw std::invalid_argument("sample_beta: shape parameters must be positive");
  if (params.alpha != 1.0)
    throw std::invalid_argument("sample_beta: only alpha == 1 is supported");
  if (!(u >= 0.0) || !(u < 1.0))
    throw std::invalid_argument("sample_beta: uniform variate must lie in [0, 1)");
  const double v = 1.0 - std::pow(1.0 - u, 1.0 / params.beta);
  // (1-u)^(1/beta) can underflow to 0 for beta << 1; keep the interval open.
  return std::min(v, std::nextafter(1.0, 0.0));
}

/// Inverse-CDF sample of the truncated power law.
///
/// x = (x_min^(1-g) + u * (x_max^(1-g) - x_min^(1-g)))^(1/(1-g)), u in [0, 1].
/// u = 0 maps to x_min and u = 1 maps to x_max exactly.
inline double sample_truncated_power_law(const TruncatedPowerLawParams& params,
                                         double u) {
  if (!(params.gamma > 1.0))
    throw std::invalid_argument(
        "sample_truncated_power_law: gamma must exceed 1");
  if (!(params.x_min > 0.0) || !(params.x_min < params.x_max))
    throw std::invalid_argument(
        "sample_truncated_power_law: require 0 < x_min < x_max");
  if (!(u >= 0.0 && u <= 1.0))
    throw std::invalid_argument(
        "sample_truncated_power_law: uniform variate must lie in [0, 1]");
  if (u == 0.0) return params.x_min;
  if (u == 1.0) return params.x_max;
  const double e = 1.0 - params.gamma;  // negative
  const double lo = std::pow(params.x_min, e);
  const double hi = std::pow(params.x_max, e);
  const double x = std::pow(lo + u * (hi - lo), 1.0 / e);
  return std::clamp(x, params.x_min, params.x_max);
}

/// Unity-based (min-max) normalization onto [0, 1]. Order statistics are
/// preserved: min maps to 0, max maps to 1, ties stay tied. A constant
/// sequence maps to all zeros.
inline std::vector<double> unity_normalize(std::span<const double> values) {
  if (values.empty())
    throw std::invalid_argument("unity_normalize: input must be non-empty");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  std::vector<double> out(values.size(), 0.0);
  if (lo == hi) return out;
  const double range = hi - lo;
  std::transform(values.begin(), values.end(), out.begin(),
                 [&](double x) { return (x - lo) / range; });
  return out;
}

}  // namespace likesim::dist
