#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace likesim::stats {

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

/// Population (n-denominator) sample moments. The standardized moments are
/// absent when the variance is zero, where they are undefined.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> skewness;
  std::optional<double> excess_kurtosis;
};

inline Moments moments(std::span<const double> samples) {
  if (samples.empty())
    throw std::invalid_argument("moments: input must be non-empty");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= n;
  // corrected two-pass: fold the mean residual back in before the central sums
  double resid = 0.0;
  for (double x : samples) resid += x - mean;
  mean += resid / n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : samples) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  Moments out;
  out.mean = mean;
  out.variance = m2;
  if (m2 > 0.0) {
    const double sd = std::sqrt(m2);
    out.skewness = m3 / (sd * sd * sd);
    out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normality / tail statistics
// ---------------------------------------------------------------------------

/// JB = n/6 * (S^2 + K^2/4), with S the skewness and K the excess kurtosis.
/// Large values indicate departure from Gaussianity.
inline double jarque_bera(std::size_t n, double skewness,
                          double excess_kurtosis) {
  return static_cast<double>(n) / 6.0 *
         (skewness * skewness + excess_kurtosis * excess_kurtosis / 4.0);
}

inline double jarque_bera(std::span<const double> samples) {
  if (samples.size() < 8)
    throw std::invalid_argument("jarque_bera: need at least 8 samples");
  const Moments m = moments(samples);
  if (!m.skewness)
    throw std::domain_error("jarque_bera: zero variance input");
  return jarque_bera(samples.size(), *m.skewness, *m.excess_kurtosis);
}

/// Hill estimate of the Pareto tail exponent from the top k order statistics:
/// H = (1/k) * sum_{i=1..k} ln(x_(i) / x_(k+1)), returned as 1/H.
inline double hill_tail_index(std::span<const double> samples, std::size_t k) {
  if (k < 2) throw std::invalid_argument("hill_tail_index: k must be >= 2");
  if (samples.size() < k + 1)
    throw std::invalid_argument("hill_tail_index: need at least k+1 samples");
  std::vector<double> top(samples.begin(), samples.end());
  std::partial_sort(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k) + 1,
                    top.end(), std::greater<>());
  if (!(top[k] > 0.0))
    throw std::domain_error(
        "hill_tail_index: top k+1 samples must be positive");
  double h = 0.0;
  for (std::size_t i = 0; i < k; ++i) h += std::log(top[i] / top[k]);
  h /= static_cast<double>(k);
  if (!(h > 0.0))
    throw std::domain_error(
        "hill_tail_index: degenerate tail, estimated index is infinite");
  return 1.0 / h;
}

/// Default top-order-statistic count for Hill estimation.
inline std::size_t default_hill_k(std::size_t n) {
  return std::max<std::size_t>(10, n / 100);
}

// ---------------------------------------------------------------------------
// Regime classification
// ---------------------------------------------------------------------------

enum class Regime { approx_gaussian, heavy_tailed, indeterminate };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::approx_gaussian: return "approx_gaussian";
    case Regime::heavy_tailed: return "heavy_tailed";
    case Regime::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

struct RegimeThresholds {
  double gaussian_skew_max = 0.5;  // |S| below this ...
  double gaussian_kurt_max = 1.0;  // ... and |K| below this => approx_gaussian
  double heavy_skew_min = 2.0;     // S above this => heavy_tailed
  double heavy_hill_max = 3.0;     // Hill index below this => heavy_tailed
};

/// Labels a count distribution from its moments and (optional) Hill index.
/// The Gaussian test is applied first; samples in neither region are
/// indeterminate.
inline Regime classify_regime(double skewness, double excess_kurtosis,
                              std::optional<double> hill_index,
                              const RegimeThresholds& t = {}) {
  if (std::abs(skewness) < t.gaussian_skew_max &&
      std::abs(excess_kurtosis) < t.gaussian_kurt_max)
    return Regime::approx_gaussian;
  if (skewness > t.heavy_skew_min ||
      (hill_index && *hill_index < t.heavy_hill_max))
    return Regime::heavy_tailed;
  return Regime::indeterminate;
}

// ---------------------------------------------------------------------------
// Histograms
// ---------------------------------------------------------------------------

/// Density-normalized histogram: sum over bins of density * width == 1.
struct Histogram {
  std::vector<double> bin_edges;  // ascending, size = bins + 1
  std::vector<double> densities;  // size = bins
  std::size_t n = 0;              // sample count
};

namespace detail {

// type-7 (linear interpolation) quantile of sorted data
inline double quantile_sorted(std::span<const double> sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = p * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= n) return sorted[n - 1];
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace detail

/// Freedman-Diaconis bin count, bin width 2*IQR/n^(1/3). Falls back to
/// ceil(sqrt(n)) bins when the IQR is zero (heavy ties).
inline std::size_t freedman_diaconis_bins(std::span<const double> samples) {
  if (samples.size() < 2)
    throw std::domain_error("freedman_diaconis_bins: need at least two samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double range = sorted.back() - sorted.front();
  const double iqr = detail::quantile_sorted(sorted, 0.75) -
                     detail::quantile_sorted(sorted, 0.25);
  std::size_t bins;
  if (iqr > 0.0) {
    const double width = 2.0 * iqr / std::cbrt(n);
    bins = static_cast<std::size_t>(std::ceil(range / width));
  } else {
    bins = static_cast<std::size_t>(std::ceil(std::sqrt(n)));
  }
  // cap pathological inputs (tiny IQR, huge range)
  return std::clamp<std::size_t>(bins, 1, 1u << 16);
}

/// Histogram over [min, max] with `bins` equal-width bins (0 = use the
/// Freedman-Diaconis rule). Needs at least two samples with non-zero range.
inline Histogram estimate_pdf(std::span<const double> samples,
                              std::size_t bins = 0) {
  if (samples.size() < 2)
    throw std::domain_error("estimate_pdf: need at least two samples");
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo))
    throw std::domain_error("estimate_pdf: degenerate input, zero range");
  if (bins == 0) bins = freedman_diaconis_bins(samples);

  Histogram h;
  h.n = samples.size();
  h.bin_edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i)
    h.bin_edges[i] = lo + static_cast<double>(i) * width;
  h.bin_edges[bins] = hi;  // pin the last edge

  std::vector<std::size_t> counts(bins, 0);
  for (double x : samples) {
    auto idx = static_cast<std::size_t>((x - lo) / width);
    if (idx >= bins) idx = bins - 1;
    ++counts[idx];
  }
  h.densities.resize(bins);
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < bins; ++i) {
    const double w = h.bin_edges[i + 1] - h.bin_edges[i];
    h.densities[i] = static_cast<double>(counts[i]) / (n * w);
  }
  return h;
}

// ---------------------------------------------------------------------------
// Distribution summary
// ---------------------------------------------------------------------------

/// Everything the regime analysis needs for one sample of counts. Optional
/// fields are absent where the statistic is undefined (zero variance, too few
/// samples, or no usable positive tail).
struct DistributionSummary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  std::optional<double> skewness;
  std::optional<double> excess_kurtosis;
  std::optional<double> jarque_bera;
  std::optional<double> hill_tail_index;
  Regime regime = Regime::indeterminate;
};

inline DistributionSummary summarize_distribution(
    std::span<const double> samples, const RegimeThresholds& thresholds = {}) {
  const Moments m = moments(samples);
  DistributionSummary s;
  s.n = samples.size();
  s.mean = m.mean;
  s.variance = m.variance;
  s.skewness = m.skewness;
  s.excess_kurtosis = m.excess_kurtosis;
  if (m.skewness && samples.size() >= 8)
    s.jarque_bera = jarque_bera(samples.size(), *m.skewness, *m.excess_kurtosis);
  const std::size_t k = default_hill_k(samples.size());
  const auto positives = static_cast<std::size_t>(std::count_if(
      samples.begin(), samples.end(), [](double x) { return x > 0.0; }));
  if (positives >= k + 1) {
    try {
      s.hill_tail_index = hill_tail_index(samples, k);
    } catch (const std::domain_error&) {
      // tied top order statistics; leave the index absent
    }
  }
  s.regime = m.skewness ? classify_regime(*m.skewness, *m.excess_kurtosis,
                                          s.hill_tail_index, thresholds)
                        : Regime::indeterminate;
  return s;
}

// ---------------------------------------------------------------------------
// Lifetimes
// ---------------------------------------------------------------------------

/// Streaming collector of per-(user, page) like time spans. `finish` returns
/// one lifetime (last like minus first like) per pair, sorted ascending, so
/// the result is invariant under any permutation of the event stream.
/// Single-like pairs are retained with lifetime 0.
class LifetimeAccumulator {
 public:
  void add(std::string_view user_id, std::string_view page_id,
           std::int64_t timestamp) {
    std::string key;
    key.reserve(user_id.size() + page_id.size() + 1);
    key.append(user_id);
    key.push_back('\x1f');
    key.append(page_id);
    auto [it, inserted] = spans_.try_emplace(std::move(key), TimeSpan{timestamp, timestamp});
    if (!inserted) {
      it->second.first = std::min(it->second.first, timestamp);
      it->second.last = std::max(it->second.last, timestamp);
    }
  }

  [[nodiscard]] std::vector<std::int64_t> finish() const {
    std::vector<std::int64_t> lifetimes;
    lifetimes.reserve(spans_.size());
    for (const auto& [key, span] : spans_)
      lifetimes.push_back(span.last - span.first);
    std::sort(lifetimes.begin(), lifetimes.end());
    return lifetimes;
  }

  [[nodiscard]] std::size_t group_count() const { return spans_.size(); }

 private:
  struct TimeSpan {
    std::int64_t first;
    std::int64_t last;
  };
  std::unordered_map<std::string, TimeSpan> spans_;
};

/// Per-(user, page) lifetimes of an event range, via the projections that
/// extract user id, page id and timestamp from an element.
template <class Range, class UserProj, class PageProj, class TimeProj>
std::vector<std::int64_t> lifetime_distribution(const Range& events,
                                                UserProj user_of,
                                                PageProj page_of,
                                                TimeProj time_of) {
  LifetimeAccumulator acc;
  for (const auto& e : events) acc.add(user_of(e), page_of(e), time_of(e));
  return acc.finish();
}

}  // namespace likesim::stats
