#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cartanflow/linalg.hpp"
#include "cartanflow/spaces.hpp"

namespace cartanflow {

/// X = sum_i g_i b_i over the orthonormal p basis, g_i iid standard normal,
/// drawn from SplitMix64(seed).
Cmat sample_p_gaussian(const SymmetricSpace& space, std::uint64_t seed);

/// Per-coordinate histograms of the chamber coordinates q of Gaussian samples.
/// Sample i always uses the stream stream_seed(seed, i), so the result does
/// not depend on how samples are split between workers.
struct RadialHistogram {
  std::string label;
  std::uint64_t seed = 0;
  std::uint64_t sample_count = 0;
  int bins = 0;
  /// edges[c] has bins + 1 entries for coordinate c.
  std::vector<std::vector<double>> edges;
  /// counts[c][b]
  std::vector<std::vector<std::uint64_t>> counts;
  /// Samples clamped into an end bin because they fell outside the range.
  std::uint64_t clamped = 0;

  [[nodiscard]] double empirical_density(std::size_t coord, std::size_t bin) const;
};

/// Fixed a priori range of coordinate values, from a chi-square tail bound on
/// the squared norm of the sample: [0, R] in the sign-flip classes, [-R, R]
/// otherwise.
std::pair<double, double> histogram_range(const SymmetricSpace& space);

/// Throws ValidationError for count < 1, bins < 2 or threads < 1.
RadialHistogram radial_histogram(const SymmetricSpace& space, std::uint64_t count, int bins,
                                 std::uint64_t seed, int threads = 1);

/// Normalized chamber density rho(q) exp(-B(H(q),H(q))/2) / Z with rho the
/// root product (proportional to closed_form_density).
/// Throws Unsupported for real rank > 4. Zero outside the chamber.
double theoretical_radial_density(const SymmetricSpace& space, const Rvec& q);

/// The normalization Z of theoretical_radial_density (memoized per space).
double theoretical_normalization(const SymmetricSpace& space);

/// CDF of the rank-one theoretical density at x. Throws Unsupported for
/// higher rank.
double theoretical_cdf(const SymmetricSpace& space, double x);

struct KsReport {
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Sup distance between the empirical CDF (at bin edges) and the theoretical
/// CDF, against 1.5 times the 99% Kolmogorov threshold 1.628 / sqrt(N).
/// Rank one only.
KsReport ks_test(const SymmetricSpace& space, const RadialHistogram& hist);

}  // namespace cartanflow
