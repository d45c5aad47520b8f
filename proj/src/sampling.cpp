#include "cartanflow/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cartanflow/errors.hpp"
#include "cartanflow/reduction.hpp"
#include "cartanflow/rng.hpp"
#include "cartanflow/slice.hpp"

namespace cartanflow {

namespace {

constexpr int kMaxQuadratureRank = 4;
constexpr unsigned kQuadratureDepth = 8;
constexpr double kQuadratureTolerance = 1e-9;

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;

void require_quadrature_rank(const SymmetricSpace& space) {
  if (space.real_rank() > kMaxQuadratureRank) {
    throw Unsupported(space.label() + ": quadrature normalization needs real rank <= 4");
  }
}

// Root-product density times the Gaussian weight. The classical aiii/bdi
// formulas differ from the root product by a constant, which the
// normalization absorbs.
struct ChamberWeight {
  std::vector<RestrictedRoot> roots;
  Rmat gram;

  explicit ChamberWeight(const SymmetricSpace& space)
      : roots(restricted_roots(space)), gram(space.radial_gram()) {}

  double operator()(const Rvec& q) const {
    return root_product_density(roots, q) * std::exp(-0.5 * q.dot(gram * q));
  }
};

// Linear map from nonnegative simple-root gaps g to chamber coordinates q.
Rmat gap_map(const SymmetricSpace& space) {
  const int r = space.real_rank();
  Rmat m = Rmat::Zero(r, r);
  for (int j = 0; j < r; ++j) {
    for (int i = j; i < r; ++i) m(j, i) = 1.0;
  }
  if (!space.sign_flip_weyl()) {
    // The last spectral entry is -sum q; shift so the spectrum is traceless.
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) m(j, i) -= static_cast<double>(i + 1) / (r + 1);
    }
  }
  return m;
}

// Adaptive Gauss-Kronrod on a finite interval.
double integrate_interval(const std::function<double(double)>& f, double a, double b) {
  return Kronrod::integrate(f, a, b, kQuadratureDepth, kQuadratureTolerance);
}

// Integral of weight over the open chamber, in simple-root gap coordinates
// g = t u with t >= 0 and u on the standard simplex. The root product is
// homogeneous of degree D = sum of multiplicities, so the t integral is
//   int_0^inf t^(D+r-1) exp(-t^2 Q(u)/2) dt = Gamma(k) 2^(k-1) / Q(u)^k,
// k = (D + r)/2, Q(u) = (M u)^T G (M u). What remains is a smooth integral
// over the (r-1)-simplex.
double chamber_integral(const SymmetricSpace& space, const ChamberWeight& weight, const Rmat& map) {
  const int r = space.real_rank();
  int degree = 0;
  for (const auto& root : weight.roots) degree += root.multiplicity;
  const double k = 0.5 * (degree + r);
  const double log_radial = std::lgamma(k) + (k - 1.0) * std::log(2.0);
  const Rmat quad = map.transpose() * weight.gram * map;

  Rvec u(r);
  std::function<double(int, double)> level = [&](int i, double remaining) -> double {
    if (i == r - 1) {
      u(i) = remaining;
      const double q_form = u.dot(quad * u);
      return root_product_density(weight.roots, map * u) *
             std::exp(log_radial - k * std::log(q_form));
    }
    return integrate_interval(
        [&, i, remaining](double x) {
          u(i) = x;
          return level(i + 1, remaining - x);
        },
        0.0, remaining);
  };
  return level(0, 1.0);
}
}  // namespace

Cmat sample_p_gaussian(const SymmetricSpace& space, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return random_p(space, rng);
}

double RadialHistogram::empirical_density(std::size_t coord, std::size_t bin) const {
  const double width = edges[coord][bin + 1] - edges[coord][bin];
  return static_cast<double>(counts[coord][bin]) / (static_cast<double>(sample_count) * width);
}

std::pair<double, double> histogram_range(const SymmetricSpace& space) {
  const double dim = space.dim_p();
  // P(chi2_dim > dim + 8 sqrt(2 dim) + 16) is below 1e-8 for the sizes used here.
  const double norm_sq = dim + 8.0 * std::sqrt(2.0 * dim) + 16.0;
  const double smallest = space.radial_gram().selfadjointView<Eigen::Lower>().eigenvalues().minCoeff();
  const double radius = std::sqrt(norm_sq / smallest);
  if (space.sign_flip_weyl()) return {0.0, radius};
  return {-radius, radius};
}

RadialHistogram radial_histogram(const SymmetricSpace& space, std::uint64_t count, int bins,
                                 std::uint64_t seed, int threads) {
  if (count < 1) throw ValidationError("radial_histogram: count must be >= 1");
  if (bins < 2) throw ValidationError("radial_histogram: bins must be >= 2");
  if (threads < 1) throw ValidationError("radial_histogram: threads must be >= 1");
  const int r = space.real_rank();
  const auto [lo, hi] = histogram_range(space);
  const double width = (hi - lo) / bins;

  RadialHistogram out;
  out.label = space.label();
  out.seed = seed;
  out.sample_count = count;
  out.bins = bins;
  out.edges.assign(static_cast<std::size_t>(r), std::vector<double>(static_cast<std::size_t>(bins) + 1));
  for (auto& e : out.edges) {
    for (int b = 0; b <= bins; ++b) e[static_cast<std::size_t>(b)] = lo + b * width;
  }

  // Touch the lazily built bases before workers share the descriptor.
  (void)space.basis(Subspace::p);

  struct Shard {
    std::vector<std::vector<std::uint64_t>> counts;
    std::uint64_t clamped = 0;
  };
  const auto workers = static_cast<std::uint64_t>(std::min<std::uint64_t>(threads, count));
  std::vector<Shard> shards(workers);
  auto run = [&](std::uint64_t w) {
    Shard& shard = shards[w];
    shard.counts.assign(static_cast<std::size_t>(r), std::vector<std::uint64_t>(static_cast<std::size_t>(bins), 0));
    const std::uint64_t begin = count * w / workers;
    const std::uint64_t end = count * (w + 1) / workers;
    for (std::uint64_t i = begin; i < end; ++i) {
      const Cmat x = sample_p_gaussian(space, stream_seed(seed, i));
      const Rvec q = radial_decompose(space, x).q;
      for (int c = 0; c < r; ++c) {
        const double pos = std::floor((q(c) - lo) / width);
        long b = std::isfinite(pos) ? static_cast<long>(pos) : 0;
        if (b < 0 || b >= bins) {
          ++shard.clamped;
          b = std::clamp<long>(b, 0, bins - 1);
        }
        ++shard.counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(b)];
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }

  out.counts.assign(static_cast<std::size_t>(r), std::vector<std::uint64_t>(static_cast<std::size_t>(bins), 0));
  for (const Shard& shard : shards) {
    out.clamped += shard.clamped;
    for (int c = 0; c < r; ++c) {
      for (int b = 0; b < bins; ++b) {
        out.counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(b)] +=
            shard.counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(b)];
      }
    }
  }
  return out;
}

double theoretical_normalization(const SymmetricSpace& space) {
  require_quadrature_rank(space);
  static std::mutex guard;
  static std::map<std::tuple<int, int, int>, double> memo;
  const auto key = std::make_tuple(static_cast<int>(space.kind()), space.m(), space.n());
  {
    std::lock_guard lock(guard);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  const Rmat map = gap_map(space);
  const double z = std::abs(map.determinant()) * chamber_integral(space, ChamberWeight(space), map);
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw ConsistencyError(space.label() + ": normalization quadrature failed");
  }
  std::lock_guard lock(guard);
  memo.emplace(key, z);
  return z;
}

double theoretical_radial_density(const SymmetricSpace& space, const Rvec& q) {
  require_quadrature_rank(space);
  if (q.size() != space.real_rank()) throw ContractViolation("theoretical_radial_density: q length");
  if (!in_closed_chamber(space, q, 0.0)) return 0.0;
  return ChamberWeight(space)(q) / theoretical_normalization(space);
}

double theoretical_cdf(const SymmetricSpace& space, double x) {
  if (space.real_rank() != 1) throw Unsupported("theoretical_cdf: rank-one spaces only");
  if (x <= 0.0) return 0.0;
  const double z = theoretical_normalization(space);
  const ChamberWeight weight(space);
  const double mass = Kronrod::integrate(
      [&](double t) { return weight(Rvec::Constant(1, t)); }, 0.0, x,
      kQuadratureDepth, kQuadratureTolerance);
  return std::min(1.0, mass / z);
}

KsReport ks_test(const SymmetricSpace& space, const RadialHistogram& hist) {
  if (space.real_rank() != 1) throw Unsupported("ks_test: rank-one spaces only");
  KsReport out;
  const auto& edges = hist.edges.front();
  const auto& counts = hist.counts.front();
  const double n = static_cast<double>(hist.sample_count);
  double cumulative = 0.0;
  out.statistic = std::abs(theoretical_cdf(space, edges.front()));
  for (std::size_t b = 0; b < counts.size(); ++b) {
    cumulative += static_cast<double>(counts[b]);
    out.statistic = std::max(out.statistic, std::abs(cumulative / n - theoretical_cdf(space, edges[b + 1])));
  }
  out.threshold = 1.5 * 1.628 / std::sqrt(n);
  out.pass = out.statistic <= out.threshold;
  return out;
}

}  // namespace cartanflow
