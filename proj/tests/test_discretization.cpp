#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <doctest.h>

#include "oracles/frozen.hpp"
#include "siqrng/discretization.hpp"
#include "siqrng/error.hpp"
#include "siqrng/source.hpp"

using namespace siqrng;

TEST_CASE("binning scheme geometry") {
  CHECK_THROWS(BinningScheme(3, 1.0));
  CHECK_THROWS(BinningScheme(0, 1.0));
  CHECK_THROWS(BinningScheme(4, 0.0));
  CHECK_THROWS(BinningScheme(4, std::numeric_limits<double>::infinity()));

  const BinningScheme s(8, 0.5);
  CHECK(s.min_index() == -4);
  CHECK(s.max_index() == 3);
  CHECK(s.center(-4) == -2.0);
  CHECK(s.centers().size() == 8);
}

TEST_CASE("bin assignment") {
  const BinningScheme s(8, 1.0);
  CHECK(s.bin(0.0) == 0);
  CHECK(s.bin(0.49) == 0);
  CHECK(s.bin(0.5) == 1);    // ties go up
  CHECK(s.bin(-0.5) == 0);   // [-0.5, 0.5) is bin 0
  CHECK(s.bin(-0.51) == -1);
  CHECK(s.bin(2.5) == 3);    // top edge bin is open above
  CHECK(s.bin(1e9) == 3);
  CHECK(s.bin(-3.49) == -3);
  CHECK(s.bin(-3.5) == -3);
  CHECK(s.bin(-3.51) == -4);  // bottom edge bin is open below
  CHECK(s.bin(-1e300) == -4);
  CHECK(s.bin(std::numeric_limits<double>::infinity()) == 3);
  CHECK(s.bin(std::numeric_limits<double>::quiet_NaN()) == -4);
  CHECK(bin_sample(0.7, s) == 1);
}

TEST_CASE("bin assignment is monotone") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 3.0);
  const BinningScheme s(16, 0.37);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = g(rng);
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 1; i < xs.size(); ++i) CHECK(s.bin(xs[i - 1]) <= s.bin(xs[i]));
}

TEST_CASE("shot-noise normalization") {
  const std::vector<double> raw{2.0, -4.0};
  const auto x = normalize_snu(raw, 5.0, 1.0);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(-2.0));
  CHECK_THROWS_AS(normalize_snu(raw, 1.0, 1.0), CalibrationError);
  CHECK_THROWS_AS(normalize_snu(raw, 0.5, 1.0), CalibrationError);

  std::vector<double> y{1.0, 2.0, 3.0};
  subtract_mean(y);
  CHECK(y[0] == doctest::Approx(-1.0));
  CHECK(y[2] == doctest::Approx(1.0));
}

TEST_CASE("histograms") {
  const BinningScheme s(4, 1.0);
  const Histogram h = accumulate(std::vector<double>{0.1, 0.2, -1.2, 7.0}, s);
  CHECK(h.n == 4);
  CHECK(h.count(0) == 2);
  CHECK(h.count(-1) == 1);
  CHECK(h.count(1) == 1);

  Histogram g = accumulate(std::vector<double>{0.0}, s);
  g.merge(h);
  CHECK(g.n == 5);
  CHECK(g.count(0) == 3);

  Histogram other(BinningScheme(4, 2.0));
  CHECK_THROWS_AS(g.merge(other), DimensionError);

  std::ostringstream os;
  write_histogram_csv(os, h);
  CHECK(os.str().rfind("k,center,count\n-2,-2,0\n", 0) == 0);
}

TEST_CASE("extreme bins") {
  const BinningScheme s(8, 1.0);
  CHECK(extreme_bin_check(Histogram(s)) == ExtremeBins::ok);
  CHECK(extreme_bin_check(accumulate(std::vector<double>{0.0, 1.0, -2.0}, s)) == ExtremeBins::ok);
  CHECK(extreme_bin_check(accumulate(std::vector<double>{-4.0}, s)) == ExtremeBins::violated);
  CHECK(extreme_bin_check(accumulate(std::vector<double>{3.0}, s)) == ExtremeBins::violated);
}

TEST_CASE("pmf validation and moments") {
  CHECK_THROWS(Pmf(Lattice(-1, 1, 1.0), {0.5, 0.5, 0.1}));
  CHECK_THROWS(Pmf(Lattice(-1, 1, 1.0), {1.1, -0.1, 0.0}));
  CHECK_THROWS(Pmf(Lattice(-1, 1, 1.0), {0.5, 0.5}));
  const Pmf p(Lattice(-1, 1, 2.0), {0.25, 0.5, 0.25});
  CHECK(p.mean() == doctest::Approx(0.0));
  CHECK(p.second_moment() == doctest::Approx(2.0));
  CHECK(p.variance() == doctest::Approx(2.0));
}

TEST_CASE("discretized Gaussian") {
  SUBCASE("central bin mass") {
    // m = 4, delta = 2: bin 0 is [-1, 1).
    const auto p = discretized_gaussian_pmf(1.0, BinningScheme(4, 2.0));
    CHECK(p.probs[2] == doctest::Approx(frozen::kErfOneOverSqrt2).epsilon(1e-14));
    CHECK(p.probs[0] + p.probs[1] == doctest::Approx(p.probs[3]).epsilon(1e-14));
  }
  SUBCASE("mean zero, variance tends to sigma^2") {
    for (double sigma : {0.5, 1.0, 2.0}) {
      const auto p = discretized_gaussian_pmf(sigma, BinningScheme(40000, 1e-3));
      double total = 0.0;
      for (double v : p.probs) total += v;
      CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(std::abs(p.mean()) < 1e-12);
      CHECK(std::abs(p.variance() - sigma * sigma) < 1e-4);
    }
  }
  CHECK_THROWS(discretized_gaussian_pmf(0.0, BinningScheme(4, 1.0)));
}

TEST_CASE("empirical pmf converges to the discretized Gaussian") {
  const BinningScheme s(64, 0.25);
  DetectorModel det;
  det.seed = 17;
  QuadratureSource src(SourceModel::thermal(2.0), det);
  const std::size_t n = 1'000'000;
  const auto blk = src.draw_block(Quadrature::check, n);
  const Histogram h = accumulate(blk.samples, s);
  const auto p = discretized_gaussian_pmf(std::sqrt(2.0), s);
  double cdf_emp = 0.0, cdf_th = 0.0, ks = 0.0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) {
    cdf_emp += static_cast<double>(h.counts[i]) / n;
    cdf_th += p.probs[i];
    ks = std::max(ks, std::abs(cdf_emp - cdf_th));
  }
  // 1% critical value of the Kolmogorov statistic
  CHECK(ks < 1.63 / std::sqrt(static_cast<double>(n)));
}
