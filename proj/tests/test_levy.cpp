#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "qim/errors.hpp"
#include "qim/levy.hpp"

using namespace qim;

namespace {

std::vector<double> draws(const StableParams& p, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = sample_stable(p, rng);
  return x;
}

double trapezoid(const std::vector<double>& y, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += (i == 0 || i + 1 == y.size() ? 0.5 : 1.0) * y[i];
  return s * h;
}

}  // namespace

TEST_CASE("cauchy density matches the Lorentzian") {
  for (double s : {0.5, 1.0, 2.0}) {
    const auto g = UniformGrid::closed(-50 * s, 50 * s, 10001);
    const auto d = stable_density({1.0, s, 0.0}, g);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size; ++i) err = std::max(err, std::abs(d[i] - oracle::cauchy_pdf(g[i], s)));
    CHECK(err < 1e-6);
  }
}

TEST_CASE("alpha 2 density is the Gaussian of variance 2 sigma^2") {
  const double s = 1.3;
  const auto g = UniformGrid::closed(-20 * s, 20 * s, 4001);
  const auto d = stable_density({2.0, s, 0.5}, g);
  for (std::size_t i = 0; i < g.size; i += 37) CHECK(std::abs(d[i] - oracle::stable2_pdf(g[i] - 0.5, s)) < 1e-12);
}

TEST_CASE("alpha 1.5 density matches direct quadrature") {
  const auto g = UniformGrid::closed(-20, 20, 1025);
  const auto d = stable_density({1.5, 1.0, 0.0}, g);
  for (std::size_t i = 0; i < g.size; i += 16) CHECK(std::abs(d[i] - oracle::stable_pdf(1.5, g[i])) < 1e-8);
}

TEST_CASE("density normalization, positivity and symmetry") {
  for (double a : {0.8, 1.0, 1.3, 1.5, 1.9, 2.0}) {
    const auto g = UniformGrid::closed(-40, 40, 8193);
    const auto d = stable_density({a, 1.0, 0.0}, g);
    const double mass = trapezoid(d, g.step);
    CHECK(mass >= 0.95);
    CHECK(mass <= 1.0 + 1e-9);
    for (std::size_t i = 0; i < g.size; ++i) {
      CHECK(d[i] >= 0.0);
      CHECK(std::abs(d[i] - d[g.size - 1 - i]) < 1e-10);
    }
  }
}

TEST_CASE("density rejects invalid parameters and grids") {
  const auto g = UniformGrid::closed(-20, 20, 1025);
  CHECK_THROWS_AS(stable_density({0.0, 1.0, 0.0}, g), Error);
  CHECK_THROWS_AS(stable_density({2.5, 1.0, 0.0}, g), Error);
  CHECK_THROWS_AS(stable_density({1.5, 0.0, 0.0}, g), Error);
  const std::vector<double> uneven{0.0, 0.1, 0.3, 0.4};
  CHECK_THROWS_AS(stable_density({1.5, 1.0, 0.0}, uneven), Error);
}

TEST_CASE("tabulated pdf and cdf agree with quadrature") {
  for (double a : {1.0, 1.5, 1.75}) {
    const StablePdf pdf(a);
    const oracle::StableCdf cdf(a);
    for (double x : {-100.0, -30.0, -5.0, -1.0, 0.0, 0.3, 2.0, 10.0, 63.9, 64.1, 200.0}) {
      CHECK(std::abs(pdf.pdf(x) - oracle::stable_pdf(a, x)) < 1e-8);
      CHECK(std::abs(pdf.cdf(x) - cdf(x)) < 2e-6);
    }
  }
}

TEST_CASE("fisher information of the Cauchy law is 1/2") {
  CHECK(StablePdf(1.0, 4).fisher_information() == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(StablePdf(2.0, 4).fisher_information() == doctest::Approx(0.5).epsilon(1e-5));  // variance 2
}

TEST_CASE("sampler: Gaussian mean, Cauchy quartiles, alpha 1.5 distribution") {
  const auto g = draws({2.0, 1.0, 0.7}, 100000, 11);
  CHECK(std::abs(oracle::mean(g) - 0.7) < 5.0 * std::sqrt(2.0 / 1e5));

  const auto c = draws({1.0, 1.0, 0.0}, 100000, 12);
  CHECK(std::abs(oracle::quantile(c, 0.5)) < 0.02);
  CHECK(oracle::iqr(c) == doctest::Approx(2.0).epsilon(0.03));

  const oracle::StableCdf cdf(1.5);
  CHECK(oracle::ks(draws({1.5, 1.0, 0.0}, 100000, 13), cdf) < 0.01);
}

TEST_CASE("sampler is deterministic given the stream") {
  CHECK(draws({1.3, 1.0, 0.0}, 100, 5) == draws({1.3, 1.0, 0.0}, 100, 5));
  CHECK(draws({1.3, 1.0, 0.0}, 100, 5) != draws({1.3, 1.0, 0.0}, 100, 6));
}

TEST_CASE("stability: sums of two draws are the rescaled law") {
  for (double a : {1.0, 1.5, 2.0}) {
    Rng rng(21);
    std::vector<double> s(100000);
    for (auto& v : s) v = sample_stable({a, 1.0, 0.0}, rng) + sample_stable({a, 1.0, 0.0}, rng);
    const double scale = std::pow(2.0, 1.0 / a);
    const oracle::StableCdf cdf(a);
    CHECK(oracle::ks(s, [&](double x) { return cdf(x / scale); }) < 0.01);
  }
}

TEST_CASE("Wiener path variance grows as 2 sigma^2 t") {
  const double s = 0.8;
  std::vector<double> end(10000);
  for (std::size_t i = 0; i < end.size(); ++i) end[i] = stable_path({2.0, s, 0.0}, {2.0, 50, i}).value.back();
  CHECK(oracle::variance(end) == doctest::Approx(2 * s * s * 2.0).epsilon(0.05));
}

TEST_CASE("path starts at zero and has the requested time grid") {
  const auto p = stable_path({1.0, 1.0, 0.0}, {3.0, 30, 9});
  REQUIRE(p.t.size() == 31);
  CHECK(p.value[0] == 0.0);
  CHECK(p.t.back() == doctest::Approx(3.0));
  CHECK(p.seed == 9);
}

TEST_CASE("width scaling: IQR of L(t) grows as t^(1/alpha)") {
  for (double a : {1.0, 1.5, 2.0}) {
    const std::size_t steps = 100;  // t in [0.1, 10]
    std::vector<std::vector<double>> at(steps + 1);
    for (std::size_t i = 0; i < 10000; ++i) {
      const auto p = stable_path({a, 1.0, 0.0}, {10.0, steps, 1000 + i});
      for (std::size_t k = 1; k <= steps; ++k) at[k].push_back(p.value[k]);
    }
    std::vector<double> lt, lw;
    for (std::size_t k : {1, 2, 4, 8, 16, 32, 64, 100}) {
      lt.push_back(std::log(0.1 * static_cast<double>(k)));
      lw.push_back(std::log(oracle::iqr(at[k])));
    }
    CHECK(std::abs(oracle::slope(lt, lw) - 1.0 / a) < 0.03);
  }
}

TEST_CASE("heavy tails: variance keeps growing while the IQR is stable") {
  Rng rng(77);
  std::vector<double> x(100000);
  for (auto& v : x) v = sample_stable({1.5, 1.0, 0.0}, rng);
  const std::vector<double> head(x.begin(), x.begin() + 1000);
  CHECK(oracle::variance(x) > oracle::variance(head));
  CHECK(oracle::iqr(x) == doctest::Approx(oracle::iqr(head)).epsilon(0.1));
}

TEST_CASE("subordinated path: piecewise constant with unit-time stable jumps") {
  Rng rng(4);
  const SubordinatedConfig cfg{1.5, 3.0, 0.2, 50.0};
  const auto s = subordinated_path(cfg, rng);
  CHECK(s.t.front() == 0.0);
  CHECK(s.value.front() == 0.0);
  CHECK(s.t.back() == 50.0);
  for (std::size_t i = 1; i < s.t.size(); ++i) CHECK(s.t[i] >= s.t[i - 1]);
  // Between events the path is constant.
  CHECK(value_at(s, 0.5 * (s.t[1] + s.t[2])) == s.value[1]);
  CHECK(value_at(s, 0.0) == 0.0);
}

TEST_CASE("subordinated path with no events has zero increment") {
  Rng rng(1);
  const auto s = subordinated_path({1.0, 1e-9, 1.0, 1.0}, rng);
  CHECK(s.value.back() == 0.0);
}

TEST_CASE("compound Poisson of Gaussians: variance gamma^2 2 sigma^2 lambda T") {
  const SubordinatedConfig cfg{2.0, 20.0, 0.3, 2.0};
  std::vector<double> end(10000);
  for (std::size_t i = 0; i < end.size(); ++i) {
    Rng rng = Rng::stream(3, i);
    end[i] = subordinated_path(cfg, rng).value.back();
  }
  CHECK(oracle::variance(end) == doctest::Approx(0.3 * 0.3 * 2.0 * 20.0 * 2.0).epsilon(0.05));
}

TEST_CASE("fast subordinated path matches the direct path in IQR") {
  const double a = 1.5, lambda = 200.0, T = 1.0, gamma = 1.0 / lambda;
  std::vector<double> sub(10000), direct(10000);
  for (std::size_t i = 0; i < sub.size(); ++i) {
    Rng rng = Rng::stream(8, i);
    sub[i] = subordinated_path({a, lambda, gamma, T}, rng).value.back();
    direct[i] = gamma * stable_path({a, 1.0, 0.0}, {lambda * T, 1, 50000 + i}).value.back();
  }
  CHECK(oracle::iqr(sub) == doctest::Approx(oracle::iqr(direct)).epsilon(0.1));
}

TEST_CASE("CSV output records the seed") {
  std::ostringstream os;
  write_csv(os, stable_path({1.0, 1.0, 0.0}, {1.0, 4, 42}), "L");
  CHECK(os.str().find("seed=42") != std::string::npos);
  CHECK(os.str().find("t,L") != std::string::npos);
}
