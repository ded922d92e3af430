#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tunefp/error.hpp"
#include "tunefp/fingerprint.hpp"

using namespace tunefp;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = u(rng);
  return m;
}

testing::Dense to_dense(const Matrix& m) {
  testing::Dense d(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) d[r][c] = m(r, c);
  return d;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void check_orthonormal(const PcaModel& pca, double tol) {
  for (std::size_t i = 0; i < pca.n_components; ++i) {
    for (std::size_t j = 0; j < pca.n_components; ++j) {
      const double expect = i == j ? 1.0 : 0.0;
      CHECK(std::abs(dot(pca.components.row(i), pca.components.row(j)) - expect) <= tol);
    }
  }
}

}  // namespace

TEST_SUITE("fingerprint") {
  TEST_CASE("row means") {
    Matrix one(1, 3);
    one(0, 0) = 1.5;
    one(0, 1) = -2.0;
    one(0, 2) = 7.0;
    CHECK(row_means(one) == std::vector<double>{1.5, -2.0, 7.0});

    Matrix two(2, 2);
    two(0, 0) = 1.0;
    two(1, 0) = 3.0;
    two(0, 1) = 1.0;
    two(1, 1) = 3.0;
    CHECK(row_means(two) == std::vector<double>{2.0, 2.0});

    const auto r = random_matrix(37, 11, 5);
    const auto got = row_means(r);
    for (std::size_t c = 0; c < 11; ++c) {
      double acc = 0.0;
      for (std::size_t f = 0; f < 37; ++f) acc += r(f, c);
      CHECK(std::abs(got[c] - acc / 37.0) <= 1e-12);
    }

    try {
      row_means(Matrix(0, 4));
      FAIL("expected ShapeError");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ShapeError);
    }
  }

  TEST_CASE("assemble fingerprint") {
    std::vector<double> spec(1025), mf(13), ch(12);
    std::iota(spec.begin(), spec.end(), 0.0);
    std::iota(mf.begin(), mf.end(), 5000.0);
    std::iota(ch.begin(), ch.end(), 6000.0);
    TempoBlock tempo{};
    for (std::size_t i = 0; i < tempo.size(); ++i) tempo[i] = 7000.0 + static_cast<double>(i);
    const auto fp = assemble_fingerprint("t", spec, mf, ch, tempo);
    CHECK(fp.track_id == "t");
    REQUIRE(fp.values.size() == 1062);
    CHECK(fp.values[1024] == 1024.0);
    CHECK(fp.values[1025] == mf[0]);
    CHECK(fp.values[kChromaOffset] == ch[0]);
    CHECK(fp.values[kTempoOffset] == tempo[0]);
    CHECK(fp.values[1061] == tempo[11]);

    const auto zero = assemble_fingerprint("z", std::vector<double>(1025), std::vector<double>(13),
                                           std::vector<double>(12), TempoBlock{});
    for (double v : zero.values) CHECK(v == 0.0);

    try {
      assemble_fingerprint("bad", std::vector<double>(1024), mf, ch, tempo);
      FAIL("expected ShapeError");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ShapeError);
      const std::string msg = e.what();
      CHECK(msg.find("1025") != std::string::npos);
      CHECK(msg.find("1024") != std::string::npos);
    }
    CHECK_THROWS_AS(assemble_fingerprint("bad", spec, std::vector<double>(12), ch, tempo), Error);
    CHECK_THROWS_AS(assemble_fingerprint("bad", spec, mf, std::vector<double>(13), tempo), Error);
  }

  TEST_CASE("standardize") {
    Matrix two(2, 2);
    two(0, 0) = 1.0;
    two(1, 0) = 3.0;
    two(0, 1) = 4.0;
    two(1, 1) = 4.0;
    const auto s = standardize(two);
    CHECK(s.data(0, 0) == -1.0);
    CHECK(s.data(1, 0) == 1.0);
    CHECK(s.data(0, 1) == 0.0);
    CHECK(s.data(1, 1) == 0.0);
    CHECK(s.scale[1] == 1.0);
    CHECK(s.mean[1] == 4.0);

    auto r = random_matrix(20, 9, 3, -5.0, 50.0);
    for (std::size_t i = 0; i < 20; ++i) r(i, 4) = 2.5;
    const auto z = standardize(r);
    for (std::size_t c = 0; c < 9; ++c) {
      double mu = 0.0, var = 0.0;
      for (std::size_t i = 0; i < 20; ++i) mu += z.data(i, c) / 20.0;
      for (std::size_t i = 0; i < 20; ++i) var += (z.data(i, c) - mu) * (z.data(i, c) - mu) / 20.0;
      CHECK(std::abs(mu) < 1e-9);
      if (c == 4) {
        CHECK(var == 0.0);
      } else {
        CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
      }
    }

    try {
      standardize(Matrix(1, 5));
      FAIL("expected InsufficientData");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InsufficientData);
    }
  }

  TEST_CASE("collinear data gives one full-variance component") {
    Matrix line(3, 2);
    for (std::size_t i = 0; i < 3; ++i) line(i, 0) = line(i, 1) = static_cast<double>(i + 1);
    const auto pca = fit_pca(line, 0.95);
    CHECK(pca.n_components == 1);
    CHECK(pca.explained_variance_ratio[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(pca.components(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(pca.components(0, 1)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  }

  TEST_CASE("eigenpairs match the Jacobi oracle") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto x = random_matrix(12, 5, 100 + seed);
      const auto pca = fit_pca(x, 1.0);
      const auto ref = testing::jacobi_eigen(testing::covariance(to_dense(x)));
      REQUIRE(pca.n_components == 5);
      for (std::size_t k = 0; k < 5; ++k) {
        CHECK(std::abs(pca.explained_variance[k] - ref.values[k]) < 1e-8);
        const double d = dot(pca.components.row(k), ref.vectors[k]);
        CHECK(std::abs(std::abs(d) - 1.0) < 1e-8);
      }
      check_orthonormal(pca, 1e-8);
    }
  }

  TEST_CASE("Gram route agrees with the covariance oracle") {
    const auto x = random_matrix(6, 15, 77);
    const auto pca = fit_pca(x, 1.0);
    CHECK(pca.n_components == 5);  // rank n - 1
    const auto ref = testing::jacobi_eigen(testing::covariance(to_dense(x)));
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(std::abs(pca.explained_variance[k] - ref.values[k]) < 1e-8);
      CHECK(std::abs(std::abs(dot(pca.components.row(k), ref.vectors[k])) - 1.0) < 1e-8);
    }
    check_orthonormal(pca, 1e-8);
  }

  TEST_CASE("rank bound on a wide corpus") {
    const auto x = random_matrix(200, 1062, 8);
    const auto pca = fit_pca(standardize(x), 0.95);
    CHECK(pca.n_components <= 199);
    CHECK(pca.full_variance_ratio.size() <= 199);
    check_orthonormal(pca, 1e-8);
  }

  TEST_CASE("component count is minimal and cumulative ratio monotone") {
    for (double target : {0.5, 0.8, 0.95, 0.99}) {
      const auto x = random_matrix(30, 40, 13);
      const auto pca = fit_pca(standardize(x), target);
      double cum = 0.0;
      std::vector<double> cums;
      for (double r : pca.full_variance_ratio) {
        CHECK(r >= 0.0);
        cum += r;
        cums.push_back(cum);
      }
      for (std::size_t i = 1; i < cums.size(); ++i) CHECK(cums[i] >= cums[i - 1]);
      CHECK(cum == doctest::Approx(1.0).epsilon(1e-9));
      const std::size_t k = pca.n_components;
      REQUIRE(k >= 1);
      CHECK(cums[k - 1] >= target);
      if (k >= 2) CHECK(cums[k - 2] < target);
      CHECK(pca.explained_variance_ratio.size() == k);
      CHECK(pca.components.rows() == k);
    }
    const std::vector<double> ratios{0.5, 0.3, 0.15, 0.05};
    CHECK(components_for_variance(ratios, 0.95) == 3);
    CHECK(components_for_variance(ratios, 0.96) == 4);
    CHECK(components_for_variance(ratios, 1.0) == 4);
    CHECK(components_for_variance(ratios, 0.5) == 1);
  }

  TEST_CASE("projections are centred and uncorrelated") {
    const auto x = random_matrix(25, 60, 21, 0.0, 3.0);
    const auto st = standardize(x);
    const auto pca = fit_pca(st, 0.95);

    std::vector<double> mean(60, 0.0);
    for (std::size_t i = 0; i < 25; ++i)
      for (std::size_t c = 0; c < 60; ++c) mean[c] += x(i, c) / 25.0;
    for (double v : project(pca, mean)) CHECK(std::abs(v) < 1e-9);

    std::vector<std::vector<double>> proj;
    for (std::size_t i = 0; i < 25; ++i) proj.push_back(project(pca, x.row(i)));
    const auto cov = testing::covariance(proj);
    double diag = 0.0;
    for (std::size_t i = 0; i < cov.size(); ++i) diag = std::max(diag, cov[i][i]);
    for (std::size_t i = 0; i < cov.size(); ++i) {
      CHECK(cov[i][i] == doctest::Approx(pca.explained_variance[i]).epsilon(1e-8));
      for (std::size_t j = 0; j < cov.size(); ++j) {
        if (i != j) CHECK(std::abs(cov[i][j]) < 1e-6 * diag);
      }
    }

    // Reconstruction keeps at least the target share of the variance.
    double kept = 0.0, total = 0.0;
    for (std::size_t i = 0; i < 25; ++i) {
      const auto z = st.data.row(i);
      std::vector<double> recon(60, 0.0);
      for (std::size_t k = 0; k < pca.n_components; ++k)
        for (std::size_t c = 0; c < 60; ++c) recon[c] += proj[i][k] * pca.components(k, c);
      for (std::size_t c = 0; c < 60; ++c) {
        kept += recon[c] * recon[c];
        total += z[c] * z[c];
      }
    }
    CHECK(kept / total >= 0.95 - 1e-9);

    try {
      project(pca, std::vector<double>(59));
      FAIL("expected ShapeError");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ShapeError);
    }
  }

  TEST_CASE("fitting is deterministic with fixed signs") {
    const auto x = random_matrix(15, 30, 44);
    const auto a = fit_pca(standardize(x), 0.9);
    const auto b = fit_pca(standardize(x), 0.9);
    CHECK(a.components == b.components);
    CHECK(a.explained_variance_ratio == b.explained_variance_ratio);
    for (std::size_t k = 0; k < a.n_components; ++k) {
      const auto row = a.components.row(k);
      const auto it = std::max_element(row.begin(), row.end(),
                                        [](double p, double q) { return std::abs(p) < std::abs(q); });
      CHECK(*it > 0.0);
    }
  }

  TEST_CASE("pca errors") {
    try {
      fit_pca(Matrix(1, 3, 1.0));
      FAIL("expected InsufficientData");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InsufficientData);
    }
    CHECK_THROWS_AS(fit_pca(Matrix(4, 3, 1.0)), Error);  // no variance
    CHECK_THROWS_AS(fit_pca(random_matrix(4, 3, 1), 0.0), Error);
    CHECK_THROWS_AS(fit_pca(random_matrix(4, 3, 1), 1.5), Error);
  }
}
