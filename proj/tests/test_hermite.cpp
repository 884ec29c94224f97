#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "heis/grid.hpp"
#include "heis/hermite.hpp"
#include "heis/symplectic.hpp"

using namespace heis;
using Catch::Approx;

TEST_CASE("recurrence matches closed forms for low orders") {
  const double c = std::pow(M_PI, -0.25);
  for (double x : {-1.7, -0.3, 0.0, 0.9, 2.4}) {
    const auto h = hermite_values(2, x);
    const double g = std::exp(-0.5 * x * x);
    REQUIRE(h[0] == Approx(c * g).margin(1e-14));
    REQUIRE(h[1] == Approx(c * std::sqrt(2.0) * x * g).margin(1e-14));
    REQUIRE(h[2] ==
            Approx(c * (2.0 * x * x - 1.0) / std::sqrt(2.0) * g).margin(1e-14));
  }
}

TEST_CASE("scaled family is orthonormal") {
  for (double mu : {1.0, -0.5, 0.25}) {
    auto g = GridFunction::make(0, {513}, {12.0 / std::sqrt(std::abs(mu))},
                                {"z"});
    const int K = 6;
    std::vector<std::vector<Cx>> vals(K);
    for (int k = 0; k < K; ++k) {
      vals[k].resize(g.dims[0]);
      for (int i = 0; i < g.dims[0]; ++i)
        vals[k][i] = Cx(hermite_scaled(k, mu, g.coord(0, i)));
    }
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b) {
        Cx ip = 0.0;
        for (int i = 0; i < g.dims[0]; ++i) ip += vals[a][i] * vals[b][i];
        ip *= g.h(0);
        REQUIRE(std::abs(ip - (a == b ? Cx(1.0) : Cx(0.0))) < 1e-10);
      }
  }
}

TEST_CASE("ladder identities hold pointwise") {
  const double mu = 0.7;
  const double tau = std::sqrt(2.0 * M_PI * mu);
  for (double x : {-1.1, 0.2, 0.8}) {
    for (int k = 1; k <= 4; ++k) {
      const double hk = hermite_scaled(k, mu, x);
      const double hm = hermite_scaled(k - 1, mu, x);
      const double hp = hermite_scaled(k + 1, mu, x);
      REQUIRE(x * hk == Approx((std::sqrt(k / 2.0) * hm +
                                std::sqrt((k + 1) / 2.0) * hp) /
                               tau)
                            .margin(1e-12));
      // derivative by central differences as an independent check
      const double eps = 1e-5;
      const double der = (hermite_scaled(k, mu, x + eps) -
                          hermite_scaled(k, mu, x - eps)) /
                         (2.0 * eps);
      REQUIRE(der == Approx(tau * (std::sqrt(k / 2.0) * hm -
                                   std::sqrt((k + 1) / 2.0) * hp))
                         .margin(1e-6));
    }
  }
}

TEST_CASE("ladder matrices satisfy the canonical commutation relation") {
  const int K = 8;
  const Eigen::MatrixXd X = ladder_pos(K), D = ladder_der(K);
  // [D, X] = I away from the truncation edge
  const Eigen::MatrixXd C = D * X - X * D;
  for (int i = 0; i < K - 1; ++i)
    for (int j = 0; j < K - 1; ++j)
      REQUIRE(C(i, j) == Approx(i == j ? 1.0 : 0.0).margin(1e-14));
}

TEST_CASE("sublaplacian symbol is exactly diagonal") {
  const int K = 7;
  for (double mu : {1.0, -1.0, 0.35}) {
    const Eigen::MatrixXcd M =
        symbol_matrix(1, Eigen::MatrixXcd::Identity(2, 2), Cx(0.0), mu, K);
    for (int r = 0; r < K; ++r)
      for (int c = 0; c < K; ++c) {
        if (r == c) {
          REQUIRE(M(r, c).real() ==
                  Approx(-2.0 * M_PI * std::abs(mu) * (2 * r + 1))
                      .epsilon(1e-14));
          REQUIRE(M(r, c).imag() == 0.0);
        } else {
          // the two ladder contributions cancel exactly in floating point
          REQUIRE(M(r, c) == Cx(0.0));
        }
      }
  }
}

TEST_CASE("symbol spectrum matches the frequency formula") {
  // normal-form operator with mixed signed frequencies (2, -1) on H_2
  const std::vector<double> freqs = {2.0, -1.0};
  const Eigen::MatrixXcd A = A_from_S(normal_block(freqs).cast<Cx>());
  const Cx alpha(0.3, 0.2);
  const int K = 4;
  for (double mu : {0.8, -0.6}) {
    const Eigen::MatrixXcd M = symbol_matrix(2, A, alpha, mu, K);
    // collect predicted eigenvalues over the retained multi-indices
    std::vector<Cx> predicted;
    for (int k0 = 0; k0 < K; ++k0)
      for (int k1 = 0; k1 < K; ++k1)
        predicted.push_back(
            symbol_eigenvalue_predicted(freqs, {k0, k1}, alpha, mu));
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M);
    std::vector<Cx> got(es.eigenvalues().data(),
                        es.eigenvalues().data() + es.eigenvalues().size());
    auto key = [](Cx a, Cx b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    };
    std::sort(predicted.begin(), predicted.end(), key);
    std::sort(got.begin(), got.end(), key);
    for (std::size_t i = 0; i < got.size(); ++i)
      REQUIRE(std::abs(got[i] - predicted[i]) < 1e-8 * (1.0 + std::abs(predicted[i])));
  }
}

TEST_CASE("singular value floor reflects solvability of the model operator") {
  // sublaplacian plus i alpha U at mu = 1: eigenvalues -2 pi (2k+1+alpha)
  const Eigen::MatrixXcd I2 = Eigen::MatrixXcd::Identity(2, 2);
  const int K = 12;
  // alpha on the critical set: some eigenvalue vanishes
  const Eigen::MatrixXcd bad = symbol_matrix(1, I2, Cx(-3.0), 1.0, K);
  REQUIRE(sigma_min(bad) < 1e-10);
  // alpha off the critical set: floor 2 pi dist(alpha, odd integers)
  const Eigen::MatrixXcd good = symbol_matrix(1, I2, Cx(-4.0), 1.0, K);
  REQUIRE(sigma_min(good) == Approx(2.0 * M_PI).epsilon(1e-10));
  // complex alpha = 2i: floor 2 pi sqrt(1 + 4) from the k = 0 level
  const Eigen::MatrixXcd cplx = symbol_matrix(1, I2, Cx(0.0, 2.0), 1.0, K);
  REQUIRE(sigma_min(cplx) == Approx(2.0 * M_PI * std::sqrt(5.0)).epsilon(1e-10));
}
