#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <fstream>
#include <random>

#include "heis/grid.hpp"

using namespace heis;
using Catch::Approx;

TEST_CASE("grid geometry convention") {
  auto g = GridFunction::make(1, {5, 5, 9}, {1.0, 1.0, 2.0}, {"z", "z", "u"});
  REQUIRE(g.h(0) == Approx(0.4));
  REQUIRE(g.h(2) == Approx(4.0 / 9.0));
  // origin is a node
  REQUIRE(g.coord(0, 2) == Approx(0.0));
  REQUIRE(g.coord(2, 4) == Approx(0.0));
  // nodes sit strictly inside the extent
  REQUIRE(std::abs(g.coord(0, 4)) < 1.0);
  REQUIRE(g.size() == 5u * 5u * 9u);
}

TEST_CASE("midpoint quadrature integrates a Gaussian") {
  auto g = GridFunction::make(0, {65, 65}, {5.0, 5.0}, {"z", "z"});
  g.fill([](const std::vector<double>& x) {
    return Cx(std::exp(-M_PI * (x[0] * x[0] + x[1] * x[1])));
  });
  REQUIRE(std::abs(g.integral() - Cx(1.0)) < 1e-10);
  REQUIRE(g.l1() == Approx(1.0).margin(1e-10));
}

TEST_CASE("binary round trip is exact") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  auto g = GridFunction::make(2, {3, 5, 3, 7}, {1.0, 2.0, 1.5, 0.5},
                              {"z", "z", "z", "u"});
  for (auto& v : g.data) v = Cx(d(rng), d(rng));
  const std::string path = "grid_roundtrip.bin";
  save_grid(path, g);
  const GridFunction r = load_grid(path);
  REQUIRE(r.n == g.n);
  REQUIRE(r.dims == g.dims);
  REQUIRE(r.extents == g.extents);
  REQUIRE(r.roles == g.roles);
  REQUIRE(r.data == g.data);
  std::remove(path.c_str());
}

TEST_CASE("csv export has one row per node plus header") {
  auto g = GridFunction::make(1, {3, 3, 3}, {1.0, 1.0, 1.0}, {"z", "z", "u"});
  g.fill([](const std::vector<double>& x) { return Cx(x[0] + x[1], x[2]); });
  const std::string path = "grid_export.csv";
  save_grid_csv(path, g);
  std::ifstream in(path);
  std::string line;
  int rows = 0;
  std::getline(in, line);
  REQUIRE(line == "z,z,u,re,im");
  while (std::getline(in, line)) ++rows;
  REQUIRE(rows == 27);
  std::remove(path.c_str());
}

TEST_CASE("interpolation reproduces multilinear functions exactly") {
  auto g = GridFunction::make(0, {9, 9}, {2.0, 2.0}, {"z", "z"});
  g.fill([](const std::vector<double>& x) {
    return Cx(1.0 + 2.0 * x[0] - 0.7 * x[1] + 0.3 * x[0] * x[1], x[0]);
  });
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-1.5, 1.5);
  for (int it = 0; it < 30; ++it) {
    const double a = d(rng), b = d(rng);
    const Cx expect(1.0 + 2.0 * a - 0.7 * b + 0.3 * a * b, a);
    REQUIRE(std::abs(g.sample({a, b}) - expect) < 1e-12);
  }
  // zero outside the hull
  REQUIRE(g.sample({5.0, 0.0}) == Cx(0.0));
}

TEST_CASE("finite differences converge at the advertised orders") {
  auto err = [](int dim, bool o4) {
    auto g = GridFunction::make(0, {dim}, {2.0}, {"z"});
    g.fill([](const std::vector<double>& x) { return Cx(std::sin(x[0])); });
    const GridFunction der = g.derivative(0, o4);
    double e = 0.0;
    for (int k = dim / 4; k < 3 * dim / 4; ++k)
      e = std::max(e, std::abs(der.data[k] - Cx(std::cos(g.coord(0, k)))));
    return e;
  };
  const double e2a = err(33, false), e2b = err(65, false);
  REQUIRE(e2a / e2b > 3.0);   // second order: halving h gains ~4x
  const double e4a = err(33, true), e4b = err(65, true);
  REQUIRE(e4a / e4b > 12.0);  // fourth order: ~16x
  REQUIRE(e4b < e2b);
}

TEST_CASE("tail mass flag") {
  auto wide = GridFunction::make(0, {65}, {8.0}, {"z"});
  wide.fill([](const std::vector<double>& x) {
    return Cx(std::exp(-x[0] * x[0]));
  });
  REQUIRE_FALSE(wide.tail_flagged());
  auto tight = GridFunction::make(0, {65}, {2.0}, {"z"});
  tight.fill([](const std::vector<double>& x) {
    return Cx(std::exp(-x[0] * x[0]));
  });
  REQUIRE(tight.tail_flagged());
}
