#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "heis/convolve.hpp"
#include "heis/fields.hpp"
#include "heis/gauss.hpp"
#include "heis/twisted.hpp"

using namespace heis;

namespace {

GridFunction make_h1(int dz, int du, double ez, double eu) {
  return GridFunction::make(1, {dz, dz, du}, {ez, ez, eu}, {"z", "z", "u"});
}

// S = J A with A symmetric satisfies S^T J + J S = 0.
Eigen::MatrixXd rand_sp(std::mt19937& rng, int n, double amp = 1.0) {
  std::uniform_real_distribution<double> u(-amp, amp);
  Eigen::MatrixXd A(2 * n, 2 * n);
  for (int i = 0; i < 2 * n; ++i)
    for (int j = i; j < 2 * n; ++j) A(i, j) = A(j, i) = u(rng);
  return matJ(n) * A;
}

GridFunction rand_plane_gauss(std::mt19937& rng, int dim, double ext) {
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  const double a = ud(rng), b = ud(rng), c = ud(rng);
  const double s = 0.8 + 0.4 * ud(rng);
  return sample_plane(1, dim, ext, [&](const std::vector<double>& z) {
    return Cx(a + b * z[0], c * z[1]) *
           std::exp(-M_PI * s * (z[0] * z[0] + z[1] * z[1]));
  });
}

double linf(const GridFunction& g) {
  double m = 0.0;
  for (const Cx& v : g.data) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("closed gaussian algebra matches grid quadrature") {
  Eigen::MatrixXcd M1(2, 2), M2(2, 2);
  M1 << Cx(1.0, 0.0), Cx(0.2, 0.1), Cx(0.2, 0.1), Cx(0.8, -0.1);
  M2 << Cx(0.9, 0.2), Cx(-0.1, 0.05), Cx(-0.1, 0.05), Cx(1.1, 0.0);
  const CGauss a = CGauss::make(1, Cx(1.0, 0.4), M1);
  const CGauss b = CGauss::make(1, Cx(0.7, -0.2), M2);
  const int dim = 81;
  const double ext = 6.0;
  const auto sample = [&](const CGauss& g) {
    return sample_plane(1, dim, ext, [&](const std::vector<double>& z) {
      return g.eval(z);
    });
  };

  SECTION("twisted product") {
    const double mu = 0.9;
    const GridFunction grid = twisted_convolve(sample(a), sample(b), mu);
    const GridFunction closed = sample(twisted_product(a, b, mu));
    REQUIRE(rel_l2_gap(grid, closed) < 1e-12);
  }
  SECTION("symplectic transform") {
    const GridFunction grid = plane_symplectic_ft(sample(a));
    const GridFunction closed = sample(symplectic_ft(a));
    REQUIRE(rel_l2_gap(grid, closed) < 1e-12);
  }
  SECTION("integral and polynomial moments") {
    const GridFunction ga = sample(a);
    REQUIRE(std::abs(ga.integral() - gauss_integral(a)) < 1e-12);
    Poly p = Poly::constant(2, Cx(0.3, 0.1)) +
             Poly::var(2, 0) * Poly::var(2, 0) * Cx(1.0) +
             Poly::var(2, 0) * Poly::var(2, 1) * Cx(0.5, -0.2);
    GridFunction pg = ga;
    std::vector<int> idx(2, 0);
    for (std::size_t flat = 0; flat < pg.data.size(); ++flat) {
      const Cx x(pg.coord(0, idx[0])), y(pg.coord(1, idx[1]));
      pg.data[flat] *= p.eval({x, y});
      for (int ax = 1; ax >= 0; --ax) {
        if (++idx[ax] < pg.dims[ax]) break;
        idx[ax] = 0;
      }
    }
    REQUIRE(std::abs(pg.integral() - gauss_poly_integral(a, p)) < 1e-12);
    REQUIRE(std::abs(gauss_pairing(a, b) -
                     gauss_integral(CGauss::make(1, a.c * b.c, M1 + M2))) <
            1e-14);
  }
  SECTION("principal determinant branch") {
    for (double th : {2.8, -2.8}) {
      Eigen::MatrixXcd M = std::polar(1.0, th) *
                           Eigen::MatrixXcd::Identity(2, 2);
      REQUIRE(std::abs(det_invsqrt_principal(M) - std::polar(1.0, -th)) <
              1e-14);
    }
    REQUIRE_THROWS_AS(
        det_invsqrt_principal(Eigen::MatrixXcd::Zero(2, 2)),
        std::invalid_argument);
  }
}

TEST_CASE("twisted convolution reduces to ordinary convolution at zero") {
  std::mt19937 rng(11);
  const int dim = 21;
  const double ext = 5.0;
  GridFunction a = rand_plane_gauss(rng, dim, ext);
  GridFunction b = rand_plane_gauss(rng, dim, ext);
  GridFunction got = twisted_convolve(a, b, 0.0);
  GridFunction ref = a;
  const double cell = a.cell();
  for (int px = 0; px < dim; ++px)
    for (int py = 0; py < dim; ++py) {
      Cx acc = 0.0;
      for (int qx = 0; qx < dim; ++qx)
        for (int qy = 0; qy < dim; ++qy) {
          const int kx = px - qx + (dim - 1) / 2;
          const int ky = py - qy + (dim - 1) / 2;
          if (kx < 0 || kx >= dim || ky < 0 || ky >= dim) continue;
          acc += a.data[a.flat({kx, ky})] * b.data[b.flat({qx, qy})];
        }
      ref.data[ref.flat({px, py})] = acc * cell;
    }
  REQUIRE(rel_l2_gap(got, ref) < 1e-12);
}

TEST_CASE("twisted convolution satisfies the Young inequalities") {
  std::mt19937 rng(77);
  const int dim = 29;
  const double ext = 5.0;
  const double mu = 0.9;
  double w122 = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    GridFunction a = rand_plane_gauss(rng, dim, ext);
    GridFunction b = rand_plane_gauss(rng, dim, ext);
    GridFunction ab = twisted_convolve(a, b, mu);
    w122 = std::max(w122, ab.l2() / (a.l1() * b.l2()));
  }
  REQUIRE(w122 <= 1.0 + 1e-12);
  double w221 = 0.0, w111 = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    GridFunction a = rand_plane_gauss(rng, dim, ext);
    GridFunction b = rand_plane_gauss(rng, dim, ext);
    GridFunction ab = twisted_convolve(a, b, mu);
    w221 = std::max(w221, linf(ab) / (a.l2() * b.l2()));
    w111 = std::max(w111, ab.l1() / (a.l1() * b.l1()));
  }
  REQUIRE(w221 <= 1.0 + 1e-12);
  REQUIRE(w111 <= 1.0 + 1e-12);
}

TEST_CASE("sharp reverses the twisted product") {
  std::mt19937 rng(5);
  const int dim = 33;
  const double ext = 5.0;
  const double mu = 0.8;
  GridFunction a = rand_plane_gauss(rng, dim, ext);
  GridFunction b = rand_plane_gauss(rng, dim, ext);
  GridFunction lhs = plane_sharp(twisted_convolve(a, b, mu));
  GridFunction rhs = twisted_convolve(plane_sharp(b), plane_sharp(a), mu);
  REQUIRE(rel_l2_gap(lhs, rhs) < 1e-12);
}

TEST_CASE("twisted product is associative") {
  SECTION("closed algebra") {
    Eigen::MatrixXcd M1(2, 2), M2(2, 2), M3(2, 2);
    M1 << Cx(1.0), Cx(0.2, 0.1), Cx(0.2, 0.1), Cx(0.8);
    M2 << Cx(0.9, 0.2), Cx(-0.1), Cx(-0.1), Cx(1.1);
    M3 << Cx(1.2), Cx(0.0, 0.15), Cx(0.0, 0.15), Cx(0.7, 0.1);
    const CGauss a = CGauss::make(1, Cx(1.0), M1);
    const CGauss b = CGauss::make(1, Cx(0.5, 0.5), M2);
    const CGauss c = CGauss::make(1, Cx(-0.3, 1.0), M3);
    const double mu = 1.3;
    const CGauss l = twisted_product(twisted_product(a, b, mu), c, mu);
    const CGauss r = twisted_product(a, twisted_product(b, c, mu), mu);
    REQUIRE(std::abs(l.c - r.c) < 1e-10 * std::abs(r.c));
    REQUIRE((l.M - r.M).cwiseAbs().maxCoeff() < 1e-10);
  }
  SECTION("grid quadrature") {
    std::mt19937 rng(23);
    const int dim = 33;
    const double ext = 5.0;
    const double mu = 0.7;
    GridFunction a = rand_plane_gauss(rng, dim, ext);
    GridFunction b = rand_plane_gauss(rng, dim, ext);
    GridFunction c = rand_plane_gauss(rng, dim, ext);
    GridFunction l = twisted_convolve(twisted_convolve(a, b, mu), c, mu);
    GridFunction r = twisted_convolve(a, twisted_convolve(b, c, mu), mu);
    REQUIRE(rel_l2_gap(l, r) < 1e-3);
  }
}

TEST_CASE("central transform closed forms") {
  SECTION("separable gaussian profile") {
    HTestFunction psi = HTestFunction::make(
        1,
        {Poly::constant(2, 1.0) + Poly::var(2, 0) * Cx(0.1),
         Poly::var(2, 1) * Cx(0.2), Poly::constant(2, 0.5)},
        Eigen::MatrixXcd::Identity(2, 2), 1.0);
    GridFunction samp = psi.sample({41, 41, 201}, {5.0, 5.0, 6.0});
    for (double mu : {0.45, -1.1}) {
      GridFunction grid = central_partial_ft(samp, mu);
      GridFunction closed = psi.central_ft(mu).sample(41, 5.0);
      REQUIRE(rel_l2_gap(grid, closed) < 1e-12);
    }
  }
  SECTION("frequency quadrature reconstructs the function") {
    GridFunction f = make_h1(21, 61, 4.0, 4.0);
    f.fill([](const std::vector<double>& c) {
      return Cx(1.0 + 0.3 * c[0]) *
             std::exp(-M_PI * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]));
    });
    const double L = 3.5;
    const int nmu = 140;
    const double hm = 2.0 * L / nmu;
    std::vector<GridFunction> fts;
    fts.reserve(nmu + 1);
    for (int j = 0; j <= nmu; ++j)
      fts.push_back(central_partial_ft(f, -L + j * hm));
    for (int iu : {10, 30, 50})
      for (int ix : {5, 10, 15})
        for (int iy : {5, 10, 15}) {
          const double u = f.coord(2, iu);
          Cx acc = 0.0;
          for (int j = 0; j <= nmu; ++j) {
            const double w = (j == 0 || j == nmu) ? 1.0
                             : (j % 2 == 1)       ? 4.0
                                                  : 2.0;
            acc += w * fts[j].data[fts[j].flat({ix, iy})] *
                   std::polar(1.0, 2.0 * M_PI * (-L + j * hm) * u);
          }
          acc *= hm / 3.0;
          REQUIRE(std::abs(acc - f.data[f.flat({ix, iy, iu})]) < 1e-12);
        }
  }
  SECTION("involution intertwines with conjugate mirror") {
    GridFunction f = make_h1(15, 41, 4.0, 4.0);
    f.fill([](const std::vector<double>& c) {
      return Cx(1.0 + 0.3 * c[0], 0.2 * c[2]) *
             std::exp(-M_PI * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]));
    });
    const double mu = 0.6;
    GridFunction lhs = central_partial_ft(sharp(f), mu);
    GridFunction rhs = plane_sharp(central_partial_ft(f, mu));
    REQUIRE(rel_l2_gap(lhs, rhs) < 1e-12);
  }
  SECTION("gaussian frequency moments") {
    const double au = 0.8;
    for (double mu : {0.0, 0.6, -1.3}) {
      const std::vector<Cx> mom = center_moments(au, mu, 4);
      for (int k = 0; k <= 4; ++k) {
        Cx ref = 0.0;
        const int nq = 4000;
        const double Lq = 6.0, hq = 2.0 * Lq / nq;
        for (int j = 0; j <= nq; ++j) {
          const double u = -Lq + j * hq;
          const double w = (j == 0 || j == nq) ? 1.0
                           : (j % 2 == 1)      ? 4.0
                                               : 2.0;
          ref += w * std::pow(u, k) * std::exp(-M_PI * au * u * u) *
                 std::polar(1.0, 2.0 * M_PI * mu * u);
        }
        ref *= hq / 3.0;
        REQUIRE(std::abs(mom[k] - ref) < 1e-10);
      }
    }
  }
  SECTION("aliasing guard") {
    GridFunction f = make_h1(9, 9, 2.0, 2.0);
    REQUIRE_THROWS_AS(central_partial_ft(f, 5.0), std::domain_error);
  }
}

TEST_CASE("group convolution factors through the central transform") {
  GridFunction f1 = make_h1(15, 201, 4.2, 5.0);
  GridFunction f2 = make_h1(15, 201, 4.2, 5.0);
  f1.fill([](const std::vector<double>& c) {
    return Cx(1.0, 0.3 * c[0]) *
           std::exp(-M_PI * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]));
  });
  f2.fill([](const std::vector<double>& c) {
    return Cx(c[1] - 0.2) *
           std::exp(-M_PI * (0.8 * (c[0] * c[0] + c[1] * c[1]) +
                             0.3 * c[2] * c[2]));
  });
  GridFunction conv = convolve(f1, f2);
  for (double mu : {0.5, -0.4}) {
    GridFunction lhs = central_partial_ft(conv, mu);
    GridFunction rhs = twisted_convolve(central_partial_ft(f1, mu),
                                        central_partial_ft(f2, mu), mu);
    REQUIRE(rel_l2_gap(lhs, rhs) < 1e-3);
  }
}

TEST_CASE("operator symbols act on central transforms") {
  GridFunction f = make_h1(41, 121, 5.0, 5.0);
  f.fill([](const std::vector<double>& c) {
    return Cx(1.0 + 0.2 * c[1], 0.1 * c[0]) *
           std::exp(-M_PI * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]));
  });
  const double mu = 0.7;
  GridFunction fmu = central_partial_ft(f, mu);
  Eigen::MatrixXd S(2, 2);
  S << 0.0, -1.0, -1.0, 0.0;
  const Eigen::MatrixXcd AS = (S * matJ(1)).cast<Cx>();
  const Eigen::MatrixXcd A0 = Eigen::MatrixXcd::Zero(2, 2);

  struct Case {
    Eigen::MatrixXcd A;
    Cx alpha;
    std::vector<Cx> b;
  };
  const std::vector<Case> cases = {
      {A0, Cx(0.0), {Cx(1.0), Cx(0.0)}},
      {A0, Cx(0.0), {Cx(0.0), Cx(1.0)}},
      {A0, Cx(0.0, -1.0), {Cx(0.0), Cx(0.0)}},
      {AS, Cx(0.0), {Cx(0.0), Cx(0.0)}},
      {AS, Cx(0.3), {Cx(1.0), Cx(0.0, -0.5)}},
  };
  for (const auto& cs : cases) {
    GridFunction grp = grid_apply_operator(cs.A, cs.alpha, f, cs.b, true);
    GridFunction lhs = central_partial_ft(grp, mu);
    GridFunction rhs = apply_plane_operator(
        twisted_symbol(OperatorSpec{1, cs.A, cs.alpha, cs.b}, mu), fmu, true);
    REQUIRE(rel_l2_gap(lhs, rhs) < 1e-3);
  }
}

TEST_CASE("twisted symbols compose and bracket exactly") {
  SECTION("commutation relations") {
    const int n = 2;
    const double mu = 0.37;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        DiffOp xy = commutator(twisted_X(n, j, mu), twisted_Y(n, k, mu));
        DiffOp expect = j == k ? twisted_U(n, mu) : DiffOp::zero(2 * n);
        REQUIRE(diffop_close(xy, expect, 1e-12));
        REQUIRE(diffop_close(
            commutator(twisted_X(n, j, mu), twisted_X(n, k, mu)),
            DiffOp::zero(2 * n), 1e-12));
        REQUIRE(diffop_close(
            commutator(twisted_Y(n, j, mu), twisted_Y(n, k, mu)),
            DiffOp::zero(2 * n), 1e-12));
      }
  }
  SECTION("quadratic symbol assembles from the fields") {
    std::mt19937 rng(31);
    const double mu = 0.9;
    const Eigen::MatrixXd S = rand_sp(rng, 1);
    const Eigen::MatrixXd A = S * matJ(1);
    DiffOp manual = DiffOp::zero(2);
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        manual = manual + twisted_W(1, j, mu) * twisted_W(1, k, mu) * A(j, k);
    REQUIRE(diffop_close(twisted_delta_S(1, S, mu), manual, 1e-12));
  }
  SECTION("quadratic symbol brackets") {
    std::mt19937 rng(47);
    for (int n : {1, 2}) {
      const double mu = 0.6;
      const Eigen::MatrixXd S1 = rand_sp(rng, n);
      const Eigen::MatrixXd S2 = rand_sp(rng, n);
      const Eigen::MatrixXd S12 = S1 * S2 - S2 * S1;
      DiffOp lhs = commutator(twisted_delta_S(n, S1, mu),
                              twisted_delta_S(n, S2, mu));
      DiffOp rhs = twisted_delta_S(n, S12, mu) * Cx(0.0, -4.0 * M_PI * mu);
      REQUIRE(diffop_close(lhs, rhs, 1e-10));
      // S -> (i / 4 pi mu) Delta_S^mu preserves brackets
      const Cx scale(0.0, 1.0 / (4.0 * M_PI * mu));
      DiffOp tl = commutator(twisted_delta_S(n, S1, mu) * scale,
                             twisted_delta_S(n, S2, mu) * scale);
      REQUIRE(diffop_close(tl, twisted_delta_S(n, S12, mu) * scale, 1e-10));
    }
  }
  SECTION("quadratic symbol is linear in the matrix") {
    std::mt19937 rng(53);
    const double mu = 1.4;
    const Eigen::MatrixXd S1 = rand_sp(rng, 1);
    const Eigen::MatrixXd S2 = rand_sp(rng, 1);
    DiffOp lhs = twisted_delta_S(1, 2.0 * S1 - 0.5 * S2, mu);
    DiffOp rhs = twisted_delta_S(1, S1, mu) * Cx(2.0) +
                 twisted_delta_S(1, S2, mu) * Cx(-0.5);
    REQUIRE(diffop_close(lhs, rhs, 1e-12));
  }
  SECTION("group-level quadratic brackets") {
    std::mt19937 rng(61);
    const Eigen::MatrixXd S1 = rand_sp(rng, 1);
    const Eigen::MatrixXd S2 = rand_sp(rng, 1);
    const Eigen::MatrixXd S12 = S1 * S2 - S2 * S1;
    DiffOp lhs = commutator(op_delta_S(1, S1), op_delta_S(1, S2));
    DiffOp rhs = field_U(1) * op_delta_S(1, S12) * Cx(-2.0);
    REQUIRE(diffop_close(lhs, rhs, 1e-10));
  }
}

TEST_CASE("twisted fields are skew-adjoint in the plane") {
  const double mu = 0.7;
  Eigen::MatrixXd S(2, 2);
  S << 0.0, -1.0, -1.0, 0.0;
  PolyExp phi{Poly::constant(2, 1.0) + Poly::var(2, 0) * Cx(0.4, 0.1),
              quadratic_exponent(2, 0, Eigen::MatrixXcd::Identity(2, 2))};
  PolyExp psi{Poly::constant(2, 0.5) + Poly::var(2, 1) * Cx(-0.2, 0.3),
              quadratic_exponent(2, 0,
                                 0.8 * Eigen::MatrixXcd::Identity(2, 2))};
  const int dim = 61;
  const double ext = 6.0;
  const auto inner = [&](const PolyExp& a, const PolyExp& b) {
    GridFunction ga =
        sample_plane(1, dim, ext, [&](const std::vector<double>& c) {
          return a.eval({Cx(c[0]), Cx(c[1])});
        });
    GridFunction gb =
        sample_plane(1, dim, ext, [&](const std::vector<double>& c) {
          return b.eval({Cx(c[0]), Cx(c[1])});
        });
    Cx acc = 0.0;
    for (std::size_t i = 0; i < ga.data.size(); ++i)
      acc += ga.data[i] * std::conj(gb.data[i]);
    return acc * ga.cell();
  };
  for (DiffOp W : {twisted_X(1, 0, mu), twisted_Y(1, 0, mu),
                   twisted_U(1, mu)}) {
    const Cx lhs = inner(W.apply(phi), psi);
    const Cx rhs = inner(phi, W.apply(psi));
    REQUIRE(std::abs(lhs + rhs) < 1e-6);
  }
  DiffOp D = twisted_delta_S(1, S, mu);
  REQUIRE(std::abs(inner(D.apply(phi), psi) - inner(phi, D.apply(psi))) <
          1e-6);
}

TEST_CASE("separable test functions push through operators") {
  HTestFunction psi = HTestFunction::make(
      1,
      {Poly::constant(2, 1.0) + Poly::var(2, 0) * Poly::var(2, 0) * Cx(0.1),
       Poly::var(2, 0) * Cx(0.2), Poly::constant(2, 0.5)},
      Eigen::MatrixXcd::Identity(2, 2), 1.0);
  Eigen::MatrixXd S(2, 2);
  S << 0.0, -1.0, -1.0, 0.0;
  DiffOp L = op_L(1, (S * matJ(1)).cast<Cx>(), Cx(0.7));
  HTestFunction lp = htest_apply(L, psi);
  PolyExp direct = L.apply(psi.as_polyexp());
  PolyExp rebuilt = lp.as_polyexp();
  REQUIRE(poly_close(rebuilt.p, direct.p, 1e-12));
  REQUIRE(poly_close(rebuilt.q, direct.q, 1e-12));
}

TEST_CASE("plane utilities reject malformed input") {
  GridFunction a = make_plane(1, 9, 3.0);
  GridFunction b = make_plane(1, 11, 3.0);
  REQUIRE_THROWS_AS(twisted_convolve(a, b, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(rel_l2_gap(a, b), std::invalid_argument);
  REQUIRE_THROWS_AS(central_partial_ft(a, 0.5), std::invalid_argument);
}
