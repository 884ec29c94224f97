#pragma once

// Group convolution and vector-field action on sampled data.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "heis/core.hpp"
#include "heis/grid.hpp"

namespace heis {

// W_j f on a (2n+1)-axis grid: X_j = d/dx_j - (y_j/2) d/du,
// Y_j = d/dy_j + (x_j/2) d/du, indexed j in [0,2n).
inline GridFunction grid_field_W(int j, const GridFunction& f,
                                 bool order4 = false) {
  const int n = f.n;
  if (j < 0 || j >= 2 * n) throw std::invalid_argument("field index");
  const GridFunction du = f.derivative(2 * n, order4);
  const GridFunction dz = f.derivative(j, order4);
  GridFunction out = dz;
  const bool is_x = j < n;
  const int coord_axis = is_x ? n + j : j - n;  // y_j for X_j, x_j for Y_j
  const double sgn = is_x ? -0.5 : 0.5;
  std::vector<int> idx(2 * n + 1, 0);
  for (std::size_t flat = 0; flat < out.data.size(); ++flat) {
    out.data[flat] = dz.data[flat] +
                     sgn * f.coord(coord_axis, idx[coord_axis]) * du.data[flat];
    for (int a = 2 * n; a >= 0; --a) {
      if (++idx[a] < f.dims[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

inline GridFunction grid_field_U(const GridFunction& f, bool order4 = false) {
  return f.derivative(2 * f.n, order4);
}

// Sum A_jk W_j W_k f + i alpha U f + sum b_j W_j f.
inline GridFunction grid_apply_operator(const Eigen::MatrixXcd& A, Cx alpha,
                                        const GridFunction& f,
                                        const std::vector<Cx>& b = {},
                                        bool order4 = false) {
  const int n = f.n;
  GridFunction out = f;
  std::fill(out.data.begin(), out.data.end(), Cx(0.0));
  std::vector<GridFunction> wf;
  wf.reserve(2 * n);
  for (int k = 0; k < 2 * n; ++k) wf.push_back(grid_field_W(k, f, order4));
  for (int j = 0; j < 2 * n; ++j) {
    GridFunction col = f;
    bool any = false;
    std::fill(col.data.begin(), col.data.end(), Cx(0.0));
    for (int k = 0; k < 2 * n; ++k) {
      if (A(j, k) == Cx(0.0)) continue;
      any = true;
      for (std::size_t i = 0; i < col.data.size(); ++i)
        col.data[i] += A(j, k) * wf[k].data[i];
    }
    if (any) {
      const GridFunction wcol = grid_field_W(j, col, order4);
      for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] += wcol.data[i];
    }
    if (!b.empty() && b[j] != Cx(0.0))
      for (std::size_t i = 0; i < out.data.size(); ++i)
        out.data[i] += b[j] * wf[j].data[i];
  }
  if (alpha != Cx(0.0)) {
    const GridFunction du = grid_field_U(f, order4);
    const Cx c = Cx(0.0, 1.0) * alpha;
    for (std::size_t i = 0; i < out.data.size(); ++i)
      out.data[i] += c * du.data[i];
  }
  return out;
}

// (f1 * f2)(g) = int f1(h) f2(h^{-1} g) dh by midpoint quadrature over f1's
// grid. h^{-1}g has its z-part on the lattice when g is a node, so only the
// u-coordinate of f2's argument needs (linear) interpolation.
inline GridFunction convolve(const GridFunction& f1, const GridFunction& f2,
                             bool* tail_flag = nullptr) {
  const int n = f1.n;
  if (f1.dims != f2.dims || f1.extents != f2.extents)
    throw std::invalid_argument("convolve: grid mismatch");
  if (tail_flag) *tail_flag = f1.tail_flagged() || f2.tail_flagged();
  GridFunction out = f1;
  const int d = 2 * n + 1;
  const double cell = f1.cell();
  double peak = 0.0;
  for (const Cx& v : f1.data)
    peak = std::max(peak, std::abs(v.real()) + std::abs(v.imag()));
  const double cutoff = 1e-14 * peak;
  const int nu = f1.dims[d - 1];
  const double hu = f1.h(d - 1);
  const double u0 = f1.coord(d - 1, 0);
  const std::size_t zcount = f1.data.size() / nu;

  // flatten z-lattices once: offsets and coordinates per z-node
  std::vector<std::vector<double>> zc(zcount, std::vector<double>(2 * n));
  std::vector<std::vector<int>> zi(zcount, std::vector<int>(2 * n));
  {
    std::vector<int> idx(2 * n, 0);
    for (std::size_t m = 0; m < zcount; ++m) {
      for (int a = 0; a < 2 * n; ++a) zc[m][a] = f1.coord(a, idx[a]);
      zi[m] = idx;
      for (int a = 2 * n - 1; a >= 0; --a) {
        if (++idx[a] < f1.dims[a]) break;
        idx[a] = 0;
      }
    }
  }

  std::vector<int> gz(2 * n);
  for (std::size_t go = 0; go < zcount; ++go) {
    for (int a = 0; a < 2 * n; ++a) gz[a] = zi[go][a];
    for (int gu = 0; gu < nu; ++gu) {
      const double guc = f1.coord(d - 1, gu);
      Cx acc(0.0);
      for (std::size_t ho = 0; ho < zcount; ++ho) {
        // z-part of h^{-1} g: index arithmetic, off-grid -> f2 vanishes
        bool inside = true;
        std::size_t zoff = 0;
        for (int a = 0; a < 2 * n; ++a) {
          const int k = gz[a] - zi[ho][a] + (f1.dims[a] - 1) / 2;
          if (k < 0 || k >= f1.dims[a]) {
            inside = false;
            break;
          }
          zoff = zoff * f1.dims[a] + static_cast<std::size_t>(k);
        }
        if (!inside) continue;
        // u-part: u_g - u_h - <z_h, z_g - z_h>/2 = u_g - u_h - <z_h,z_g>/2
        double pair = 0.0;
        for (int a = 0; a < n; ++a)
          pair += zc[ho][a] * zc[go][n + a] - zc[ho][n + a] * zc[go][a];
        const std::size_t hbase = ho * nu;
        for (int hu_i = 0; hu_i < nu; ++hu_i) {
          const Cx f1v = f1.data[hbase + hu_i];
          if (std::abs(f1v.real()) + std::abs(f1v.imag()) <= cutoff) continue;
          const double uarg = guc - (u0 + hu_i * hu) - 0.5 * pair;
          // linear interpolation with the same zero-outside-hull convention
          // as GridFunction::sample
          const double tpos = (uarg - u0) / hu;
          if (tpos <= -1.0 || tpos >= nu) continue;
          const int k0 = static_cast<int>(std::floor(tpos));
          const double w = tpos - k0;
          Cx f2v(0.0);
          if (k0 >= 0) f2v += (1.0 - w) * f2.data[zoff * nu + k0];
          if (k0 + 1 <= nu - 1) f2v += w * f2.data[zoff * nu + k0 + 1];
          acc += f1v * f2v;
        }
      }
      out.data[go * nu + gu] = acc * cell;
    }
  }
  return out;
}

// (f1 * f2)(g) at a single (possibly off-lattice) point: quadrature over
// f1's grid with multilinear sampling of f2. Used for refinement studies.
inline Cx convolve_at(const GridFunction& f1, const GridFunction& f2,
                      const GroupPoint& g) {
  const int n = f1.n;
  if (static_cast<std::size_t>(n) != g.n())
    throw std::invalid_argument("convolve_at: dimension mismatch");
  const int d = 2 * n + 1;
  std::vector<int> idx(d, 0);
  std::vector<double> hc(d), arg(d);
  Cx acc(0.0);
  for (std::size_t flat = 0; flat < f1.data.size(); ++flat) {
    const Cx f1v = f1.data[flat];
    if (f1v != Cx(0.0)) {
      for (int a = 0; a < d; ++a) hc[a] = f1.coord(a, idx[a]);
      double pair = 0.0;
      for (int a = 0; a < n; ++a)
        pair += hc[a] * g.z[n + a] - hc[n + a] * g.z[a];
      for (int a = 0; a < 2 * n; ++a) arg[a] = g.z[a] - hc[a];
      arg[d - 1] = g.u - hc[d - 1] - 0.5 * pair;
      acc += f1v * f2.sample(arg);
    }
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < f1.dims[a]) break;
      idx[a] = 0;
    }
  }
  return acc * f1.cell();
}

// f^sharp(g) = conj(f(g^{-1})): the involution of the convolution algebra
inline GridFunction sharp(const GridFunction& f) {
  GridFunction out = f;
  std::vector<int> idx(f.dims.size(), 0);
  for (std::size_t flat = 0; flat < f.data.size(); ++flat) {
    std::size_t r = 0;
    for (std::size_t a = 0; a < f.dims.size(); ++a)
      r = r * f.dims[a] + static_cast<std::size_t>(f.dims[a] - 1 - idx[a]);
    out.data[r] = std::conj(f.data[flat]);
    for (int a = static_cast<int>(f.dims.size()) - 1; a >= 0; --a) {
      if (++idx[a] < f.dims[a]) break;
      idx[a] = 0;
    }
  }
  return out;
}

}  // namespace heis
