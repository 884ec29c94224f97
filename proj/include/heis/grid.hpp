#pragma once
// Uniform origin-centered sample grids for complex-valued functions.
//
// Per axis: odd dim, half-width extent, spacing h = 2*extent/dim, node
// coordinates (k - (dim-1)/2) * h for k in [0, dim).  The origin is always a
// node and the nodes sit strictly inside [-extent, extent] (midpoint cells).
// Quadrature is the midpoint rule, prod(h) * sum.
//
// File format: one JSON header line {n, dims, extents, axis-roles,
// endianness} terminated by '\n', then the samples as interleaved
// little-endian 64-bit floats (re, im), row-major.  CSV alternative: one row
// per node, columns = coordinates, re, im.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "heis/poly.hpp"

namespace heis {

static_assert(std::endian::native == std::endian::little,
              "grid IO assumes a little-endian host");

template <class F>
void for_each_index(const std::vector<int>& dims, F&& f) {
  std::vector<int> idx(dims.size(), 0);
  while (true) {
    f(idx);
    std::size_t i = dims.size();
    while (i > 0) {
      --i;
      if (++idx[i] < dims[i]) break;
      idx[i] = 0;
      if (i == 0) return;
    }
  }
}

struct GridFunction {
  int n = 0;  // H_n parameter carried in the header (0 when not applicable)
  std::vector<int> dims;
  std::vector<double> extents;
  std::vector<std::string> roles;  // per-axis tags, e.g. "z", "u", "x", "y"
  std::vector<Cx> data;

  static GridFunction make(int n, std::vector<int> dims,
                           std::vector<double> extents,
                           std::vector<std::string> roles) {
    GridFunction g;
    g.n = n;
    g.dims = std::move(dims);
    g.extents = std::move(extents);
    g.roles = std::move(roles);
    if (g.dims.size() != g.extents.size() || g.dims.size() != g.roles.size())
      throw std::invalid_argument("GridFunction: axis metadata mismatch");
    std::size_t sz = 1;
    for (int d : g.dims) {
      if (d <= 0 || d % 2 == 0)
        throw std::invalid_argument("GridFunction: dims must be odd positive");
      sz *= static_cast<std::size_t>(d);
    }
    g.data.assign(sz, Cx(0.0));
    return g;
  }

  int d() const { return static_cast<int>(dims.size()); }
  double h(int axis) const { return 2.0 * extents[axis] / dims[axis]; }
  double coord(int axis, int k) const {
    return (k - (dims[axis] - 1) / 2.0) * h(axis);
  }
  std::size_t size() const { return data.size(); }

  std::size_t flat(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (std::size_t i = 0; i < dims.size(); ++i)
      f = f * static_cast<std::size_t>(dims[i]) +
          static_cast<std::size_t>(idx[i]);
    return f;
  }
  Cx& at(const std::vector<int>& idx) { return data[flat(idx)]; }
  const Cx& at(const std::vector<int>& idx) const { return data[flat(idx)]; }

  void fill(const std::function<Cx(const std::vector<double>&)>& f) {
    std::vector<double> x(dims.size());
    for_each_index(dims, [&](const std::vector<int>& idx) {
      for (std::size_t i = 0; i < dims.size(); ++i)
        x[i] = coord(static_cast<int>(i), idx[i]);
      data[flat(idx)] = f(x);
    });
  }

  double cell() const {
    double c = 1.0;
    for (int i = 0; i < d(); ++i) c *= h(i);
    return c;
  }
  Cx integral() const {
    Cx s = 0.0;
    for (const Cx& v : data) s += v;
    return s * cell();
  }
  double l1() const {
    double s = 0.0;
    for (const Cx& v : data) s += std::abs(v);
    return s * cell();
  }
  double l2() const {
    double s = 0.0;
    for (const Cx& v : data) s += std::norm(v);
    return std::sqrt(s * cell());
  }

  // Multilinear interpolation; zero outside the node hull.
  Cx sample(const std::vector<double>& x) const {
    const int D = d();
    std::vector<int> i0(D);
    std::vector<double> fr(D);
    for (int i = 0; i < D; ++i) {
      const double t = x[i] / h(i) + (dims[i] - 1) / 2.0;
      const double f = std::floor(t);
      i0[i] = static_cast<int>(f);
      fr[i] = t - f;
      if (i0[i] < -1 || i0[i] > dims[i] - 1) return Cx(0.0);
    }
    Cx acc = 0.0;
    for (int corner = 0; corner < (1 << D); ++corner) {
      double w = 1.0;
      std::size_t off = 0;
      bool inside = true;
      for (int i = 0; i < D; ++i) {
        const int bit = (corner >> i) & 1;
        const int k = i0[i] + bit;
        if (k < 0 || k >= dims[i]) {
          inside = false;
          break;
        }
        w *= bit ? fr[i] : 1.0 - fr[i];
        off = off * static_cast<std::size_t>(dims[i]) +
              static_cast<std::size_t>(k);
      }
      if (inside && w != 0.0) acc += data[off] * w;
    }
    return acc;
  }

  // Centered finite difference along one axis (order 2, or 4 with wider
  // stencil); one-sided near the edges at reduced order.
  GridFunction derivative(int axis, bool order4 = false) const {
    GridFunction out = *this;
    const double hh = h(axis);
    std::vector<int> idx;
    auto get = [&](std::vector<int>& id, int k) -> Cx {
      const int save = id[axis];
      id[axis] = k;
      const Cx v = data[flat(id)];
      id[axis] = save;
      return v;
    };
    for_each_index(dims, [&](const std::vector<int>& cidx) {
      std::vector<int> id = cidx;
      const int k = cidx[axis], K = dims[axis];
      Cx v;
      if (order4 && k >= 2 && k <= K - 3) {
        v = (get(id, k - 2) - 8.0 * get(id, k - 1) + 8.0 * get(id, k + 1) -
             get(id, k + 2)) /
            (12.0 * hh);
      } else if (k >= 1 && k <= K - 2) {
        v = (get(id, k + 1) - get(id, k - 1)) / (2.0 * hh);
      } else if (k == 0) {
        v = (get(id, 1) - get(id, 0)) / hh;
      } else {
        v = (get(id, K - 1) - get(id, K - 2)) / hh;
      }
      out.data[flat(cidx)] = v;
    });
    return out;
  }

  // True when the mass on the outermost index shell exceeds rel times the
  // total L1 mass: the grid is then too small for the sampled function.
  bool tail_flagged(double rel = 1e-6) const {
    double shell = 0.0;
    for_each_index(dims, [&](const std::vector<int>& idx) {
      for (std::size_t i = 0; i < dims.size(); ++i)
        if (idx[i] == 0 || idx[i] == dims[i] - 1) {
          shell += std::abs(data[flat(idx)]);
          return;
        }
    });
    return shell * cell() > rel * l1();
  }
};

inline void save_grid(const std::string& path, const GridFunction& g) {
  nlohmann::ordered_json hdr;
  hdr["n"] = g.n;
  hdr["dims"] = g.dims;
  hdr["extents"] = g.extents;
  hdr["axis-roles"] = g.roles;
  hdr["endianness"] = "little";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_grid: cannot open " + path);
  out << hdr.dump() << "\n";
  std::vector<double> buf(2 * g.data.size());
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    buf[2 * i] = g.data[i].real();
    buf[2 * i + 1] = g.data[i].imag();
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
}

inline GridFunction load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_grid: cannot open " + path);
  std::string line;
  std::getline(in, line);
  const auto hdr = nlohmann::json::parse(line);
  if (hdr.at("endianness").get<std::string>() != "little")
    throw std::runtime_error("load_grid: unsupported endianness");
  GridFunction g = GridFunction::make(
      hdr.at("n").get<int>(), hdr.at("dims").get<std::vector<int>>(),
      hdr.at("extents").get<std::vector<double>>(),
      hdr.at("axis-roles").get<std::vector<std::string>>());
  std::vector<double> buf(2 * g.data.size());
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != buf.size() * sizeof(double))
    throw std::runtime_error("load_grid: truncated payload");
  for (std::size_t i = 0; i < g.data.size(); ++i)
    g.data[i] = Cx(buf[2 * i], buf[2 * i + 1]);
  return g;
}

inline void save_grid_csv(const std::string& path, const GridFunction& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_grid_csv: cannot open " + path);
  for (int i = 0; i < g.d(); ++i) out << g.roles[i] << ",";
  out << "re,im\n";
  out.precision(17);
  for_each_index(g.dims, [&](const std::vector<int>& idx) {
    for (std::size_t i = 0; i < idx.size(); ++i)
      out << g.coord(static_cast<int>(i), idx[i]) << ",";
    const Cx v = g.at(idx);
    out << v.real() << "," << v.imag() << "\n";
  });
}

}  // namespace heis
