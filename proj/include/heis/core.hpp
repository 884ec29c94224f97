#pragma once
// Heisenberg group H_n: points, group law, dilations, Koranyi gauge.
//
// Conventions used throughout the library:
//   z = (x_1..x_n, y_1..y_n) in R^{2n}, central coordinate u.
//   <z,w> = sum_j (x_j w_yj - y_j w_xj)   (symplectic pairing, z^T J w with
//   J = [[0, I],[-I, 0]]).
//   (z,u)(z',u') = (z+z', u+u'+<z,z'>/2).

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace heis {

struct GroupPoint {
  std::vector<double> z;  // size 2n, layout (x_1..x_n, y_1..y_n)
  double u = 0.0;

  GroupPoint() = default;
  GroupPoint(std::vector<double> z_, double u_) : z(std::move(z_)), u(u_) {
    if (z.size() % 2 != 0) throw std::invalid_argument("z must have even size");
  }
  std::size_t n() const { return z.size() / 2; }
  double x(std::size_t j) const { return z[j]; }
  double y(std::size_t j) const { return z[n() + j]; }
};

// Symplectic pairing on R^{2n} (layout as above).
inline double symplectic_pairing(const std::vector<double>& z,
                                 const std::vector<double>& w) {
  if (z.size() != w.size() || z.size() % 2 != 0)
    throw std::invalid_argument("symplectic_pairing: size mismatch");
  const std::size_t n = z.size() / 2;
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += z[j] * w[n + j] - z[n + j] * w[j];
  return s;
}

inline GroupPoint multiply(const GroupPoint& g, const GroupPoint& h) {
  if (g.z.size() != h.z.size())
    throw std::invalid_argument("multiply: dimension mismatch");
  GroupPoint out;
  out.z.resize(g.z.size());
  for (std::size_t i = 0; i < g.z.size(); ++i) out.z[i] = g.z[i] + h.z[i];
  out.u = g.u + h.u + 0.5 * symplectic_pairing(g.z, h.z);
  return out;
}

inline GroupPoint inverse(const GroupPoint& g) {
  GroupPoint out = g;
  for (double& v : out.z) v = -v;
  out.u = -g.u;
  return out;
}

inline GroupPoint identity(std::size_t n) {
  return GroupPoint(std::vector<double>(2 * n, 0.0), 0.0);
}

// Anisotropic dilation delta_r(z,u) = (r z, r^2 u); group automorphism.
inline GroupPoint dilate(const GroupPoint& g, double r) {
  GroupPoint out = g;
  for (double& v : out.z) v *= r;
  out.u *= r * r;
  return out;
}

// Koranyi gauge |(z,u)| = (|z|^4 + 16 u^2)^{1/4}; homogeneous of degree 1
// under dilations and symmetric under inversion.
inline double koranyi_norm(const GroupPoint& g) {
  double z2 = 0.0;
  for (double v : g.z) z2 += v * v;
  return std::pow(z2 * z2 + 16.0 * g.u * g.u, 0.25);
}

inline double koranyi_dist(const GroupPoint& g, const GroupPoint& h) {
  return koranyi_norm(multiply(inverse(h), g));
}

// Homogeneous dimension Q = 2n + 2 (Haar measure = Lebesgue measure, and
// |delta_r(E)| = r^Q |E|).
inline int homogeneous_dimension(std::size_t n) { return 2 * static_cast<int>(n) + 2; }

}  // namespace heis
