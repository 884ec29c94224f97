#pragma once
// Orthonormal Hermite functions, their ladder matrices, and the Hermite-basis
// matrix of a second-order operator's spectral symbol at parameter mu.
//
// Unscaled basis: h_0(x) = pi^{-1/4} exp(-x^2/2),
//   h_{k+1} = sqrt(2/(k+1)) x h_k - sqrt(k/(k+1)) h_{k-1}   (L^2-orthonormal).
// Scaled basis: h_k^mu(x) = (2 pi |mu|)^{1/4} h_k(tau x), tau = sqrt(2 pi
// |mu|), orthonormal for every mu != 0.  Ladder actions:
//   x h_k^mu = (1/tau) [sqrt(k/2) h_{k-1}^mu + sqrt((k+1)/2) h_{k+1}^mu]
//   d/dx h_k^mu = tau [sqrt(k/2) h_{k-1}^mu - sqrt((k+1)/2) h_{k+1}^mu]
//
// The symbol of L_{A,alpha} acts on functions of x in R^n by substituting
// d/dx_j for the X_j direction, 2 pi i mu x_j for the Y_j direction, and
// 2 pi i mu for the center; its truncated matrix is computed with two levels
// of padding so every retained entry is exact.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "heis/fields.hpp"

namespace heis {

inline std::vector<double> hermite_values(int kmax, double x) {
  std::vector<double> h(kmax + 1);
  h[0] = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
  if (kmax >= 1) h[1] = std::sqrt(2.0) * x * h[0];
  for (int k = 1; k < kmax; ++k)
    h[k + 1] = std::sqrt(2.0 / (k + 1)) * x * h[k] -
               std::sqrt(static_cast<double>(k) / (k + 1)) * h[k - 1];
  return h;
}

inline double hermite_scaled(int k, double mu, double x) {
  const double tau = std::sqrt(2.0 * M_PI * std::abs(mu));
  return std::sqrt(tau) * hermite_values(k, tau * x)[k];
}

// Product basis over a multi-index.
inline double hermite_tensor(const std::vector<int>& k, double mu,
                             const std::vector<double>& x) {
  double v = 1.0;
  for (std::size_t j = 0; j < k.size(); ++j)
    v *= hermite_scaled(k[j], mu, x[j]);
  return v;
}

// Unscaled one-axis ladders on the first K levels.
inline Eigen::MatrixXd ladder_pos(int K) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(K, K);
  for (int k = 0; k + 1 < K; ++k) {
    M(k, k + 1) = std::sqrt((k + 1) / 2.0);  // <h_k, x h_{k+1}>
    M(k + 1, k) = std::sqrt((k + 1) / 2.0);
  }
  return M;
}

inline Eigen::MatrixXd ladder_der(int K) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(K, K);
  for (int k = 0; k + 1 < K; ++k) {
    M(k, k + 1) = std::sqrt((k + 1) / 2.0);   // from d/dx h_{k+1}
    M(k + 1, k) = -std::sqrt((k + 1) / 2.0);  // from d/dx h_k
  }
  return M;
}

// I (x) ... (x) M (x) ... (x) I with M on the given axis; K levels per axis,
// row-major flattening (axis 0 slowest), matching flat index sum k_i K^{n-1-i}.
inline Eigen::MatrixXcd axis_embed(int n, int axis, const Eigen::MatrixXcd& M,
                                   int K) {
  const auto dim = static_cast<Eigen::Index>(std::pow(K, n));
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(dim, dim);
  const auto stride = static_cast<Eigen::Index>(std::pow(K, n - 1 - axis));
  for (Eigen::Index r = 0; r < dim; ++r) {
    const int kr = static_cast<int>(r / stride) % K;
    const Eigen::Index base = r - kr * stride;
    for (int kc = 0; kc < K; ++kc) {
      const Cx v = M(kr, kc);
      if (v != Cx(0.0)) R(r, base + kc * stride) += v;
    }
  }
  return R;
}

// Symbol generators on the scaled basis, K levels per axis, mu != 0.
// 2 pi mu / tau equals sign(mu) tau exactly; using the latter keeps the
// X and Y ladder entries bitwise identical so symmetric cancellations are
// exact in floating point.
inline Eigen::MatrixXcd symbol_W(int n, int i, double mu, int K) {
  const double tau = std::sqrt(2.0 * M_PI * std::abs(mu));
  if (i < n) return axis_embed(n, i, (tau * ladder_der(K)).cast<Cx>(), K);
  return axis_embed(n, i - n,
                    Cx(0.0, mu >= 0.0 ? tau : -tau) * ladder_pos(K).cast<Cx>(),
                    K);
}

namespace detail {
// Selection of flat indices (padded K+2 levels per axis) whose digits are
// all below K.
inline std::vector<Eigen::Index> truncated_rows(int n, int K) {
  const int Kp = K + 2;
  std::vector<Eigen::Index> keep;
  std::vector<int> digits(n, 0);
  while (true) {
    Eigen::Index flat = 0;
    for (int i = 0; i < n; ++i) flat = flat * Kp + digits[i];
    keep.push_back(flat);
    int i = n;
    while (i > 0) {
      --i;
      if (++digits[i] < K) break;
      digits[i] = 0;
      if (i == 0) return keep;
    }
  }
}
}  // namespace detail

// Hermite matrix of the symbol of L_{A,alpha} at mu, truncated to K levels
// per axis; built with padding so all retained entries are exact.
inline Eigen::MatrixXcd symbol_matrix(int n, const Eigen::MatrixXcd& A,
                                      Cx alpha, double mu, int K) {
  const int Kp = K + 2;
  const auto dimp = static_cast<Eigen::Index>(std::pow(Kp, n));
  std::vector<Eigen::MatrixXcd> W;
  for (int i = 0; i < 2 * n; ++i) W.push_back(symbol_W(n, i, mu, Kp));
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(dimp, dimp);
  for (int j = 0; j < 2 * n; ++j)
    for (int k = 0; k < 2 * n; ++k) {
      if (A(j, k) == Cx(0.0)) continue;
      L += A(j, k) * (W[j] * W[k]);
    }
  L += Cx(0.0, 1.0) * alpha * Cx(0.0, 2.0 * M_PI * mu) *
       Eigen::MatrixXcd::Identity(dimp, dimp);
  const auto keep = detail::truncated_rows(n, K);
  Eigen::MatrixXcd out(keep.size(), keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r)
    for (std::size_t c = 0; c < keep.size(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          L(keep[r], keep[c]);
  return out;
}

inline double sigma_min(const Eigen::MatrixXcd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

// Eigenvalues of the symbol predicted from signed normal-form frequencies:
// 2 pi |mu| sum_j a_j (2 k_j + 1) - 2 pi mu alpha.
inline Cx symbol_eigenvalue_predicted(const std::vector<double>& freqs,
                                      const std::vector<int>& k, Cx alpha,
                                      double mu) {
  double s = 0.0;
  for (std::size_t j = 0; j < freqs.size(); ++j) s += freqs[j] * (2 * k[j] + 1);
  return 2.0 * M_PI * std::abs(mu) * s - 2.0 * M_PI * mu * alpha;
}

}  // namespace heis
