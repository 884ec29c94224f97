#pragma once
// Left-invariant vector fields on H_n and the second-order operators built
// from them, realized as exact differential operators in the coordinates
// (x_1..x_n, y_1..y_n, u), arity 2n+1.
//
//   X_j = d/dx_j - (y_j/2) d/du,   Y_j = d/dy_j + (x_j/2) d/du,   U = d/du,
//   [X_j, Y_k] = delta_jk U, all other brackets zero.
//
// A coefficient matrix A (2n x 2n, complex symmetric for the classifier's
// operators) defines  L_A = sum_{j,k} A_jk W_j W_k  with W = (X_1..X_n,
// Y_1..Y_n), and  L_{A,alpha} = L_A + i alpha U.  The associated Hamilton
// matrix is S = -A J, equivalently A = S J, with J = [[0,I],[-I,0]].

#include <Eigen/Dense>

#include "heis/core.hpp"
#include "heis/poly.hpp"

namespace heis {

inline Eigen::MatrixXd matJ(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return J;
}

inline Eigen::MatrixXcd matJc(int n) { return matJ(n).cast<Cx>(); }

inline Eigen::MatrixXcd A_from_S(const Eigen::MatrixXcd& S) {
  return S * matJc(static_cast<int>(S.rows()) / 2);
}
inline Eigen::MatrixXcd S_from_A(const Eigen::MatrixXcd& A) {
  return -A * matJc(static_cast<int>(A.rows()) / 2);
}

inline DiffOp field_X(int n, int j) {
  const int m = 2 * n + 1;
  return DiffOp::partial(m, j) +
         DiffOp::mult_by(Poly::var(m, n + j) * Cx(-0.5)) *
             DiffOp::partial(m, 2 * n);
}

inline DiffOp field_Y(int n, int j) {
  const int m = 2 * n + 1;
  return DiffOp::partial(m, n + j) +
         DiffOp::mult_by(Poly::var(m, j) * Cx(0.5)) *
             DiffOp::partial(m, 2 * n);
}

inline DiffOp field_U(int n) { return DiffOp::partial(2 * n + 1, 2 * n); }

// W_i for i in [0, 2n): first the X fields, then the Y fields.
inline DiffOp field_W(int n, int i) {
  return i < n ? field_X(n, i) : field_Y(n, i - n);
}

inline DiffOp op_quadratic(int n, const Eigen::MatrixXcd& A) {
  if (A.rows() != 2 * n || A.cols() != 2 * n)
    throw std::invalid_argument("op_quadratic: A must be 2n x 2n");
  DiffOp L = DiffOp::zero(2 * n + 1);
  std::vector<DiffOp> W;
  for (int i = 0; i < 2 * n; ++i) W.push_back(field_W(n, i));
  for (int j = 0; j < 2 * n; ++j)
    for (int k = 0; k < 2 * n; ++k) {
      if (A(j, k) == Cx(0.0)) continue;
      L = L + W[j] * W[k] * A(j, k);
    }
  return L;
}

inline DiffOp op_L(int n, const Eigen::MatrixXcd& A, Cx alpha) {
  return op_quadratic(n, A) + field_U(n) * (Cx(0.0, 1.0) * alpha);
}

inline DiffOp op_delta_S(int n, const Eigen::MatrixXcd& S) {
  return op_quadratic(n, A_from_S(S));
}

inline DiffOp op_sublaplacian(int n) {
  return op_quadratic(n, Eigen::MatrixXcd::Identity(2 * n, 2 * n));
}

// Affine substitution data for f -> f(g0 . (z,u)): the group translation is
// affine in the coordinates, with unit Jacobian.
inline void translation_substitution(const GroupPoint& g0,
                                     std::vector<std::vector<Cx>>& N,
                                     std::vector<std::vector<Cx>>& Ninv,
                                     std::vector<Cx>& b) {
  const int n = static_cast<int>(g0.n());
  const int m = 2 * n + 1;
  N.assign(m, std::vector<Cx>(m, Cx(0.0)));
  Ninv.assign(m, std::vector<Cx>(m, Cx(0.0)));
  b.assign(m, Cx(0.0));
  for (int i = 0; i < m; ++i) N[i][i] = Ninv[i][i] = Cx(1.0);
  for (int j = 0; j < n; ++j) {
    // u' = u0 + u + (x0_j y_j - y0_j x_j)/2
    N[2 * n][j] = Cx(-0.5 * g0.y(j));
    N[2 * n][n + j] = Cx(0.5 * g0.x(j));
    Ninv[2 * n][j] = Cx(0.5 * g0.y(j));
    Ninv[2 * n][n + j] = Cx(-0.5 * g0.x(j));
  }
  for (int i = 0; i < 2 * n; ++i) b[i] = Cx(g0.z[i]);
  b[2 * n] = Cx(g0.u);
}

// Linear substitution data for f -> f(T z, u), T a real 2n x 2n matrix
// (symplectic T makes this a group automorphism).
inline void linear_substitution(const Eigen::MatrixXd& T,
                                std::vector<std::vector<Cx>>& N,
                                std::vector<std::vector<Cx>>& Ninv) {
  const int d = static_cast<int>(T.rows());
  const int m = d + 1;
  const Eigen::MatrixXd Ti = T.inverse();
  N.assign(m, std::vector<Cx>(m, Cx(0.0)));
  Ninv.assign(m, std::vector<Cx>(m, Cx(0.0)));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      N[i][j] = Cx(T(i, j));
      Ninv[i][j] = Cx(Ti(i, j));
    }
  N[d][d] = Ninv[d][d] = Cx(1.0);
}

}  // namespace heis
