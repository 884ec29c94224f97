#pragma once
// Shared helpers for the test suites.

#include <Eigen/Dense>
#include <random>

namespace testutil {

inline Eigen::MatrixXd rand_symmetric(std::mt19937& rng, int d,
                                      double amp = 1.0) {
  std::uniform_real_distribution<double> u(-amp, amp);
  Eigen::MatrixXd A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) A(i, j) = A(j, i) = u(rng);
  return A;
}

// Product of elementary symplectic factors, well conditioned by construction.
inline Eigen::MatrixXd rand_symplectic(std::mt19937& rng, int n,
                                       double amp = 0.4) {
  const int d = 2 * n;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd T = Eigen::MatrixXd::Identity(d, d);
  std::uniform_real_distribution<double> u(-amp, amp);
  for (int rep = 0; rep < 2; ++rep) {
    Eigen::MatrixXd B = rand_symmetric(rng, n, amp);
    Eigen::MatrixXd C = rand_symmetric(rng, n, amp);
    Eigen::MatrixXd M = I;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) += u(rng) * 0.5;
    Eigen::MatrixXd F1 = Eigen::MatrixXd::Identity(d, d);
    F1.topRightCorner(n, n) = B;
    Eigen::MatrixXd F2 = Eigen::MatrixXd::Identity(d, d);
    F2.bottomLeftCorner(n, n) = C;
    Eigen::MatrixXd F3 = Eigen::MatrixXd::Zero(d, d);
    F3.topLeftCorner(n, n) = M;
    F3.bottomRightCorner(n, n) = M.inverse().transpose();
    T = T * F1 * F2 * F3;
  }
  return T;
}

}  // namespace testutil
