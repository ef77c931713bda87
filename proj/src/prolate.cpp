#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "siqrng/uncertainty.hpp"

namespace siqrng {

namespace {

// Even-index part of the prolate operator -d/dx (1-x^2) d/dx + c^2 x^2 in the
// orthonormal Legendre basis sqrt(k+1/2) P_k. Row j corresponds to k = 2j.
Eigen::MatrixXd even_prolate_matrix(double c, int size) {
  const double c2 = c * c;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
  for (int j = 0; j < size; ++j) {
    const double k = 2.0 * j;
    a(j, j) = k * (k + 1.0) + c2 * (2.0 * k * k + 2.0 * k - 1.0) / ((2.0 * k - 1.0) * (2.0 * k + 3.0));
    if (j + 1 < size) {
      const double off =
          c2 * (k + 1.0) * (k + 2.0) / ((2.0 * k + 3.0) * std::sqrt((2.0 * k + 1.0) * (2.0 * k + 5.0)));
      a(j, j + 1) = off;
      a(j + 1, j) = off;
    }
  }
  return a;
}

}  // namespace

double prolate_concentration(double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("prolate bandwidth must be positive and finite");
  }
  // Coefficients decay super-exponentially once 2j exceeds ~c.
  const int size = 24 + static_cast<int>(std::ceil(bandwidth));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(even_prolate_matrix(bandwidth, size));
  if (solver.info() != Eigen::Success) throw std::runtime_error("prolate eigen-solve failed");
  const Eigen::VectorXd beta = solver.eigenvectors().col(0);

  // psi_0(0) from P_{2j}(0) = (-1)^j (2j)! / (4^j (j!)^2).
  double p_at_zero = 1.0;
  double psi0 = 0.0;
  for (int j = 0; j < size; ++j) {
    if (j > 0) p_at_zero *= -(2.0 * j - 1.0) / (2.0 * j);
    psi0 += beta(j) * std::sqrt(2.0 * j + 0.5) * p_at_zero;
  }
  // int_{-1}^{1} e^{icxt} psi_0(t) dt = mu psi_0(x); at x = 0 only the P_0 term integrates.
  const double mu = std::numbers::sqrt2 * beta(0) / psi0;
  return bandwidth / (2.0 * std::numbers::pi) * mu * mu;
}

double prolate_radial_at_one(double bandwidth) {
  return std::sqrt(std::numbers::pi * prolate_concentration(bandwidth) / (2.0 * bandwidth));
}

}  // namespace siqrng
