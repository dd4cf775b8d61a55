#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "motensor/heigen.hpp"
#include "motensor/tensor.hpp"

namespace motensor::oracle {

/// T x^m by brute-force summation over all dim^order index tuples. Slow on
/// purpose: shares no code with the rank-one evaluation path so the two can
/// check each other.
double dense_eval(const DenseSymmetricTensor& tensor, const Eigen::VectorXd& x);

/// (T x^{m-1})_i by the same brute-force loop.
Eigen::VectorXd dense_grad(const DenseSymmetricTensor& tensor,
                           const Eigen::VectorXd& x);

struct PsdScan {
  double min_value = 0.0;
  Eigen::VectorXd argmin;
  long evaluations = 0;
};

/// Minimum of T x^m over the unit m-norm sphere by deterministic angular
/// grids (dim <= 3) plus seeded random directions. Even order only. A
/// negative min_value disproves positive semidefiniteness; a nonnegative
/// one is only evidence.
PsdScan psd_scan(const DenseSymmetricTensor& tensor, int samples = 4096,
                 std::uint64_t seed = 42, int grid = 256);

struct ScanReport {
  std::vector<HEigenPair> pairs;   // sorted by lambda
  int grid_size = 0;
  bool continuum = false;           // residual vanished on most of the grid
  bool resolution_warning = false;  // adjacent sign changes: grid too coarse
};

/// All H-eigenpairs of a dim-2 even-order tensor by a sign-change scan of
/// r(t) = (T x^{m-1})_2 - t^{m-1} (T x^{m-1})_1 at x = (1, t), plus the
/// reciprocal parametrization x = (s, 1) covering |t| >= 1 and the vertical
/// direction. Roots are bisected to machine precision.
ScanReport h_eigen_scan_2d(const DenseSymmetricTensor& tensor,
                           int grid_size = 4096, double t_range = 50.0);

Json to_json(const PsdScan& scan);
Json to_json(const ScanReport& report);

}  // namespace motensor::oracle
