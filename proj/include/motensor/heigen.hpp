#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "motensor/tensor.hpp"

namespace motensor {

/// Candidate H-eigenpair: T x^{m-1} = lambda x^{[m-1]} with ||x||_m = 1.
struct HEigenPair {
  double lambda = 0.0;
  Eigen::VectorXd x;
  double kkt_residual = 0.0;
  int starts_used = 0;
  std::uint64_t seed = 0;
};

/// Infinity norm of T x^{m-1} - lambda * x^{[m-1]}.
double kkt_residual(const RankOneSum& tensor, double lambda,
                    const Eigen::VectorXd& x);

class EstimateError : public ConvergenceFailure {
 public:
  EstimateError(const std::string& what, HEigenPair best_so_far)
      : ConvergenceFailure(what), best(std::move(best_so_far)) {}
  HEigenPair best;
};

struct EstimateOptions {
  int starts = 64;
  std::uint64_t seed = 42;
  double kkt_tol = 1e-8;     // a start counts as converged below this
  int max_iterations = 5000;
  std::vector<Eigen::VectorXd> extra_starts;  // tried before random starts
};

/// Smallest H-eigenvalue estimate: multistart projected descent on
/// T x^m over the unit m-norm sphere, each run polished by a Newton solve
/// of the KKT system. Even order only. Deterministic for a fixed seed.
/// Throws EstimateError when no start reaches kkt_tol.
HEigenPair lambda_min_estimate(const RankOneSum& tensor,
                               const EstimateOptions& options = {});

struct CurveRow {
  int n = 0;
  double lambda_min = 0.0;
  double kkt_residual = 0.0;
  int starts_used = 0;
  Eigen::VectorXd x;
  bool decreased = true;  // strictly below the previous row's lambda_min
};

struct CurveReport {
  int m = 0;
  double alpha = 0.0;
  std::vector<CurveRow> rows;
  bool strictly_decreasing = false;  // lambda_min strictly drops with n
  std::optional<int> failed_at;      // first n whose estimate failed, if any
};

/// lambda_min of mo(n, m, alpha) for n = n_from..n_to. Each stage seeds the
/// next with the previous minimizer (zero-padded) plus, for alpha > 1, the
/// chain witness direction. Stops early at the first estimator failure and
/// records it in failed_at.
CurveReport lambda_min_curve(int m, double alpha, int n_from, int n_to,
                             int starts = 64, std::uint64_t seed = 42);

struct WitnessBound {
  Eigen::VectorXd w;       // consecutive differences of the chain point
  double rayleigh = 0.0;   // mo(alpha) w^m / ||w||_m^m, an upper bound
};

/// Turns an inner-problem chain point z (z_1 = 1) into the witness vector
/// w_i = z_i - z_{i+1}, w_n = z_n and evaluates its Rayleigh quotient
/// against mo(n, m, alpha).
WitnessBound witness_upper_bound(const Eigen::VectorXd& z, int m, double alpha);

/// Smallest eigenvalue of the order-2 member via inverse iteration with the
/// exact integer triangular factor; O(n) per sweep.
double moler_lambda_min(int n);

Json to_json(const CurveReport& report);
std::string to_csv(const CurveReport& report);
Json to_json(const HEigenPair& pair);

}  // namespace motensor
