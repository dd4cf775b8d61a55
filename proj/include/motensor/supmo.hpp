#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "motensor/tensor.hpp"

namespace motensor {

/// Objective of the inner problem at chain point z (z[0] must be 1):
/// (1 + beta) * (sum_i (z_i - z_{i+1})^m + z_n^m) + sum_{i>=2} z_i^m.
/// Even m only; each term is then convex in z.
double g_value(const Eigen::VectorXd& z, double beta, int m);

/// Gradient and tridiagonal Hessian of g in the free coordinates z_2..z_n.
struct GDerivatives {
  Eigen::VectorXd grad;       // size n - 1
  Eigen::VectorXd hess_diag;  // size n - 1
  Eigen::VectorXd hess_off;   // size n - 2, first superdiagonal
};
GDerivatives g_grad_hess(const Eigen::VectorXd& z, double beta, int m);

struct InnerSolveResult {
  int n = 0;
  int m = 0;
  double beta = 0.0;
  double value = 0.0;         // f(beta) = min_z g
  Eigen::VectorXd minimizer;  // full z, leading entry 1
  double grad_norm = 0.0;
  int iterations = 0;
};

class InnerSolveError : public ConvergenceFailure {
 public:
  InnerSolveError(const std::string& what, InnerSolveResult best_so_far)
      : ConvergenceFailure(what), best(std::move(best_so_far)) {}
  InnerSolveResult best;
};

/// Damped-Newton minimization of g over z_2..z_n (z_1 pinned at 1).
/// `warm_start` may have any length; it is truncated or padded by the decay
/// ratio of its tail. Throws InnerSolveError past max_iterations.
InnerSolveResult inner_minimize(int n, int m, double beta, double tol = 1e-10,
                                const Eigen::VectorXd* warm_start = nullptr,
                                int max_iterations = 2000);

struct FixedPointResult {
  double beta = 0.0;
  double f_value = 0.0;       // f(beta)
  Eigen::VectorXd minimizer;  // inner minimizer at the returned beta
  int inner_iterations = 0;   // Newton iterations summed over evaluations
};

struct FixedPointOptions {
  double upper = 1.0;  // bracket cap; also the returned value when f - beta
                       // stays >= -eps on the whole bracket
  double inner_tol = 1e-10;
  const Eigen::VectorXd* warm_start = nullptr;
  int max_bisections = 200;
};

/// Solves f_{n,m}(beta) = beta for beta in [0, upper] by bisection on
/// h(beta) = f(beta) - beta. h(0) > 0 always; when h(upper) >= -eps the cap
/// itself is returned, which keeps the per-stage betas nonincreasing.
FixedPointResult fixed_point_solve(int n, int m, double eps,
                                   const FixedPointOptions& options = {});

/// Convenience wrapper returning just beta.
double fixed_point_beta(int n, int m, double eps);

struct BetaStage {
  int n = 0;
  double beta = 0.0;
  double f_value = 0.0;
  int inner_iterations = 0;
};

struct BetaSolveTrace {
  int m = 0;
  double epsilon = 0.0;
  std::vector<BetaStage> stages;
  double beta_star = 0.0;
  double alpha_star = 0.0;  // 1 + beta_star
  bool converged = false;
};

struct AlphaStarOptions {
  double epsilon = 1e-4;
  double inner_tol = 1e-10;
  std::vector<int> n_schedule = {2, 4, 8, 16, 32, 64, 128, 256, 512};
  // Replace bisection with the halving/averaging update
  // beta <- beta/2 if f < beta - eps, beta <- (beta+1)/2 if f > beta + eps.
  bool literal_update = false;
  int literal_max_steps = 200;
};

/// Doubling-n outer loop. Stops at the first stage whose beta moved less
/// than epsilon from the previous stage while also satisfying
/// |f(beta) - beta| <= epsilon; `converged` is false when the schedule runs
/// out first (the trace still holds every stage computed).
BetaSolveTrace alpha_star(int m, const AlphaStarOptions& options = {});

struct MonotonicityProbe {
  struct Violation {
    int n = 0;
    double beta = 0.0;
    std::string kind;  // "beta-monotone" or "n-monotone"
    double gap = 0.0;
  };
  int m = 0;
  std::vector<int> ns;
  std::vector<double> betas;
  std::vector<std::vector<double>> values;  // values[n_index][beta_index]
  std::vector<Violation> violations;
  double tolerance = 0.0;
};

/// Tabulates f_{n,m} over a beta grid for n = 1..n_max and flags any
/// violation of: nondecreasing in beta at fixed n, nonincreasing in n at
/// fixed beta.
MonotonicityProbe f_monotonicity_probe(int m, std::span<const double> beta_grid,
                                       int n_max, double tol = 1e-9);

Json to_json(const BetaSolveTrace& trace);
std::string to_csv(const BetaSolveTrace& trace);
Json to_json(const MonotonicityProbe& probe);

}  // namespace motensor
