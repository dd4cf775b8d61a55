#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "motensor/errors.hpp"
#include "motensor/family.hpp"
#include "motensor/rng.hpp"
#include "motensor/supmo.hpp"

using namespace motensor;

namespace {

Eigen::VectorXd chain_point(std::initializer_list<double> entries) {
  Eigen::VectorXd z(static_cast<int>(entries.size()));
  int i = 0;
  for (double v : entries) z[i++] = v;
  return z;
}

// Random feasible point: leading one, tail drawn near the typical decay.
Eigen::VectorXd random_chain(int n, SplitMix64& gen, double scale = 0.4) {
  Eigen::VectorXd z(n);
  z[0] = 1.0;
  for (int i = 1; i < n; ++i) z[i] = scale * gen.gaussian();
  return z;
}

double closed_form_beta(int m) { return 1.0 / (std::pow(2.0, m - 1) - 1.0); }

}  // namespace

TEST_CASE("g_value anchors") {
  for (int m : {4, 6, 8}) {
    CHECK(g_value(chain_point({1.0, 0.5, 0.0}), 1.0, m) ==
          doctest::Approx(5.0 / std::pow(2.0, m)).epsilon(1e-13));
    CHECK(g_value(chain_point({1.0, 0.5, 0.0, 0.0, 0.0}), 1.0, m) ==
          doctest::Approx(5.0 / std::pow(2.0, m)).epsilon(1e-13));
  }
  for (double beta : {0.0, 0.25, 1.0, 3.5}) {
    // x = e_1 leaves only the leading chain term.
    CHECK(g_value(chain_point({1.0, 0.0, 0.0, 0.0}), beta, 4) == 1.0 + beta);
    CHECK(g_value(chain_point({1.0}), beta, 6) == 1.0 + beta);
  }
  CHECK(g_value(chain_point({1.0, 1.0, 1.0}), 0.0, 4) == doctest::Approx(3.0));
  // Negative tail entries are fine for even m.
  CHECK(g_value(chain_point({1.0, -1.0}), 0.0, 2) == doctest::Approx(6.0));
}

TEST_CASE("g_value input validation") {
  CHECK_THROWS_AS(g_value(chain_point({0.5, 0.2}), 0.1, 4), InvalidInput);
  CHECK_THROWS_AS(g_value(chain_point({1.0, 0.2}), 0.1, 3), InvalidInput);
  CHECK_THROWS_AS(g_value(chain_point({1.0, 0.2}), 0.1, 0), InvalidInput);
  CHECK_THROWS_AS(g_value(chain_point({1.0, 0.2}), -1.0, 4), InvalidInput);
  CHECK_THROWS_AS(g_value(Eigen::VectorXd(), 0.1, 4), InvalidInput);
}

TEST_CASE("g_grad_hess matches central finite differences") {
  SplitMix64 gen(2024);
  const double h = 1e-6;
  for (int m : {2, 4, 6}) {
    for (double beta : {0.0, 0.7}) {
      Eigen::VectorXd z = random_chain(6, gen);
      GDerivatives d = g_grad_hess(z, beta, m);
      REQUIRE(d.grad.size() == 5);
      REQUIRE(d.hess_diag.size() == 5);
      REQUIRE(d.hess_off.size() == 4);

      for (int i = 1; i < 6; ++i) {
        Eigen::VectorXd zp = z, zm = z;
        zp[i] += h;
        zm[i] -= h;
        double fd = (g_value(zp, beta, m) - g_value(zm, beta, m)) / (2.0 * h);
        CHECK(d.grad[i - 1] ==
              doctest::Approx(fd).epsilon(1e-5).scale(1.0 + std::abs(fd)));
      }

      // Hessian columns via differences of the gradient; entries more than
      // one off the diagonal must vanish.
      for (int j = 1; j < 6; ++j) {
        Eigen::VectorXd zp = z, zm = z;
        zp[j] += h;
        zm[j] -= h;
        Eigen::VectorXd col = (g_grad_hess(zp, beta, m).grad -
                               g_grad_hess(zm, beta, m).grad) /
                              (2.0 * h);
        for (int i = 1; i < 6; ++i) {
          double exact = 0.0;
          if (i == j) exact = d.hess_diag[i - 1];
          if (i + 1 == j) exact = d.hess_off[i - 1];
          if (i == j + 1) exact = d.hess_off[j - 1];
          CHECK(col[i - 1] ==
                doctest::Approx(exact).epsilon(2e-4).scale(
                    1.0 + std::abs(exact)));
        }
      }
    }
  }
}

TEST_CASE("inner_minimize closed forms at m = 2") {
  for (double beta : {0.0, 0.3, 1.0, 2.0}) {
    InnerSolveResult r = inner_minimize(1, 4, beta);
    CHECK(r.value == 1.0 + beta);
    CHECK(r.minimizer.size() == 1);
    CHECK(r.minimizer[0] == 1.0);
  }

  InnerSolveResult two = inner_minimize(2, 2, 1.0);
  CHECK(two.value == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(two.minimizer[1] == doctest::Approx(0.4).epsilon(1e-10));
  CHECK(two.grad_norm <= 1e-10);

  // Quadratic case with a rational solution: f = 86/85 at (42, 20, 8)/85.
  InnerSolveResult four = inner_minimize(4, 2, 1.0);
  CHECK(four.value == doctest::Approx(86.0 / 85.0).epsilon(1e-12));
  CHECK(four.minimizer[1] == doctest::Approx(42.0 / 85.0).epsilon(1e-9));
  CHECK(four.minimizer[2] == doctest::Approx(20.0 / 85.0).epsilon(1e-9));
  CHECK(four.minimizer[3] == doctest::Approx(8.0 / 85.0).epsilon(1e-9));
}

TEST_CASE("inner_minimize quartic anchor") {
  InnerSolveResult r = inner_minimize(2, 4, 1.0);
  CHECK(r.value == doctest::Approx(0.304097568188).epsilon(1e-9));
  CHECK(r.value < 5.0 / 16.0);  // beats the z_2 = 1/2 feasible point
  CHECK(r.grad_norm <= 1e-10);

  // Local optimality: nudging the free coordinate only increases g.
  for (double d : {1e-4, -1e-4}) {
    Eigen::VectorXd z = r.minimizer;
    z[1] += d;
    CHECK(g_value(z, 1.0, 4) > r.value);
  }
}

TEST_CASE("inner_minimize warm starts and validation") {
  InnerSolveResult coarse = inner_minimize(4, 4, 0.1);
  InnerSolveResult cold = inner_minimize(8, 4, 0.1);
  InnerSolveResult warm = inner_minimize(8, 4, 0.1, 1e-10, &coarse.minimizer);
  CHECK(warm.value == doctest::Approx(cold.value).epsilon(1e-11));
  CHECK(warm.minimizer.size() == 8);

  // Longer warm starts get truncated.
  InnerSolveResult shrunk = inner_minimize(3, 4, 0.1, 1e-10, &cold.minimizer);
  CHECK(shrunk.value ==
        doctest::Approx(inner_minimize(3, 4, 0.1).value).epsilon(1e-11));

  CHECK_THROWS_AS(inner_minimize(0, 4, 0.1), InvalidInput);
  CHECK_THROWS_AS(inner_minimize(3, 5, 0.1), InvalidInput);
  CHECK_THROWS_AS(inner_minimize(3, 4, -1.0), InvalidInput);
}

TEST_CASE("inner_minimize reports the best iterate on failure") {
  bool threw = false;
  try {
    inner_minimize(6, 4, 0.14, 1e-10, nullptr, 1);
  } catch (const InnerSolveError& e) {
    threw = true;
    CHECK(e.best.n == 6);
    CHECK(e.best.m == 4);
    CHECK(e.best.minimizer.size() == 6);
    CHECK(e.best.minimizer[0] == 1.0);
    CHECK(e.best.grad_norm > 1e-10);
    CHECK(std::isfinite(e.best.value));
  }
  CHECK(threw);
}

TEST_CASE("fixed_point_solve brackets and clamps") {
  // n = 1: f(beta) = 1 + beta > beta everywhere, so the cap comes back.
  FixedPointResult one = fixed_point_solve(1, 4, 1e-10);
  CHECK(one.beta == 1.0);
  CHECK(one.f_value == 2.0);

  // m = 2: f stays above 1 at every n, same clamp.
  FixedPointResult quad = fixed_point_solve(4, 2, 1e-8);
  CHECK(quad.beta == 1.0);
  CHECK(quad.f_value >= 1.0);

  // A cap below the crossing point is returned untouched.
  FixedPointOptions opts;
  opts.upper = 0.05;
  FixedPointResult capped = fixed_point_solve(16, 4, 1e-9, opts);
  CHECK(capped.beta == 0.05);

  // Interior root: close to 1/7 already at n = 16.
  FixedPointResult root = fixed_point_solve(16, 4, 1e-9);
  CHECK(std::abs(root.f_value - root.beta) <= 1e-9);
  CHECK(root.beta == doctest::Approx(1.0 / 7.0).epsilon(1e-7));
  CHECK(root.minimizer.size() == 16);
  CHECK(root.inner_iterations > 0);
}

TEST_CASE("fixed points approach the closed form 1/(2^(m-1)-1)") {
  for (int m : {4, 6, 8}) {
    double beta = fixed_point_beta(64, m, 1e-9);
    CHECK(beta == doctest::Approx(closed_form_beta(m)).epsilon(5e-8));
  }
}

TEST_CASE("alpha_star reproduces the known values") {
  struct Known {
    int m;
    double alpha;
  };
  for (Known k : {Known{4, 1.1429}, Known{6, 1.0323}, Known{8, 1.0079}}) {
    BetaSolveTrace trace = alpha_star(k.m);
    CHECK(trace.converged);
    CHECK(trace.m == k.m);
    CHECK(std::abs(trace.alpha_star - k.alpha) <= 2e-3);
    CHECK(trace.alpha_star == 1.0 + trace.beta_star);
    REQUIRE(!trace.stages.empty());
    CHECK(trace.beta_star == trace.stages.back().beta);
    for (std::size_t i = 1; i < trace.stages.size(); ++i) {
      CHECK(trace.stages[i].beta <= trace.stages[i - 1].beta + 1e-12);
      CHECK(trace.stages[i].n > trace.stages[i - 1].n);
    }
    const BetaStage& last = trace.stages.back();
    CHECK(std::abs(last.f_value - last.beta) <= trace.epsilon);
  }
}

TEST_CASE("alpha_star order-2 boundary sticks to the cap") {
  BetaSolveTrace trace = alpha_star(2);
  CHECK(trace.converged);
  CHECK(trace.alpha_star == 2.0);
  CHECK(trace.beta_star == 1.0);
  REQUIRE(trace.stages.size() >= 2);
  for (const BetaStage& s : trace.stages) {
    CHECK(s.beta == 1.0);
    CHECK(s.f_value >= 1.0);
  }
}

TEST_CASE("alpha_star input validation") {
  CHECK_THROWS_AS(alpha_star(3), InvalidInput);
  CHECK_THROWS_AS(alpha_star(1), InvalidInput);
  CHECK_THROWS_AS(alpha_star(0), InvalidInput);
}

TEST_CASE("alpha_star literal update agrees with bisection") {
  AlphaStarOptions literal;
  literal.literal_update = true;
  BetaSolveTrace lit = alpha_star(4, literal);
  BetaSolveTrace bis = alpha_star(4);
  CHECK(lit.converged);
  CHECK(std::abs(lit.alpha_star - bis.alpha_star) <= 3e-4);

  BetaSolveTrace quad = alpha_star(2, literal);
  CHECK(quad.alpha_star == 2.0);
}

TEST_CASE("alpha_star reports an exhausted schedule honestly") {
  AlphaStarOptions opts;
  opts.epsilon = 1e-12;
  opts.n_schedule = {2, 4};
  BetaSolveTrace trace = alpha_star(4, opts);
  CHECK(!trace.converged);
  CHECK(trace.stages.size() == 2);
  CHECK(trace.beta_star == trace.stages.back().beta);
}

TEST_CASE("f is monotone in beta and in n") {
  std::vector<double> grid = {0.0, 0.05, 0.1, 0.14, 0.2, 1.0};
  MonotonicityProbe probe = f_monotonicity_probe(4, grid, 8);
  CHECK(probe.violations.empty());
  REQUIRE(probe.values.size() == 8);
  REQUIRE(probe.values[0].size() == grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CHECK(probe.values[0][j] == doctest::Approx(1.0 + grid[j]).epsilon(1e-14));
  }
}

TEST_CASE("g is midpoint convex along random segments") {
  SplitMix64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd za = random_chain(5, gen, 0.8);
    Eigen::VectorXd zb = random_chain(5, gen, 0.8);
    Eigen::VectorXd mid = 0.5 * (za + zb);
    double lhs = g_value(mid, 0.3, 4);
    double rhs = 0.5 * (g_value(za, 0.3, 4) + g_value(zb, 0.3, 4));
    CHECK(lhs <= rhs + 1e-10);
  }
}

TEST_CASE("chain substitution identity ties g to the structured form") {
  // For x with nonzero total sum s and suffix sums z_i = sum_{j>=i} x_j / s,
  // the tensor value factors as mo(n, m, 1 + beta) x^m = s^m (g(z) - beta).
  SplitMix64 gen(99);
  int checked = 0;
  for (int n : {2, 3, 5}) {
    for (int m : {4, 6}) {
      for (double beta : {0.1, 1.0 / 7.0}) {
        RankOneSum tensor = mo_tensor(n, m, 1.0 + beta);
        for (int trial = 0; trial < 12; ++trial) {
          Eigen::VectorXd x(n);
          for (int i = 0; i < n; ++i) x[i] = gen.gaussian();
          double s = x.sum();
          if (std::abs(s) < 0.3) continue;
          Eigen::VectorXd z(n);
          double suffix = 0.0;
          for (int i = n - 1; i >= 0; --i) {
            suffix += x[i];
            z[i] = suffix / s;
          }
          z[0] = 1.0;
          double lhs = eval_poly(tensor, x);
          double rhs = std::pow(s, m) * (g_value(z, beta, m) - beta);
          CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9).scale(
                           1.0 + std::abs(rhs)));
          ++checked;
        }
      }
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("f respects its elementary bounds") {
  for (int n : {2, 5, 9}) {
    for (double beta : {0.0, 0.2, 1.0}) {
      double f = inner_minimize(n, 4, beta).value;
      CHECK(f > 0.0);
      CHECK(f <= 1.0 + beta);  // z = e_1 is feasible
    }
  }
  // z = (1, 1/2, 0, ...) caps f(1) at 5/2^m once n >= 2.
  for (int m : {4, 6, 8}) {
    for (int n : {3, 8}) {
      CHECK(inner_minimize(n, m, 1.0).value <=
            5.0 / std::pow(2.0, m) + 1e-12);
    }
  }
}

TEST_CASE("larger even m only lowers the objective on decaying chains") {
  InnerSolveResult quartic = inner_minimize(8, 4, 0.1);
  CHECK(g_value(quartic.minimizer, 0.1, 6) <=
        g_value(quartic.minimizer, 0.1, 4) + 1e-12);
  CHECK(inner_minimize(8, 6, 0.1).value <= quartic.value);
  CHECK(alpha_star(6).alpha_star < alpha_star(4).alpha_star);
}

TEST_CASE("trace serialization") {
  BetaSolveTrace trace = alpha_star(4);
  std::string csv = to_csv(trace);
  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "n,beta_n,f_value");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == trace.stages.size());

  Json j = to_json(trace);
  CHECK(j["m"] == 4);
  CHECK(j["converged"] == true);
  CHECK(j["stages"].size() == trace.stages.size());
  CHECK(j["alpha_star"].get<double>() == trace.alpha_star);
  CHECK(j["stages"][0].contains("n"));
  CHECK(j["stages"][0].contains("beta"));
  CHECK(j["stages"][0].contains("f_value"));
}
