#include "motensor/supmo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace motensor {

namespace {

void check_inner_args(int n, int m, double beta) {
  if (n < 1) throw InvalidInput("inner problem: n must be >= 1");
  if (m < 2 || m % 2 != 0) {
    throw InvalidInput("inner problem: order must be even and >= 2");
  }
  if (!(beta > -1.0)) {
    throw InvalidInput("inner problem: beta must exceed -1");
  }
}

// Solve the symmetric tridiagonal system (diag, off) x = rhs in place.
Eigen::VectorXd solve_tridiagonal(Eigen::VectorXd diag, const Eigen::VectorXd& off,
                                  Eigen::VectorXd rhs) {
  Eigen::Index k = diag.size();
  for (Eigen::Index i = 1; i < k; ++i) {
    double w = off[i - 1] / diag[i - 1];
    diag[i] -= w * off[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  Eigen::VectorXd x(k);
  x[k - 1] = rhs[k - 1] / diag[k - 1];
  for (Eigen::Index i = k - 2; i >= 0; --i) {
    x[i] = (rhs[i] - off[i] * x[i + 1]) / diag[i];
  }
  return x;
}

// Initial chain: geometric halving, the shape of the large-n minimizer.
Eigen::VectorXd default_start(int n) {
  Eigen::VectorXd z(n);
  double v = 1.0;
  for (int i = 0; i < n; ++i) {
    z[i] = v;
    v *= 0.5;
  }
  return z;
}

// Fit a warm start of any length to size n: truncate, or extend by the decay
// ratio of its last two entries (clamped to [0, 0.95]).
Eigen::VectorXd fit_warm_start(const Eigen::VectorXd& warm, int n) {
  Eigen::VectorXd z(n);
  Eigen::Index have = warm.size();
  for (int i = 0; i < n && i < have; ++i) z[i] = warm[i];
  if (have < n) {
    double ratio = 0.5;
    if (have >= 2 && std::abs(warm[have - 2]) > 1e-300) {
      ratio = std::clamp(warm[have - 1] / warm[have - 2], 0.0, 0.95);
    }
    double v = have > 0 ? warm[have - 1] : 1.0;
    for (Eigen::Index i = have; i < n; ++i) {
      v *= ratio;
      z[i] = v;
    }
  }
  z[0] = 1.0;
  return z;
}

}  // namespace

double g_value(const Eigen::VectorXd& z, double beta, int m) {
  check_inner_args(static_cast<int>(z.size()), m, beta);
  if (z.size() < 1 || z[0] != 1.0) {
    throw InvalidInput("g_value: leading chain entry must be 1");
  }
  int n = static_cast<int>(z.size());
  double chain = 0.0;
  for (int i = 0; i + 1 < n; ++i) chain += pow_int(z[i] - z[i + 1], m);
  chain += pow_int(z[n - 1], m);
  double penalty = 0.0;
  for (int i = 1; i < n; ++i) penalty += pow_int(z[i], m);
  return (1.0 + beta) * chain + penalty;
}

GDerivatives g_grad_hess(const Eigen::VectorXd& z, double beta, int m) {
  check_inner_args(static_cast<int>(z.size()), m, beta);
  if (z[0] != 1.0) throw InvalidInput("g_grad_hess: leading chain entry must be 1");
  int n = static_cast<int>(z.size());
  int k = n - 1;
  GDerivatives d;
  d.grad = Eigen::VectorXd::Zero(k);
  d.hess_diag = Eigen::VectorXd::Zero(k);
  d.hess_off = Eigen::VectorXd::Zero(std::max(k - 1, 0));
  double c = 1.0 + beta;
  double md = static_cast<double>(m);
  double mdd = md * static_cast<double>(m - 1);
  for (int j = 1; j < n; ++j) {
    double gj = -c * md * pow_int(z[j - 1] - z[j], m - 1);
    double hj = c * mdd * pow_int(z[j - 1] - z[j], m - 2);
    if (j <= n - 2) {
      gj += c * md * pow_int(z[j] - z[j + 1], m - 1);
      hj += c * mdd * pow_int(z[j] - z[j + 1], m - 2);
      d.hess_off[j - 1] = -c * mdd * pow_int(z[j] - z[j + 1], m - 2);
    } else {
      gj += c * md * pow_int(z[j], m - 1);
      hj += c * mdd * pow_int(z[j], m - 2);
    }
    gj += md * pow_int(z[j], m - 1);
    hj += mdd * pow_int(z[j], m - 2);
    d.grad[j - 1] = gj;
    d.hess_diag[j - 1] = hj;
  }
  return d;
}

InnerSolveResult inner_minimize(int n, int m, double beta, double tol,
                                const Eigen::VectorXd* warm_start,
                                int max_iterations) {
  check_inner_args(n, m, beta);
  InnerSolveResult res;
  res.n = n;
  res.m = m;
  res.beta = beta;
  if (n == 1) {
    res.value = 1.0 + beta;
    res.minimizer = Eigen::VectorXd::Ones(1);
    return res;
  }

  Eigen::VectorXd z =
      warm_start ? fit_warm_start(*warm_start, n) : default_start(n);
  int it = 0;
  double blind_prev = std::numeric_limits<double>::infinity();
  for (it = 1; it <= max_iterations; ++it) {
    GDerivatives d = g_grad_hess(z, beta, m);
    double gnorm = d.grad.norm();
    if (gnorm <= tol) break;

    double mu = std::max({tol * gnorm, 1e-14 * d.hess_diag.maxCoeff(), 1e-300});
    Eigen::VectorXd damped = d.hess_diag.array() + mu;
    Eigen::VectorXd step = solve_tridiagonal(damped, d.hess_off, -d.grad);

    double f0 = g_value(z, beta, m);
    double decrease = std::abs(d.grad.dot(step));
    double f_resolution =
        8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f0));
    // s solves (H + mu I) s = -g, so the quadratic model change is already
    // bounded by `decrease`; the radius only has to keep the terms beyond
    // the quadratic model under the resolution of f. Near-flat coordinates
    // can carry steps up to that radius without any observable effect.
    double blind_radius =
        std::max(std::pow(f_resolution / (3.0 * n * (1.0 + beta)), 1.0 / m),
                 1e-5 * (1.0 + z.lpNorm<Eigen::Infinity>()));
    if (decrease <= f_resolution &&
        step.lpNorm<Eigen::Infinity>() <= blind_radius) {
      // The predicted decrease is below the resolution of f, so a line
      // search cannot tell progress from rounding noise. Trust the damped
      // Newton step while the gradient keeps contracting.
      if (gnorm >= 0.5 * blind_prev) break;
      blind_prev = gnorm;
      z.tail(n - 1) += step;
      continue;
    }

    bool moved = false;
    double t = 1.0;
    for (int ls = 0; ls < 60; ++ls) {
      Eigen::VectorXd zt = z;
      zt.tail(n - 1) += t * step;
      if (g_value(zt, beta, m) < f0 - 1e-4 * t * decrease) {
        z = std::move(zt);
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) {
      // Newton step rejected; fall back to plain gradient descent.
      t = 1.0;
      for (int ls = 0; ls < 80; ++ls) {
        Eigen::VectorXd zt = z;
        zt.tail(n - 1) -= t * d.grad;
        if (g_value(zt, beta, m) < f0) {
          z = std::move(zt);
          moved = true;
          break;
        }
        t *= 0.5;
      }
    }
    // No representable decrease left: the iterate is at the numerical floor.
    if (!moved) break;
  }

  res.value = g_value(z, beta, m);
  res.minimizer = z;
  res.grad_norm = g_grad_hess(z, beta, m).grad.norm();
  res.iterations = std::min(it, max_iterations);
  if (res.grad_norm > tol) {
    throw InnerSolveError("inner_minimize: gradient tolerance not reached", res);
  }
  return res;
}

FixedPointResult fixed_point_solve(int n, int m, double eps,
                                   const FixedPointOptions& options) {
  check_inner_args(n, m, 0.0);
  if (!(eps > 0.0)) throw InvalidInput("fixed_point_solve: eps must be positive");
  if (!(options.upper > 0.0)) {
    throw InvalidInput("fixed_point_solve: upper bracket must be positive");
  }

  FixedPointResult out;
  Eigen::VectorXd warm =
      options.warm_start ? *options.warm_start : Eigen::VectorXd();
  auto eval_h = [&](double b) {
    InnerSolveResult r = inner_minimize(n, m, b, options.inner_tol,
                                        warm.size() > 0 ? &warm : nullptr);
    warm = r.minimizer;
    out.inner_iterations += r.iterations;
    return r;
  };

  double hi = options.upper;
  InnerSolveResult at_hi = eval_h(hi);
  if (at_hi.value - hi >= -eps) {
    // No sign change inside the bracket: the cap is the answer (this is the
    // m = 2 boundary and the n = 1 degenerate case).
    out.beta = hi;
    out.f_value = at_hi.value;
    out.minimizer = at_hi.minimizer;
    return out;
  }

  double lo = 0.0;  // h(0) = f(0) > 0 for the chain objective
  double mid = hi;
  InnerSolveResult at_mid = at_hi;
  for (int i = 0; i < options.max_bisections; ++i) {
    mid = 0.5 * (lo + hi);
    at_mid = eval_h(mid);
    double hm = at_mid.value - mid;
    if (std::abs(hm) <= eps) break;
    if (hm > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.beta = mid;
  out.f_value = at_mid.value;
  out.minimizer = at_mid.minimizer;
  return out;
}

double fixed_point_beta(int n, int m, double eps) {
  return fixed_point_solve(n, m, eps).beta;
}

namespace {

// Halving/averaging beta update retained for comparison runs. Returns the
// iterate with the smallest |f - beta| when the step cap is reached.
FixedPointResult literal_stage(int n, int m, double eps,
                               const AlphaStarOptions& options, double start,
                               const Eigen::VectorXd* warm_start) {
  FixedPointResult out;
  Eigen::VectorXd warm = warm_start ? *warm_start : Eigen::VectorXd();
  double beta = start;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int step = 0; step < options.literal_max_steps; ++step) {
    InnerSolveResult r = inner_minimize(n, m, beta, options.inner_tol,
                                        warm.size() > 0 ? &warm : nullptr);
    warm = r.minimizer;
    out.inner_iterations += r.iterations;
    double h = r.value - beta;
    if (std::abs(h) < best_gap) {
      best_gap = std::abs(h);
      out.beta = beta;
      out.f_value = r.value;
      out.minimizer = r.minimizer;
    }
    if (std::abs(h) <= eps) break;
    beta = h < 0.0 ? 0.5 * beta : 0.5 * (beta + 1.0);
    beta = std::min(beta, 1.0);
  }
  return out;
}

}  // namespace

BetaSolveTrace alpha_star(int m, const AlphaStarOptions& options) {
  if (m < 2 || m % 2 != 0) {
    throw InvalidInput("alpha_star: order must be even and >= 2");
  }
  if (!(options.epsilon > 0.0)) {
    throw InvalidInput("alpha_star: epsilon must be positive");
  }
  if (options.n_schedule.empty()) {
    throw InvalidInput("alpha_star: empty n schedule");
  }

  BetaSolveTrace trace;
  trace.m = m;
  trace.epsilon = options.epsilon;

  double prev_beta = 1.0;
  bool have_prev = false;
  Eigen::VectorXd warm;
  for (int n : options.n_schedule) {
    FixedPointResult r;
    if (options.literal_update) {
      r = literal_stage(n, m, options.epsilon, options, prev_beta,
                        warm.size() > 0 ? &warm : nullptr);
    } else {
      FixedPointOptions fp;
      fp.upper = prev_beta;
      fp.inner_tol = options.inner_tol;
      fp.warm_start = warm.size() > 0 ? &warm : nullptr;
      r = fixed_point_solve(n, m, options.epsilon, fp);
    }
    warm = r.minimizer;
    trace.stages.push_back({n, r.beta, r.f_value, r.inner_iterations});
    if (have_prev && std::abs(r.beta - prev_beta) < options.epsilon &&
        std::abs(r.f_value - r.beta) <= options.epsilon) {
      trace.converged = true;
      prev_beta = r.beta;
      break;
    }
    prev_beta = r.beta;
    have_prev = true;
  }
  trace.beta_star = prev_beta;
  trace.alpha_star = 1.0 + prev_beta;
  return trace;
}

MonotonicityProbe f_monotonicity_probe(int m, std::span<const double> beta_grid,
                                       int n_max, double tol) {
  if (n_max < 1) throw InvalidInput("f_monotonicity_probe: n_max must be >= 1");
  MonotonicityProbe probe;
  probe.m = m;
  probe.tolerance = tol;
  probe.betas.assign(beta_grid.begin(), beta_grid.end());
  for (int n = 1; n <= n_max; ++n) probe.ns.push_back(n);

  for (int n : probe.ns) {
    std::vector<double> row;
    Eigen::VectorXd warm;
    for (double beta : probe.betas) {
      InnerSolveResult r = inner_minimize(n, m, beta, 1e-12,
                                          warm.size() > 0 ? &warm : nullptr);
      warm = r.minimizer;
      row.push_back(r.value);
    }
    probe.values.push_back(std::move(row));
  }

  for (std::size_t ni = 0; ni < probe.ns.size(); ++ni) {
    for (std::size_t bi = 0; bi + 1 < probe.betas.size(); ++bi) {
      if (probe.values[ni][bi + 1] < probe.values[ni][bi] - tol) {
        probe.violations.push_back({probe.ns[ni], probe.betas[bi + 1],
                                    "beta-monotone",
                                    probe.values[ni][bi] - probe.values[ni][bi + 1]});
      }
    }
  }
  for (std::size_t ni = 0; ni + 1 < probe.ns.size(); ++ni) {
    for (std::size_t bi = 0; bi < probe.betas.size(); ++bi) {
      if (probe.values[ni + 1][bi] > probe.values[ni][bi] + tol) {
        probe.violations.push_back({probe.ns[ni + 1], probe.betas[bi],
                                    "n-monotone",
                                    probe.values[ni + 1][bi] - probe.values[ni][bi]});
      }
    }
  }
  return probe;
}

Json to_json(const BetaSolveTrace& trace) {
  Json j;
  j["m"] = trace.m;
  j["epsilon"] = trace.epsilon;
  j["alpha_star"] = trace.alpha_star;
  j["beta_star"] = trace.beta_star;
  j["converged"] = trace.converged;
  Json stages = Json::array();
  for (const auto& s : trace.stages) {
    Json row;
    row["n"] = s.n;
    row["beta"] = s.beta;
    row["f_value"] = s.f_value;
    row["inner_iterations"] = s.inner_iterations;
    stages.push_back(std::move(row));
  }
  j["stages"] = std::move(stages);
  return j;
}

std::string to_csv(const BetaSolveTrace& trace) {
  std::string out = "n,beta_n,f_value\n";
  char buf[128];
  for (const auto& s : trace.stages) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", s.n, s.beta, s.f_value);
    out += buf;
  }
  return out;
}

Json to_json(const MonotonicityProbe& probe) {
  Json j;
  j["m"] = probe.m;
  j["tolerance"] = probe.tolerance;
  j["ns"] = probe.ns;
  j["betas"] = probe.betas;
  j["values"] = probe.values;
  Json v = Json::array();
  for (const auto& viol : probe.violations) {
    Json row;
    row["n"] = viol.n;
    row["beta"] = viol.beta;
    row["kind"] = viol.kind;
    row["gap"] = viol.gap;
    v.push_back(std::move(row));
  }
  j["violations"] = std::move(v);
  return j;
}

}  // namespace motensor
