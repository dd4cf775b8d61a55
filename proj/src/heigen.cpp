#include "motensor/heigen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "motensor/family.hpp"
#include "motensor/rng.hpp"
#include "motensor/supmo.hpp"

namespace motensor {

namespace {

void check_even_order(const RankOneSum& tensor) {
  tensor.validate();
  if (tensor.order % 2 != 0) {
    throw InvalidInput("H-eigenvalue estimation needs even order");
  }
}

// Signed entrywise power x^{[e]} with odd or even e.
Eigen::VectorXd signed_pow(const Eigen::VectorXd& x, int e) {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = pow_int(x[i], e);
  return out;
}

Eigen::VectorXd normalize_m(const Eigen::VectorXd& x, int m) {
  double nn = m_norm(x, m);
  if (!(nn > 0.0) || !std::isfinite(nn)) {
    throw InvalidInput("cannot normalize a zero or non-finite vector");
  }
  return x / nn;
}

// Canonical sign: the largest-magnitude component (first such index on
// exact ties) is made positive.
void sign_fix(Eigen::VectorXd& x) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (std::abs(x[i]) > best) {
      best = std::abs(x[i]);
      arg = i;
    }
  }
  if (x[arg] < 0.0) x = -x;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

struct RunResult {
  double lambda = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x;
  double residual = std::numeric_limits<double>::infinity();
};

// Newton polish of the KKT system
//   T x^{m-1} - lambda x^{[m-1]} = 0,  (sum x_i^m - 1)/m = 0.
RunResult kkt_refine(const RankOneSum& tensor, Eigen::VectorXd x, double lambda,
                     int max_steps) {
  int n = tensor.dim;
  int m = tensor.order;
  RunResult best;
  auto record = [&](const Eigen::VectorXd& xc, double lc) {
    double r = kkt_residual(tensor, lc, xc);
    if (r < best.residual) {
      best = {lc, xc, r};
    }
    return r;
  };
  record(x, lambda);

  for (int step = 0; step < max_steps; ++step) {
    Eigen::VectorXd grad_half = eval_grad(tensor, x);
    Eigen::VectorXd xm1 = signed_pow(x, m - 1);
    Eigen::VectorXd f_top = grad_half - lambda * xm1;
    double f_bot = (signed_pow(x, m).sum() - 1.0) / static_cast<double>(m);

    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (const auto& term : tensor.terms) {
      double c = term.weight * static_cast<double>(m - 1) *
                 pow_int(term.vector.dot(x), m - 2);
      jac.topLeftCorner(n, n).noalias() += c * term.vector * term.vector.transpose();
    }
    Eigen::VectorXd xm2 = signed_pow(x, m - 2);
    for (int i = 0; i < n; ++i) {
      jac(i, i) -= lambda * static_cast<double>(m - 1) * xm2[i];
      jac(i, n) = -xm1[i];
      jac(n, i) = xm1[i];
    }

    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = -f_top;
    rhs[n] = -f_bot;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) break;
    Eigen::VectorXd delta = lu.solve(rhs);
    if (!delta.allFinite()) break;
    double scale = delta.head(n).lpNorm<Eigen::Infinity>();
    if (scale > 0.5) delta *= 0.5 / scale;

    x += delta.head(n);
    lambda += delta[n];
    if (!x.allFinite() || !std::isfinite(lambda)) break;
    double r = record(x, lambda);
    if (r <= 1e-15) break;
  }

  // Report on the unit sphere with the canonical sign.
  if (best.x.size() > 0 && m_norm(best.x, m) > 0.0) {
    Eigen::VectorXd xn = normalize_m(best.x, m);
    sign_fix(xn);
    double ln = xn.dot(eval_grad(tensor, xn));
    double rn = kkt_residual(tensor, ln, xn);
    if (rn <= best.residual * (1.0 + 1e-9) || rn <= 1e-12) {
      best = {ln, xn, rn};
    }
  }
  return best;
}

RunResult single_run(const RankOneSum& tensor, Eigen::VectorXd x,
                     const EstimateOptions& options) {
  int m = tensor.order;
  x = normalize_m(x, m);
  double t_prev = 1.0;
  double lambda = x.dot(eval_grad(tensor, x));
  for (int it = 0; it < options.max_iterations; ++it) {
    Eigen::VectorXd grad_half = eval_grad(tensor, x);
    lambda = x.dot(grad_half);
    Eigen::VectorXd resid_vec = grad_half - lambda * signed_pow(x, m - 1);
    if (resid_vec.lpNorm<Eigen::Infinity>() <= 1e-12) break;

    Eigen::VectorXd gr = static_cast<double>(m) * grad_half;
    double gg = gr.squaredNorm();
    double t = t_prev;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      Eigen::VectorXd xt = x - t * gr;
      double nn = m_norm(xt, m);
      if (nn > 0.0 && std::isfinite(nn)) {
        xt /= nn;
        if (xt.dot(eval_grad(tensor, xt)) < lambda - 1e-4 * t * gg) {
          x = std::move(xt);
          t_prev = std::min(t * 2.0, 1e6);
          moved = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!moved) break;  // descent stalled at numerical floor
  }
  lambda = x.dot(eval_grad(tensor, x));
  return kkt_refine(tensor, x, lambda, 40);
}

}  // namespace

double kkt_residual(const RankOneSum& tensor, double lambda,
                    const Eigen::VectorXd& x) {
  tensor.validate();
  if (x.size() != tensor.dim) {
    throw InvalidInput("kkt_residual: vector length does not match dim");
  }
  Eigen::VectorXd r = eval_grad(tensor, x) - lambda * signed_pow(x, tensor.order - 1);
  return r.lpNorm<Eigen::Infinity>();
}

HEigenPair lambda_min_estimate(const RankOneSum& tensor,
                               const EstimateOptions& options) {
  check_even_order(tensor);
  if (options.starts < 1 && options.extra_starts.empty()) {
    throw InvalidInput("lambda_min_estimate: needs at least one start");
  }
  int n = tensor.dim;
  int m = tensor.order;

  RunResult best;          // best among converged runs
  RunResult best_any;      // best regardless of convergence, for diagnostics
  bool have_converged = false;
  int runs = 0;

  auto consider = [&](const RunResult& r) {
    ++runs;
    if (r.x.size() == 0) return;
    if (r.residual < best_any.residual ||
        (r.residual == best_any.residual && r.lambda < best_any.lambda)) {
      best_any = r;
    }
    if (r.residual > options.kkt_tol) return;
    if (!have_converged || r.lambda < best.lambda ||
        (r.lambda == best.lambda && lex_less(r.x, best.x))) {
      best = r;
      have_converged = true;
    }
  };

  for (const auto& s : options.extra_starts) {
    if (s.size() != n) {
      throw InvalidInput("lambda_min_estimate: extra start has wrong length");
    }
    if (m_norm(s, m) > 0.0) consider(single_run(tensor, s, options));
  }
  for (int s = 0; s < options.starts; ++s) {
    SplitMix64 gen(SplitMix64::derive(options.seed, static_cast<std::uint64_t>(s)));
    Eigen::VectorXd x0(n);
    for (int i = 0; i < n; ++i) x0[i] = gen.gaussian();
    if (m_norm(x0, m) <= 0.0) continue;
    consider(single_run(tensor, x0, options));
  }

  HEigenPair out;
  out.starts_used = runs;
  out.seed = options.seed;
  if (!have_converged) {
    out.lambda = best_any.lambda;
    out.x = best_any.x;
    out.kkt_residual = best_any.residual;
    throw EstimateError("lambda_min_estimate: no start reached the KKT tolerance",
                        out);
  }
  out.lambda = best.lambda;
  out.x = best.x;
  out.kkt_residual = best.residual;
  return out;
}

CurveReport lambda_min_curve(int m, double alpha, int n_from, int n_to,
                             int starts, std::uint64_t seed) {
  if (m < 2 || m % 2 != 0) {
    throw InvalidInput("lambda_min_curve: order must be even and >= 2");
  }
  if (n_from < 1 || n_to < n_from) {
    throw InvalidInput("lambda_min_curve: need 1 <= n_from <= n_to");
  }

  CurveReport report;
  report.m = m;
  report.alpha = alpha;
  Eigen::VectorXd prev_x;

  for (int n = n_from; n <= n_to; ++n) {
    RankOneSum tensor = mo_tensor(n, m, alpha);
    EstimateOptions opts;
    opts.starts = starts;
    opts.seed = SplitMix64::derive(seed, static_cast<std::uint64_t>(n));
    if (prev_x.size() > 0) {
      Eigen::VectorXd padded = Eigen::VectorXd::Zero(n);
      padded.head(prev_x.size()) = prev_x;
      opts.extra_starts.push_back(std::move(padded));
    }
    if (alpha > 1.0 && n >= 2) {
      // Chain witness: near the critical alpha the minimizer concentrates
      // along the differences of the inner-problem solution.
      InnerSolveResult inner = inner_minimize(n, m, alpha - 1.0, 1e-12);
      WitnessBound wb = witness_upper_bound(inner.minimizer, m, alpha);
      if (m_norm(wb.w, m) > 0.0) opts.extra_starts.push_back(wb.w);
    }

    try {
      HEigenPair pair = lambda_min_estimate(tensor, opts);
      bool decreased =
          report.rows.empty() || pair.lambda < report.rows.back().lambda_min;
      report.rows.push_back({n, pair.lambda, pair.kkt_residual, pair.starts_used,
                             pair.x, decreased});
      prev_x = report.rows.back().x;
    } catch (const EstimateError&) {
      report.failed_at = n;
      break;
    }
  }

  report.strictly_decreasing =
      !report.rows.empty() &&
      std::all_of(report.rows.begin(), report.rows.end(),
                  [](const CurveRow& r) { return r.decreased; });
  return report;
}

WitnessBound witness_upper_bound(const Eigen::VectorXd& z, int m, double alpha) {
  int n = static_cast<int>(z.size());
  if (n < 1 || z[0] != 1.0) {
    throw InvalidInput("witness_upper_bound: chain point must start at 1");
  }
  WitnessBound out;
  out.w = Eigen::VectorXd(n);
  for (int i = 0; i + 1 < n; ++i) out.w[i] = z[i] - z[i + 1];
  out.w[n - 1] = z[n - 1];
  double denom = pow_int(m_norm(out.w, m), m);
  if (!(denom > 0.0)) {
    throw InvalidInput("witness_upper_bound: degenerate chain point");
  }
  out.rayleigh = eval_poly(mo_tensor(n, m, alpha), out.w) / denom;
  return out;
}

double moler_lambda_min(int n) {
  if (n < 1) throw InvalidInput("moler_lambda_min: n must be >= 1");
  if (n == 1) return 1.0;

  // Inverse iteration with the exact factor: solving L u = x is a running
  // prefix sum, solving L^T y = u a running suffix sum.
  auto solve_inverse = [n](const Eigen::VectorXd& x) {
    Eigen::VectorXd u(n);
    double prefix = 0.0;
    for (int i = 0; i < n; ++i) {
      u[i] = x[i] + prefix;
      prefix += u[i];
    }
    Eigen::VectorXd y(n);
    double suffix = 0.0;
    for (int i = n - 1; i >= 0; --i) {
      y[i] = u[i] + suffix;
      suffix += y[i];
    }
    return y;
  };
  // Rayleigh quotient through the factor: x^T A x = ||L^T x||^2.
  auto quad_form = [n](const Eigen::VectorXd& x) {
    double suffix = 0.0;
    double q = 0.0;
    for (int i = n - 1; i >= 0; --i) {
      double v = x[i] - suffix;
      q += v * v;
      suffix += x[i];
    }
    return q;
  };

  Eigen::VectorXd x = Eigen::VectorXd::Ones(n).normalized();
  double lambda = quad_form(x);
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd y = solve_inverse(x);
    double norm = y.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) break;
    x = y / norm;
    double next = quad_form(x);
    bool settled = std::abs(next - lambda) <= 1e-14 * std::abs(next);
    lambda = next;
    if (settled) break;
  }
  return lambda;
}

Json to_json(const HEigenPair& pair) {
  Json j;
  j["lambda"] = pair.lambda;
  j["kkt_residual"] = pair.kkt_residual;
  j["starts_used"] = pair.starts_used;
  j["seed"] = pair.seed;
  Json x = Json::array();
  for (Eigen::Index i = 0; i < pair.x.size(); ++i) x.push_back(pair.x[i]);
  j["x"] = std::move(x);
  return j;
}

Json to_json(const CurveReport& report) {
  Json j;
  j["m"] = report.m;
  j["alpha"] = report.alpha;
  j["strictly_decreasing"] = report.strictly_decreasing;
  if (report.failed_at) j["failed_at"] = *report.failed_at;
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    Json r;
    r["n"] = row.n;
    r["lambda_min"] = row.lambda_min;
    r["kkt_residual"] = row.kkt_residual;
    r["starts_used"] = row.starts_used;
    r["decreased"] = row.decreased;
    Json x = Json::array();
    for (Eigen::Index i = 0; i < row.x.size(); ++i) x.push_back(row.x[i]);
    r["x"] = std::move(x);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

std::string to_csv(const CurveReport& report) {
  std::string out = "n,lambda_min,kkt_residual,starts_used\n";
  char buf[160];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d\n", row.n, row.lambda_min,
                  row.kkt_residual, row.starts_used);
    out += buf;
  }
  return out;
}

}  // namespace motensor
