#include "motensor/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "motensor/rng.hpp"

namespace motensor::oracle {

namespace {

std::uint64_t binom(int c, int k) {
  if (k < 0 || k > c) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(c - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

// Number of distinct permutations of a sorted multi-index.
double multiplicity(std::span<const int> sorted) {
  int m = static_cast<int>(sorted.size());
  double mult = 1.0;
  int remaining = m;
  int run = 1;
  for (int j = 1; j <= m; ++j) {
    if (j < m && sorted[j] == sorted[j - 1]) {
      ++run;
      continue;
    }
    mult *= static_cast<double>(binom(remaining, run));
    remaining -= run;
    run = 1;
  }
  return mult;
}

void check_vector(const DenseSymmetricTensor& tensor, const Eigen::VectorXd& x) {
  if (x.size() != tensor.dim()) {
    throw InvalidInput("oracle: vector length does not match dim");
  }
}

double pow_i(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

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

double entry_l1(const DenseSymmetricTensor& tensor) {
  double s = 0.0;
  tensor.for_each_representative([&](std::span<const int> idx, std::size_t rank) {
    s += multiplicity(idx) * std::abs(tensor.values()[rank]);
  });
  return s;
}

}  // namespace

double dense_eval(const DenseSymmetricTensor& tensor, const Eigen::VectorXd& x) {
  check_vector(tensor, x);
  double total = 0.0;
  tensor.for_each_representative([&](std::span<const int> idx, std::size_t rank) {
    double p = tensor.values()[rank] * multiplicity(idx);
    for (int v : idx) p *= x[v];
    total += p;
  });
  return total;
}

Eigen::VectorXd dense_grad(const DenseSymmetricTensor& tensor,
                           const Eigen::VectorXd& x) {
  check_vector(tensor, x);
  int n = tensor.dim();
  int m = tensor.order();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
  if (m == 1) {
    tensor.for_each_representative([&](std::span<const int> idx, std::size_t rank) {
      g[idx[0]] += tensor.values()[rank];
    });
    return g;
  }
  // Sum over representatives of the trailing m-1 slots for each leading i.
  DenseSymmetricTensor tail_shape(m - 1, n);
  std::vector<int> full(m);
  for (int i = 0; i < n; ++i) {
    tail_shape.for_each_representative([&](std::span<const int> idx, std::size_t) {
      full[0] = i;
      std::copy(idx.begin(), idx.end(), full.begin() + 1);
      double p = tensor.get(full) * multiplicity(idx);
      for (int v : idx) p *= x[v];
      g[i] += p;
    });
  }
  return g;
}

PsdScan psd_scan(const DenseSymmetricTensor& tensor, int samples,
                 std::uint64_t seed, int grid) {
  if (tensor.order() % 2 != 0) {
    throw InvalidInput("psd_scan: order must be even");
  }
  if (samples < 0 || grid < 1) {
    throw InvalidInput("psd_scan: samples must be >= 0 and grid >= 1");
  }
  int n = tensor.dim();
  int m = tensor.order();
  PsdScan out;
  out.min_value = std::numeric_limits<double>::infinity();

  auto probe = [&](Eigen::VectorXd x) {
    double nn = m_norm(x, m);
    if (!(nn > 0.0) || !std::isfinite(nn)) return;
    x /= nn;
    double v = dense_eval(tensor, x);
    ++out.evaluations;
    if (v < out.min_value) {
      out.min_value = v;
      sign_fix(x);
      out.argmin = std::move(x);
    }
  };

  const double pi = 3.14159265358979323846;
  if (n == 1) {
    probe(Eigen::VectorXd::Ones(1));
  } else if (n == 2) {
    // Even order makes antipodes equivalent; half a circle covers all rays.
    for (int k = 0; k < grid; ++k) {
      double th = pi * static_cast<double>(k) / static_cast<double>(grid);
      Eigen::VectorXd x(2);
      x << std::cos(th), std::sin(th);
      probe(std::move(x));
    }
  } else if (n == 3) {
    for (int a = 0; a <= grid; ++a) {
      double th = pi * static_cast<double>(a) / static_cast<double>(grid);
      for (int b = 0; b < grid; ++b) {
        double ph = 2.0 * pi * static_cast<double>(b) / static_cast<double>(grid);
        Eigen::VectorXd x(3);
        x << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
        probe(std::move(x));
      }
    }
  }
  // Canonical directions catch axis-aligned and chain-like minimizers.
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[i] = 1.0;
    probe(std::move(e));
    if (i + 1 < n) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
      d[i] = 1.0;
      d[i + 1] = -1.0;
      probe(std::move(d));
    }
  }
  probe(Eigen::VectorXd::Ones(n));

  SplitMix64 gen(SplitMix64::derive(seed, 1));
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = gen.gaussian();
    probe(std::move(x));
  }
  return out;
}

namespace {

struct Candidate {
  double lambda;
  Eigen::VectorXd x;
  double residual;
};

// Residual of the eigen condition at unit m-norm x.
Candidate make_candidate(const DenseSymmetricTensor& tensor, Eigen::VectorXd x) {
  int m = tensor.order();
  x /= m_norm(x, m);
  sign_fix(x);
  Eigen::VectorXd g = dense_grad(tensor, x);
  double lambda = x.dot(g);
  double resid = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    resid = std::max(resid, std::abs(g[i] - lambda * pow_i(x[i], m - 1)));
  }
  return {lambda, std::move(x), resid};
}

}  // namespace

ScanReport h_eigen_scan_2d(const DenseSymmetricTensor& tensor, int grid_size,
                           double t_range) {
  if (tensor.dim() != 2) throw InvalidInput("h_eigen_scan_2d: dim must be 2");
  if (tensor.order() % 2 != 0) {
    throw InvalidInput("h_eigen_scan_2d: order must be even");
  }
  if (grid_size < 2 || !(t_range > 0.0)) {
    throw InvalidInput("h_eigen_scan_2d: need grid_size >= 2 and t_range > 0");
  }
  int m = tensor.order();
  ScanReport report;
  report.grid_size = grid_size;

  double scale = entry_l1(tensor);
  double accept_tol = 1e-10;
  std::vector<Candidate> candidates;

  // cross((a, b)) = b-equation * a^{m-1} - a-equation * b^{m-1};
  // zero exactly at eigen directions, both axes included.
  auto cross = [&](double a, double b) {
    Eigen::VectorXd x(2);
    x << a, b;
    Eigen::VectorXd g = dense_grad(tensor, x);
    return g[1] * pow_i(a, m - 1) - g[0] * pow_i(b, m - 1);
  };

  auto refine = [&](auto&& fn, double lo, double hi, double flo) {
    for (int i = 0; i < 200; ++i) {
      double mid = 0.5 * (lo + hi);
      if (!(lo < mid && mid < hi)) break;
      double fm = fn(mid);
      if (fm == 0.0) return mid;
      if ((fm > 0.0) == (flo > 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  // Pass 1: x = (1, t) over the symmetric t grid.
  // Pass 2: x = (s, 1) over [-1, 1], covering |t| >= 1 and the vertical axis.
  int near_zero = 0;
  for (int pass = 0; pass < 2; ++pass) {
    auto fn = [&](double u) { return pass == 0 ? cross(1.0, u) : cross(u, 1.0); };
    // cross is homogeneous of degree 2(m-1), so the zero threshold must
    // track the point's magnitude.
    auto tiny_at = [&](double u) {
      return 1e-12 * (1.0 + scale) * pow_i(std::max(1.0, std::abs(u)), 2 * (m - 1));
    };
    double lo_end = pass == 0 ? -t_range : -1.0;
    double hi_end = pass == 0 ? t_range : 1.0;
    int points = pass == 0 ? grid_size : std::max(grid_size / 2, 2);

    double prev_u = lo_end;
    double prev_f = fn(prev_u);
    bool prev_cell_had_root = false;
    for (int k = 1; k <= points; ++k) {
      double u = lo_end + (hi_end - lo_end) * static_cast<double>(k) /
                              static_cast<double>(points);
      double f = fn(u);
      double tiny = tiny_at(prev_u);
      bool root_here = false;
      if (pass == 0 && std::abs(prev_f) <= tiny) ++near_zero;
      if (std::abs(prev_f) <= tiny) {
        Eigen::VectorXd x(2);
        if (pass == 0) {
          x << 1.0, prev_u;
        } else {
          x << prev_u, 1.0;
        }
        candidates.push_back(make_candidate(tensor, x));
        root_here = true;
      } else if ((prev_f > 0.0) != (f > 0.0)) {
        double root = refine(fn, prev_u, u, prev_f);
        Eigen::VectorXd x(2);
        if (pass == 0) {
          x << 1.0, root;
        } else {
          x << root, 1.0;
        }
        candidates.push_back(make_candidate(tensor, x));
        root_here = true;
      }
      if (root_here && prev_cell_had_root) report.resolution_warning = true;
      prev_cell_had_root = root_here;
      prev_u = u;
      prev_f = f;
    }
    if (std::abs(prev_f) <= tiny_at(prev_u)) {
      Eigen::VectorXd x(2);
      if (pass == 0) {
        x << 1.0, prev_u;
      } else {
        x << prev_u, 1.0;
      }
      candidates.push_back(make_candidate(tensor, x));
      if (pass == 0) ++near_zero;
    }
  }

  report.continuum = near_zero * 2 >= grid_size;
  if (report.continuum) {
    // The condition degenerates; report the canonical directions that still
    // certify as eigenpairs.
    candidates.push_back(make_candidate(tensor, Eigen::Vector2d(1.0, 0.0)));
    candidates.push_back(make_candidate(tensor, Eigen::Vector2d(0.0, 1.0)));
    candidates.push_back(make_candidate(tensor, Eigen::Vector2d(1.0, 1.0)));
    candidates.push_back(make_candidate(tensor, Eigen::Vector2d(1.0, -1.0)));
  }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a,
                                                     const Candidate& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    return std::lexicographical_compare(a.x.data(), a.x.data() + a.x.size(),
                                        b.x.data(), b.x.data() + b.x.size());
  });

  for (const auto& c : candidates) {
    if (c.residual > accept_tol * (1.0 + scale)) continue;
    bool dup = false;
    for (auto& kept : report.pairs) {
      bool close_lambda =
          std::abs(kept.lambda - c.lambda) <= 1e-9 * (1.0 + std::abs(c.lambda));
      bool close_x = (kept.x - c.x).lpNorm<Eigen::Infinity>() <= 1e-6;
      if (close_lambda && close_x) {
        if (c.residual < kept.kkt_residual) {
          kept.lambda = c.lambda;
          kept.x = c.x;
          kept.kkt_residual = c.residual;
        }
        dup = true;
        break;
      }
    }
    if (!dup) {
      HEigenPair pair;
      pair.lambda = c.lambda;
      pair.x = c.x;
      pair.kkt_residual = c.residual;
      report.pairs.push_back(std::move(pair));
    }
  }
  return report;
}

Json to_json(const PsdScan& scan) {
  Json j;
  j["min_value"] = scan.min_value;
  Json a = Json::array();
  for (Eigen::Index i = 0; i < scan.argmin.size(); ++i) a.push_back(scan.argmin[i]);
  j["argmin"] = std::move(a);
  j["evaluations"] = scan.evaluations;
  j["negative_found"] = scan.min_value < 0.0;
  return j;
}

Json to_json(const ScanReport& report) {
  Json j;
  j["grid_size"] = report.grid_size;
  j["continuum"] = report.continuum;
  j["resolution_warning"] = report.resolution_warning;
  Json pairs = Json::array();
  for (const auto& p : report.pairs) pairs.push_back(motensor::to_json(p));
  j["pairs"] = std::move(pairs);
  return j;
}

}  // namespace motensor::oracle
