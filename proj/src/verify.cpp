#include "motensor/verify.hpp"

#include <algorithm>
#include <cmath>

#include "motensor/family.hpp"
#include "motensor/rng.hpp"
#include "motensor/supmo.hpp"

namespace motensor {

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const VerifyCheck& c) { return c.passed; });
}

namespace {

VerifyCheck certificate_check(int dim, int order) {
  VerifyCheck c;
  c.name = "essential-certificate";
  double worst = 0.0;
  std::string detail;
  std::vector<std::pair<int, int>> shapes = {{2, 4}, {3, 4}, {2, 6}, {5, 3}};
  shapes.emplace_back(dim, order);
  for (auto [n, m] : shapes) {
    EssentialMo ess = essential_mo(n, m);
    double dev = certificate_max_deviation(ess.certificate);
    worst = std::max(worst, dev);
    detail += "(" + std::to_string(n) + "," + std::to_string(m) + ") ";
  }
  c.max_deviation = worst;
  c.passed = worst == 0.0;  // integer path, must be exact
  c.detail = "shapes " + detail + "reconstructed entrywise";
  return c;
}

VerifyCheck rank_one_entry_check(int dim, int order) {
  VerifyCheck c;
  c.name = "rank-one-entrywise";
  int n = std::min(dim, 4);
  double worst = 0.0;
  for (double alpha : {-0.5, 0.0, 1.0, 1.1429, 2.0}) {
    DenseSymmetricTensor dense = materialize(mo_tensor(n, order, alpha));
    DenseSymmetricTensor closed(order, n);
    FamilySpec spec = FamilySpec::mo(n, order, alpha);
    closed.for_each_representative([&](std::span<const int> idx, std::size_t rank) {
      closed.values()[rank] = entry(spec, idx);
    });
    worst = std::max(worst, max_abs_diff(dense, closed));
  }
  c.max_deviation = worst;
  c.passed = worst <= 1e-12;
  c.detail = "materialized rank-one sum vs closed-form entries, 5 alphas";
  return c;
}

VerifyCheck witness_check(std::uint64_t seed) {
  VerifyCheck c;
  c.name = "alternating-witness";
  SplitMix64 gen(SplitMix64::derive(seed, 7));
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    double alpha = 2.0 * gen.uniform01() - 1.0;
    for (auto [n, m] : {std::pair{2, 4}, std::pair{5, 6}}) {
      double got = sub_mo_witness_value(n, m, alpha);
      worst = std::max(worst, std::abs(got - (1.0 + 2.0 * alpha)));
    }
  }
  c.max_deviation = worst;
  c.passed = worst <= 1e-12;
  c.detail = "value at e_1 - e_2 equals 1 + 2 alpha";
  return c;
}

VerifyCheck factor_check() {
  VerifyCheck c;
  c.name = "order2-factorization";
  double worst = 0.0;
  for (int n = 1; n <= 30; ++n) {
    IntMatrix l = moler_factor(n);
    IntMatrix product = l * l.transpose();
    DenseSymmetricTensor a = moler_matrix(n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        int idx[2] = {i, j};
        double diff =
            std::abs(static_cast<double>(product(i, j)) - a.get(idx));
        worst = std::max(worst, diff);
      }
    }
  }
  c.max_deviation = worst;
  c.passed = worst == 0.0;  // exact integer identity
  c.detail = "L L^T reproduces the order-2 member for n <= 30";
  return c;
}

VerifyCheck chain_anchor_check() {
  VerifyCheck c;
  c.name = "chain-objective-anchor";
  double worst = 0.0;
  for (int m : {4, 6, 8}) {
    Eigen::VectorXd z(3);
    z << 1.0, 0.5, 0.0;
    double got = g_value(z, 1.0, m);
    double want = 5.0 / pow_int(2.0, m);
    worst = std::max(worst, std::abs(got - want));
  }
  c.max_deviation = worst;
  c.passed = worst <= 1e-12;
  c.detail = "g((1, 1/2, 0), beta=1) equals 5/2^m";
  return c;
}

}  // namespace

VerifyReport run_verification(const VerifyOptions& options) {
  if (options.dim < 1 || options.order < 2) {
    throw InvalidInput("run_verification: need dim >= 1 and order >= 2");
  }
  VerifyReport report;
  report.checks.push_back(certificate_check(options.dim, options.order));
  report.checks.push_back(rank_one_entry_check(options.dim, options.order));
  report.checks.push_back(witness_check(options.seed));
  report.checks.push_back(factor_check());
  report.checks.push_back(chain_anchor_check());
  if (options.inject_fault) {
    report.checks.push_back(
        {"injected-fault", false, 1.0, "deliberate failure for exit-code tests"});
  }
  return report;
}

Json to_json(const VerifyReport& report) {
  Json j;
  j["all_passed"] = report.all_passed();
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json row;
    row["name"] = c.name;
    row["passed"] = c.passed;
    row["max_deviation"] = c.max_deviation;
    row["detail"] = c.detail;
    checks.push_back(std::move(row));
  }
  j["checks"] = std::move(checks);
  return j;
}

}  // namespace motensor
