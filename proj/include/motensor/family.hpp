#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "motensor/tensor.hpp"

namespace motensor {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// The dense n x n matrix with diagonal i and off-diagonal min(i, j) - 2
/// (1-based values). Order-2 member of the family.
DenseSymmetricTensor moler_matrix(int n);

/// Unit lower-triangular L with -1 below the diagonal; L L^T equals
/// moler_matrix(n) exactly in integer arithmetic.
IntMatrix moler_factor(int n);

/// Closed-form entry of a family member at a 0-based multi-index.
double entry(const FamilySpec& spec, std::span<const int> index);

/// Exact integer entry. Requires alpha (if present) to be an integer.
long long entry_int(const FamilySpec& spec, std::span<const int> index);

/// Structured rank-one form of any family member (entrywise identical to
/// `entry`). MO(alpha) uses n + 1 nonzero terms, not O(n^m) storage.
RankOneSum rank_one_form(const FamilySpec& spec);

/// mo(n, m, alpha) as a rank-one sum: the M tensor minus alpha times the
/// all-ones-off-diagonal tensor.
RankOneSum mo_tensor(int n, int m, double alpha);

/// Nonnegative rank-one decomposition witnessing complete positivity.
struct CpCertificate {
  FamilySpec target;
  std::vector<RankOneTerm> terms;  // weights >= 0, entrywise >= 0 vectors
};

/// Essential member (diagonal i_1, off-diagonal min - 1) plus its exact
/// 2n - 1 term certificate. `dense` is materialized only within budget.
struct EssentialMo {
  FamilySpec spec;
  CpCertificate certificate;
  std::optional<DenseSymmetricTensor> dense;
};

EssentialMo essential_mo(int n, int m, std::size_t budget = kDefaultEntryBudget);

/// Certificate for mo(n, m, alpha) when 0 <= alpha <= 1 (weights stay
/// nonnegative); nullopt outside that range.
std::optional<CpCertificate> cp_certificate(int n, int m, double alpha);

/// Value of mo(n, m, alpha) at x = e_1 - e_2 for even m: equals 1 + 2 alpha
/// algebraically, so it is negative whenever alpha < -1/2.
double sub_mo_witness_value(int n, int m, double alpha);

/// Largest |reconstructed - closed-form| entry deviation of a certificate.
/// Uses exact integer arithmetic when alpha is integral (deviation 0 or not).
double certificate_max_deviation(const CpCertificate& cert,
                                 std::size_t budget = kDefaultEntryBudget);

Json to_json(const CpCertificate& cert);

}  // namespace motensor
