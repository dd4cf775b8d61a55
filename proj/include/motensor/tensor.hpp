#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "motensor/errors.hpp"

namespace motensor {

using Json = nlohmann::ordered_json;

/// Default cap on the logical entry count dim^order of dense objects.
/// Overridable per call and, in the CLI, via MOTENSOR_BUDGET.
inline constexpr std::size_t kDefaultEntryBudget = 10'000'000;

/// x^e for integer e >= 0 by repeated multiplication. Deterministic across
/// libm implementations, which std::pow is not.
double pow_int(double x, int e);

/// dim^order as a double (exact for everything under the budget, and safe
/// to compute for sizes far above it).
double logical_entry_count(int dim, int order);

/// Throws BudgetExceeded when dim^order > budget.
void ensure_within_budget(int dim, int order, std::size_t budget);

/// One term weight * u^{(x) order} of a symmetric rank-one sum.
struct RankOneTerm {
  double weight = 0.0;
  Eigen::VectorXd vector;
};

/// Symmetric tensor held as a weighted sum of symmetric rank-one powers.
/// Entry (i_1..i_m) equals sum_k weight_k * prod_j vector_k[i_j].
struct RankOneSum {
  int order = 0;
  int dim = 0;
  std::vector<RankOneTerm> terms;

  void validate() const;
};

/// Symmetric tensor stored densely: one double per sorted representative
/// multi-index, C(dim+order-1, order) values total.
class DenseSymmetricTensor {
 public:
  DenseSymmetricTensor(int order, int dim,
                       std::size_t budget = kDefaultEntryBudget);

  int order() const { return order_; }
  int dim() const { return dim_; }
  std::size_t representative_count() const { return values_.size(); }

  /// Entry at a multi-index (0-based components, any order). Validates.
  double get(std::span<const int> index) const;
  void set(std::span<const int> index, double value);

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Calls fn(sorted_index, rank) for every representative in lexicographic
  /// order of the nondecreasing index.
  void for_each_representative(
      const std::function<void(std::span<const int>, std::size_t)>& fn) const;

  /// Storage rank of a nondecreasing multi-index.
  std::size_t rank_of_sorted(std::span<const int> sorted) const;

 private:
  int order_;
  int dim_;
  std::vector<double> values_;
};

/// Largest |A - B| over representatives. Shapes must match.
double max_abs_diff(const DenseSymmetricTensor& a, const DenseSymmetricTensor& b);

enum class FamilyKind { MolerMatrix, M, N, MO, EssentialMO };

std::string to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& name);

/// Identifies one member of the tensor family without storing entries.
struct FamilySpec {
  FamilyKind kind = FamilyKind::M;
  int dim = 1;
  int order = 2;
  std::optional<double> alpha;  // required iff kind == MO

  static FamilySpec moler_matrix(int dim);
  static FamilySpec m_tensor(int dim, int order);
  static FamilySpec n_tensor(int dim, int order);
  static FamilySpec mo(int dim, int order, double alpha);
  static FamilySpec essential_mo(int dim, int order);

  void validate() const;
};

Json to_json(const FamilySpec& spec);
FamilySpec family_spec_from_json(const Json& j);

/// T x^m. O(terms * dim) per call; never materializes the tensor.
double eval_poly(const RankOneSum& tensor, const Eigen::VectorXd& x);

/// (T x^{m-1})_i, the gradient of eval_poly divided by m.
Eigen::VectorXd eval_grad(const RankOneSum& tensor, const Eigen::VectorXd& x);

/// Dense form of a rank-one sum. Throws BudgetExceeded past the budget.
DenseSymmetricTensor materialize(const RankOneSum& tensor,
                                 std::size_t budget = kDefaultEntryBudget);

/// (sum |x_i|^m)^{1/m}.
double m_norm(const Eigen::VectorXd& x, int m);

Json to_json(const DenseSymmetricTensor& tensor);
Json to_json(const RankOneSum& tensor);

}  // namespace motensor
