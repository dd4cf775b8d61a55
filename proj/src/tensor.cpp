#include "motensor/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace motensor {

double pow_int(double x, int e) {
  if (e < 0) throw InvalidInput("pow_int: negative exponent");
  double r = 1.0;
  double base = x;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

double logical_entry_count(int dim, int order) {
  return std::pow(static_cast<double>(dim), static_cast<double>(order));
}

void ensure_within_budget(int dim, int order, std::size_t budget) {
  double logical = logical_entry_count(dim, order);
  if (logical > static_cast<double>(budget)) {
    throw BudgetExceeded(logical, budget);
  }
}

void RankOneSum::validate() const {
  if (order < 1) throw InvalidInput("RankOneSum: order must be >= 1");
  if (dim < 1) throw InvalidInput("RankOneSum: dim must be >= 1");
  for (const auto& term : terms) {
    if (term.vector.size() != dim) {
      throw InvalidInput("RankOneSum: term vector length does not match dim");
    }
  }
}

namespace {

// C(c, k) by the multiplicative formula; every prefix product of
// consecutive integers divides exactly.
std::uint64_t binom(int c, int k) {
  if (k < 0 || k > c) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(c - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

void check_index(std::span<const int> index, int order, int dim) {
  if (static_cast<int>(index.size()) != order) {
    throw InvalidInput("multi-index length does not match tensor order");
  }
  for (int v : index) {
    if (v < 0 || v >= dim) {
      throw InvalidInput("multi-index component out of range");
    }
  }
}

}  // namespace

DenseSymmetricTensor::DenseSymmetricTensor(int order, int dim, std::size_t budget)
    : order_(order), dim_(dim) {
  if (order < 1) throw InvalidInput("DenseSymmetricTensor: order must be >= 1");
  if (dim < 1) throw InvalidInput("DenseSymmetricTensor: dim must be >= 1");
  ensure_within_budget(dim, order, budget);
  values_.assign(binom(dim + order - 1, order), 0.0);
}

std::size_t DenseSymmetricTensor::rank_of_sorted(std::span<const int> sorted) const {
  // Combinatorial rank: map the nondecreasing index to the strictly
  // increasing combination c_j = i_j + j and sum C(c_j, j + 1).
  std::uint64_t r = 0;
  for (int j = 0; j < order_; ++j) {
    r += binom(sorted[j] + j, j + 1);
  }
  return static_cast<std::size_t>(r);
}

double DenseSymmetricTensor::get(std::span<const int> index) const {
  check_index(index, order_, dim_);
  std::vector<int> sorted(index.begin(), index.end());
  std::sort(sorted.begin(), sorted.end());
  return values_[rank_of_sorted(sorted)];
}

void DenseSymmetricTensor::set(std::span<const int> index, double value) {
  check_index(index, order_, dim_);
  std::vector<int> sorted(index.begin(), index.end());
  std::sort(sorted.begin(), sorted.end());
  values_[rank_of_sorted(sorted)] = value;
}

void DenseSymmetricTensor::for_each_representative(
    const std::function<void(std::span<const int>, std::size_t)>& fn) const {
  // Visits in lexicographic order of the nondecreasing index; the storage
  // rank is combinatorial and does not follow that order, so it is computed
  // per index.
  std::vector<int> idx(order_, 0);
  while (true) {
    fn(std::span<const int>(idx), rank_of_sorted(idx));
    int j = order_ - 1;
    while (j >= 0 && idx[j] == dim_ - 1) --j;
    if (j < 0) break;
    int v = idx[j] + 1;
    for (int k = j; k < order_; ++k) idx[k] = v;
  }
}

double max_abs_diff(const DenseSymmetricTensor& a, const DenseSymmetricTensor& b) {
  if (a.order() != b.order() || a.dim() != b.dim()) {
    throw InvalidInput("max_abs_diff: shape mismatch");
  }
  double best = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    best = std::max(best, std::abs(a.values()[i] - b.values()[i]));
  }
  return best;
}

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::MolerMatrix: return "moler";
    case FamilyKind::M: return "m";
    case FamilyKind::N: return "n";
    case FamilyKind::MO: return "mo";
    case FamilyKind::EssentialMO: return "essential";
  }
  throw InvalidInput("unknown family kind");
}

FamilyKind family_kind_from_string(const std::string& name) {
  if (name == "moler") return FamilyKind::MolerMatrix;
  if (name == "m") return FamilyKind::M;
  if (name == "n") return FamilyKind::N;
  if (name == "mo") return FamilyKind::MO;
  if (name == "essential") return FamilyKind::EssentialMO;
  throw InvalidInput("unknown family kind: " + name);
}

FamilySpec FamilySpec::moler_matrix(int dim) {
  FamilySpec s{FamilyKind::MolerMatrix, dim, 2, std::nullopt};
  s.validate();
  return s;
}

FamilySpec FamilySpec::m_tensor(int dim, int order) {
  FamilySpec s{FamilyKind::M, dim, order, std::nullopt};
  s.validate();
  return s;
}

FamilySpec FamilySpec::n_tensor(int dim, int order) {
  FamilySpec s{FamilyKind::N, dim, order, std::nullopt};
  s.validate();
  return s;
}

FamilySpec FamilySpec::mo(int dim, int order, double alpha) {
  FamilySpec s{FamilyKind::MO, dim, order, alpha};
  s.validate();
  return s;
}

FamilySpec FamilySpec::essential_mo(int dim, int order) {
  FamilySpec s{FamilyKind::EssentialMO, dim, order, std::nullopt};
  s.validate();
  return s;
}

void FamilySpec::validate() const {
  if (dim < 1) throw InvalidInput("FamilySpec: dim must be >= 1");
  if (order < 2) throw InvalidInput("FamilySpec: order must be >= 2");
  if (kind == FamilyKind::MolerMatrix && order != 2) {
    throw InvalidInput("FamilySpec: the Moler matrix has order 2");
  }
  if (kind == FamilyKind::MO && !alpha.has_value()) {
    throw InvalidInput("FamilySpec: mo requires alpha");
  }
  if (kind != FamilyKind::MO && alpha.has_value()) {
    throw InvalidInput("FamilySpec: alpha only applies to mo");
  }
}

Json to_json(const FamilySpec& spec) {
  Json j;
  j["family"] = to_string(spec.kind);
  j["dim"] = spec.dim;
  j["order"] = spec.order;
  if (spec.alpha) j["alpha"] = *spec.alpha;
  return j;
}

FamilySpec family_spec_from_json(const Json& j) {
  FamilySpec s;
  s.kind = family_kind_from_string(j.at("family").get<std::string>());
  s.dim = j.at("dim").get<int>();
  s.order = j.at("order").get<int>();
  if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
  s.validate();
  return s;
}

double eval_poly(const RankOneSum& tensor, const Eigen::VectorXd& x) {
  tensor.validate();
  if (x.size() != tensor.dim) {
    throw InvalidInput("eval_poly: vector length does not match dim");
  }
  double total = 0.0;
  for (const auto& term : tensor.terms) {
    total += term.weight * pow_int(term.vector.dot(x), tensor.order);
  }
  return total;
}

Eigen::VectorXd eval_grad(const RankOneSum& tensor, const Eigen::VectorXd& x) {
  tensor.validate();
  if (x.size() != tensor.dim) {
    throw InvalidInput("eval_grad: vector length does not match dim");
  }
  Eigen::VectorXd g = Eigen::VectorXd::Zero(tensor.dim);
  for (const auto& term : tensor.terms) {
    double c = term.weight * pow_int(term.vector.dot(x), tensor.order - 1);
    g += c * term.vector;
  }
  return g;
}

DenseSymmetricTensor materialize(const RankOneSum& tensor, std::size_t budget) {
  tensor.validate();
  DenseSymmetricTensor dense(tensor.order, tensor.dim, budget);
  dense.for_each_representative([&](std::span<const int> idx, std::size_t rank) {
    double v = 0.0;
    for (const auto& term : tensor.terms) {
      double p = term.weight;
      for (int j = 0; j < tensor.order; ++j) p *= term.vector[idx[j]];
      v += p;
    }
    dense.values()[rank] = v;
  });
  return dense;
}

double m_norm(const Eigen::VectorXd& x, int m) {
  if (m < 1) throw InvalidInput("m_norm: order must be >= 1");
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s += pow_int(std::abs(x[i]), m);
  }
  return std::pow(s, 1.0 / static_cast<double>(m));
}

namespace {

Json index_to_json(std::span<const int> idx) {
  Json a = Json::array();
  for (int v : idx) a.push_back(v + 1);  // external indices are 1-based
  return a;
}

}  // namespace

Json to_json(const DenseSymmetricTensor& tensor) {
  Json j;
  j["order"] = tensor.order();
  j["dim"] = tensor.dim();
  Json entries = Json::array();
  tensor.for_each_representative([&](std::span<const int> idx, std::size_t rank) {
    Json e;
    e["index"] = index_to_json(idx);
    e["value"] = tensor.values()[rank];
    entries.push_back(std::move(e));
  });
  j["entries"] = std::move(entries);
  return j;
}

Json to_json(const RankOneSum& tensor) {
  Json j;
  j["order"] = tensor.order;
  j["dim"] = tensor.dim;
  Json terms = Json::array();
  for (const auto& term : tensor.terms) {
    Json t;
    t["weight"] = term.weight;
    Json v = Json::array();
    for (Eigen::Index i = 0; i < term.vector.size(); ++i) v.push_back(term.vector[i]);
    t["vector"] = std::move(v);
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j;
}

}  // namespace motensor
