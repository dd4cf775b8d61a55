#include "motensor/family.hpp"

#include <algorithm>
#include <cmath>

namespace motensor {

namespace {

void check_index(std::span<const int> index, const FamilySpec& spec) {
  if (static_cast<int>(index.size()) != spec.order) {
    throw InvalidInput("entry: multi-index length does not match order");
  }
  for (int v : index) {
    if (v < 0 || v >= spec.dim) {
      throw InvalidInput("entry: multi-index component out of range");
    }
  }
}

// Indicator vector r_i (0-based): 1 at positions >= i.
Eigen::VectorXd step_vector(int n, int i) {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  for (int j = i; j < n; ++j) r[j] = 1.0;
  return r;
}

}  // namespace

DenseSymmetricTensor moler_matrix(int n) {
  if (n < 1) throw InvalidInput("moler_matrix: n must be >= 1");
  DenseSymmetricTensor a(2, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      int idx[2] = {i, j};
      a.set(idx, i == j ? static_cast<double>(i + 1)
                        : static_cast<double>(std::min(i, j) + 1 - 2));
    }
  }
  return a;
}

IntMatrix moler_factor(int n) {
  if (n < 1) throw InvalidInput("moler_factor: n must be >= 1");
  IntMatrix l = IntMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    l(i, i) = 1;
    for (int j = 0; j < i; ++j) l(i, j) = -1;
  }
  return l;
}

long long entry_int(const FamilySpec& spec, std::span<const int> index) {
  spec.validate();
  check_index(index, spec);
  int lo = index[0];
  bool all_equal = true;
  for (int v : index) {
    lo = std::min(lo, v);
    all_equal = all_equal && v == index[0];
  }
  long long vmin = lo + 1;  // 1-based minimum component
  switch (spec.kind) {
    case FamilyKind::MolerMatrix:
      return all_equal ? index[0] + 1 : vmin - 2;
    case FamilyKind::M:
      return all_equal ? index[0] + 1 : vmin;
    case FamilyKind::N:
      return all_equal ? 0 : 1;
    case FamilyKind::EssentialMO:
      return all_equal ? index[0] + 1 : vmin - 1;
    case FamilyKind::MO: {
      double a = *spec.alpha;
      if (a != std::round(a)) {
        throw InvalidInput("entry_int: alpha is not an integer");
      }
      long long ai = static_cast<long long>(std::llround(a));
      long long m_val = all_equal ? index[0] + 1 : vmin;
      long long n_val = all_equal ? 0 : 1;
      return m_val - ai * n_val;
    }
  }
  throw InvalidInput("entry_int: unknown family kind");
}

double entry(const FamilySpec& spec, std::span<const int> index) {
  spec.validate();
  if (spec.kind == FamilyKind::MO && *spec.alpha != std::round(*spec.alpha)) {
    check_index(index, spec);
    bool all_equal =
        std::all_of(index.begin(), index.end(), [&](int v) { return v == index[0]; });
    FamilySpec m_spec = FamilySpec::m_tensor(spec.dim, spec.order);
    double m_val = static_cast<double>(entry_int(m_spec, index));
    return all_equal ? m_val : m_val - *spec.alpha;
  }
  return static_cast<double>(entry_int(spec, index));
}

RankOneSum mo_tensor(int n, int m, double alpha) {
  FamilySpec::mo(n, m, alpha);  // validates n, m
  RankOneSum t;
  t.order = m;
  t.dim = n;
  // alpha * sum e_i^(x)m + sum_{i>=2} r_i^(x)m + (1 - alpha) * e^(x)m.
  // Zero-weight terms are dropped, so alpha = 1 reproduces the essential
  // certificate term list exactly.
  if (alpha != 0.0) {
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd e_i = Eigen::VectorXd::Zero(n);
      e_i[i] = 1.0;
      t.terms.push_back({alpha, std::move(e_i)});
    }
  }
  for (int i = 1; i < n; ++i) {
    t.terms.push_back({1.0, step_vector(n, i)});
  }
  if (alpha != 1.0) {
    t.terms.push_back({1.0 - alpha, Eigen::VectorXd::Ones(n)});
  }
  return t;
}

RankOneSum rank_one_form(const FamilySpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case FamilyKind::M:
      return mo_tensor(spec.dim, spec.order, 0.0);
    case FamilyKind::EssentialMO:
      return mo_tensor(spec.dim, spec.order, 1.0);
    case FamilyKind::MolerMatrix:
      return mo_tensor(spec.dim, 2, 2.0);
    case FamilyKind::MO:
      return mo_tensor(spec.dim, spec.order, *spec.alpha);
    case FamilyKind::N: {
      RankOneSum t;
      t.order = spec.order;
      t.dim = spec.dim;
      t.terms.push_back({1.0, Eigen::VectorXd::Ones(spec.dim)});
      for (int i = 0; i < spec.dim; ++i) {
        Eigen::VectorXd e_i = Eigen::VectorXd::Zero(spec.dim);
        e_i[i] = 1.0;
        t.terms.push_back({-1.0, std::move(e_i)});
      }
      return t;
    }
  }
  throw InvalidInput("rank_one_form: unknown family kind");
}

EssentialMo essential_mo(int n, int m, std::size_t budget) {
  FamilySpec spec = FamilySpec::essential_mo(n, m);
  EssentialMo out{spec, CpCertificate{spec, mo_tensor(n, m, 1.0).terms}, std::nullopt};
  if (logical_entry_count(n, m) <= static_cast<double>(budget)) {
    out.dense = materialize(rank_one_form(spec), budget);
  }
  return out;
}

std::optional<CpCertificate> cp_certificate(int n, int m, double alpha) {
  FamilySpec spec = FamilySpec::mo(n, m, alpha);
  if (alpha < 0.0 || alpha > 1.0) return std::nullopt;
  return CpCertificate{spec, mo_tensor(n, m, alpha).terms};
}

double sub_mo_witness_value(int n, int m, double alpha) {
  if (n < 2) throw InvalidInput("sub_mo_witness_value: needs n >= 2");
  if (m % 2 != 0) throw InvalidInput("sub_mo_witness_value: needs even order");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  x[0] = 1.0;
  x[1] = -1.0;
  return eval_poly(mo_tensor(n, m, alpha), x);
}

double certificate_max_deviation(const CpCertificate& cert, std::size_t budget) {
  const FamilySpec& spec = cert.target;
  spec.validate();
  ensure_within_budget(spec.dim, spec.order, budget);
  bool integral = !spec.alpha || *spec.alpha == std::round(*spec.alpha);

  DenseSymmetricTensor probe(spec.order, spec.dim, budget);
  double worst = 0.0;
  probe.for_each_representative([&](std::span<const int> idx, std::size_t) {
    if (integral) {
      // Exact path: certificate vectors are 0/1 and weights are integers,
      // so both sides live in long long.
      long long rec = 0;
      for (const auto& term : cert.terms) {
        long long p = static_cast<long long>(std::llround(term.weight));
        for (int j = 0; j < spec.order && p != 0; ++j) {
          p *= static_cast<long long>(std::llround(term.vector[idx[j]]));
        }
        rec += p;
      }
      long long diff = rec - entry_int(spec, idx);
      worst = std::max(worst, std::abs(static_cast<double>(diff)));
    } else {
      double rec = 0.0;
      for (const auto& term : cert.terms) {
        double p = term.weight;
        for (int j = 0; j < spec.order; ++j) p *= term.vector[idx[j]];
        rec += p;
      }
      worst = std::max(worst, std::abs(rec - entry(spec, idx)));
    }
  });
  return worst;
}

Json to_json(const CpCertificate& cert) {
  Json j;
  j["target"] = to_json(cert.target);
  Json terms = Json::array();
  for (const auto& term : cert.terms) {
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
