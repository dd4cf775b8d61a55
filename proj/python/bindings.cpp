#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "motensor/family.hpp"
#include "motensor/heigen.hpp"
#include "motensor/oracle.hpp"
#include "motensor/supmo.hpp"
#include "motensor/tensor.hpp"
#include "motensor/verify.hpp"

namespace py = pybind11;
using motensor::Json;

namespace {

py::object json_to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null:
      return py::none();
    case Json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case Json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case Json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case Json::value_t::number_float:
      return py::float_(j.get<double>());
    case Json::value_t::string:
      return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case Json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it) {
        out[py::str(it.key())] = json_to_py(it.value());
      }
      return out;
    }
    default:
      return py::none();
  }
}

motensor::FamilySpec make_spec(const std::string& family, int dim, int order,
                               std::optional<double> alpha) {
  motensor::FamilyKind kind = motensor::family_kind_from_string(family);
  if (kind == motensor::FamilyKind::MO) {
    if (!alpha) throw motensor::InvalidInput("family mo requires alpha");
    return motensor::FamilySpec::mo(dim, order, *alpha);
  }
  if (alpha) throw motensor::InvalidInput("alpha only applies to family mo");
  if (kind == motensor::FamilyKind::MolerMatrix) {
    return motensor::FamilySpec::moler_matrix(dim);
  }
  switch (kind) {
    case motensor::FamilyKind::M:
      return motensor::FamilySpec::m_tensor(dim, order);
    case motensor::FamilyKind::N:
      return motensor::FamilySpec::n_tensor(dim, order);
    default:
      return motensor::FamilySpec::essential_mo(dim, order);
  }
}

motensor::DenseSymmetricTensor dense_of(const std::string& family, int dim,
                                        int order, std::optional<double> alpha) {
  motensor::FamilySpec spec = make_spec(family, dim, order, alpha);
  if (spec.kind == motensor::FamilyKind::MolerMatrix) {
    return motensor::moler_matrix(spec.dim);
  }
  return motensor::materialize(motensor::rank_one_form(spec));
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Structured symmetric tensor family: construction, the critical "
              "shift alpha*(m), and smallest H-eigenvalue estimation";

  py::register_exception<motensor::InvalidInput>(mod, "InvalidInput",
                                                 PyExc_ValueError);
  py::register_exception<motensor::BudgetExceeded>(mod, "BudgetExceeded",
                                                   PyExc_RuntimeError);
  py::register_exception<motensor::ConvergenceFailure>(mod, "ConvergenceFailure",
                                                       PyExc_RuntimeError);

  mod.def(
      "alpha_star",
      [](int order, double eps, int max_n) {
        motensor::AlphaStarOptions opts;
        opts.epsilon = eps;
        opts.n_schedule.clear();
        for (int n = 2; n <= max_n; n *= 2) opts.n_schedule.push_back(n);
        return json_to_py(motensor::to_json(motensor::alpha_star(order, opts)));
      },
      py::arg("order"), py::arg("eps") = 1e-4, py::arg("max_n") = 512,
      "Critical shift alpha*(m) with the per-n fixed-point trace");

  mod.def(
      "fixed_point_beta",
      [](int n, int order, double eps) {
        return motensor::fixed_point_beta(n, order, eps);
      },
      py::arg("n"), py::arg("order"), py::arg("eps") = 1e-8,
      "Solve f_{n,m}(beta) = beta on [0, 1]");

  mod.def(
      "inner_value",
      [](int n, int order, double beta) {
        return motensor::inner_minimize(n, order, beta).value;
      },
      py::arg("n"), py::arg("order"), py::arg("beta"),
      "f_{n,m}(beta): minimum of the chain objective");

  mod.def(
      "g_value",
      [](const Eigen::VectorXd& z, double beta, int order) {
        return motensor::g_value(z, beta, order);
      },
      py::arg("z"), py::arg("beta"), py::arg("order"),
      "Chain objective at z (z[0] must be 1)");

  mod.def(
      "eval",
      [](const std::string& family, int dim, int order, const Eigen::VectorXd& x,
         std::optional<double> alpha) {
        motensor::RankOneSum t =
            motensor::rank_one_form(make_spec(family, dim, order, alpha));
        py::dict out;
        out["value"] = motensor::eval_poly(t, x);
        out["gradient"] = Eigen::VectorXd(motensor::eval_grad(t, x));
        return out;
      },
      py::arg("family"), py::arg("dim"), py::arg("order"), py::arg("x"),
      py::arg("alpha") = std::nullopt,
      "T x^m and T x^{m-1} through the rank-one structure");

  mod.def(
      "materialize",
      [](const std::string& family, int dim, int order,
         std::optional<double> alpha) {
        return json_to_py(motensor::to_json(dense_of(family, dim, order, alpha)));
      },
      py::arg("family"), py::arg("dim"), py::arg("order"),
      py::arg("alpha") = std::nullopt, "All distinct entries, 1-based indices");

  mod.def(
      "sub_mo_witness_value",
      [](int n, int order, double alpha) {
        return motensor::sub_mo_witness_value(n, order, alpha);
      },
      py::arg("n"), py::arg("order"), py::arg("alpha"),
      "Value at e_1 - e_2; negative iff alpha < -1/2");

  mod.def(
      "lambda_min_curve",
      [](int order, double alpha, int n_from, int n_to, int starts,
         std::uint64_t seed) {
        return json_to_py(motensor::to_json(
            motensor::lambda_min_curve(order, alpha, n_from, n_to, starts, seed)));
      },
      py::arg("order"), py::arg("alpha"), py::arg("n_from"), py::arg("n_to"),
      py::arg("starts") = 64, py::arg("seed") = 42,
      "Smallest H-eigenvalue estimates of mo(n, m, alpha) over a range of n");

  mod.def("moler_lambda_min", &motensor::moler_lambda_min, py::arg("n"),
          "Smallest eigenvalue of the order-2 member via its exact factor");

  mod.def(
      "psd_scan",
      [](const std::string& family, int dim, int order,
         std::optional<double> alpha, int samples, std::uint64_t seed, int grid) {
        return json_to_py(motensor::oracle::to_json(motensor::oracle::psd_scan(
            dense_of(family, dim, order, alpha), samples, seed, grid)));
      },
      py::arg("family"), py::arg("dim"), py::arg("order"),
      py::arg("alpha") = std::nullopt, py::arg("samples") = 4096,
      py::arg("seed") = 42, py::arg("grid") = 256,
      "Search the unit sphere for negative values of T x^m");

  mod.def(
      "h_eigen_scan_2d",
      [](const std::string& family, int order, std::optional<double> alpha,
         int grid_size) {
        return json_to_py(motensor::oracle::to_json(motensor::oracle::h_eigen_scan_2d(
            dense_of(family, 2, order, alpha), grid_size)));
      },
      py::arg("family"), py::arg("order"), py::arg("alpha") = std::nullopt,
      py::arg("grid_size") = 4096,
      "All H-eigenpairs of a dim-2 member by sign-change scanning");

  mod.def(
      "verify",
      [](int dim, int order, std::uint64_t seed) {
        motensor::VerifyOptions opts;
        opts.dim = dim;
        opts.order = order;
        opts.seed = seed;
        return json_to_py(motensor::to_json(motensor::run_verification(opts)));
      },
      py::arg("dim") = 4, py::arg("order") = 4, py::arg("seed") = 42,
      "Cross-check structural identities on exact arithmetic paths");
}
