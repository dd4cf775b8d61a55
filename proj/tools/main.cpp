#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "motensor/family.hpp"
#include "motensor/heigen.hpp"
#include "motensor/oracle.hpp"
#include "motensor/supmo.hpp"
#include "motensor/tensor.hpp"
#include "motensor/verify.hpp"

namespace {

using motensor::Json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitEstimator = 3;
constexpr int kExitVerification = 4;
constexpr int kExitBudget = 5;

std::size_t budget_from_env() {
  const char* env = std::getenv("MOTENSOR_BUDGET");
  if (env == nullptr || *env == '\0') return motensor::kDefaultEntryBudget;
  try {
    std::size_t pos = 0;
    std::string s(env);
    unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size() || v == 0) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw motensor::InvalidInput("MOTENSOR_BUDGET must be a positive integer");
  }
}

void write_output(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw motensor::InvalidInput("cannot open output file: " + out_path);
  f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// "a" -> [a, a]; "a:b" -> [a, b].
std::pair<int, int> parse_dims(const std::string& dims) {
  try {
    std::size_t colon = dims.find(':');
    if (colon == std::string::npos) {
      int v = std::stoi(dims);
      return {v, v};
    }
    int a = std::stoi(dims.substr(0, colon));
    int b = std::stoi(dims.substr(colon + 1));
    return {a, b};
  } catch (const std::exception&) {
    throw motensor::InvalidInput("--dims expects N or A:B, got: " + dims);
  }
}

motensor::FamilySpec make_spec(const std::string& family, int dim, int order,
                               std::optional<double> alpha) {
  motensor::FamilyKind kind = motensor::family_kind_from_string(family);
  if (kind == motensor::FamilyKind::MO) {
    if (!alpha) throw motensor::InvalidInput("family mo requires --alpha");
    return motensor::FamilySpec::mo(dim, order, *alpha);
  }
  if (alpha) throw motensor::InvalidInput("--alpha only applies to family mo");
  if (kind == motensor::FamilyKind::MolerMatrix) {
    if (order != 2) {
      throw motensor::InvalidInput("family moler is order 2; drop --order or pass 2");
    }
    return motensor::FamilySpec::moler_matrix(dim);
  }
  switch (kind) {
    case motensor::FamilyKind::M: return motensor::FamilySpec::m_tensor(dim, order);
    case motensor::FamilyKind::N: return motensor::FamilySpec::n_tensor(dim, order);
    case motensor::FamilyKind::EssentialMO:
      return motensor::FamilySpec::essential_mo(dim, order);
    default: break;
  }
  throw motensor::InvalidInput("unknown family: " + family);
}

std::vector<int> doubling_schedule(int max_n) {
  std::vector<int> sched;
  for (int n = 2; n <= max_n; n *= 2) sched.push_back(n);
  if (sched.empty()) throw motensor::InvalidInput("--max-n must be at least 2");
  return sched;
}

struct CommonOut {
  std::string out_path;
  std::string format = "json";
};

void add_output_options(CLI::App* sc, CommonOut& out) {
  sc->add_option("--out", out.out_path, "Write output to this file instead of stdout");
  sc->add_option("--format", out.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
}

int run_alpha_star(int order, double eps, double inner_tol, int max_n,
                   bool literal, const CommonOut& out) {
  motensor::AlphaStarOptions opts;
  opts.epsilon = eps;
  opts.inner_tol = inner_tol;
  opts.n_schedule = doubling_schedule(max_n);
  opts.literal_update = literal;
  motensor::BetaSolveTrace trace = motensor::alpha_star(order, opts);
  if (out.format == "csv") {
    write_output(out.out_path, motensor::to_csv(trace));
  } else {
    write_output(out.out_path, dump(motensor::to_json(trace)));
  }
  return trace.converged ? kExitOk : kExitNotConverged;
}

int run_lambda_min(int order, const std::string& alpha_arg, const std::string& dims,
                   int starts, std::uint64_t seed, double eps, const CommonOut& out) {
  auto [n_from, n_to] = parse_dims(dims);
  double alpha = 0.0;
  std::optional<motensor::BetaSolveTrace> sup_trace;
  if (alpha_arg == "sup") {
    motensor::AlphaStarOptions opts;
    opts.epsilon = eps;
    sup_trace = motensor::alpha_star(order, opts);
    alpha = sup_trace->alpha_star;
  } else {
    try {
      std::size_t pos = 0;
      alpha = std::stod(alpha_arg, &pos);
      if (pos != alpha_arg.size()) throw std::invalid_argument(alpha_arg);
    } catch (const std::exception&) {
      throw motensor::InvalidInput("--alpha expects a real number or 'sup'");
    }
  }

  motensor::CurveReport report =
      motensor::lambda_min_curve(order, alpha, n_from, n_to, starts, seed);

  if (out.format == "csv") {
    write_output(out.out_path, motensor::to_csv(report));
  } else {
    Json j = motensor::to_json(report);
    if (sup_trace) j["alpha_star_trace"] = motensor::to_json(*sup_trace);
    write_output(out.out_path, dump(j));
  }
  if (report.failed_at) return kExitEstimator;
  if (sup_trace && !sup_trace->converged) return kExitNotConverged;
  return kExitOk;
}

int run_verify(int dims, int order, std::uint64_t seed, bool inject,
               const CommonOut& out) {
  motensor::VerifyOptions opts;
  opts.dim = dims;
  opts.order = order;
  opts.seed = seed;
  opts.inject_fault = inject;
  motensor::VerifyReport report = motensor::run_verification(opts);
  if (out.format == "csv") {
    throw motensor::InvalidInput("verify only supports --format json");
  }
  write_output(out.out_path, dump(motensor::to_json(report)));
  return report.all_passed() ? kExitOk : kExitVerification;
}

int run_materialize(const motensor::FamilySpec& spec, const CommonOut& out) {
  std::size_t budget = budget_from_env();
  motensor::DenseSymmetricTensor dense =
      spec.kind == motensor::FamilyKind::MolerMatrix
          ? motensor::moler_matrix(spec.dim)
          : motensor::materialize(motensor::rank_one_form(spec), budget);
  if (out.format == "csv") {
    throw motensor::InvalidInput("materialize only supports --format json");
  }
  Json j;
  j["family"] = motensor::to_json(spec);
  j["tensor"] = motensor::to_json(dense);
  write_output(out.out_path, dump(j));
  return kExitOk;
}

int run_eval(const motensor::FamilySpec& spec, const std::string& x_arg,
             const CommonOut& out) {
  std::vector<double> xs;
  std::string token;
  std::stringstream ss(x_arg);
  while (std::getline(ss, token, ',')) {
    try {
      std::size_t pos = 0;
      xs.push_back(std::stod(token, &pos));
      if (pos != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw motensor::InvalidInput("--x expects comma-separated reals");
    }
  }
  if (static_cast<int>(xs.size()) != spec.dim) {
    throw motensor::InvalidInput("--x length must equal --dims");
  }
  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(xs.data(), xs.size());
  motensor::RankOneSum tensor = motensor::rank_one_form(spec);
  double value = motensor::eval_poly(tensor, x);
  Eigen::VectorXd grad = motensor::eval_grad(tensor, x);
  if (out.format == "csv") {
    throw motensor::InvalidInput("eval only supports --format json");
  }
  Json j;
  j["family"] = motensor::to_json(spec);
  Json xj = Json::array();
  for (double v : xs) xj.push_back(v);
  j["x"] = std::move(xj);
  j["value"] = value;
  Json gj = Json::array();
  for (Eigen::Index i = 0; i < grad.size(); ++i) gj.push_back(grad[i]);
  j["gradient"] = std::move(gj);
  write_output(out.out_path, dump(j));
  return kExitOk;
}

int run_psd_scan(const motensor::FamilySpec& spec, int samples, std::uint64_t seed,
                 int grid, const CommonOut& out) {
  std::size_t budget = budget_from_env();
  motensor::DenseSymmetricTensor dense =
      spec.kind == motensor::FamilyKind::MolerMatrix
          ? motensor::moler_matrix(spec.dim)
          : motensor::materialize(motensor::rank_one_form(spec), budget);
  motensor::oracle::PsdScan scan = motensor::oracle::psd_scan(dense, samples, seed, grid);
  if (out.format == "csv") {
    throw motensor::InvalidInput("psd-scan only supports --format json");
  }
  Json j;
  j["family"] = motensor::to_json(spec);
  j["scan"] = motensor::oracle::to_json(scan);
  write_output(out.out_path, dump(j));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured symmetric tensor family: construction, the critical "
               "shift alpha*(m), and smallest H-eigenvalue estimation"};
  app.require_subcommand(1);

  int exit_code = kExitOk;

  // alpha-star
  auto* sc_alpha = app.add_subcommand(
      "alpha-star", "Compute the critical shift alpha*(m) by the doubling-n "
                    "fixed-point iteration");
  int as_order = 4;
  double as_eps = 1e-4;
  double as_inner_tol = 1e-10;
  int as_max_n = 512;
  bool as_literal = false;
  CommonOut as_out;
  sc_alpha->add_option("--order", as_order, "Tensor order m (even)")->required();
  sc_alpha->add_option("--eps", as_eps, "Outer tolerance (default 1e-4)");
  sc_alpha->add_option("--inner-tol", as_inner_tol,
                       "Inner Newton gradient tolerance (default 1e-10)");
  sc_alpha->add_option("--max-n", as_max_n, "Cap for the doubling n schedule");
  sc_alpha->add_flag("--literal-update", as_literal,
                     "Use the halving/averaging beta update instead of bisection");
  add_output_options(sc_alpha, as_out);
  sc_alpha->callback([&]() {
    exit_code = run_alpha_star(as_order, as_eps, as_inner_tol, as_max_n, as_literal,
                               as_out);
  });

  // lambda-min
  auto* sc_lm = app.add_subcommand(
      "lambda-min", "Estimate the smallest H-eigenvalue of mo(n, m, alpha) over a "
                    "range of n");
  int lm_order = 4;
  std::string lm_alpha = "sup";
  std::string lm_dims = "2:8";
  int lm_starts = 64;
  std::uint64_t lm_seed = 42;
  double lm_eps = 1e-4;
  CommonOut lm_out;
  sc_lm->add_option("--order", lm_order, "Tensor order m (even)")->required();
  sc_lm->add_option("--alpha", lm_alpha, "Shift alpha, or 'sup' for alpha*(m)");
  sc_lm->add_option("--dims", lm_dims, "Dimension N or range A:B")->required();
  sc_lm->add_option("--starts", lm_starts, "Random starts per dimension");
  sc_lm->add_option("--seed", lm_seed, "Seed for the multistart generator");
  sc_lm->add_option("--eps", lm_eps, "Tolerance for the 'sup' computation");
  add_output_options(sc_lm, lm_out);
  sc_lm->callback([&]() {
    exit_code =
        run_lambda_min(lm_order, lm_alpha, lm_dims, lm_starts, lm_seed, lm_eps, lm_out);
  });

  // verify
  auto* sc_verify = app.add_subcommand(
      "verify", "Cross-check the structural identities on exact arithmetic paths");
  int v_dims = 4;
  int v_order = 4;
  std::uint64_t v_seed = 42;
  bool v_inject = false;
  CommonOut v_out;
  sc_verify->add_option("--dims", v_dims, "Extra certificate shape: dimension");
  sc_verify->add_option("--order", v_order, "Extra certificate shape: order");
  sc_verify->add_option("--seed", v_seed, "Seed for randomized identity checks");
  sc_verify
      ->add_flag("--inject-fault", v_inject,
                 "Add one failing check (exercises the failure exit code)")
      ->group("");  // hidden
  add_output_options(sc_verify, v_out);
  sc_verify->callback(
      [&]() { exit_code = run_verify(v_dims, v_order, v_seed, v_inject, v_out); });

  // materialize / eval / psd-scan share family selection flags.
  struct FamilyArgs {
    std::string family;
    int dims = 2;
    int order = 2;
    double alpha = 0.0;
    bool alpha_set = false;
  };
  auto add_family_options = [](CLI::App* sc, FamilyArgs& fa) {
    sc->add_option("--family", fa.family, "moler | m | n | mo | essential")
        ->required()
        ->check(CLI::IsMember({"moler", "m", "n", "mo", "essential"}));
    sc->add_option("--dims", fa.dims, "Dimension n")->required();
    sc->add_option("--order", fa.order, "Order m (moler fixes it to 2)");
    sc->add_option("--alpha", fa.alpha, "Shift alpha (family mo only)")
        ->each([&fa](const std::string&) { fa.alpha_set = true; });
  };
  auto spec_of = [](const FamilyArgs& fa) {
    return make_spec(fa.family, fa.dims,
                     fa.family == "moler" ? 2 : fa.order,
                     fa.alpha_set ? std::optional<double>(fa.alpha) : std::nullopt);
  };

  auto* sc_mat = app.add_subcommand("materialize",
                                    "Write all distinct entries of a family member");
  FamilyArgs mat_args;
  CommonOut mat_out;
  add_family_options(sc_mat, mat_args);
  add_output_options(sc_mat, mat_out);
  sc_mat->callback([&]() { exit_code = run_materialize(spec_of(mat_args), mat_out); });

  auto* sc_eval = app.add_subcommand(
      "eval", "Evaluate T x^m and T x^{m-1} through the rank-one structure");
  FamilyArgs eval_args;
  std::string eval_x;
  CommonOut eval_out;
  add_family_options(sc_eval, eval_args);
  sc_eval->add_option("--x", eval_x, "Comma-separated point")->required();
  add_output_options(sc_eval, eval_out);
  sc_eval->callback(
      [&]() { exit_code = run_eval(spec_of(eval_args), eval_x, eval_out); });

  auto* sc_psd = app.add_subcommand(
      "psd-scan", "Search the unit sphere for negative values of T x^m");
  FamilyArgs psd_args;
  int psd_samples = 4096;
  std::uint64_t psd_seed = 42;
  int psd_grid = 256;
  CommonOut psd_out;
  add_family_options(sc_psd, psd_args);
  sc_psd->add_option("--samples", psd_samples, "Random directions to test");
  sc_psd->add_option("--seed", psd_seed, "Seed for the random directions");
  sc_psd->add_option("--grid", psd_grid, "Angular grid resolution (dims <= 3)");
  add_output_options(sc_psd, psd_out);
  sc_psd->callback([&]() {
    exit_code = run_psd_scan(spec_of(psd_args), psd_samples, psd_seed, psd_grid, psd_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const motensor::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const motensor::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const motensor::EstimateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEstimator;
  } catch (const motensor::ConvergenceFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEstimator;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return exit_code;
}
