#include <doctest.h>

#include <set>
#include <string>

#include "motensor/verify.hpp"

using namespace motensor;

TEST_CASE("default verification passes every check") {
  VerifyReport report = run_verification();
  CHECK(report.all_passed());
  CHECK(report.checks.size() >= 5);

  std::set<std::string> names;
  for (const VerifyCheck& c : report.checks) {
    CHECK(c.passed);
    CHECK(!c.name.empty());
    names.insert(c.name);
  }
  CHECK(names.size() == report.checks.size());
}

TEST_CASE("exact integer paths report zero deviation") {
  VerifyReport report = run_verification();
  bool saw_exact = false;
  for (const VerifyCheck& c : report.checks) {
    if (c.name.find("certificate") != std::string::npos ||
        c.name.find("factorization") != std::string::npos) {
      CHECK(c.max_deviation == 0.0);
      saw_exact = true;
    }
  }
  CHECK(saw_exact);
}

TEST_CASE("verification handles other shapes") {
  VerifyOptions opts;
  opts.dim = 3;
  opts.order = 6;
  opts.seed = 9;
  CHECK(run_verification(opts).all_passed());
}

TEST_CASE("an injected fault is caught and isolated") {
  VerifyOptions opts;
  opts.inject_fault = true;
  VerifyReport report = run_verification(opts);
  CHECK(!report.all_passed());
  int failing = 0;
  for (const VerifyCheck& c : report.checks) {
    if (!c.passed) {
      ++failing;
      CHECK(c.name.find("fault") != std::string::npos);
    }
  }
  CHECK(failing == 1);
}

TEST_CASE("verification report serializes deterministically") {
  Json a = to_json(run_verification());
  Json b = to_json(run_verification());
  CHECK(a.dump() == b.dump());
  CHECK(a.contains("all_passed"));
  CHECK(a["all_passed"] == true);
  REQUIRE(a.contains("checks"));
  for (const auto& c : a["checks"]) {
    CHECK(c.contains("name"));
    CHECK(c.contains("passed"));
    CHECK(c.contains("max_deviation"));
    CHECK(c.contains("detail"));
  }
}
