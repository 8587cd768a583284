#include <doctest.h>

#include <sstream>

#include "rsgd/verify.hpp"

using namespace rsgd;

namespace {

const CheckRow* find(const VerifyReport& r, const std::string& name) {
  for (const auto& row : r.rows)
    if (row.name == name) return &row;
  return nullptr;
}

}  // namespace

TEST_CASE("default budget: every row passes") {
  const VerifyReport report = verify_all(VerifyBudget{});
  for (const auto& row : report.rows) {
    INFO(row.name << ": " << row.detail);
    CHECK(row.status == CheckStatus::Pass);
  }
  CHECK(report.rows.size() == 10);
  CHECK(report.overall() == CheckStatus::Pass);
  CHECK(exit_code(report) == 0);
}

TEST_CASE("zero budget: Monte Carlo rows are skipped with a distinct exit code") {
  VerifyBudget b;
  b.lemma_trials = 0;
  b.draws = 0;
  const VerifyReport report = verify_all(b);
  CHECK(find(report, "lemma_farenough")->status == CheckStatus::Skipped);
  CHECK(find(report, "zero_mean_cauchy")->status == CheckStatus::Skipped);
  CHECK(find(report, "second_moment_r1")->status == CheckStatus::Skipped);
  CHECK(find(report, "second_moment_r_scaling")->status == CheckStatus::Skipped);
  CHECK(find(report, "medoid_tie_rate")->status == CheckStatus::Skipped);
  CHECK(find(report, "closed_form_dual")->status == CheckStatus::Pass);
  CHECK(report.overall() == CheckStatus::Skipped);
  CHECK(exit_code(report) == 3);
  CHECK(exit_code(report) != 0);
  CHECK(exit_code(report) != 1);
}

TEST_CASE("shrinking B makes the second-moment rows fail") {
  VerifyBudget b;
  b.lemma_trials = 0;
  b.draws = 5000;
  b.bound_scale = 0.5;
  // B is loose by about 10^7 for this noise, so halving it is not enough.
  CHECK(find(verify_all(b), "second_moment_r1")->status == CheckStatus::Pass);
  b.bound_scale = 1e-9;
  const VerifyReport report = verify_all(b);
  CHECK(find(report, "second_moment_r1")->status == CheckStatus::Fail);
  CHECK(find(report, "second_moment_r16")->status == CheckStatus::Fail);
  CHECK(report.overall() == CheckStatus::Fail);
  CHECK(exit_code(report) == 1);
}

TEST_CASE("closed forms agree with their twins on random tuples") {
  const auto errors = closed_form_disagreement(100, 123);
  CHECK(errors.size() == 8);
  for (const auto& e : errors) {
    INFO(e.name);
    CHECK(e.tuples == 100);
    CHECK(e.max_relative_error <= 1e-12);
  }
  CHECK(relative_error(0.0, 0.0) == 0.0);
  CHECK(relative_error(1.0, 1.0 + 1e-12) == doctest::Approx(1e-12).epsilon(1e-3));
}

TEST_CASE("report printing") {
  VerifyReport r;
  r.rows.push_back({"alpha", CheckStatus::Pass, "fine", 0.5});
  r.rows.push_back({"beta", CheckStatus::Skipped, "none", 0.0});
  std::ostringstream out;
  print_report(out, r);
  const std::string text = out.str();
  CHECK(text.find("alpha  PASS") != std::string::npos);
  CHECK(text.find("beta   SKIP") != std::string::npos);
  CHECK(text.find("overall: SKIP") != std::string::npos);
  CHECK(to_string(CheckStatus::Fail) == "FAIL");
}
