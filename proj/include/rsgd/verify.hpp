#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rsgd {

struct VerifyBudget {
  std::size_t lemma_trials = 10'000;  // per (M, d, gamma) cell
  std::size_t draws = 100'000;        // Monte Carlo medoid draws per check
  std::size_t tuples = 100;           // random tuples per closed-form check
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  double bound_scale = 1.0;  // multiplies B in the second-moment rows
};

enum class CheckStatus { Pass, Fail, Skipped };

std::string_view to_string(CheckStatus status);

struct CheckRow {
  std::string name;
  CheckStatus status = CheckStatus::Skipped;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<CheckRow> rows;

  /// Fail if any row failed, else Skipped if any row was skipped, else Pass.
  CheckStatus overall() const;
};

/// Process exit code for a report: 0 pass, 1 failure, 3 checks skipped.
int exit_code(const VerifyReport& report);

struct ClosedFormError {
  std::string name;
  std::size_t tuples = 0;
  double max_relative_error = 0.0;
};

/// Evaluates every closed-form bound and its independently coded twin on
/// random in-domain tuples and reports the worst relative disagreement.
std::vector<ClosedFormError> closed_form_disagreement(std::size_t tuples, std::uint64_t seed);

/// Relative disagreement |a - b| / max(|a|, |b|), 0 when both are 0.
double relative_error(double a, double b);

/// Runs the lemma sweep, the zero-mean and shifted-noise checks, the second
/// moment and its R-scaling, the closed-form dual checks and the tie rate.
VerifyReport verify_all(const VerifyBudget& budget);

void print_report(std::ostream& out, const VerifyReport& report);

}  // namespace rsgd
