#pragma once

// Oracle verification of a scenario: the state machine and the matrix
// products are run side by side over one trace, and the bounds of the
// matrix form are checked along the way.

#include <optional>
#include <string>
#include <vector>

#include "pushsum/harness.hpp"

namespace pushsum {

struct CheckResult {
  explicit CheckResult(std::string check_name = {}) : name(std::move(check_name)) {}

  std::string name;
  bool passed = true;
  std::string detail;                     // first failure, if any
  std::optional<long long> first_failure;  // iteration of the first failure
  long long checked = 0;                  // number of instances checked

  void fail(long long iteration, std::string what);
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  const CheckResult* find(const std::string& name) const;
  // One line per check.
  std::string text() const;
};

struct VerifyOptions {
  // Fault injection: swap the first two buffer columns of every M^k so the
  // oracle routes buffer mass to the wrong link.
  bool misindex_buffers = false;
};

inline constexpr int kVerifyMaxNodes = 32;

// Robust: oracle equivalence of [x; u], [y; v] against M^k products, M^k
// column stochasticity and entry floor, window positivity, y/v bounds,
// P^k row sums and entry floor, P^k mapping of ratios, buffer identities
// and the envelope.
// Push-sum: W^k equivalence, column stochasticity, block positivity,
// weight bounds and the estimate hull.
// Ordinary: row stochasticity, block positivity and the hull.
// Throws ConfigError for invalid configs or n > kVerifyMaxNodes.
VerificationReport verify_scenario(const ScenarioConfig& cfg, const VerifyOptions& options = {});

}  // namespace pushsum
