#pragma once

#include <iosfwd>
#include <string>

namespace dualgrad {

/// Runs the built-in oracle checks (adjoint identities, DST roundtrip,
/// Mittag-Leffler identities, Landweber equivalence, variance statistics,
/// stopping-rule constants), printing one pass/fail line per check whose name
/// contains `filter`. Returns true iff every executed check passed.
/// `inject_fault` adds a deliberately failing check (negative-path hook).
bool run_selftest(std::ostream& os, const std::string& filter = "",
                  bool inject_fault = false);

}  // namespace dualgrad
