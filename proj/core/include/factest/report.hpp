#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "factest/bootstrap_test.hpp"
#include "factest/simulation.hpp"

namespace factest {

// Machine-readable reports carry no timing so repeated runs are
// byte-identical.
nlohmann::json to_json(const TestResult& result);
nlohmann::json to_json(const PValueResult& result);

std::string format_summary(const TestResult& result);
std::string format_summary(const PValueResult& result);

/// Columns: design,T,p,m,alpha,reps,reject_rate,degenerate_count,seconds.
/// With include_timing = false the seconds column is written as 0.
void write_rejection_csv(const RejectionTable& table, std::ostream& out, bool include_timing = true);

/// Layout follows the usual rejection-probability table: one line per m,
/// one column per alpha.
std::string format_rejection_table(const RejectionTable& table, bool include_timing = true);

}  // namespace factest
