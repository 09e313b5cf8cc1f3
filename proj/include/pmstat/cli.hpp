#pragma once

// Command-line front end. Exit codes: 0 success, 1 a check failed or the
// computation raised an error (recorded in the report), 2 usage error.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace pmstat {

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Structural check of a report document; returns the problems found.
std::vector<std::string> validate_report(const nlohmann::json& report);

}  // namespace pmstat
