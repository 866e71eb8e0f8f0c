#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace swsim::cli {

// Exit codes: 0 success, 1 validation or usage error, 2 runtime failure.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace swsim::cli
