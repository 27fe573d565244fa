#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crowdest::cli {

/// Entry point of the `crowdest` tool. Returns the process exit status;
/// diagnostics go to err, replay rows and help text to out.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Same, with arguments given without the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crowdest::cli
