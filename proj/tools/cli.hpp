#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gridhtm::cli {

/// Runs the command line; returns the process exit status.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gridhtm::cli
